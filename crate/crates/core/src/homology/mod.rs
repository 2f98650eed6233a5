//! Integral first homology of the surface components.

mod chain;
mod matrix;

pub use chain::{boundary, divisibility, Chain, ComponentHomology, Homology};
pub use matrix::{gcd, smith_normal_form, IntMatrix, Smith};

use crate::surface::EdgeId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("component `{0}` has torsion in H1; the complex is not a closed orientable surface")]
    Torsion(String),
    #[error("component `{0}` has odd first Betti number {1}")]
    OddRank(String, usize),
    #[error("component `{0}` is not connected")]
    Disconnected(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("edge {0} is not on component `{1}`")]
    OffComponent(EdgeId, String),
    #[error("edge {0} is not in the complex")]
    UnknownEdge(EdgeId),
}
