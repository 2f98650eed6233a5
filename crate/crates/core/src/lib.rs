//! Double decker invariants of triple-point-free surface diagrams.

pub mod cli;
pub mod decker;
pub mod homology;
pub mod invariant;
pub mod movie;
pub mod moves;
pub mod surface;
