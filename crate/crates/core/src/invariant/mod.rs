//! The p-invariant: checkerboard colorings, oriented decker circles, the set
//! X, and the homology class of the mates of X.

mod coloring;
mod frame;

use std::collections::BTreeSet;

use serde::Serialize;

pub use coloring::{checkerboard, wall_edges, Coloring};
pub use frame::{local_model_sign, FrameSignTable};

use crate::decker::{CircleRole, DeckerSet};
use crate::homology::{divisibility, Chain, Homology, HomologyError};
use crate::surface::{FaceId, Step, SurfaceComplex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("expected {expected} polarity bits, found {found}")]
    PolarityLength { expected: usize, found: usize },
    #[error("polarity bits are 0 or 1, found {0}")]
    PolarityBit(u8),
    #[error("no checkerboard coloring of component `{component}` (conflict at face {face})")]
    Checkerboard { component: String, face: FaceId },
    #[error("component `{0}` has faces unreachable from its anchor")]
    Unanchored(String),
    #[error("decker circle {circle} receives inconsistent orientations")]
    Orientation { circle: usize },
    #[error("decker circle {circle} carries no orientation data")]
    Unoriented { circle: usize },
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("based surfaces differ: genus multisets {0:?} and {1:?}")]
    SurfaceMismatch(Vec<i64>, Vec<i64>),
}

/// A decker circle with its orientation as a closed walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientedCircle {
    pub circle: usize,
    /// Oriented steps, position by position with the circle's walk, so a
    /// reversed stretch is read back to front. For branch arcs each stretch
    /// between branch points is oriented on its own.
    pub steps: Vec<Step>,
}

/// Orientation of a decker edge relative to its direction, when the edge
/// itself carries one.
fn edge_orientation(cx: &SurfaceComplex, step: Step, table: &FrameSignTable) -> Option<i8> {
    let d = cx.edge(step.edge).decker.as_ref()?;
    if let Some(f) = d.frame {
        return Some(table.get(f.sign, f.forward, d.role));
    }
    d.seed.map(|s| s * table.ambient)
}

/// Orients every decker circle from the frame data on its edges.
///
/// Along a circle without branch points all oriented edges must agree. A
/// branch arc is split at its branch points and each stretch is checked on
/// its own: the sheets exchange roles there, so the orientation turns.
pub fn orient_decker_circles(
    cx: &SurfaceComplex,
    decker: &DeckerSet,
    table: &FrameSignTable,
) -> Result<Vec<OrientedCircle>, InvariantError> {
    let mut out = Vec::new();
    for c in &decker.circles {
        let n = c.walk.len();
        // Stretches start at branch vertices (or at 0 for ordinary circles).
        let cuts: Vec<usize> = (0..n)
            .filter(|&k| cx.vertices[&cx.step_start(c.walk[k])].branch)
            .collect();
        let cuts = if cuts.is_empty() { vec![0] } else { cuts };
        let mut steps = c.walk.clone();
        let mut any = false;
        for (ci, &start) in cuts.iter().enumerate() {
            let end = if ci + 1 < cuts.len() { cuts[ci + 1] } else { cuts[0] + n };
            let idx: Vec<usize> = (start..end).map(|k| k % n).collect();
            let mut dir: Option<i8> = None;
            for &k in &idx {
                if let Some(o) = edge_orientation(cx, c.walk[k], table) {
                    let along = o * c.walk[k].sign;
                    match dir {
                        None => dir = Some(along),
                        Some(d) if d != along => {
                            return Err(InvariantError::Orientation { circle: c.id })
                        }
                        Some(_) => {}
                    }
                }
            }
            match dir {
                Some(-1) => {
                    for &k in &idx {
                        steps[k] = c.walk[k].rev();
                    }
                    any = true;
                }
                Some(_) => any = true,
                None if c.role == CircleRole::Mixed => {}
                None => return Err(InvariantError::Unoriented { circle: c.id }),
            }
        }
        if !any && c.role != CircleRole::Mixed {
            return Err(InvariantError::Unoriented { circle: c.id });
        }
        out.push(OrientedCircle {
            circle: c.id,
            steps,
        });
    }
    Ok(out)
}

/// X: the A_f circles colored 1 that lie on the upper sheet.
pub fn compute_x(coloring: &Coloring, decker: &DeckerSet) -> BTreeSet<usize> {
    decker
        .a_f()
        .into_iter()
        .filter(|c| coloring.circle_colors.get(c) == Some(&1))
        .filter(|c| decker.circles[*c].role == CircleRole::Upper)
        .collect()
}

/// Per-component value of the class at one polarity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentClass {
    pub label: String,
    pub genus: i64,
    pub coordinates: Vec<i64>,
    pub divisibility: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolarityClass {
    pub polarity: Vec<u8>,
    pub x: Vec<usize>,
    /// The A_f circles whose mate is in X.
    pub support: Vec<usize>,
    pub components: Vec<ComponentClass>,
}

impl PolarityClass {
    /// Sorted (genus, divisibility) pairs.
    pub fn key(&self) -> Vec<(i64, i64)> {
        let mut k: Vec<_> = self
            .components
            .iter()
            .map(|c| (c.genus, c.divisibility))
            .collect();
        k.sort();
        k
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.divisibility == 0)
    }
}

/// Everything needed to evaluate the invariant on one complex.
pub struct Context<'a> {
    pub cx: &'a SurfaceComplex,
    pub decker: &'a DeckerSet,
    pub homology: Homology,
    pub oriented: Vec<OrientedCircle>,
}

impl<'a> Context<'a> {
    pub fn new(
        cx: &'a SurfaceComplex,
        decker: &'a DeckerSet,
        table: &FrameSignTable,
    ) -> Result<Context<'a>, InvariantError> {
        Ok(Context {
            cx,
            decker,
            homology: Homology::of(cx)?,
            oriented: orient_decker_circles(cx, decker, table)?,
        })
    }

    /// The cycle summing the oriented A_f circles whose mate lies in `x`.
    pub fn cycle(&self, x: &BTreeSet<usize>) -> (Vec<usize>, Chain) {
        let mut z = Chain::new();
        let mut support = Vec::new();
        for c in self.decker.a_f() {
            if x.contains(&self.decker.circles[c].mate) {
                support.push(c);
                for s in &self.oriented[c].steps {
                    *z.entry(s.edge).or_default() += i64::from(s.sign);
                }
            }
        }
        z.retain(|_, v| *v != 0);
        (support, z)
    }

    pub fn compute_invariant(&self, polarity: &[u8]) -> Result<PolarityClass, InvariantError> {
        let coloring = checkerboard(self.cx, self.decker, polarity)?;
        let x = compute_x(&coloring, self.decker);
        let (support, z) = self.cycle(&x);
        let classes = self.homology.classes(self.cx, &z)?;
        let components = classes
            .into_iter()
            .map(|(label, coordinates)| {
                let genus = self.homology.component(&label).map_or(0, |h| h.genus);
                ComponentClass {
                    divisibility: divisibility(&coordinates),
                    label,
                    genus,
                    coordinates,
                }
            })
            .collect();
        Ok(PolarityClass {
            polarity: polarity.to_vec(),
            x: x.into_iter().collect(),
            support,
            components,
        })
    }
}

/// Key compared across diagrams: the set over polarities of the sorted
/// (genus, divisibility) multiset.
pub type ComparisonKey = BTreeSet<Vec<(i64, i64)>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub genera: Vec<(String, i64)>,
    /// One entry per polarity, in binary counting order over components.
    pub classes: Vec<PolarityClass>,
    /// Index into `classes` of the canonical polarity (all ones).
    pub canonical: usize,
    pub key: ComparisonKey,
}

impl InvariantResult {
    pub fn canonical_class(&self) -> &PolarityClass {
        &self.classes[self.canonical]
    }

    pub fn class_for(&self, polarity: &[u8]) -> Option<&PolarityClass> {
        self.classes.iter().find(|c| c.polarity == polarity)
    }

    pub fn genus_multiset(&self) -> Vec<i64> {
        let mut g: Vec<i64> = self.genera.iter().map(|(_, g)| *g).collect();
        g.sort();
        g
    }
}

/// All polarity vectors for `k` components.
pub fn polarities(k: usize) -> Vec<Vec<u8>> {
    (0..1u64 << k)
        .map(|m| (0..k).map(|i| ((m >> (k - 1 - i)) & 1) as u8).collect())
        .collect()
}

pub fn invariant_result(
    cx: &SurfaceComplex,
    decker: &DeckerSet,
    table: &FrameSignTable,
) -> Result<InvariantResult, InvariantError> {
    let ctx = Context::new(cx, decker, table)?;
    let k = cx.components.len();
    let classes = polarities(k)
        .iter()
        .map(|p| ctx.compute_invariant(p))
        .collect::<Result<Vec<_>, _>>()?;
    let key = classes.iter().map(PolarityClass::key).collect();
    let genera = ctx
        .homology
        .components
        .iter()
        .map(|h| (h.label.clone(), h.genus))
        .collect();
    Ok(InvariantResult {
        name: cx.name.clone(),
        genera,
        canonical: classes.len() - 1,
        classes,
        key,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Distinguished,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Distinguished => "DISTINGUISHED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Distinguishes two diagrams of the same based surface when their keys
/// differ. Equal keys prove nothing.
pub fn compare(a: &InvariantResult, b: &InvariantResult) -> Result<Verdict, InvariantError> {
    let (ga, gb) = (a.genus_multiset(), b.genus_multiset());
    if ga != gb {
        return Err(InvariantError::SurfaceMismatch(ga, gb));
    }
    Ok(if a.key == b.key {
        Verdict::Inconclusive
    } else {
        Verdict::Distinguished
    })
}
