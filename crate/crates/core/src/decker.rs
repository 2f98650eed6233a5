//! Double decker curves on the surface complex.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::movie::Role;
use crate::surface::{EdgeId, Step, SurfaceComplex, VertexId};

/// Sheet a decker curve lies on. Curves through branch points run over both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleRole {
    Upper,
    Lower,
    Mixed,
}

impl From<Role> for CircleRole {
    fn from(r: Role) -> CircleRole {
        match r {
            Role::Upper => CircleRole::Upper,
            Role::Lower => CircleRole::Lower,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeckerCircle {
    pub id: usize,
    pub component: String,
    pub role: CircleRole,
    /// Closed walk along the circle, following edge directions where the
    /// walk agrees with them.
    pub walk: Vec<Step>,
    pub branch_points: usize,
    pub mate: usize,
}

impl DeckerCircle {
    pub fn is_branch_arc(&self) -> bool {
        self.branch_points > 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DeckerSet {
    pub circles: Vec<DeckerCircle>,
    #[serde(skip)]
    pub circle_of_edge: BTreeMap<EdgeId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeckerError {
    #[error("decker vertex {vertex} has {degree} decker edges")]
    Degree { vertex: VertexId, degree: usize },
    #[error("decker circle through {edge} mixes sheets without a branch point")]
    MixedRoles { edge: EdgeId },
    #[error("decker circle through {edge} has no mate")]
    NoMate { edge: EdgeId },
    #[error("mate relation is not an involution at circle through {edge}")]
    NotInvolution { edge: EdgeId },
}

impl DeckerSet {
    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Circles whose mate lies on a different surface component.
    pub fn a_f(&self) -> Vec<usize> {
        self.circles
            .iter()
            .filter(|c| self.circles[c.mate].component != c.component)
            .map(|c| c.id)
            .collect()
    }

    pub fn on_component<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a DeckerCircle> {
        self.circles.iter().filter(move |c| c.component == label)
    }
}

/// Groups the active decker edges into circles and pairs them with mates.
pub fn assemble_decker(cx: &SurfaceComplex) -> Result<DeckerSet, DeckerError> {
    let mut incident: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for (id, e, _) in cx.decker_edges() {
        incident.entry(e.tail).or_default().push(id);
        incident.entry(e.head).or_default().push(id);
    }
    for (v, es) in &incident {
        if es.len() != 2 {
            return Err(DeckerError::Degree {
                vertex: *v,
                degree: es.len(),
            });
        }
    }

    let mut set = DeckerSet::default();
    let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
    let edge_ids: Vec<EdgeId> = cx.decker_edges().map(|(id, _, _)| id).collect();
    for start in edge_ids {
        if seen.contains(&start) {
            continue;
        }
        let id = set.circles.len();
        let first = cx.edge(start);
        let mut walk = vec![Step::new(start, 1)];
        seen.insert(start);
        let origin = first.tail;
        let mut at = first.head;
        let mut prev = start;
        while at != origin {
            let next = *incident[&at]
                .iter()
                .find(|e| **e != prev || incident[&at][0] == incident[&at][1])
                .expect("degree two");
            let e = cx.edge(next);
            let sign = if e.tail == at { 1 } else { -1 };
            walk.push(Step::new(next, sign));
            seen.insert(next);
            at = if sign == 1 { e.head } else { e.tail };
            prev = next;
        }
        let branch_points = walk
            .iter()
            .filter(|s| cx.vertices[&cx.step_start(**s)].branch)
            .count();
        let roles: BTreeSet<Role> = walk
            .iter()
            .map(|s| cx.edge(s.edge).decker.as_ref().expect("decker").role)
            .collect();
        let role = if branch_points > 0 {
            CircleRole::Mixed
        } else if roles.len() == 1 {
            CircleRole::from(*roles.iter().next().expect("role"))
        } else {
            return Err(DeckerError::MixedRoles { edge: start });
        };
        for s in &walk {
            set.circle_of_edge.insert(s.edge, id);
        }
        set.circles.push(DeckerCircle {
            id,
            component: first.component.clone(),
            role,
            walk,
            branch_points,
            mate: usize::MAX,
        });
    }

    for k in 0..set.circles.len() {
        let c = &set.circles[k];
        if c.role == CircleRole::Mixed {
            set.circles[k].mate = k;
            continue;
        }
        let mut mates = BTreeSet::new();
        for s in &c.walk {
            if let Some(m) = cx.edge(s.edge).decker.as_ref().and_then(|d| d.mate) {
                if let Some(&mc) = set.circle_of_edge.get(&m) {
                    mates.insert(mc);
                }
            }
        }
        let edge = c.walk[0].edge;
        match mates.len() {
            0 => return Err(DeckerError::NoMate { edge }),
            1 => set.circles[k].mate = *mates.iter().next().expect("mate"),
            _ => return Err(DeckerError::NotInvolution { edge }),
        }
    }
    for c in &set.circles {
        let m = &set.circles[c.mate];
        let paired_roles = match (c.role, m.role) {
            (CircleRole::Mixed, _) => c.mate == c.id,
            (a, b) => a != b && b != CircleRole::Mixed,
        };
        if m.mate != c.id || !paired_roles {
            return Err(DeckerError::NotInvolution {
                edge: c.walk[0].edge,
            });
        }
    }
    Ok(set)
}
