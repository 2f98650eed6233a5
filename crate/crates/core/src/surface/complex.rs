use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::movie::{Role, Sign};

macro_rules! cell_id {
    ($name:ident, $prefix:literal) => {
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

cell_id!(VertexId, "v");
cell_id!(EdgeId, "e");
cell_id!(FaceId, "f");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub component: String,
    /// Marked branch point of a decker curve.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub branch: bool,
}

/// Frame data of a decker edge traced by a crossing through movie time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameKey {
    pub sign: Sign,
    /// True when the edge runs forward in movie time.
    pub forward: bool,
}

/// Annotation of an edge lying on the double decker set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckerTag {
    pub role: Role,
    /// Crossing (or move) the edge was traced from.
    pub lineage: String,
    /// Set on edges traced by a crossing; their orientation comes from the
    /// frame sign table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameKey>,
    /// Explicit orientation relative to the edge direction, for curves
    /// created without crossing data, under the positive ambient orientation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<i8>,
    /// The edge covering the same double-point segment on the other sheet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mate: Option<EdgeId>,
    /// Inactive tags are kept by saddle moves so they can be undone.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub component: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decker: Option<DeckerTag>,
}

impl Edge {
    pub fn active_decker(&self) -> Option<&DeckerTag> {
        self.decker.as_ref().filter(|d| d.active)
    }
}

/// One oriented step of a face boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: EdgeId,
    pub sign: i8,
}

impl Step {
    pub fn new(edge: EdgeId, sign: i8) -> Step {
        Step { edge, sign }
    }

    pub fn rev(self) -> Step {
        Step {
            edge: self.edge,
            sign: -self.sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub boundary: Vec<Step>,
    pub component: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub label: String,
    /// Cap disk of the component's first birth; its region carries the
    /// polarity bit of a checkerboard coloring.
    pub anchor: FaceId,
}

/// The based surface as an oriented 2-complex with decker annotations.
///
/// Face boundaries are closed walks; every edge occurs in exactly two face
/// boundary steps with opposite signs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceComplex {
    pub name: String,
    pub vertices: BTreeMap<VertexId, Vertex>,
    pub edges: BTreeMap<EdgeId, Edge>,
    pub faces: BTreeMap<FaceId, Face>,
    pub components: Vec<ComponentInfo>,
    next_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub label: String,
    pub genus: i64,
    pub euler: i64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl SurfaceComplex {
    pub fn new(name: impl Into<String>) -> SurfaceComplex {
        SurfaceComplex {
            name: name.into(),
            vertices: BTreeMap::new(),
            edges: BTreeMap::new(),
            faces: BTreeMap::new(),
            components: Vec::new(),
            next_id: 0,
        }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn add_vertex(&mut self, component: &str, branch: bool) -> VertexId {
        let id = VertexId(self.fresh());
        self.vertices.insert(
            id,
            Vertex {
                component: component.to_string(),
                branch,
            },
        );
        id
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId) -> EdgeId {
        let id = EdgeId(self.fresh());
        let component = self.vertices[&tail].component.clone();
        self.edges.insert(
            id,
            Edge {
                tail,
                head,
                component,
                decker: None,
            },
        );
        id
    }

    pub fn add_face(&mut self, boundary: Vec<Step>) -> FaceId {
        debug_assert!(self.is_closed_walk(&boundary), "face boundary is not closed");
        let id = FaceId(self.fresh());
        let component = self.edges[&boundary[0].edge].component.clone();
        self.faces.insert(
            id,
            Face {
                boundary,
                component,
            },
        );
        id
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[&e]
    }

    pub fn step_start(&self, s: Step) -> VertexId {
        let e = &self.edges[&s.edge];
        if s.sign > 0 {
            e.tail
        } else {
            e.head
        }
    }

    pub fn step_end(&self, s: Step) -> VertexId {
        let e = &self.edges[&s.edge];
        if s.sign > 0 {
            e.head
        } else {
            e.tail
        }
    }

    pub fn is_closed_walk(&self, steps: &[Step]) -> bool {
        if steps.is_empty() {
            return false;
        }
        (0..steps.len()).all(|i| {
            self.step_end(steps[i]) == self.step_start(steps[(i + 1) % steps.len()])
        })
    }

    /// Position in `f`'s boundary whose step starts at `v`.
    pub fn position_of(&self, f: FaceId, v: VertexId) -> Option<usize> {
        self.faces[&f]
            .boundary
            .iter()
            .position(|s| self.step_start(*s) == v)
    }

    /// Splits face `f` along `chord`, a walk of existing edges from the start
    /// vertex of step `i` to the start vertex of step `j`. `f` keeps the part
    /// running from step `j` round to step `i`; the new face gets the rest.
    pub fn split_face(&mut self, f: FaceId, i: usize, j: usize, chord: &[Step]) -> FaceId {
        let word = self.faces[&f].boundary.clone();
        let n = word.len();
        let cyc = |from: usize, to: usize| -> Vec<Step> {
            let mut out = Vec::new();
            let mut k = from;
            while k != to {
                out.push(word[k]);
                k = (k + 1) % n;
            }
            out
        };
        let mut inner = cyc(i, j);
        inner.extend(chord.iter().rev().map(|s| s.rev()));
        let mut outer = if i == j { word.clone() } else { cyc(j, i) };
        if i == j {
            outer.rotate_left(i);
        }
        outer.extend_from_slice(chord);
        debug_assert!(self.is_closed_walk(&inner) && self.is_closed_walk(&outer));
        self.faces.get_mut(&f).expect("face exists").boundary = outer;
        self.add_face(inner)
    }

    /// Faces whose boundary uses `e`, with the positions of those steps.
    pub fn faces_of_edge(&self, e: EdgeId) -> Vec<(FaceId, usize)> {
        let mut out = Vec::new();
        for (fid, face) in &self.faces {
            for (k, s) in face.boundary.iter().enumerate() {
                if s.edge == e {
                    out.push((*fid, k));
                }
            }
        }
        out
    }

    /// Deletes edge `e` and fuses the two distinct faces on either side into
    /// one, which keeps the smaller id.
    pub fn merge_across(&mut self, e: EdgeId) -> Option<FaceId> {
        let uses = self.faces_of_edge(e);
        let [(fa, ia), (fb, ib)] = uses.as_slice() else {
            return None;
        };
        if fa == fb {
            return None;
        }
        let (keep, gone) = if fa < fb { (*fa, *fb) } else { (*fb, *fa) };
        let (ik, ig) = if fa < fb { (*ia, *ib) } else { (*ib, *ia) };
        let mut wk = self.faces[&keep].boundary.clone();
        let mut wg = self.faces[&gone].boundary.clone();
        wk.rotate_left(ik);
        wg.rotate_left(ig);
        let mut merged: Vec<Step> = wg[1..].to_vec();
        merged.extend_from_slice(&wk[1..]);
        self.faces.remove(&gone);
        self.edges.remove(&e);
        if merged.is_empty() {
            // Two caps glued along a loop: nothing left to bound.
            self.faces.remove(&keep);
            return None;
        }
        self.faces.get_mut(&keep).expect("kept").boundary = merged;
        Some(keep)
    }

    /// Inserts a new edge into face `f` at step position `i`, running from the
    /// start vertex of that step to a fresh vertex. Returns (edge, vertex).
    pub fn add_spur(&mut self, f: FaceId, i: usize, branch: bool) -> (EdgeId, VertexId) {
        let start = self.step_start(self.faces[&f].boundary[i]);
        let comp = self.vertices[&start].component.clone();
        let v = self.add_vertex(&comp, branch);
        let e = self.add_edge(start, v);
        let word = &mut self.faces.get_mut(&f).expect("face").boundary;
        word.splice(i..i, [Step::new(e, 1), Step::new(e, -1)]);
        (e, v)
    }

    /// Removes a dangling edge that occurs as `e, -e` in a single face, along
    /// with its free end vertex.
    pub fn remove_spur(&mut self, e: EdgeId) -> bool {
        let uses = self.faces_of_edge(e);
        let [(fa, ia), (fb, ib)] = uses.as_slice() else {
            return false;
        };
        if fa != fb {
            return false;
        }
        let n = self.faces[fa].boundary.len();
        let (first, second) = if (ia + 1) % n == *ib {
            (*ia, *ib)
        } else if (ib + 1) % n == *ia {
            (*ib, *ia)
        } else {
            return false;
        };
        let free = self.step_end(self.faces[fa].boundary[first]);
        if self.edges.values().filter(|x| x.tail == free || x.head == free).count() != 1 {
            return false;
        }
        let word = &mut self.faces.get_mut(fa).expect("face").boundary;
        let (lo, hi) = if first < second {
            (first, second)
        } else {
            (second, first)
        };
        word.remove(hi);
        word.remove(lo);
        self.edges.remove(&e);
        self.vertices.remove(&free);
        true
    }

    /// Structural check for complexes read from outside: every reference
    /// resolves, faces are closed walks, each edge bounds two oppositely
    /// oriented corners, every vertex is a manifold point and mates pair up.
    pub fn check(&self) -> Result<(), String> {
        let max_id = self
            .vertices
            .keys()
            .map(|v| v.0)
            .chain(self.edges.keys().map(|e| e.0))
            .chain(self.faces.keys().map(|f| f.0))
            .max();
        if max_id.is_some_and(|m| m >= self.next_id) {
            return Err(format!("id counter {} is not above every cell id", self.next_id));
        }
        let labels: BTreeSet<&str> = self.components.iter().map(|c| c.label.as_str()).collect();
        if labels.len() != self.components.len() {
            return Err("component labels repeat".into());
        }
        for (id, v) in &self.vertices {
            if !labels.contains(v.component.as_str()) {
                return Err(format!("{id} has unknown component `{}`", v.component));
            }
        }
        for (id, e) in &self.edges {
            for end in [e.tail, e.head] {
                match self.vertices.get(&end) {
                    None => return Err(format!("{id} references missing {end}")),
                    Some(v) if v.component != e.component => {
                        return Err(format!("{id} and {end} lie on different components"))
                    }
                    Some(_) => {}
                }
            }
            if let Some(m) = e.decker.as_ref().and_then(|d| d.mate) {
                let back = self.edges.get(&m).and_then(|me| me.decker.as_ref()).and_then(|d| d.mate);
                if back != Some(*id) {
                    return Err(format!("mate of {id} does not point back"));
                }
            }
        }
        for (id, f) in &self.faces {
            if let Some(s) = f.boundary.iter().find(|s| {
                (s.sign != 1 && s.sign != -1)
                    || self.edges.get(&s.edge).is_none_or(|e| e.component != f.component)
            }) {
                return Err(format!("{id} has a bad boundary step on {}", s.edge));
            }
            if !self.is_closed_walk(&f.boundary) {
                return Err(format!("boundary of {id} is not a closed walk"));
            }
        }
        for c in &self.components {
            if self.faces.get(&c.anchor).is_none_or(|f| f.component != c.label) {
                return Err(format!("anchor of `{}` is not one of its faces", c.label));
            }
        }
        if let Some(e) = self.orientation_defects().first() {
            return Err(format!("{e} does not bound two oppositely oriented corners"));
        }
        if let Some(v) = self.non_manifold_vertices().first() {
            return Err(format!("{v} is not a manifold point"));
        }
        Ok(())
    }

    pub fn component_of_label(&self, label: &str) -> Option<&ComponentInfo> {
        self.components.iter().find(|c| c.label == label)
    }

    /// Edge-use counts: each edge must occur exactly twice with opposite signs.
    pub fn orientation_defects(&self) -> Vec<EdgeId> {
        let mut uses: BTreeMap<EdgeId, Vec<i8>> = BTreeMap::new();
        for f in self.faces.values() {
            for s in &f.boundary {
                uses.entry(s.edge).or_default().push(s.sign);
            }
        }
        self.edges
            .keys()
            .filter(|e| match uses.get(e).map(Vec::as_slice) {
                Some([a, b]) => a + b != 0,
                _ => true,
            })
            .copied()
            .collect()
    }

    /// Vertices whose link (the corners of faces around them) is not a
    /// single circle.
    pub fn non_manifold_vertices(&self) -> Vec<VertexId> {
        // Corner graph: nodes are edge-ends at a vertex; each face corner joins
        // the incoming and outgoing edge-ends.
        type End = (EdgeId, bool);
        let mut adjacency: BTreeMap<VertexId, Vec<(End, End)>> = BTreeMap::new();
        for f in self.faces.values() {
            let n = f.boundary.len();
            for k in 0..n {
                let a = f.boundary[k];
                let b = f.boundary[(k + 1) % n];
                let v = self.step_end(a);
                // end of `a` at v, start of `b` at v; bool marks head-end.
                let a_end = (a.edge, a.sign > 0);
                let b_end = (b.edge, b.sign < 0);
                adjacency.entry(v).or_default().push((a_end, b_end));
            }
        }
        let mut bad = Vec::new();
        for v in self.vertices.keys() {
            let corners = adjacency.get(v).cloned().unwrap_or_default();
            let ends: BTreeSet<(EdgeId, bool)> =
                corners.iter().flat_map(|(a, b)| [*a, *b]).collect();
            let mut degree: BTreeMap<(EdgeId, bool), usize> = BTreeMap::new();
            for (a, b) in &corners {
                *degree.entry(*a).or_default() += 1;
                *degree.entry(*b).or_default() += 1;
            }
            let circle_like = !ends.is_empty() && degree.values().all(|d| *d == 2) && {
                // Connected?
                let start = *ends.iter().next().expect("nonempty");
                let mut seen = BTreeSet::from([start]);
                let mut stack = vec![start];
                while let Some(x) = stack.pop() {
                    for (a, b) in &corners {
                        for (p, q) in [(a, b), (b, a)] {
                            if *p == x && seen.insert(*q) {
                                stack.push(*q);
                            }
                        }
                    }
                }
                seen.len() == ends.len()
            };
            if !circle_like {
                bad.push(*v);
            }
        }
        bad
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Connected components of the underlying space, as vertex sets keyed by
    /// the smallest vertex.
    pub fn connected_vertex_sets(&self) -> Vec<BTreeSet<VertexId>> {
        let mut parent: BTreeMap<VertexId, VertexId> =
            self.vertices.keys().map(|v| (*v, *v)).collect();
        fn find(p: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
            let mut r = v;
            while p[&r] != r {
                r = p[&r];
            }
            let mut x = v;
            while p[&x] != r {
                let next = p[&x];
                p.insert(x, r);
                x = next;
            }
            r
        }
        for e in self.edges.values() {
            let a = find(&mut parent, e.tail);
            let b = find(&mut parent, e.head);
            if a != b {
                parent.insert(a.max(b), a.min(b));
            }
        }
        let mut groups: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for v in self.vertices.keys().copied().collect::<Vec<_>>() {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().insert(v);
        }
        groups.into_values().collect()
    }

    /// One entry per surface component, in order of first birth.
    pub fn component_summary(&self) -> Vec<ComponentSummary> {
        self.components
            .iter()
            .map(|c| {
                let v = self
                    .vertices
                    .values()
                    .filter(|x| x.component == c.label)
                    .count();
                let e = self
                    .edges
                    .values()
                    .filter(|x| x.component == c.label)
                    .count();
                let f = self
                    .faces
                    .values()
                    .filter(|x| x.component == c.label)
                    .count();
                let euler = v as i64 - e as i64 + f as i64;
                ComponentSummary {
                    label: c.label.clone(),
                    genus: (2 - euler) / 2,
                    euler,
                    vertices: v,
                    edges: e,
                    faces: f,
                }
            })
            .collect()
    }

    pub fn genus_of(&self, label: &str) -> Option<i64> {
        self.component_summary()
            .into_iter()
            .find(|c| c.label == label)
            .map(|c| c.genus)
    }

    pub fn decker_edges(&self) -> impl Iterator<Item = (EdgeId, &Edge, &DeckerTag)> {
        self.edges
            .iter()
            .filter_map(|(id, e)| e.active_decker().map(|d| (*id, e, d)))
    }

    /// Face boundaries rotated to start at their smallest step, for comparing
    /// complexes that differ only in the starting point of each walk.
    pub fn normalized(&self) -> SurfaceComplex {
        let mut out = self.clone();
        for f in out.faces.values_mut() {
            let k = (0..f.boundary.len())
                .min_by_key(|&i| (f.boundary[i].edge, f.boundary[i].sign))
                .unwrap_or(0);
            f.boundary.rotate_left(k);
        }
        out.next_id = 0;
        out
    }

    /// Renumbers vertices, edges and faces densely in their current order
    /// and normalizes face rotations. Complexes that differ only by the ids
    /// handed out to cells become equal.
    pub fn canonical(&self) -> SurfaceComplex {
        let vmap: BTreeMap<VertexId, VertexId> = self
            .vertices
            .keys()
            .enumerate()
            .map(|(i, v)| (*v, VertexId(i as u32)))
            .collect();
        let emap: BTreeMap<EdgeId, EdgeId> = self
            .edges
            .keys()
            .enumerate()
            .map(|(i, e)| (*e, EdgeId(i as u32)))
            .collect();
        let fmap: BTreeMap<FaceId, FaceId> = self
            .faces
            .keys()
            .enumerate()
            .map(|(i, f)| (*f, FaceId(i as u32)))
            .collect();
        let mut out = SurfaceComplex::new(self.name.clone());
        out.vertices = self.vertices.iter().map(|(k, v)| (vmap[k], v.clone())).collect();
        out.edges = self
            .edges
            .iter()
            .map(|(k, e)| {
                let mut e = e.clone();
                e.tail = vmap[&e.tail];
                e.head = vmap[&e.head];
                if let Some(d) = e.decker.as_mut() {
                    d.mate = d.mate.map(|m| emap[&m]);
                    d.lineage = renumber_lineage(&d.lineage, &emap);
                }
                (emap[k], e)
            })
            .collect();
        out.faces = self
            .faces
            .iter()
            .map(|(k, f)| {
                let mut f = f.clone();
                for s in &mut f.boundary {
                    s.edge = emap[&s.edge];
                }
                (fmap[k], f)
            })
            .collect();
        out.components = self
            .components
            .iter()
            .map(|c| ComponentInfo {
                label: c.label.clone(),
                anchor: fmap[&c.anchor],
            })
            .collect();
        out.normalized()
    }
}

/// Rewrites `e<N>` references inside move lineages such as `IV:e3+e9`.
fn renumber_lineage(lineage: &str, emap: &BTreeMap<EdgeId, EdgeId>) -> String {
    let Some((kind, rest)) = lineage.split_once(':') else {
        return lineage.to_string();
    };
    let parts: Vec<String> = rest
        .split('+')
        .map(|tok| {
            tok.strip_prefix('e')
                .and_then(|n| n.parse::<u32>().ok())
                .and_then(|n| emap.get(&EdgeId(n)))
                .map_or_else(|| tok.to_string(), |e| e.to_string())
        })
        .collect();
    format!("{kind}:{}", parts.join("+"))
}
