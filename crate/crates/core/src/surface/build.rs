use std::collections::{BTreeMap, BTreeSet};

use super::complex::{ComponentInfo, DeckerTag, EdgeId, FrameKey, Step, SurfaceComplex, VertexId};
use super::SurfaceError;
use crate::movie::{ArcRef, Effect};
use crate::movie::{Event, Movie, Replayer, Role, Slot, Still};

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeKind {
    Base,
    Slot(String, Role),
}

#[derive(Debug, Clone)]
struct Node {
    vertex: VertexId,
    kind: NodeKind,
}

/// A circle of the current still realized in the complex: its nodes in strand
/// order and the edge leaving each node.
#[derive(Debug, Clone)]
struct Level {
    component: String,
    nodes: Vec<Node>,
    edges: Vec<EdgeId>,
}

impl Level {
    fn slot_node(&self, slot: &Slot) -> usize {
        self.nodes
            .iter()
            .position(|n| n.kind == NodeKind::Slot(slot.crossing.clone(), slot.role))
            .expect("slot realized in level")
    }

    fn base_node(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.kind == NodeKind::Base)
            .expect("every level has a base node")
    }

    /// Node index where still-arc `index` starts.
    fn arc_start(&self, circle: &crate::movie::Circle, index: usize) -> usize {
        if circle.slots.is_empty() {
            self.base_node()
        } else {
            self.slot_node(&circle.slots[index])
        }
    }

    /// Edges from node `from` forward to the next slot node.
    fn arc_path(&self, from: usize) -> Vec<usize> {
        let n = self.nodes.len();
        let mut out = vec![from];
        let mut k = (from + 1) % n;
        while matches!(self.nodes[k].kind, NodeKind::Base) && k != from {
            out.push(k);
            k = (k + 1) % n;
        }
        out
    }
}

/// What happens to a level during a ladder step.
#[derive(Default)]
struct LadderPlan {
    /// Pre-node indices that end here.
    dying: BTreeSet<usize>,
    /// New slots to place right after a pre-node.
    inserted: BTreeMap<usize, Vec<Slot>>,
}

struct LadderResult {
    /// Vertical edge of each persisting pre-node.
    verticals: BTreeMap<usize, EdgeId>,
    /// Rung face containing each pre-edge (bottom) and each post-edge (top).
    face_of_pre_edge: Vec<super::complex::FaceId>,
    face_of_post_edge: Vec<super::complex::FaceId>,
}

struct Builder<'m> {
    movie: &'m Movie,
    cx: SurfaceComplex,
    levels: BTreeMap<String, Level>,
}

/// Reconstructs the based surface of a p-movie as an oriented cell complex.
///
/// Every local event is preceded by a slab (an annulus ladder) on each circle
/// carrying crossings, so each crossing traces at least one vertical edge on
/// both of its sheets. Events then add a ladder on the circles they touch;
/// Morse events add caps and pairs of pants.
pub fn build_surface(movie: &Movie) -> Result<SurfaceComplex, SurfaceError> {
    if !movie.is_p_movie() {
        return Err(SurfaceError::NotPMovie);
    }
    let mut b = Builder {
        movie,
        cx: SurfaceComplex::new(movie.name.clone()),
        levels: BTreeMap::new(),
    };
    let mut replayer = Replayer::new();
    for (index, ev) in movie.events.iter().enumerate() {
        let pre = replayer.still().clone();
        let effect = replayer
            .apply(&ev.event)
            .map_err(|e| SurfaceError::Internal(format!("event {index} failed on replay: {e}")))?;
        b.step(&pre, &ev.event, &effect)?;
    }
    b.finish()
}

impl Builder<'_> {
    fn step(&mut self, pre: &Still, event: &Event, effect: &Effect) -> Result<(), SurfaceError> {
        match effect {
            Effect::Birth { circle } => self.birth(pre, event, circle),
            Effect::Death { circle } => self.death(circle),
            Effect::Merge { a, b, into } => self.merge(a, b, into),
            Effect::Split { from, into } => self.split(from, into),
            Effect::Insert { insertions } => {
                self.slab(pre);
                self.insert(pre, event, insertions);
                Ok(())
            }
            Effect::Remove { crossings, joins } => {
                self.slab(pre);
                self.remove(pre, crossings, joins);
                Ok(())
            }
            Effect::Triangle => Err(SurfaceError::NotPMovie),
        }
    }

    fn birth(&mut self, _pre: &Still, event: &Event, circle: &str) -> Result<(), SurfaceError> {
        let Event::Birth { component, .. } = event else {
            unreachable!("birth effect from birth event")
        };
        let v = self.cx.add_vertex(component, false);
        let l = self.cx.add_edge(v, v);
        let cap = self.cx.add_face(vec![Step::new(l, -1)]);
        if self.cx.component_of_label(component).is_none() {
            self.cx.components.push(ComponentInfo {
                label: component.clone(),
                anchor: cap,
            });
        }
        self.levels.insert(
            circle.to_string(),
            Level {
                component: component.clone(),
                nodes: vec![Node {
                    vertex: v,
                    kind: NodeKind::Base,
                }],
                edges: vec![l],
            },
        );
        Ok(())
    }

    fn death(&mut self, circle: &str) -> Result<(), SurfaceError> {
        let level = self.levels.remove(circle).expect("level exists");
        if level.edges.len() != 1 {
            return Err(SurfaceError::Internal(format!(
                "dying circle `{circle}` still has {} nodes",
                level.nodes.len()
            )));
        }
        self.cx.add_face(vec![Step::new(level.edges[0], 1)]);
        Ok(())
    }

    fn new_loop_level(&mut self, component: &str) -> Level {
        let v = self.cx.add_vertex(component, false);
        let l = self.cx.add_edge(v, v);
        Level {
            component: component.to_string(),
            nodes: vec![Node {
                vertex: v,
                kind: NodeKind::Base,
            }],
            edges: vec![l],
        }
    }

    fn merge(&mut self, a: &str, b: &str, into: &str) -> Result<(), SurfaceError> {
        let la = self.levels.remove(a).expect("level a");
        let lb = self.levels.remove(b).expect("level b");
        let comp = la.component.clone();
        let (pa, pb) = (la.nodes[0].vertex, lb.nodes[0].vertex);
        let lc = self.new_loop_level(&comp);
        let s = self.cx.add_edge(pa, pb);
        let t = self.cx.add_edge(pa, lc.nodes[0].vertex);
        self.cx.add_face(vec![
            Step::new(la.edges[0], 1),
            Step::new(s, 1),
            Step::new(lb.edges[0], 1),
            Step::new(s, -1),
            Step::new(t, 1),
            Step::new(lc.edges[0], -1),
            Step::new(t, -1),
        ]);
        self.levels.insert(into.to_string(), lc);
        Ok(())
    }

    fn split(&mut self, from: &str, into: &[String; 2]) -> Result<(), SurfaceError> {
        let la = self.levels.remove(from).expect("level");
        let comp = la.component.clone();
        let p = la.nodes[0].vertex;
        let l1 = self.new_loop_level(&comp);
        let l2 = self.new_loop_level(&comp);
        let t1 = self.cx.add_edge(p, l1.nodes[0].vertex);
        let t2 = self.cx.add_edge(p, l2.nodes[0].vertex);
        self.cx.add_face(vec![
            Step::new(la.edges[0], 1),
            Step::new(t1, 1),
            Step::new(l1.edges[0], -1),
            Step::new(t1, -1),
            Step::new(t2, 1),
            Step::new(l2.edges[0], -1),
            Step::new(t2, -1),
        ]);
        self.levels.insert(into[0].clone(), l1);
        self.levels.insert(into[1].clone(), l2);
        Ok(())
    }

    /// Builds one ladder on `circle`: a vertical edge per persisting node and
    /// a rung face between consecutive persisting nodes.
    fn ladder(&mut self, pre: &Still, circle: &str, plan: &LadderPlan) -> LadderResult {
        let level = self.levels[circle].clone();
        let comp = level.component.clone();
        let n = level.nodes.len();
        let mut post_nodes: Vec<Node> = Vec::new();
        let mut post_of = BTreeMap::new();
        let mut verticals = BTreeMap::new();
        for (k, node) in level.nodes.iter().enumerate() {
            if !plan.dying.contains(&k) {
                let v = self.cx.add_vertex(&comp, false);
                let e = self.cx.add_edge(node.vertex, v);
                if let NodeKind::Slot(x, role) = &node.kind {
                    let sign = pre.crossings[x].sign;
                    self.cx.edges.get_mut(&e).expect("edge").decker = Some(DeckerTag {
                        role: *role,
                        lineage: x.clone(),
                        frame: Some(FrameKey {
                            sign,
                            forward: true,
                        }),
                        seed: None,
                        mate: None,
                        active: true,
                    });
                }
                verticals.insert(k, e);
                post_of.insert(k, post_nodes.len());
                post_nodes.push(Node {
                    vertex: v,
                    kind: node.kind.clone(),
                });
            }
            if let Some(slots) = plan.inserted.get(&k) {
                for s in slots {
                    let v = self.cx.add_vertex(&comp, false);
                    post_nodes.push(Node {
                        vertex: v,
                        kind: NodeKind::Slot(s.crossing.clone(), s.role),
                    });
                }
            }
        }
        let m = post_nodes.len();
        let post_edges: Vec<EdgeId> = (0..m)
            .map(|k| {
                self.cx
                    .add_edge(post_nodes[k].vertex, post_nodes[(k + 1) % m].vertex)
            })
            .collect();

        // Rungs between consecutive persisting nodes.
        let persisting: Vec<usize> = post_of.keys().copied().collect();
        let mut face_of_pre_edge = vec![super::complex::FaceId(u32::MAX); n];
        let mut face_of_post_edge = vec![super::complex::FaceId(u32::MAX); m];
        for (r, &p) in persisting.iter().enumerate() {
            let q = persisting[(r + 1) % persisting.len()];
            let mut word = Vec::new();
            let mut bottom = Vec::new();
            let mut k = p;
            loop {
                word.push(Step::new(level.edges[k], 1));
                bottom.push(k);
                k = (k + 1) % n;
                if k == q {
                    break;
                }
            }
            word.push(Step::new(verticals[&q], 1));
            let (pp, qq) = (post_of[&p], post_of[&q]);
            let mut top = Vec::new();
            let mut k = pp;
            loop {
                top.push(k);
                k = (k + 1) % m;
                if k == qq {
                    break;
                }
            }
            for &t in top.iter().rev() {
                word.push(Step::new(post_edges[t], -1));
            }
            word.push(Step::new(verticals[&p], -1));
            let f = self.cx.add_face(word);
            for k in bottom {
                face_of_pre_edge[k] = f;
            }
            for k in top {
                face_of_post_edge[k] = f;
            }
        }
        self.levels.insert(
            circle.to_string(),
            Level {
                component: comp,
                nodes: post_nodes,
                edges: post_edges,
            },
        );
        LadderResult {
            verticals,
            face_of_pre_edge,
            face_of_post_edge,
        }
    }

    /// Identity ladder on every circle that carries crossings. Upper and lower
    /// verticals of one crossing become mates.
    fn slab(&mut self, pre: &Still) {
        let slotted: Vec<String> = pre
            .circles
            .values()
            .filter(|c| !c.slots.is_empty())
            .map(|c| c.id.clone())
            .collect();
        let mut traced: BTreeMap<(String, Role), EdgeId> = BTreeMap::new();
        for c in slotted {
            let before = self.levels[&c].nodes.clone();
            let res = self.ladder(pre, &c, &LadderPlan::default());
            for (k, node) in before.into_iter().enumerate() {
                if let NodeKind::Slot(x, role) = node.kind {
                    traced.insert((x, role), res.verticals[&k]);
                }
            }
        }
        for ((x, role), e) in &traced {
            if *role == Role::Upper {
                if let Some(m) = traced.get(&(x.clone(), Role::Lower)) {
                    self.set_mate(*e, *m);
                }
            }
        }
    }

    fn set_mate(&mut self, a: EdgeId, b: EdgeId) {
        for (x, y) in [(a, b), (b, a)] {
            if let Some(d) = self.cx.edges.get_mut(&x).and_then(|e| e.decker.as_mut()) {
                d.mate = Some(y);
            }
        }
    }

    fn tag_join(&mut self, e: EdgeId, role: Role, lineage: &str) {
        self.cx.edges.get_mut(&e).expect("edge").decker = Some(DeckerTag {
            role,
            lineage: lineage.to_string(),
            frame: None,
            seed: None,
            mate: None,
            active: true,
        });
    }

    fn insert(&mut self, pre: &Still, event: &Event, insertions: &[(ArcRef, Vec<Slot>)]) {
        let mut by_circle: BTreeMap<&str, Vec<&(ArcRef, Vec<Slot>)>> = BTreeMap::new();
        for ins in insertions {
            by_circle.entry(&ins.0.circle).or_default().push(ins);
        }
        let mut bigons: BTreeMap<Role, EdgeId> = BTreeMap::new();
        for (circle, list) in by_circle {
            let c = &pre.circles[circle];
            let level = self.levels[circle].clone();
            let mut plan = LadderPlan::default();
            for (arc, slots) in &list {
                plan.inserted
                    .insert(level.arc_start(c, arc.index), slots.clone());
            }
            let res = self.ladder(pre, circle, &plan);
            let post = self.levels[circle].clone();
            let m = post.nodes.len();
            for k in 0..m {
                let (a, b) = (&post.nodes[k].kind, &post.nodes[(k + 1) % m].kind);
                let (NodeKind::Slot(xa, ra), NodeKind::Slot(xb, rb)) = (a, b) else {
                    continue;
                };
                let new = |x: &String| list.iter().any(|(_, s)| s.iter().any(|s| &s.crossing == x));
                if !(new(xa) && new(xb)) {
                    continue;
                }
                match event {
                    Event::R2Plus { .. } if ra == rb && xa != xb => {
                        let e = post.edges[k];
                        self.tag_join(e, *ra, &format!("{xa}+{xb}"));
                        bigons.insert(*ra, e);
                    }
                    Event::R1Plus { .. } if xa == xb && ra != rb => {
                        // Kink: route the branch join through a marked vertex
                        // inside the rung below the kink arc.
                        let f = res.face_of_post_edge[k];
                        let (va, vb) = (post.nodes[k].vertex, post.nodes[(k + 1) % m].vertex);
                        self.branch_chord(f, va, vb, *ra, *rb, xa);
                    }
                    _ => {}
                }
            }
        }
        if let (Some(u), Some(l)) = (bigons.get(&Role::Upper), bigons.get(&Role::Lower)) {
            self.set_mate(*u, *l);
        }
    }

    /// Splits face `f` with a two-edge chord `from -> β -> to` through a new
    /// branch vertex β; the halves carry roles `r1` and `r2`.
    fn branch_chord(
        &mut self,
        f: super::complex::FaceId,
        from: VertexId,
        to: VertexId,
        r1: Role,
        r2: Role,
        lineage: &str,
    ) {
        let comp = self.cx.vertices[&from].component.clone();
        let beta = self.cx.add_vertex(&comp, true);
        let h1 = self.cx.add_edge(from, beta);
        let h2 = self.cx.add_edge(beta, to);
        self.tag_join(h1, r1, lineage);
        self.tag_join(h2, r2, lineage);
        self.set_mate(h1, h2);
        let i = self.cx.position_of(f, from).expect("chord start on face");
        let j = self.cx.position_of(f, to).expect("chord end on face");
        self.cx
            .split_face(f, i, j, &[Step::new(h1, 1), Step::new(h2, 1)]);
    }

    fn remove(&mut self, pre: &Still, crossings: &[String], joins: &[ArcRef]) {
        // Join paths are read on the level left by the slab, before the ladder.
        let mut planned: BTreeMap<String, LadderPlan> = BTreeMap::new();
        let mut join_paths: Vec<(String, Vec<usize>)> = Vec::new();
        for arc in joins {
            let c = &pre.circles[&arc.circle];
            let level = &self.levels[&arc.circle];
            let start = level.arc_start(c, arc.index);
            join_paths.push((arc.circle.clone(), level.arc_path(start)));
        }
        for (id, c) in &pre.circles {
            let level = &self.levels[id];
            let dying: BTreeSet<usize> = c
                .slots
                .iter()
                .filter(|s| crossings.contains(&s.crossing))
                .map(|s| level.slot_node(s))
                .collect();
            if !dying.is_empty() {
                planned.insert(
                    id.clone(),
                    LadderPlan {
                        dying,
                        ..Default::default()
                    },
                );
            }
        }
        let levels_before = self.levels.clone();
        let mut results = BTreeMap::new();
        for (id, plan) in &planned {
            results.insert(id.clone(), self.ladder(pre, id, plan));
        }
        let lineage = crossings.join("+");
        let mut single_edges: BTreeMap<Role, EdgeId> = BTreeMap::new();
        for (circle, path) in join_paths {
            let level = &levels_before[&circle];
            let n = level.nodes.len();
            let first = &level.nodes[path[0]];
            let last = &level.nodes[(path[path.len() - 1] + 1) % n];
            let (NodeKind::Slot(_, r1), NodeKind::Slot(_, r2)) = (&first.kind, &last.kind) else {
                unreachable!("join paths run between slots")
            };
            let (r1, r2) = (*r1, *r2);
            let edges: Vec<EdgeId> = path.iter().map(|&k| level.edges[k]).collect();
            if r1 == r2 {
                for &e in &edges {
                    self.tag_join(e, r1, &lineage);
                }
                if edges.len() == 1 {
                    single_edges.insert(r1, edges[0]);
                }
            } else if edges.len() == 1 {
                let f = results[&circle].face_of_pre_edge[path[0]];
                self.branch_chord(f, first.vertex, last.vertex, r1, r2, &lineage);
            } else {
                // The kink loop passes through the base node: it becomes the
                // branch vertex.
                self.tag_join(edges[0], r1, &lineage);
                self.tag_join(edges[1], r2, &lineage);
                self.set_mate(edges[0], edges[1]);
                let mid = level.nodes[path[1]].vertex;
                self.cx.vertices.get_mut(&mid).expect("vertex").branch = true;
            }
        }
        if let (Some(u), Some(l)) = (single_edges.get(&Role::Upper), single_edges.get(&Role::Lower))
        {
            self.set_mate(*u, *l);
        }
    }

    fn finish(self) -> Result<SurfaceComplex, SurfaceError> {
        let cx = self.cx;
        if !self.levels.is_empty() {
            return Err(SurfaceError::Internal("circles left at end of movie".into()));
        }
        let defects = cx.orientation_defects();
        if !defects.is_empty() {
            return Err(SurfaceError::Internal(format!(
                "edges not bounding exactly two oppositely oriented face corners: {:?}",
                defects
            )));
        }
        // Each topological component must carry exactly one label.
        let sets = cx.connected_vertex_sets();
        let mut seen_labels = BTreeSet::new();
        for set in &sets {
            let labels: BTreeSet<&str> = set
                .iter()
                .map(|v| cx.vertices[v].component.as_str())
                .collect();
            if labels.len() != 1 {
                return Err(SurfaceError::Internal(format!(
                    "connected piece carries labels {labels:?}"
                )));
            }
            let label = labels.into_iter().next().expect("one label");
            if !seen_labels.insert(label.to_string()) {
                return Err(SurfaceError::DisconnectedLabel(label.to_string()));
            }
        }
        for c in cx.component_summary() {
            if (2 - c.euler) % 2 != 0 || c.genus < 0 {
                return Err(SurfaceError::Internal(format!(
                    "component `{}` has Euler characteristic {}",
                    c.label, c.euler
                )));
            }
        }
        debug_assert_eq!(cx.euler_characteristic(), self.movie.morse_euler_characteristic());
        Ok(cx)
    }
}
