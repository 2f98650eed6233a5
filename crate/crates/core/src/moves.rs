//! The four triple-point-free moves as rewrites of the decker-annotated
//! surface complex.
//!
//! | kind | forward                                   | reverse                         |
//! |------|-------------------------------------------|---------------------------------|
//! | I    | add a branch arc bounding a disk          | remove it                       |
//! | II   | fold a same-component loop pair into a branch arc | unfold it               |
//! | III  | add a mated pair of loops bounding disks  | remove the pair                 |
//! | IV   | saddle two parallel decker segments (and their mates) | undo the saddle     |

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::decker::{assemble_decker, CircleRole, DeckerError, DeckerSet};
use crate::homology::{Chain, Homology};
use crate::invariant::{
    checkerboard, invariant_result, orient_decker_circles, polarities, Context, FrameSignTable,
    InvariantError,
};
use crate::movie::Role;
use crate::surface::{DeckerTag, EdgeId, FaceId, Step, SurfaceComplex, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

/// Where a move acts. Forward moves name faces or edges of the current
/// complex; reverse moves name the decker edges the forward move created.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Location {
    /// Face receiving a new configuration.
    Face { face: FaceId },
    /// Faces receiving the upper and lower loop of a new pair.
    Faces { upper: FaceId, lower: FaceId },
    /// Upper and lower loop edges of an inserted pair.
    Loops { upper: EdgeId, lower: EdgeId },
    /// Upper half of an isolated branch arc.
    BranchArc { upper: EdgeId },
    /// Two same-role decker edges on a common face, and the face holding
    /// their mates.
    Saddle {
        edges: [EdgeId; 2],
        face: FaceId,
        mate_face: FaceId,
    },
    /// Upper chords of a saddle.
    Chords { chords: [EdgeId; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MoveInstance {
    pub kind: MoveKind,
    pub direction: Direction,
    pub location: Location,
}

impl std::fmt::Display for MoveInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dir = match self.direction {
            Direction::Forward => "+",
            Direction::Reverse => "-",
        };
        write!(f, "{:?}{dir} ", self.kind)?;
        match &self.location {
            Location::Face { face } => write!(f, "in {face}"),
            Location::Faces { upper, lower } => write!(f, "upper in {upper}, lower in {lower}"),
            Location::Loops { upper, lower } => write!(f, "loops {upper}/{lower}"),
            Location::BranchArc { upper } => write!(f, "branch arc {upper}"),
            Location::Saddle {
                edges,
                face,
                mate_face,
            } => write!(f, "{}/{} in {face}, mates in {mate_face}", edges[0], edges[1]),
            Location::Chords { chords } => write!(f, "chords {}/{}", chords[0], chords[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoveError {
    #[error("{0}: precondition failed: {1}")]
    Precondition(String, String),
    #[error("{kind:?} cannot act at {location:?}")]
    WrongLocation { kind: MoveKind, location: Location },
    #[error(transparent)]
    Decker(#[from] DeckerError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

fn fail(mi: &MoveInstance, why: impl Into<String>) -> MoveError {
    MoveError::Precondition(mi.to_string(), why.into())
}

fn loop_tag(role: Role, lineage: String, mate: Option<EdgeId>) -> DeckerTag {
    DeckerTag {
        role,
        lineage,
        frame: None,
        seed: Some(1),
        mate,
        active: true,
    }
}

fn set_mates(cx: &mut SurfaceComplex, a: EdgeId, b: EdgeId) {
    for (x, y) in [(a, b), (b, a)] {
        if let Some(d) = cx.edges.get_mut(&x).and_then(|e| e.decker.as_mut()) {
            d.mate = Some(y);
        }
    }
}

/// Position of the smallest step of a face; insertions happen there so that
/// they are undone and redone at the same place.
fn anchor_position(cx: &SurfaceComplex, f: FaceId) -> usize {
    let word = &cx.faces[&f].boundary;
    (0..word.len())
        .min_by_key(|&i| (word[i].edge, word[i].sign))
        .unwrap_or(0)
}

/// Adds a spur into `f` and closes a loop at its free end. Returns the loop.
fn insert_loop(cx: &mut SurfaceComplex, f: FaceId, branch: bool) -> (EdgeId, VertexId) {
    let i = anchor_position(cx, f);
    let (_, w) = cx.add_spur(f, i, branch);
    let l = cx.add_edge(w, w);
    cx.split_face(f, i + 1, i + 1, &[Step::new(l, 1)]);
    (l, w)
}

fn spur_at(cx: &SurfaceComplex, v: VertexId, except: &[EdgeId]) -> Option<EdgeId> {
    let touching: Vec<EdgeId> = cx
        .edges
        .iter()
        .filter(|(id, e)| (e.tail == v || e.head == v) && !except.contains(id))
        .map(|(id, _)| *id)
        .collect();
    match touching.as_slice() {
        [e] if cx.edge(*e).head == v && cx.edge(*e).tail != v => Some(*e),
        _ => None,
    }
}

/// Checks that `l` is an inserted decker loop: a loop edge bounding a
/// one-step face, hanging off the rest of the complex by a single spur.
fn check_loop(cx: &SurfaceComplex, l: EdgeId) -> Result<EdgeId, String> {
    let e = cx.edges.get(&l).ok_or(format!("{l} does not exist"))?;
    if e.tail != e.head {
        return Err(format!("{l} is not a loop"));
    }
    let d = e
        .active_decker()
        .ok_or(format!("{l} is not an active decker edge"))?;
    if d.frame.is_some() {
        return Err(format!("{l} was traced by a crossing"));
    }
    let disk = cx
        .faces
        .values()
        .any(|f| f.boundary.len() == 1 && f.boundary[0].edge == l);
    if !disk {
        return Err(format!("{l} does not bound a disk face"));
    }
    spur_at(cx, e.tail, &[l]).ok_or(format!("{l} is not attached by a single spur"))
}

fn check_pair(cx: &SurfaceComplex, upper: EdgeId, lower: EdgeId) -> Result<[EdgeId; 2], String> {
    let su = check_loop(cx, upper)?;
    let sl = check_loop(cx, lower)?;
    let du = cx.edge(upper).decker.as_ref().expect("checked");
    let dl = cx.edge(lower).decker.as_ref().expect("checked");
    if du.role != Role::Upper || dl.role != Role::Lower {
        return Err("roles must be upper and lower".into());
    }
    if du.mate != Some(lower) || dl.mate != Some(upper) {
        return Err("loops are not mates".into());
    }
    Ok([su, sl])
}

fn remove_loop(cx: &mut SurfaceComplex, l: EdgeId, spur: EdgeId) {
    cx.merge_across(l);
    let ok = cx.remove_spur(spur);
    debug_assert!(ok, "spur removal after loop removal");
}

/// Face that holds the spur of a loop.
fn host_face(cx: &SurfaceComplex, spur: EdgeId) -> FaceId {
    cx.faces_of_edge(spur)[0].0
}

fn insert_pair(cx: &mut SurfaceComplex, upper: FaceId, lower: FaceId) -> (EdgeId, EdgeId) {
    let (lu, _) = insert_loop(cx, upper, false);
    let (ll, _) = insert_loop(cx, lower, false);
    let lineage = format!("III:{lu}");
    cx.edges.get_mut(&lu).expect("loop").decker = Some(loop_tag(Role::Upper, lineage.clone(), Some(ll)));
    cx.edges.get_mut(&ll).expect("loop").decker = Some(loop_tag(Role::Lower, lineage, Some(lu)));
    (lu, ll)
}

/// Branch arc through two branch vertices, bounding a disk in `f`.
fn insert_branch_arc(cx: &mut SurfaceComplex, f: FaceId) -> EdgeId {
    let i = anchor_position(cx, f);
    let (_, b1) = cx.add_spur(f, i, true);
    let comp = cx.vertices[&b1].component.clone();
    let b2 = cx.add_vertex(&comp, true);
    let h1 = cx.add_edge(b1, b2);
    let h2 = cx.add_edge(b2, b1);
    cx.split_face(f, i + 1, i + 1, &[Step::new(h1, 1), Step::new(h2, 1)]);
    let lineage = format!("I:{h1}");
    cx.edges.get_mut(&h1).expect("half").decker = Some(loop_tag(Role::Upper, lineage.clone(), Some(h2)));
    cx.edges.get_mut(&h2).expect("half").decker = Some(loop_tag(Role::Lower, lineage, Some(h1)));
    h1
}

/// Checks an isolated branch arc; returns (lower half, spur).
fn check_branch_arc(cx: &SurfaceComplex, h1: EdgeId) -> Result<(EdgeId, EdgeId), String> {
    let e = cx.edges.get(&h1).ok_or(format!("{h1} does not exist"))?;
    let d = e.active_decker().ok_or(format!("{h1} is not an active decker edge"))?;
    if d.role != Role::Upper || d.frame.is_some() {
        return Err(format!("{h1} is not the upper half of an inserted branch arc"));
    }
    let h2 = d.mate.ok_or(format!("{h1} has no mate"))?;
    let f2 = cx.edge(h2);
    let (b1, b2) = (e.tail, e.head);
    if f2.tail != b2 || f2.head != b1 || b1 == b2 {
        return Err(format!("{h1} and {h2} do not form a bigon"));
    }
    if !cx.vertices[&b1].branch || !cx.vertices[&b2].branch {
        return Err("endpoints are not branch vertices".into());
    }
    let disk = cx.faces.values().any(|f| {
        f.boundary.len() == 2 && f.boundary.iter().all(|s| s.edge == h1 || s.edge == h2)
    });
    if !disk {
        return Err(format!("{h1}/{h2} do not bound a disk face"));
    }
    if cx
        .edges
        .iter()
        .any(|(id, x)| *id != h1 && *id != h2 && (x.tail == b2 || x.head == b2))
    {
        return Err("second branch vertex is not free".into());
    }
    let spur = spur_at(cx, b1, &[h1, h2]).ok_or("branch arc is not attached by a single spur")?;
    Ok((h2, spur))
}

fn remove_branch_arc(cx: &mut SurfaceComplex, h1: EdgeId, h2: EdgeId, spur: EdgeId) {
    cx.merge_across(h1);
    let a = cx.remove_spur(h2);
    let b = cx.remove_spur(spur);
    debug_assert!(a && b, "branch arc removal");
}

/// Orientation of each decker edge relative to its direction.
fn edge_orientations(cx: &SurfaceComplex, decker: &DeckerSet) -> Result<BTreeMap<EdgeId, i8>, MoveError> {
    let oriented = orient_decker_circles(cx, decker, &FrameSignTable::default())?;
    Ok(oriented
        .iter()
        .flat_map(|c| c.steps.iter().map(|s| (s.edge, s.sign)))
        .collect())
}

/// Oriented endpoints (start, end) of a decker edge.
fn oriented_ends(cx: &SurfaceComplex, e: EdgeId, o: i8) -> (VertexId, VertexId) {
    let edge = cx.edge(e);
    if o > 0 {
        (edge.tail, edge.head)
    } else {
        (edge.head, edge.tail)
    }
}

/// Position of the unique step of `e` in face `f`.
fn unique_step(cx: &SurfaceComplex, f: FaceId, e: EdgeId) -> Option<usize> {
    let word = &cx.faces[&f].boundary;
    let hits: Vec<usize> = (0..word.len()).filter(|&k| word[k].edge == e).collect();
    match hits.as_slice() {
        [k] => Some(*k),
        _ => None,
    }
}

struct SaddleSide {
    face: FaceId,
    /// Oriented (start, end) of the two edges.
    ends: [(VertexId, VertexId); 2],
    /// Face-word positions whose steps start at the oriented start and at
    /// the oriented end of each edge.
    a_pos: [usize; 2],
    b_pos: [usize; 2],
}

/// Checks that `edges` can be saddled inside `face`: both run along the face
/// boundary in the sense of their orientation, and have four distinct ends.
fn saddle_side(
    cx: &SurfaceComplex,
    decker: &DeckerSet,
    orient: &BTreeMap<EdgeId, i8>,
    edges: [EdgeId; 2],
    face: FaceId,
) -> Result<SaddleSide, String> {
    if !cx.faces.contains_key(&face) {
        return Err(format!("{face} does not exist"));
    }
    let mut ends = [(VertexId(0), VertexId(0)); 2];
    let mut a_pos = [0; 2];
    let mut b_pos = [0; 2];
    let mut along = [0i8; 2];
    for (k, e) in edges.iter().enumerate() {
        cx.edges
            .get(e)
            .and_then(|x| x.active_decker())
            .ok_or(format!("{e} is not an active decker edge"))?;
        let c = &decker.circles[decker.circle_of_edge[e]];
        if c.role == CircleRole::Mixed {
            return Err(format!("{e} lies on a branch arc"));
        }
        let pos = unique_step(cx, face, *e).ok_or(format!("{e} is not on {face} exactly once"))?;
        let o = orient[e];
        let sigma = cx.faces[&face].boundary[pos].sign;
        along[k] = o * sigma;
        ends[k] = oriented_ends(cx, *e, o);
        let n = cx.faces[&face].boundary.len();
        let next = (pos + 1) % n;
        (a_pos[k], b_pos[k]) = if along[k] > 0 { (pos, next) } else { (next, pos) };
    }
    if along[0] != along[1] {
        return Err("the two segments are not antiparallel across the face".into());
    }
    let all: BTreeSet<VertexId> = [ends[0].0, ends[0].1, ends[1].0, ends[1].1].into();
    if all.len() != 4 {
        return Err("the two segments share an endpoint".into());
    }
    if all.iter().any(|v| cx.vertices[v].branch) {
        return Err("a segment ends at a branch point".into());
    }
    Ok(SaddleSide {
        face,
        ends,
        a_pos,
        b_pos,
    })
}

/// Adds the two chords of a saddle: start1 → end2 and start2 → end1.
fn add_chords(cx: &mut SurfaceComplex, side: &SaddleSide, role: Role, lineage: &str) -> [EdgeId; 2] {
    let [(a1, b1), (a2, b2)] = side.ends;
    let c1 = cx.add_edge(a1, b2);
    let c2 = cx.add_edge(a2, b1);
    let f = side.face;
    let g = cx.split_face(f, side.a_pos[0], side.b_pos[1], &[Step::new(c1, 1)]);
    // c2 runs a2 → b1 inside whichever piece now holds both ends.
    let host = [f, g]
        .into_iter()
        .find(|h| cx.position_of(*h, a2).is_some() && cx.position_of(*h, b1).is_some())
        .expect("one piece holds the second chord");
    let p = cx.position_of(host, a2).expect("a2");
    let q = cx.position_of(host, b1).expect("b1");
    cx.split_face(host, p, q, &[Step::new(c2, 1)]);
    for c in [c1, c2] {
        cx.edges.get_mut(&c).expect("chord").decker = Some(DeckerTag {
            role,
            lineage: lineage.to_string(),
            frame: None,
            seed: Some(1),
            mate: None,
            active: true,
        });
    }
    [c1, c2]
}

fn set_active(cx: &mut SurfaceComplex, e: EdgeId, active: bool) {
    if let Some(d) = cx.edges.get_mut(&e).and_then(|x| x.decker.as_mut()) {
        d.active = active;
    }
}

/// Recognizes the square face left by a saddle: two active chords from a IV
/// move and the two inactive segments they replaced.
fn saddle_square(cx: &SurfaceComplex, chords: [EdgeId; 2]) -> Result<(FaceId, [EdgeId; 2]), String> {
    for c in chords {
        let d = cx
            .edges
            .get(&c)
            .and_then(|e| e.active_decker())
            .ok_or(format!("{c} is not an active decker edge"))?;
        if !d.lineage.starts_with("IV:") {
            return Err(format!("{c} was not created by a saddle"));
        }
    }
    for (f, face) in &cx.faces {
        if face.boundary.len() != 4 {
            continue;
        }
        let es: BTreeSet<EdgeId> = face.boundary.iter().map(|s| s.edge).collect();
        if es.len() == 4 && es.contains(&chords[0]) && es.contains(&chords[1]) {
            let old: Vec<EdgeId> = es
                .iter()
                .filter(|e| !chords.contains(e))
                .copied()
                .filter(|e| cx.edge(*e).decker.as_ref().is_some_and(|d| !d.active))
                .collect();
            if let [a, b] = old.as_slice() {
                return Ok((*f, [*a, *b]));
            }
        }
    }
    Err("no square face between the chords".into())
}

fn remove_chords(cx: &mut SurfaceComplex, chords: [EdgeId; 2], old: [EdgeId; 2]) {
    for c in chords {
        cx.merge_across(c);
    }
    for e in old {
        set_active(cx, e, true);
    }
}

/// Applies a move, returning the new complex and the instance undoing it.
pub fn apply_move(
    cx: &SurfaceComplex,
    mi: &MoveInstance,
) -> Result<(SurfaceComplex, MoveInstance), MoveError> {
    let mut out = cx.clone();
    let wrong = || MoveError::WrongLocation {
        kind: mi.kind,
        location: mi.location.clone(),
    };
    let reverse = match (mi.kind, mi.direction, &mi.location) {
        (MoveKind::III, Direction::Forward, Location::Faces { upper, lower }) => {
            for f in [upper, lower] {
                if !cx.faces.contains_key(f) {
                    return Err(fail(mi, format!("{f} does not exist")));
                }
            }
            let (lu, ll) = insert_pair(&mut out, *upper, *lower);
            Location::Loops {
                upper: lu,
                lower: ll,
            }
        }
        (MoveKind::III, Direction::Reverse, Location::Loops { upper, lower }) => {
            let [su, sl] = check_pair(cx, *upper, *lower).map_err(|e| fail(mi, e))?;
            let (fu, fl) = (host_face(cx, su), host_face(cx, sl));
            remove_loop(&mut out, *lower, sl);
            remove_loop(&mut out, *upper, su);
            Location::Faces {
                upper: fu,
                lower: fl,
            }
        }
        (MoveKind::I, Direction::Forward, Location::Face { face }) => {
            if !cx.faces.contains_key(face) {
                return Err(fail(mi, format!("{face} does not exist")));
            }
            let h1 = insert_branch_arc(&mut out, *face);
            Location::BranchArc { upper: h1 }
        }
        (MoveKind::I, Direction::Reverse, Location::BranchArc { upper }) => {
            let (h2, spur) = check_branch_arc(cx, *upper).map_err(|e| fail(mi, e))?;
            let f = host_face(cx, spur);
            remove_branch_arc(&mut out, *upper, h2, spur);
            Location::Face { face: f }
        }
        (MoveKind::II, Direction::Forward, Location::Loops { upper, lower }) => {
            let [su, sl] = check_pair(cx, *upper, *lower).map_err(|e| fail(mi, e))?;
            let (fu, fl) = (host_face(cx, su), host_face(cx, sl));
            if fu != fl {
                return Err(fail(mi, "the loops hang in different faces"));
            }
            if cx.edge(*upper).component != cx.edge(*lower).component {
                return Err(fail(mi, "the loops lie on different components"));
            }
            remove_loop(&mut out, *lower, sl);
            remove_loop(&mut out, *upper, su);
            let h1 = insert_branch_arc(&mut out, fu);
            Location::BranchArc { upper: h1 }
        }
        (MoveKind::II, Direction::Reverse, Location::BranchArc { upper }) => {
            let (h2, spur) = check_branch_arc(cx, *upper).map_err(|e| fail(mi, e))?;
            let f = host_face(cx, spur);
            remove_branch_arc(&mut out, *upper, h2, spur);
            let (lu, ll) = insert_pair(&mut out, f, f);
            Location::Loops {
                upper: lu,
                lower: ll,
            }
        }
        (
            MoveKind::IV,
            Direction::Forward,
            Location::Saddle {
                edges,
                face,
                mate_face,
            },
        ) => {
            let decker = assemble_decker(cx)?;
            let orient = edge_orientations(cx, &decker)?;
            let role = cx
                .edges
                .get(&edges[0])
                .and_then(|e| e.active_decker())
                .map(|d| d.role)
                .ok_or_else(|| fail(mi, format!("{} is not an active decker edge", edges[0])))?;
            let other_role = cx
                .edges
                .get(&edges[1])
                .and_then(|e| e.active_decker())
                .map(|d| d.role);
            if other_role != Some(role) {
                return Err(fail(mi, "segments have different roles"));
            }
            let mates = edges.map(|e| cx.edge(e).decker.as_ref().and_then(|d| d.mate));
            let [Some(m1), Some(m2)] = mates else {
                return Err(fail(mi, "a segment has no mate"));
            };
            if m1 == m2 || edges.contains(&m1) || edges.contains(&m2) {
                return Err(fail(mi, "segments share a mate"));
            }
            let side = saddle_side(cx, &decker, &orient, *edges, *face).map_err(|e| fail(mi, e))?;
            let mate_side =
                saddle_side(cx, &decker, &orient, [m1, m2], *mate_face).map_err(|e| fail(mi, format!("mates: {e}")))?;
            let lineage = format!("IV:{}+{}", edges[0], edges[1]);
            let chords = add_chords(&mut out, &side, role, &lineage);
            let mate_chords = add_chords(&mut out, &mate_side, role.opposite(), &lineage);
            set_mates(&mut out, chords[0], mate_chords[0]);
            set_mates(&mut out, chords[1], mate_chords[1]);
            for e in [edges[0], edges[1], m1, m2] {
                set_active(&mut out, e, false);
            }
            let upper = if role == Role::Upper { chords } else { mate_chords };
            Location::Chords { chords: upper }
        }
        (MoveKind::IV, Direction::Reverse, Location::Chords { chords }) => {
            let (_, old) = saddle_square(cx, *chords).map_err(|e| fail(mi, e))?;
            let mates = chords.map(|c| cx.edge(c).decker.as_ref().and_then(|d| d.mate));
            let [Some(m1), Some(m2)] = mates else {
                return Err(fail(mi, "a chord has no mate"));
            };
            let (_, mate_old) = saddle_square(cx, [m1, m2]).map_err(|e| fail(mi, format!("mates: {e}")))?;
            // Recover which face each side lived in before the saddle.
            let face_of = |cx: &SurfaceComplex, chords: [EdgeId; 2]| -> FaceId {
                let mut fs: Vec<FaceId> = chords
                    .iter()
                    .flat_map(|c| cx.faces_of_edge(*c).into_iter().map(|(f, _)| f))
                    .collect();
                fs.sort();
                fs[0]
            };
            let (face, mate_face) = (face_of(cx, *chords), face_of(cx, [m1, m2]));
            let up_old = old;
            remove_chords(&mut out, *chords, up_old);
            remove_chords(&mut out, [m1, m2], mate_old);
            // The forward move is named by the segments on the same sheet as
            // the chords given here (upper).
            let (e1, e2) = pair_order(cx, *chords, up_old);
            Location::Saddle {
                edges: [e1, e2],
                face,
                mate_face,
            }
        }
        _ => return Err(wrong()),
    };
    let inverse = MoveInstance {
        kind: mi.kind,
        direction: match mi.direction {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        },
        location: reverse,
    };
    Ok((out, inverse))
}

/// Orders the two replaced segments as the forward move named them: the
/// first chord starts where the first segment starts.
fn pair_order(cx: &SurfaceComplex, chords: [EdgeId; 2], old: [EdgeId; 2]) -> (EdgeId, EdgeId) {
    let start = cx.edge(chords[0]).tail;
    let touches = |e: EdgeId| {
        let x = cx.edge(e);
        x.tail == start || x.head == start
    };
    if touches(old[0]) {
        (old[0], old[1])
    } else {
        (old[1], old[0])
    }
}

/// Representative face of each region: its smallest face id.
pub fn region_faces(cx: &SurfaceComplex, decker: &DeckerSet) -> Result<Vec<FaceId>, MoveError> {
    let coloring = checkerboard(cx, decker, &vec![0; cx.components.len()])?;
    let mut reps: BTreeMap<usize, FaceId> = BTreeMap::new();
    for (f, r) in &coloring.region_of_face {
        reps.entry(*r).or_insert(*f);
    }
    Ok(reps.into_values().collect())
}

/// Every location where a move applies.
pub fn applicable_moves(cx: &SurfaceComplex) -> Result<Vec<MoveInstance>, MoveError> {
    let decker = assemble_decker(cx)?;
    let mut out = Vec::new();
    let regions = region_faces(cx, &decker)?;
    let push = |out: &mut Vec<MoveInstance>, kind, direction, location| {
        out.push(MoveInstance {
            kind,
            direction,
            location,
        })
    };

    for &u in &regions {
        for &l in &regions {
            push(&mut out, MoveKind::III, Direction::Forward, Location::Faces { upper: u, lower: l });
        }
        push(&mut out, MoveKind::I, Direction::Forward, Location::Face { face: u });
    }

    for (e, _, tag) in cx.decker_edges() {
        if tag.role == Role::Upper {
            if let Some(m) = tag.mate {
                if let Ok([su, sl]) = check_pair(cx, e, m) {
                    let loc = Location::Loops { upper: e, lower: m };
                    push(&mut out, MoveKind::III, Direction::Reverse, loc.clone());
                    if host_face(cx, su) == host_face(cx, sl)
                        && cx.edge(e).component == cx.edge(m).component
                    {
                        push(&mut out, MoveKind::II, Direction::Forward, loc);
                    }
                }
            }
            if check_branch_arc(cx, e).is_ok() {
                push(&mut out, MoveKind::I, Direction::Reverse, Location::BranchArc { upper: e });
                push(&mut out, MoveKind::II, Direction::Reverse, Location::BranchArc { upper: e });
            }
        }
    }

    let orient = edge_orientations(cx, &decker)?;
    let mut seen_chords = BTreeSet::new();
    for (f, face) in &cx.faces {
        let on_face: Vec<EdgeId> = face
            .boundary
            .iter()
            .map(|s| s.edge)
            .filter(|e| cx.edge(*e).active_decker().is_some_and(|d| d.role == Role::Upper))
            .collect();
        for (a, &e1) in on_face.iter().enumerate() {
            for &e2 in &on_face[a + 1..] {
                if e1 == e2 || saddle_side(cx, &decker, &orient, [e1, e2], *f).is_err() {
                    continue;
                }
                let (Some(m1), Some(m2)) = (
                    cx.edge(e1).decker.as_ref().and_then(|d| d.mate),
                    cx.edge(e2).decker.as_ref().and_then(|d| d.mate),
                ) else {
                    continue;
                };
                if m1 == m2 {
                    continue;
                }
                let mut mate_faces: Vec<FaceId> = cx
                    .faces_of_edge(m1)
                    .into_iter()
                    .map(|(g, _)| g)
                    .collect();
                mate_faces.dedup();
                for g in mate_faces {
                    if saddle_side(cx, &decker, &orient, [m1, m2], g).is_ok() {
                        push(
                            &mut out,
                            MoveKind::IV,
                            Direction::Forward,
                            Location::Saddle {
                                edges: [e1, e2],
                                face: *f,
                                mate_face: g,
                            },
                        );
                    }
                }
            }
        }
        // Saddle squares.
        let chords: Vec<EdgeId> = face
            .boundary
            .iter()
            .map(|s| s.edge)
            .filter(|e| {
                cx.edge(*e)
                    .active_decker()
                    .is_some_and(|d| d.role == Role::Upper && d.lineage.starts_with("IV:"))
            })
            .collect();
        if let [c1, c2] = chords.as_slice() {
            let pair = if c1 < c2 { [*c1, *c2] } else { [*c2, *c1] };
            if seen_chords.insert(pair) && saddle_square(cx, pair).is_ok() {
                push(&mut out, MoveKind::IV, Direction::Reverse, Location::Chords { chords: pair });
            }
        }
    }
    Ok(out)
}

/// Per-polarity cycles of a complex together with its comparison key.
fn polarity_cycles(cx: &SurfaceComplex) -> Result<(Vec<Chain>, crate::invariant::ComparisonKey), MoveError> {
    let decker = assemble_decker(cx)?;
    let table = FrameSignTable::default();
    let ctx = Context::new(cx, &decker, &table)?;
    let mut cycles = Vec::new();
    for p in polarities(cx.components.len()) {
        let coloring = checkerboard(cx, &decker, &p)?;
        let x = crate::invariant::compute_x(&coloring, &decker);
        cycles.push(ctx.cycle(&x).1);
    }
    let key = invariant_result(cx, &decker, &table)?.key;
    Ok((cycles, key))
}

/// True when the move preserved the invariant: equal comparison keys and,
/// per polarity, cycles differing by a boundary in the complex containing
/// both.
pub fn verify_transition(before: &SurfaceComplex, after: &SurfaceComplex) -> Result<bool, MoveError> {
    let (zb, kb) = polarity_cycles(before)?;
    let (za, ka) = polarity_cycles(after)?;
    if kb != ka {
        return Ok(false);
    }
    let big = if after.edges.len() >= before.edges.len() {
        after
    } else {
        before
    };
    if before.components.len() != after.components.len() {
        return Ok(false);
    }
    let homology = Homology::of(big).map_err(InvariantError::from)?;
    for (b, a) in zb.iter().zip(&za) {
        let mut diff = a.clone();
        for (e, c) in b {
            *diff.entry(*e).or_default() -= c;
        }
        diff.retain(|_, c| *c != 0);
        if diff.keys().any(|e| !big.edges.contains_key(e)) {
            return Ok(false);
        }
        let classes = match homology.classes(big, &diff) {
            Ok(c) => c,
            Err(_) => return Ok(false),
        };
        if classes.iter().any(|(_, c)| c.iter().any(|x| *x != 0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies the move and checks that the invariant is unchanged.
pub fn verify_invariance(cx: &SurfaceComplex, mi: &MoveInstance) -> Result<bool, MoveError> {
    let (after, _) = apply_move(cx, mi)?;
    verify_transition(cx, &after)
}
