use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::decker::DeckerSet;
use crate::surface::{EdgeId, FaceId, SurfaceComplex};

use super::InvariantError;

/// Checkerboard coloring of the complement of the self decker curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    /// Polarity bit per component, in component order.
    pub polarity: Vec<u8>,
    /// Region index of every face.
    pub region_of_face: BTreeMap<FaceId, usize>,
    /// Color of every region.
    pub region_colors: Vec<u8>,
    /// Color inherited by each A_f circle.
    pub circle_colors: BTreeMap<usize, u8>,
}

impl Coloring {
    pub fn face_color(&self, f: FaceId) -> u8 {
        self.region_colors[self.region_of_face[&f]]
    }

    pub fn regions(&self) -> usize {
        self.region_colors.len()
    }
}

/// Decker edges whose circle is mated on its own component. These separate
/// regions; decker curves between different components do not.
pub fn wall_edges(decker: &DeckerSet) -> BTreeMap<EdgeId, usize> {
    decker
        .circles
        .iter()
        .filter(|c| decker.circles[c.mate].component == c.component)
        .flat_map(|c| c.walk.iter().map(move |s| (s.edge, c.id)))
        .collect()
}

fn sides(cx: &SurfaceComplex) -> BTreeMap<EdgeId, Vec<FaceId>> {
    let mut out: BTreeMap<EdgeId, Vec<FaceId>> = BTreeMap::new();
    for (f, face) in &cx.faces {
        for s in &face.boundary {
            out.entry(s.edge).or_default().push(*f);
        }
    }
    out
}

/// Two-colors each component so that faces on either side of a wall get
/// different colors and the component's anchor region gets its polarity bit.
pub fn checkerboard(
    cx: &SurfaceComplex,
    decker: &DeckerSet,
    polarity: &[u8],
) -> Result<Coloring, InvariantError> {
    if polarity.len() != cx.components.len() {
        return Err(InvariantError::PolarityLength {
            expected: cx.components.len(),
            found: polarity.len(),
        });
    }
    let walls = wall_edges(decker);
    let sides = sides(cx);
    let mut neighbours: BTreeMap<FaceId, Vec<(FaceId, u8)>> = BTreeMap::new();
    for (e, fs) in &sides {
        if let [a, b] = fs.as_slice() {
            let flip = u8::from(walls.contains_key(e));
            neighbours.entry(*a).or_default().push((*b, flip));
            neighbours.entry(*b).or_default().push((*a, flip));
        }
    }

    // Regions: connected across non-wall edges.
    let mut region_of_face = BTreeMap::new();
    let mut regions = 0;
    for f in cx.faces.keys() {
        if region_of_face.contains_key(f) {
            continue;
        }
        let mut queue = VecDeque::from([*f]);
        region_of_face.insert(*f, regions);
        while let Some(g) = queue.pop_front() {
            for (h, flip) in neighbours.get(&g).into_iter().flatten() {
                if *flip == 0 && !region_of_face.contains_key(h) {
                    region_of_face.insert(*h, regions);
                    queue.push_back(*h);
                }
            }
        }
        regions += 1;
    }

    // Colors: BFS over faces from each anchor, flipping across walls.
    let mut face_color: BTreeMap<FaceId, u8> = BTreeMap::new();
    for (info, bit) in cx.components.iter().zip(polarity) {
        if *bit > 1 {
            return Err(InvariantError::PolarityBit(*bit));
        }
        let mut queue = VecDeque::from([info.anchor]);
        face_color.insert(info.anchor, *bit);
        while let Some(g) = queue.pop_front() {
            let c = face_color[&g];
            for (h, flip) in neighbours.get(&g).into_iter().flatten() {
                let want = c ^ flip;
                match face_color.get(h) {
                    None => {
                        face_color.insert(*h, want);
                        queue.push_back(*h);
                    }
                    Some(&have) if have != want => {
                        return Err(InvariantError::Checkerboard {
                            component: info.label.clone(),
                            face: *h,
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let mut region_colors = vec![0u8; regions];
    for (f, r) in &region_of_face {
        match face_color.get(f) {
            Some(c) => region_colors[*r] = *c,
            None => {
                return Err(InvariantError::Unanchored(cx.faces[f].component.clone()));
            }
        }
    }

    let face_of_edge = |e: EdgeId| sides[&e][0];
    let circle_colors = decker
        .a_f()
        .into_iter()
        .map(|c| {
            let e = decker.circles[c].walk[0].edge;
            (c, face_color[&face_of_edge(e)])
        })
        .collect();
    Ok(Coloring {
        polarity: polarity.to_vec(),
        region_of_face,
        region_colors,
        circle_colors,
    })
}
