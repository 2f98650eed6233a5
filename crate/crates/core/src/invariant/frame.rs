use std::collections::BTreeMap;

use serde::Serialize;

use crate::movie::{Role, Sign};

type Vec3 = [i64; 3];

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det(a: Vec3, b: Vec3, c: Vec3) -> i64 {
    let x = cross(b, c);
    a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
}

const E_Z: Vec3 = [0, 0, 1];

/// Strand directions of the over and under arcs at a crossing in the
/// standard local picture.
fn strands(sign: Sign) -> (Vec3, Vec3) {
    let (p, q) = ([1, 1, 0], [-1, 1, 0]);
    match sign {
        Sign::Positive => (p, q),
        Sign::Negative => (q, p),
    }
}

/// Orientation of a decker edge traced by a crossing, relative to the
/// edge's own direction, in the local model of the two sheets.
///
/// Each sheet near the crossing is spanned by its strand direction and the
/// time axis, with normal `strand × e_z`. The double curve runs along the
/// time axis; it is oriented so that (upper normal, lower normal, tangent)
/// is positive with respect to the ambient orientation.
pub fn local_model_sign(sign: Sign, forward: bool, ambient: i8, _role: Role) -> i8 {
    let (over, under) = strands(sign);
    let n1 = cross(over, E_Z);
    let n2 = cross(under, E_Z);
    let t = if forward { 1 } else { -1 };
    let d = i64::from(ambient) * det(n1, n2, [0, 0, t]);
    d.signum() as i8
}

/// Orientation entries for every (sign, time direction, role) of a traced
/// decker edge, under one ambient orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameSignTable {
    pub ambient: i8,
    entries: BTreeMap<(Sign, bool, Role), i8>,
}

impl FrameSignTable {
    pub fn derive(ambient: i8) -> FrameSignTable {
        assert!(ambient == 1 || ambient == -1, "ambient orientation is ±1");
        let mut entries = BTreeMap::new();
        for sign in [Sign::Positive, Sign::Negative] {
            for forward in [true, false] {
                for role in [Role::Upper, Role::Lower] {
                    entries.insert(
                        (sign, forward, role),
                        local_model_sign(sign, forward, ambient, role),
                    );
                }
            }
        }
        FrameSignTable { ambient, entries }
    }

    pub fn get(&self, sign: Sign, forward: bool, role: Role) -> i8 {
        self.entries[&(sign, forward, role)]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((Sign, bool, Role), i8)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Every configuration has a nonzero entry.
    pub fn is_total(&self) -> bool {
        self.entries.len() == 8 && self.entries.values().all(|v| *v == 1 || *v == -1)
    }
}

impl Default for FrameSignTable {
    fn default() -> Self {
        FrameSignTable::derive(1)
    }
}
