#![allow(dead_code)]

use std::path::PathBuf;

use pequiv::homology::IntMatrix;
use pequiv::movie::{parse_movie, Movie};
use pequiv::surface::{build_surface, SurfaceComplex};

/// Fixtures whose movies have no triple points.
pub const P_FIXTURES: [&str; 8] = [
    "sphere",
    "torus",
    "finger_spheres",
    "kink_sphere",
    "self_finger_sphere",
    "torus_finger",
    "d_f",
    "d_f_prime",
];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn movie(name: &str) -> Movie {
    let path = fixture_dir().join(format!("{name}.movie"));
    parse_movie(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn complex(name: &str) -> SurfaceComplex {
    build_surface(&movie(name)).unwrap()
}

/// Exact determinant by fraction-free elimination.
pub fn bareiss(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// k-th determinant divisor: gcd of all k-by-k minors.
pub fn determinant_divisor(m: &IntMatrix, k: usize) -> i128 {
    let mut g = 0i128;
    for rs in subsets(m.rows(), k) {
        for cs in subsets(m.cols(), k) {
            let minor: Vec<Vec<i128>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| i128::from(m[(i, j)])).collect())
                .collect();
            let mut d = bareiss(minor).abs();
            let mut a = g;
            while d != 0 {
                (a, d) = (d, a % d);
            }
            g = a;
        }
    }
    g
}

pub fn det(m: &IntMatrix) -> i128 {
    bareiss(
        m.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(i128::from).collect())
            .collect(),
    )
}
