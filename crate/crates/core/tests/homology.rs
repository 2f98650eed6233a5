mod common;

use pequiv::homology::{
    boundary, divisibility, gcd, smith_normal_form, Chain, Homology, HomologyError, IntMatrix,
};
use common::{complex, det, determinant_divisor, P_FIXTURES as FIXTURES};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_smith(m: &IntMatrix) {
    let sm = smith_normal_form(m).unwrap();
    assert_eq!(sm.u.mul(m).unwrap().mul(&sm.v).unwrap(), sm.s);
    assert!(sm.s.is_diagonal());
    assert_eq!(det(&sm.u).abs(), 1);
    assert_eq!(det(&sm.v).abs(), 1);
    let f = sm.invariant_factors();
    assert!(f.iter().all(|&d| d > 0));
    assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
    let mut product = 1i128;
    for k in 1..=m.rows().min(m.cols()) {
        if k <= f.len() {
            product *= i128::from(f[k - 1]);
        } else {
            product = 0;
        }
        assert_eq!(determinant_divisor(m, k), product, "k = {k}\n{m:?}");
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let rows = rng.gen_range(1..=8);
    let cols = rng.gen_range(1..=8);
    let sparse = rng.gen_bool(0.3);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if sparse && rng.gen_bool(0.6) {
                        0
                    } else {
                        rng.gen_range(-9..=9)
                    }
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&data)
}

#[test]
fn smith_form_matches_determinant_divisors_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        check_smith(&random_matrix(&mut rng));
    }
}

#[test]
fn smith_form_of_known_matrices() {
    let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let sm = smith_normal_form(&m).unwrap();
    assert_eq!(sm.invariant_factors(), vec![2, 6, 12]);
    let z = IntMatrix::zeros(3, 2);
    assert_eq!(smith_normal_form(&z).unwrap().rank, 0);
}

#[test]
fn overflow_is_reported() {
    // Coprime diagonal entries whose product does not fit in 64 bits.
    let m = IntMatrix::from_rows(&[vec![i64::MAX, 0], vec![0, i64::MAX - 1]]);
    assert_eq!(smith_normal_form(&m).unwrap_err(), HomologyError::Overflow);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn smith_form_property(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        check_smith(&IntMatrix::from_rows(&data));
    }
}

#[test]
fn boundary_of_boundary_vanishes() {
    for name in FIXTURES {
        let cx = complex(name);
        for f in cx.faces.values() {
            let mut z = Chain::new();
            for s in &f.boundary {
                *z.entry(s.edge).or_default() += i64::from(s.sign);
            }
            assert!(boundary(&cx, &z).unwrap().is_empty(), "{name}");
        }
    }
}

#[test]
fn ranks_match_genus() {
    for name in FIXTURES {
        let cx = complex(name);
        let h = Homology::of(&cx).unwrap();
        for s in cx.component_summary() {
            let c = h.component(&s.label).unwrap();
            assert_eq!(c.genus, s.genus, "{name}");
            assert_eq!(c.rank() as i64, 2 * s.genus);
        }
    }
}

#[test]
fn face_boundary_sums_are_null_homologous() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in FIXTURES {
        let cx = complex(name);
        let h = Homology::of(&cx).unwrap();
        let faces: Vec<_> = cx.faces.values().collect();
        for _ in 0..20 {
            let mut z = Chain::new();
            for f in &faces {
                let k = rng.gen_range(-3i64..=3);
                for s in &f.boundary {
                    *z.entry(s.edge).or_default() += k * i64::from(s.sign);
                }
            }
            for (_, class) in h.classes(&cx, &z).unwrap() {
                assert!(class.iter().all(|&x| x == 0), "{name}");
            }
        }
    }
}

#[test]
fn torus_level_loops_are_meridians() {
    let cx = complex("torus");
    let h = Homology::of(&cx).unwrap();
    let mut divs: Vec<i64> = cx
        .edges
        .iter()
        .filter(|(_, e)| e.tail == e.head)
        .map(|(id, _)| {
            let z = Chain::from([(*id, 1)]);
            divisibility(&h.classes(&cx, &z).unwrap()[0].1)
        })
        .collect();
    divs.sort();
    divs.dedup();
    assert_eq!(divs, vec![0, 1]);
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            p.add_row(i, j, rng.gen_range(-2..=2)).unwrap();
        } else {
            p.negate_row(i).unwrap();
        }
    }
    p
}

#[test]
fn divisibility_is_basis_independent() {
    let cx = complex("torus");
    let h = Homology::of(&cx).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let loops: Vec<_> = cx.edges.iter().filter(|(_, e)| e.tail == e.head).map(|(id, _)| *id).collect();
    for _ in 0..50 {
        let mut z = Chain::new();
        let k = rng.gen_range(1..=5);
        z.insert(loops[rng.gen_range(0..loops.len())], k);
        let class = h.classes(&cx, &z).unwrap()[0].1.clone();
        let p = random_unimodular(class.len(), &mut rng);
        assert_eq!(det(&p).abs(), 1);
        let changed = p.mul_vec(&class).unwrap();
        assert_eq!(divisibility(&changed), divisibility(&class));
        assert_eq!(divisibility(&class) % k, 0);
    }
    assert_eq!(gcd(-4, 6), 2);
}
