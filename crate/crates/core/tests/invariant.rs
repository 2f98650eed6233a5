use std::collections::BTreeSet;
use std::path::PathBuf;

use pequiv::decker::{assemble_decker, DeckerSet};
use pequiv::invariant::{
    checkerboard, compare, compute_x, invariant_result, local_model_sign, orient_decker_circles,
    FrameSignTable, InvariantResult, Verdict,
};
use pequiv::movie::{parse_movie, Role, Sign};
use pequiv::surface::{build_surface, SurfaceComplex};

fn load(name: &str) -> (SurfaceComplex, DeckerSet) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.movie"));
    let movie = parse_movie(&std::fs::read_to_string(path).unwrap()).unwrap();
    let cx = build_surface(&movie).unwrap();
    let d = assemble_decker(&cx).unwrap();
    (cx, d)
}

fn result(name: &str) -> InvariantResult {
    let (cx, d) = load(name);
    invariant_result(&cx, &d, &FrameSignTable::default()).unwrap()
}

const FIXTURES: [&str; 8] = [
    "sphere",
    "torus",
    "finger_spheres",
    "kink_sphere",
    "self_finger_sphere",
    "torus_finger",
    "d_f",
    "d_f_prime",
];

#[test]
fn local_model_positive_forward_upper() {
    // Normals (1,-1,0) and (1,1,0) with tangent e_z: determinant 2.
    assert_eq!(local_model_sign(Sign::Positive, true, 1, Role::Upper), 1);
    assert_eq!(local_model_sign(Sign::Negative, true, 1, Role::Upper), -1);
    assert_eq!(local_model_sign(Sign::Positive, false, 1, Role::Lower), -1);
}

#[test]
fn table_is_total_and_flips_with_ambient_orientation() {
    let (p, n) = (FrameSignTable::derive(1), FrameSignTable::derive(-1));
    assert!(p.is_total() && n.is_total());
    for (k, v) in p.entries() {
        assert_eq!(n.get(k.0, k.1, k.2), -v);
        assert_eq!(v, p.get(k.0, k.1, k.2.opposite()), "roles share one frame");
    }
}

#[test]
fn every_fixture_orients_consistently() {
    for name in FIXTURES {
        let (cx, d) = load(name);
        let a = orient_decker_circles(&cx, &d, &FrameSignTable::derive(1)).unwrap();
        let b = orient_decker_circles(&cx, &d, &FrameSignTable::derive(-1)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (s, t) in x.steps.iter().zip(&y.steps) {
                assert_eq!(s.sign, -t.sign, "{name}");
            }
        }
    }
}

#[test]
fn mated_edges_run_the_same_way_in_time() {
    let (cx, d) = load("d_f");
    let oriented = orient_decker_circles(&cx, &d, &FrameSignTable::default()).unwrap();
    let sign_of = |e| {
        let c = d.circle_of_edge[&e];
        oriented[c].steps.iter().find(|s| s.edge == e).unwrap().sign
    };
    let mut checked = 0;
    for (e, edge, tag) in cx.decker_edges() {
        if let (Some(m), Some(_)) = (tag.mate, tag.frame) {
            let other = cx.edge(m);
            assert_ne!(cx.vertices[&edge.tail].component, cx.vertices[&other.tail].component);
            assert_eq!(sign_of(e), sign_of(m));
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn self_finger_has_three_regions() {
    let (cx, d) = load("self_finger_sphere");
    let zero = checkerboard(&cx, &d, &[0]).unwrap();
    let one = checkerboard(&cx, &d, &[1]).unwrap();
    assert_eq!(zero.regions(), 3);
    assert_eq!(
        zero.region_colors.iter().map(|c| 1 - c).collect::<Vec<_>>(),
        one.region_colors
    );
}

#[test]
fn d_f_torus_is_one_region() {
    let (cx, d) = load("d_f");
    let c = checkerboard(&cx, &d, &[1, 0]).unwrap();
    assert_eq!(c.regions(), 2);
    let x = compute_x(&c, &d);
    let torus_upper: BTreeSet<usize> = d
        .on_component("torus")
        .filter(|c| c.role == pequiv::decker::CircleRole::Upper)
        .map(|c| c.id)
        .collect();
    assert_eq!(x, torus_upper);
}

#[test]
fn d_f_keys() {
    let r = result("d_f");
    let expected: BTreeSet<Vec<(i64, i64)>> = [
        vec![(0, 0), (1, 0)],
        vec![(0, 0), (1, 1)],
    ]
    .into_iter()
    .collect();
    assert_eq!(r.key, expected);
    let canonical = r.canonical_class();
    assert_eq!(canonical.polarity, vec![1, 1]);
    let torus = canonical.components.iter().find(|c| c.label == "torus").unwrap();
    assert_eq!((torus.genus, torus.divisibility), (1, 1));
    assert!(r.class_for(&[0, 0]).unwrap().is_zero());
}

#[test]
fn d_f_prime_key_is_zero() {
    let r = result("d_f_prime");
    assert_eq!(r.key.len(), 1);
    assert!(r.classes.iter().all(|c| c.is_zero()));
    assert_eq!(r.key.first().unwrap(), &vec![(0, 0), (1, 0)]);
}

#[test]
fn comparisons() {
    let (df, dfp) = (result("d_f"), result("d_f_prime"));
    assert_eq!(compare(&df, &dfp).unwrap(), Verdict::Distinguished);
    assert_eq!(compare(&df, &df).unwrap(), Verdict::Inconclusive);
    assert_eq!(
        compare(&dfp, &result("torus_finger")).unwrap(),
        Verdict::Inconclusive
    );
    assert!(compare(&df, &result("torus")).is_err());
}

#[test]
fn single_component_fixtures_give_zero() {
    for name in ["sphere", "torus", "kink_sphere", "self_finger_sphere"] {
        assert!(result(name).classes.iter().all(|c| c.is_zero()), "{name}");
    }
    // A finger between two spheres only ever reaches null-homologous circles.
    assert!(result("finger_spheres").classes.iter().all(|c| c.is_zero()));
}
