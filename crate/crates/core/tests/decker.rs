use std::path::PathBuf;

use pequiv::decker::{assemble_decker, CircleRole, DeckerSet};
use pequiv::movie::parse_movie;
use pequiv::surface::build_surface;

fn decker(name: &str) -> DeckerSet {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.movie"));
    let movie = parse_movie(&std::fs::read_to_string(path).unwrap()).unwrap();
    assemble_decker(&build_surface(&movie).unwrap()).unwrap()
}

fn roles(set: &DeckerSet, label: &str) -> Vec<CircleRole> {
    let mut r: Vec<_> = set.on_component(label).map(|c| c.role).collect();
    r.sort();
    r
}

#[test]
fn unknotted_fixtures_have_no_decker_set() {
    for name in ["sphere", "torus", "d_f_prime"] {
        assert!(decker(name).is_empty(), "{name}");
    }
}

#[test]
fn finger_between_spheres_gives_one_mated_pair() {
    let set = decker("finger_spheres");
    assert_eq!(roles(&set, "A"), vec![CircleRole::Upper]);
    assert_eq!(roles(&set, "B"), vec![CircleRole::Lower]);
    assert_eq!(set.a_f(), vec![0, 1]);
    assert_eq!(set.circles[0].mate, 1);
}

#[test]
fn kink_gives_a_single_branch_arc() {
    let set = decker("kink_sphere");
    assert_eq!(set.circles.len(), 1);
    let c = &set.circles[0];
    assert_eq!((c.role, c.branch_points, c.mate), (CircleRole::Mixed, 2, 0));
    assert!(set.a_f().is_empty());
}

#[test]
fn self_finger_is_not_in_a_f() {
    let set = decker("self_finger_sphere");
    assert_eq!(roles(&set, "s"), vec![CircleRole::Upper, CircleRole::Lower]);
    assert!(set.a_f().is_empty());
}

#[test]
fn d_f_has_two_circles_per_component() {
    let set = decker("d_f");
    assert_eq!(roles(&set, "torus"), vec![CircleRole::Upper, CircleRole::Lower]);
    assert_eq!(roles(&set, "sphere"), vec![CircleRole::Upper, CircleRole::Lower]);
    assert_eq!(set.a_f().len(), 4);
    for c in &set.circles {
        let m = &set.circles[c.mate];
        assert_eq!(m.mate, c.id);
        assert_ne!(m.component, c.component);
    }
}
