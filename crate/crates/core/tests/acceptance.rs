//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use pequiv::decker::assemble_decker;
use pequiv::homology::{divisibility, smith_normal_form, Chain, Homology, IntMatrix};
use pequiv::invariant::{
    checkerboard, compare, invariant_result, orient_decker_circles, polarities, wall_edges,
    FrameSignTable, Verdict,
};
use pequiv::movie::generate::{random_p_movie, GeneratorConfig};
use pequiv::movie::{Movie, Role, Sign};
use pequiv::moves::{
    applicable_moves, apply_move, verify_invariance, verify_transition, Direction, Location,
    MoveInstance, MoveKind,
};
use pequiv::surface::{build_surface, EdgeId, FaceId, Step, SurfaceComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{complex, det, determinant_divisor, fixture_dir, P_FIXTURES};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pequiv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pequiv"))
        .args(args)
        .arg("--fixtures")
        .arg(fixture_dir())
        .output()
        .expect("binary runs")
}

fn random_movies(n: usize, seed: u64) -> Vec<Movie> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GeneratorConfig::default();
    (0..n)
        .map(|k| random_p_movie(&mut rng, &format!("random{k}"), &cfg))
        .collect()
}

fn criterion_1() -> Outcome {
    let limit = Duration::from_secs(1);
    let mut results = BTreeMap::new();
    for name in ["d_f", "d_f_prime"] {
        let t = Instant::now();
        let cx = complex(name);
        let d = assemble_decker(&cx).map_err(|e| e.to_string())?;
        let r = invariant_result(&cx, &d, &FrameSignTable::default()).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        ensure(elapsed < limit, || format!("{name} took {elapsed:?}"))?;
        results.insert(name, (d, r));
    }
    let (d_prime, r_prime) = &results["d_f_prime"];
    ensure(d_prime.is_empty(), || "D_F' has decker circles".into())?;
    ensure(
        r_prime.classes.iter().all(|c| c.is_zero()),
        || "D_F' key is not all zero".into(),
    )?;
    let (_, r) = &results["d_f"];
    let torus = r
        .canonical_class()
        .components
        .iter()
        .find(|c| c.genus == 1)
        .ok_or("no genus-1 component in D_F")?;
    ensure(
        torus.divisibility == 1 && torus.coordinates.iter().any(|&x| x != 0),
        || format!("D_F torus class {:?}", torus.coordinates),
    )?;
    let verdict = compare(r, r_prime).map_err(|e| e.to_string())?;
    ensure(verdict == Verdict::Distinguished, || format!("library verdict {verdict}"))?;

    let t = Instant::now();
    let out = pequiv(&["compare", "d_f", "d_f_prime"]);
    let elapsed = t.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success() && stdout.trim() == "DISTINGUISHED", || {
        format!("cli printed {stdout:?} with {:?}", out.status.code())
    })?;
    ensure(elapsed < limit, || format!("cli compare took {elapsed:?}"))?;
    Ok(format!(
        "DISTINGUISHED; D_F torus class {:?} (divisibility 1); D_F' empty and zero",
        torus.coordinates
    ))
}

fn criterion_2() -> Outcome {
    let cx = complex("d_f");
    let d = assemble_decker(&cx).map_err(|e| e.to_string())?;
    let on = |label: &str| d.on_component(label).count();
    ensure(on("torus") == 2 && on("sphere") == 2, || {
        format!("circles per component: torus {}, sphere {}", on("torus"), on("sphere"))
    })?;
    ensure(d.circles.len() == 4, || format!("{} circles", d.circles.len()))?;
    ensure(d.a_f() == vec![0, 1, 2, 3], || format!("A_f = {:?}", d.a_f()))?;
    for c in &d.circles {
        let m = &d.circles[c.mate];
        ensure(m.mate == c.id && m.id != c.id, || format!("mate of {} breaks", c.id))?;
        ensure(m.component != c.component, || format!("{} mated on its own component", c.id))?;
    }
    Ok("2 circles on the torus, 2 on the sphere, A_f = all 4, mates form an involution".into())
}

fn role_flip(cx: &SurfaceComplex) -> SurfaceComplex {
    let d = assemble_decker(cx).expect("decker");
    let c = d.a_f()[0];
    let mut bad = cx.clone();
    for id in [c, d.circles[c].mate] {
        for s in &d.circles[id].walk {
            let tag = bad
                .edges
                .get_mut(&s.edge)
                .and_then(|e| e.decker.as_mut())
                .expect("decker edge");
            tag.role = tag.role.opposite();
        }
    }
    bad
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut checked = 0usize;
    let mut per_kind: BTreeMap<String, usize> = BTreeMap::new();
    for name in P_FIXTURES {
        let cx = complex(name);
        let moves = applicable_moves(&cx).map_err(|e| e.to_string())?;
        for mi in &moves {
            let ok = verify_invariance(&cx, mi).map_err(|e| format!("{name}: {mi}: {e}"))?;
            ensure(ok, || format!("{name}: {mi} changed the invariant"))?;
            *per_kind
                .entry(format!("{:?}{}", mi.kind, if mi.direction == Direction::Forward { "+" } else { "-" }))
                .or_default() += 1;
            checked += 1;
            // Every forward move also reports its inverse; check it too.
            let (after, inverse) = apply_move(&cx, mi).map_err(|e| e.to_string())?;
            let ok = verify_invariance(&after, &inverse).map_err(|e| format!("{name}: {inverse}: {e}"))?;
            ensure(ok, || format!("{name}: inverse {inverse} changed the invariant"))?;
            *per_kind
                .entry(format!("{:?}{}", inverse.kind, if inverse.direction == Direction::Forward { "+" } else { "-" }))
                .or_default() += 1;
            checked += 1;
        }
    }
    // Folds need a loop pair, which a III insertion on a single face makes.
    for name in P_FIXTURES {
        let cx = complex(name);
        for face in cx.faces.keys().copied().take(3) {
            let iii = MoveInstance {
                kind: MoveKind::III,
                direction: Direction::Forward,
                location: Location::Faces { upper: face, lower: face },
            };
            let (with_pair, undo) = apply_move(&cx, &iii).map_err(|e| format!("{name}: {e}"))?;
            let Location::Loops { upper, lower } = undo.location else {
                return Err(format!("{name}: {iii} did not make a loop pair"));
            };
            let fold = MoveInstance {
                kind: MoveKind::II,
                direction: Direction::Forward,
                location: Location::Loops { upper, lower },
            };
            let ok = verify_invariance(&with_pair, &fold).map_err(|e| format!("{name}: {fold}: {e}"))?;
            ensure(ok, || format!("{name}: {fold} changed the invariant"))?;
            let (folded, unfold) = apply_move(&with_pair, &fold).map_err(|e| e.to_string())?;
            let ok = verify_invariance(&folded, &unfold).map_err(|e| format!("{name}: {unfold}: {e}"))?;
            ensure(ok, || format!("{name}: {unfold} changed the invariant"))?;
            *per_kind.entry("II+".into()).or_default() += 1;
            *per_kind.entry("II-".into()).or_default() += 1;
            checked += 2;
        }
    }
    for kind in ["I+", "I-", "II+", "II-", "III+", "III-", "IV+", "IV-"] {
        ensure(per_kind.contains_key(kind), || format!("no instance of move {kind} exercised"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut random = 0usize;
    for name in P_FIXTURES.iter().cycle().take(10) {
        let mut cx = complex(name);
        for _ in 0..12 {
            let faces: Vec<FaceId> = cx.faces.keys().copied().collect();
            let mi = MoveInstance {
                kind: MoveKind::III,
                direction: Direction::Forward,
                location: Location::Faces {
                    upper: faces[rng.gen_range(0..faces.len())],
                    lower: faces[rng.gen_range(0..faces.len())],
                },
            };
            let ok = verify_invariance(&cx, &mi).map_err(|e| format!("{name}: {mi}: {e}"))?;
            ensure(ok, || format!("{name}: random {mi} changed the invariant"))?;
            cx = apply_move(&cx, &mi).map_err(|e| e.to_string())?.0;
            random += 1;
        }
    }

    let cx = complex("d_f");
    let flipped = verify_transition(&cx, &role_flip(&cx)).map_err(|e| e.to_string())?;
    ensure(!flipped, || "role-flip mutation was not detected".into())?;

    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{checked} fixture move instances {per_kind:?}, {random} random III insertions, \
         role flip detected, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn face_sides(cx: &SurfaceComplex) -> BTreeMap<EdgeId, Vec<FaceId>> {
    let mut out: BTreeMap<EdgeId, Vec<FaceId>> = BTreeMap::new();
    for (f, face) in &cx.faces {
        for s in &face.boundary {
            out.entry(s.edge).or_default().push(*f);
        }
    }
    out
}

fn criterion_4(movies: &[Movie]) -> Outcome {
    let mut colorings = 0;
    for m in movies {
        let cx = build_surface(m).map_err(|e| format!("{}: {e}", m.name))?;
        let d = assemble_decker(&cx).map_err(|e| format!("{}: {e}", m.name))?;
        let walls = wall_edges(&d);
        let sides = face_sides(&cx);
        for p in polarities(cx.components.len()) {
            let c = checkerboard(&cx, &d, &p).map_err(|e| format!("{} {p:?}: {e}", m.name))?;
            for (e, fs) in &sides {
                let (a, b) = (c.face_color(fs[0]), c.face_color(fs[1]));
                let wall = walls.contains_key(e);
                ensure((a != b) == wall, || {
                    format!("{} {p:?}: colors {a}/{b} across {e} (wall: {wall})", m.name)
                })?;
            }
            for (k, info) in cx.components.iter().enumerate() {
                ensure(c.face_color(info.anchor) == p[k], || {
                    format!("{}: anchor of {} does not carry its bit", m.name, info.label)
                })?;
            }
            colorings += 1;
        }
    }
    Ok(format!(
        "{} random p-movies, {colorings} colorings, every polarity on every component",
        movies.len()
    ))
}

fn criterion_5(movies: &[Movie]) -> Outcome {
    let summary = |name: &str| {
        let c = complex(name).component_summary();
        (c[0].euler, c[0].genus)
    };
    ensure(summary("sphere") == (2, 0), || format!("sphere {:?}", summary("sphere")))?;
    ensure(summary("torus") == (0, 1), || format!("torus {:?}", summary("torus")))?;
    let mut genera = BTreeMap::new();
    for m in movies {
        let cx = build_surface(m).map_err(|e| e.to_string())?;
        let (cells, morse) = (cx.euler_characteristic(), m.morse_euler_characteristic());
        ensure(cells == morse, || format!("{}: cells {cells}, Morse {morse}", m.name))?;
        for c in cx.component_summary() {
            *genera.entry(c.genus).or_insert(0) += 1;
        }
    }
    Ok(format!(
        "sphere (2, 0), torus (0, 1); cell and Morse counts agree on {} random movies \
         (components by genus {genera:?})",
        movies.len()
    ))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let rows = rng.gen_range(1..=8);
    let cols = rng.gen_range(1..=8);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
        .collect();
    IntMatrix::from_rows(&data)
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            p.add_row(i, j, rng.gen_range(-3..=3)).expect("small");
        } else {
            p.negate_row(i).expect("small");
        }
    }
    p
}

fn criterion_6(movies: &[Movie]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 0..500 {
        let m = random_matrix(&mut rng);
        let sm = smith_normal_form(&m).map_err(|e| format!("matrix {n}: {e}"))?;
        let product = sm.u.mul(&m).and_then(|x| x.mul(&sm.v)).map_err(|e| e.to_string())?;
        ensure(product == sm.s && sm.s.is_diagonal(), || format!("U M V != S for {m:?}"))?;
        ensure(det(&sm.u).abs() == 1 && det(&sm.v).abs() == 1, || {
            format!("transforms not unimodular for {m:?}")
        })?;
        let f = sm.invariant_factors();
        ensure(f.windows(2).all(|w| w[1] % w[0] == 0), || format!("chain broken: {f:?}"))?;
        let mut running = 1i128;
        for k in 1..=m.rows().min(m.cols()) {
            running = if k <= f.len() { running * i128::from(f[k - 1]) } else { 0 };
            ensure(determinant_divisor(&m, k) == running, || {
                format!("determinant divisor {k} of {m:?}")
            })?;
        }
    }

    let mut sums = 0;
    let mut complexes: Vec<SurfaceComplex> = P_FIXTURES.iter().map(|n| complex(n)).collect();
    complexes.extend(movies.iter().take(20).map(|m| build_surface(m).expect("builds")));
    for cx in &complexes {
        let h = Homology::of(cx).map_err(|e| e.to_string())?;
        let faces: Vec<_> = cx.faces.values().collect();
        for _ in 0..10 {
            let mut z = Chain::new();
            for f in &faces {
                let k = rng.gen_range(-2i64..=2);
                for s in &f.boundary {
                    *z.entry(s.edge).or_default() += k * i64::from(s.sign);
                }
            }
            for (label, class) in h.classes(cx, &z).map_err(|e| e.to_string())? {
                ensure(class.iter().all(|&x| x == 0), || {
                    format!("{}: face sum has class {class:?} on {label}", cx.name)
                })?;
            }
            sums += 1;
        }
    }

    let torus = complex("torus");
    let h = Homology::of(&torus).map_err(|e| e.to_string())?;
    let loops: Vec<EdgeId> = torus
        .edges
        .iter()
        .filter(|(_, e)| e.tail == e.head)
        .map(|(id, _)| *id)
        .collect();
    let mut changes = 0;
    for _ in 0..60 {
        let mut z = Chain::new();
        z.insert(loops[rng.gen_range(0..loops.len())], rng.gen_range(1..=6));
        let class = h.classes(&torus, &z).map_err(|e| e.to_string())?[0].1.clone();
        let p = random_unimodular(class.len(), &mut rng);
        ensure(det(&p).abs() == 1, || "basis change is not unimodular".into())?;
        let moved = p.mul_vec(&class).map_err(|e| e.to_string())?;
        ensure(divisibility(&moved) == divisibility(&class), || {
            format!("divisibility of {class:?} changed to that of {moved:?}")
        })?;
        changes += 1;
    }
    Ok(format!(
        "500 random matrices, {sums} face-boundary sums, {changes} basis changes"
    ))
}

/// Cuts `walk` at its branch vertices and checks that `oriented` runs
/// through each stretch as a path, either along the walk or against it.
fn stretches_chain(cx: &SurfaceComplex, walk: &[Step], oriented: &[Step]) -> bool {
    let n = walk.len();
    let mut cuts: Vec<usize> = (0..n)
        .filter(|&k| cx.vertices[&cx.step_start(walk[k])].branch)
        .collect();
    if cuts.is_empty() {
        cuts.push(0);
    }
    cuts.iter().enumerate().all(|(ci, &start)| {
        let end = cuts.get(ci + 1).copied().unwrap_or(cuts[0] + n);
        let part: Vec<Step> = (start..end).map(|k| oriented[k % n]).collect();
        let along = part.windows(2).all(|w| cx.step_end(w[0]) == cx.step_start(w[1]));
        let against = part.windows(2).all(|w| cx.step_end(w[1]) == cx.step_start(w[0]));
        along || against
    })
}

fn criterion_7() -> Outcome {
    let plus = FrameSignTable::derive(1);
    let minus = FrameSignTable::derive(-1);
    ensure(plus.is_total() && minus.is_total(), || "table not total".into())?;
    let mut configs = 0;
    for sign in [Sign::Positive, Sign::Negative] {
        for forward in [true, false] {
            for role in [Role::Upper, Role::Lower] {
                let v = plus.get(sign, forward, role);
                ensure(v == 1 || v == -1, || format!("entry {v}"))?;
                ensure(minus.get(sign, forward, role) == -v, || {
                    format!("{sign:?}/{forward}/{role:?} does not flip")
                })?;
                configs += 1;
            }
        }
    }
    let mut circles = 0;
    for name in P_FIXTURES {
        let cx = complex(name);
        let d = assemble_decker(&cx).map_err(|e| e.to_string())?;
        let a = orient_decker_circles(&cx, &d, &plus).map_err(|e| format!("{name}: {e}"))?;
        let b = orient_decker_circles(&cx, &d, &minus).map_err(|e| format!("{name}: {e}"))?;
        for (x, y) in a.iter().zip(&b) {
            ensure(stretches_chain(&cx, &d.circles[x.circle].walk, &x.steps), || {
                format!("{name}: circle {} is not oriented along its stretches", x.circle)
            })?;
            if d.circles[x.circle].branch_points == 0 {
                let back: Vec<Step> = x.steps.iter().rev().copied().collect();
                ensure(cx.is_closed_walk(&x.steps) || cx.is_closed_walk(&back), || {
                    format!("{name}: circle {} is not a closed oriented walk", x.circle)
                })?;
            }
            let reversed: Vec<_> = y.steps.iter().map(|s| (s.edge, -s.sign)).collect();
            let forward: Vec<_> = x.steps.iter().map(|s| (s.edge, s.sign)).collect();
            let mut r = reversed.clone();
            r.sort();
            let mut f = forward.clone();
            f.sort();
            ensure(r == f, || format!("{name}: circle {} does not reverse", x.circle))?;
            circles += 1;
        }
    }
    Ok(format!(
        "{configs} configurations, global flip, {circles} fixture circles oriented consistently"
    ))
}

/// Movies with triple points: the fixture, and variants with other
/// handedness and an extra component around it.
fn triple_point_movies(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let base = std::fs::read_to_string(fixture_dir().join("triangle.movie")).expect("fixture");
    let mut out = vec![fixture_dir().join("triangle.movie")];
    let variants = [
        base.replace("config=r -> p1 p2", "config=l -> p1 p2"),
        base.replace("config=r -> q1 q2", "config=l -> q1 q2"),
        base.replace(
            "birth c component=q orient=+\n",
            "birth c component=q orient=+\nbirth z component=extra orient=-\n",
        )
        .replace("death c\n", "death c\ndeath z\n"),
    ];
    for (k, text) in variants.iter().enumerate() {
        let p = dir.join(format!("triangle_{k}.movie"));
        std::fs::write(&p, text.replace("movie triangle", &format!("movie triangle_{k}")))
            .expect("write");
        out.push(p);
    }
    out
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for path in triple_point_movies(dir.path()) {
        let p = path.to_str().expect("utf8 path");
        let commands: [&[&str]; 7] = [
            &["validate", p],
            &["surface", p],
            &["decker", p],
            &["invariant", p],
            &["compare", p, "d_f"],
            &["compare", "d_f", p],
            &["apply-move", p, "--list"],
        ];
        for args in commands {
            let out = pequiv(args);
            ensure(out.status.code() == Some(2), || {
                format!(
                    "{args:?} exited {:?}: {}",
                    out.status.code(),
                    String::from_utf8_lossy(&out.stderr)
                )
            })?;
            runs += 1;
        }
        let m = pequiv::movie::parse_movie(&std::fs::read_to_string(&path).unwrap())
            .map_err(|e| e.to_string())?;
        ensure(build_surface(&m).is_err(), || "library built a surface".into())?;
    }
    Ok(format!("{runs} command runs on movies with triple points all exited 2"))
}

fn main() {
    let movies = random_movies(120, 2718);
    type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("counterexample reproduction", Box::new(criterion_1)),
        ("decker structure of D_F", Box::new(criterion_2)),
        ("move invariance", Box::new(criterion_3)),
        ("checkerboard existence", Box::new(|| criterion_4(&movies))),
        ("surface reconstruction", Box::new(|| criterion_5(&movies))),
        ("homology oracle", Box::new(|| criterion_6(&movies))),
        ("orientation table", Box::new(criterion_7)),
        ("p-gating", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS ({title}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({title}): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
