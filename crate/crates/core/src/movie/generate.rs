//! Random triple-point-free movies for property tests.
//!
//! The generator keeps every circle busy with at most one open feature (a
//! finger or a kink) at a time, so each feature can be closed on a circle
//! whose only slots are its own. Fingers between circles of one component are
//! always cancelled across their tip. Between different components the under
//! strand may instead be swept across its far side, which passes the finger
//! through the whole circle.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{parse_movie, Movie};

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_components: usize,
    pub max_genus: usize,
    /// Random steps before everything open is closed.
    pub steps: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_components: 3,
            max_genus: 2,
            steps: 14,
        }
    }
}

#[derive(Debug, Clone)]
enum Open {
    Finger {
        over: String,
        under: String,
        crossings: [String; 2],
        antiparallel: bool,
        sweep: bool,
    },
    Kink {
        circle: String,
        crossing: String,
    },
}

#[derive(Debug, Default)]
struct State {
    lines: Vec<String>,
    /// Live circle id to component label.
    circles: BTreeMap<String, String>,
    busy: BTreeSet<String>,
    open: Vec<Open>,
    /// Split handles waiting to be merged back, as (stay, handle).
    handles: Vec<(String, String)>,
    fresh: usize,
}

impl State {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn free(&self) -> Vec<String> {
        self.circles
            .keys()
            .filter(|c| !self.busy.contains(*c))
            .cloned()
            .collect()
    }

    fn close(&mut self, k: usize) {
        match self.open.remove(k) {
            Open::Finger {
                over,
                under,
                crossings: [x1, x2],
                antiparallel,
                sweep,
            } => {
                let under_side = match (antiparallel, sweep) {
                    (false, false) | (true, true) => &x1,
                    (true, false) | (false, true) => &x2,
                };
                self.lines.push(format!(
                    "r2- {x1} {x2} over={x1}.o1 under={under_side}.u1"
                ));
                self.busy.remove(&over);
                self.busy.remove(&under);
            }
            Open::Kink { circle, crossing } => {
                self.lines.push(format!("r1- {crossing}"));
                self.busy.remove(&circle);
            }
        }
    }
}

/// Builds a random movie without triple points. Every surface component is
/// connected and its genus is at most `max_genus`.
pub fn random_p_movie<R: Rng>(rng: &mut R, name: &str, cfg: &GeneratorConfig) -> Movie {
    let mut st = State::default();
    let components = rng.gen_range(1..=cfg.max_components.max(1));
    let mut roots = Vec::new();
    let mut orient = BTreeMap::new();
    for k in 0..components {
        let label = format!("S{k}");
        let sign = if rng.gen_bool(0.5) { '+' } else { '-' };
        orient.insert(label.clone(), sign);
        let c = st.name("c");
        st.lines
            .push(format!("birth {c} component={label} orient={sign}"));
        st.circles.insert(c.clone(), label.clone());
        roots.push(c);
        for _ in 0..rng.gen_range(0..=cfg.max_genus) {
            let stay = roots[k].clone();
            let h = st.name("h");
            st.lines.push(format!("saddle {stay} {stay} -> {stay} {h}"));
            st.circles.insert(h.clone(), label.clone());
            st.handles.push((stay, h));
        }
    }

    for _ in 0..cfg.steps {
        let free = st.free();
        match rng.gen_range(0..10) {
            // A second sheet of an existing component, merged back later.
            0 => {
                let k = rng.gen_range(0..components);
                let label = format!("S{k}");
                let c = st.name("c");
                st.lines
                    .push(format!("birth {c} component={label} orient={}", orient[&label]));
                st.circles.insert(c, label);
            }
            1 | 2 if !free.is_empty() => {
                let circle = free[rng.gen_range(0..free.len())].clone();
                let crossing = st.name("k");
                let sign = if rng.gen_bool(0.5) { '+' } else { '-' };
                st.lines.push(format!("r1+ {circle} sign={sign} -> {crossing}"));
                st.busy.insert(circle.clone());
                st.open.push(Open::Kink { circle, crossing });
            }
            3..=7 if free.len() >= 2 => {
                let i = rng.gen_range(0..free.len());
                let mut j = rng.gen_range(0..free.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (over, under) = (free[i].clone(), free[j].clone());
                let x1 = st.name("x");
                let x2 = st.name("x");
                let antiparallel = rng.gen_bool(0.5);
                let config = if rng.gen_bool(0.5) { 'l' } else { 'r' };
                let dir = if antiparallel { 'a' } else { 'p' };
                let sweep = st.circles[&over] != st.circles[&under] && rng.gen_bool(0.5);
                st.lines.push(format!(
                    "r2+ over={over} under={under} config={config} dir={dir} -> {x1} {x2}"
                ));
                st.busy.insert(over.clone());
                st.busy.insert(under.clone());
                st.open.push(Open::Finger {
                    over,
                    under,
                    crossings: [x1, x2],
                    antiparallel,
                    sweep,
                });
            }
            _ if !st.open.is_empty() => {
                let k = rng.gen_range(0..st.open.len());
                st.close(k);
            }
            _ => {}
        }
    }

    while !st.open.is_empty() {
        let k = rng.gen_range(0..st.open.len());
        st.close(k);
    }
    while let Some((a, h)) = st.handles.pop() {
        st.lines.push(format!("saddle {a} {h} -> {a}"));
        st.circles.remove(&h);
    }
    for (k, root) in roots.iter().enumerate() {
        let label = format!("S{k}");
        let extra: Vec<String> = st
            .circles
            .iter()
            .filter(|(c, l)| **l == label && *c != root)
            .map(|(c, _)| c.clone())
            .collect();
        for c in extra {
            st.lines.push(format!("saddle {root} {c} -> {root}"));
            st.circles.remove(&c);
        }
        st.lines.push(format!("death {root}"));
    }

    let text = format!("movie {name}\n{}\nend\n", st.lines.join("\n"));
    parse_movie(&text).unwrap_or_else(|e| panic!("generated movie is invalid: {e}\n{text}"))
}
