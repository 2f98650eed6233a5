//! Machine-readable reports. Field order in these structs is the key order of
//! the emitted JSON, and every list is sorted, so equal inputs give
//! byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decker::{CircleRole, DeckerSet};
use crate::invariant::{Coloring, ComponentClass, InvariantResult, Verdict};
use crate::movie::{Event, Movie};
use crate::moves::MoveInstance;
use crate::surface::SurfaceComplex;

pub const SCHEMA: &str = "pequiv-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    /// `ok`, `not-p` or `invalid`.
    pub status: String,
    pub events: usize,
    pub p_movie: bool,
    pub triple_points: usize,
    pub morse_euler: i64,
    pub diagnostics: Vec<String>,
}

impl Validation {
    pub fn of(movie: &Movie) -> Validation {
        let triple_points = movie
            .events
            .iter()
            .filter(|e| matches!(e.event, Event::R3 { .. }))
            .count();
        let p_movie = movie.is_p_movie();
        Validation {
            status: if p_movie { "ok" } else { "not-p" }.into(),
            events: movie.events.len(),
            p_movie,
            triple_points,
            morse_euler: movie.morse_euler_characteristic(),
            diagnostics: if p_movie {
                vec![]
            } else {
                vec![format!("not a p-movie: {triple_points} triple point event(s)")]
            },
        }
    }

    pub fn invalid(message: String) -> Validation {
        Validation {
            status: "invalid".into(),
            events: 0,
            p_movie: false,
            triple_points: 0,
            morse_euler: 0,
            diagnostics: vec![message],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentRow {
    pub label: String,
    pub euler: i64,
    pub genus: i64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSection {
    pub euler: i64,
    pub components: Vec<ComponentRow>,
}

impl SurfaceSection {
    pub fn of(cx: &SurfaceComplex) -> SurfaceSection {
        SurfaceSection {
            euler: cx.euler_characteristic(),
            components: cx
                .component_summary()
                .into_iter()
                .map(|c| ComponentRow {
                    label: c.label,
                    euler: c.euler,
                    genus: c.genus,
                    vertices: c.vertices,
                    edges: c.edges,
                    faces: c.faces,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleRow {
    pub id: usize,
    pub component: String,
    pub role: CircleRole,
    pub edges: usize,
    pub branch_points: usize,
    pub mate: usize,
    pub lineage: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeckerSection {
    pub circles: Vec<CircleRow>,
    pub a_f: Vec<usize>,
}

impl DeckerSection {
    pub fn of(cx: &SurfaceComplex, d: &DeckerSet) -> DeckerSection {
        DeckerSection {
            circles: d
                .circles
                .iter()
                .map(|c| {
                    let mut lineage: Vec<String> = c
                        .walk
                        .iter()
                        .filter_map(|s| cx.edge(s.edge).decker.as_ref())
                        .map(|t| t.lineage.clone())
                        .collect();
                    lineage.sort();
                    lineage.dedup();
                    CircleRow {
                        id: c.id,
                        component: c.component.clone(),
                        role: c.role,
                        edges: c.walk.len(),
                        branch_points: c.branch_points,
                        mate: c.mate,
                        lineage,
                    }
                })
                .collect(),
            a_f: d.a_f(),
        }
    }
}

pub fn bits(polarity: &[u8]) -> String {
    polarity.iter().map(|b| char::from(b'0' + b)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ColoringRow {
    pub polarity: String,
    pub regions: usize,
    /// Colour of each A_f circle, by circle id.
    pub circle_colors: BTreeMap<usize, u8>,
}

impl ColoringRow {
    pub fn of(c: &Coloring) -> ColoringRow {
        ColoringRow {
            polarity: bits(&c.polarity),
            regions: c.regions(),
            circle_colors: c.circle_colors.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarityRow {
    pub polarity: String,
    pub x: Vec<usize>,
    pub support: Vec<usize>,
    pub components: Vec<ComponentClass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantSection {
    pub canonical_polarity: String,
    pub selected_polarity: String,
    pub selected: Vec<ComponentClass>,
    pub polarities: Vec<PolarityRow>,
    /// Set of sorted (genus, divisibility) lists, one per polarity.
    pub key: Vec<Vec<(i64, i64)>>,
}

impl InvariantSection {
    pub fn of(r: &InvariantResult, selected: &[u8]) -> Option<InvariantSection> {
        let chosen = r.class_for(selected)?;
        Some(InvariantSection {
            canonical_polarity: bits(&r.canonical_class().polarity),
            selected_polarity: bits(selected),
            selected: chosen.components.clone(),
            polarities: r
                .classes
                .iter()
                .map(|p| PolarityRow {
                    polarity: bits(&p.polarity),
                    x: p.x.clone(),
                    support: p.support.clone(),
                    components: p.components.clone(),
                })
                .collect(),
            key: r.key.iter().cloned().collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MoveSection {
    pub applied: MoveInstance,
    pub inverse: MoveInstance,
    pub invariant_preserved: bool,
}

/// Report for one diagram.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: String,
    pub movie: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decker: Option<DeckerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colorings: Option<Vec<ColoringRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<InvariantSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applicable_moves: Option<Vec<MoveInstance>>,
    #[serde(rename = "move", skip_serializing_if = "Option::is_none")]
    pub move_applied: Option<MoveSection>,
    /// Full cell structure; present in diagram reports that `apply-move`
    /// accepts as input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex: Option<SurfaceComplex>,
    /// Milliseconds per stage; only with `--timing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str, movie: &str) -> Report {
        Report {
            schema: SCHEMA,
            tool: Tool::default(),
            command: command.into(),
            movie: movie.into(),
            validation: None,
            surface: None,
            decker: None,
            colorings: None,
            invariant: None,
            applicable_moves: None,
            move_applied: None,
            complex: None,
            timing: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: &'static str,
    pub verdict: Verdict,
    pub left: Report,
    pub right: Report,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
