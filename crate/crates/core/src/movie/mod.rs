//! Movie presentations: scripts of link-diagram stills joined by Morse events
//! and Reidemeister moves.

pub mod generate;
mod parse;
mod replay;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_movie;
pub use replay::{replay, ArcRef, Effect, Replayer};

/// Which strand of a crossing a slot sits on. The over strand is the sheet
/// that lies higher along the projection axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "upper")]
    Upper,
    #[serde(rename = "lower")]
    Lower,
}

impl Role {
    pub fn opposite(self) -> Role {
        match self {
            Role::Upper => Role::Lower,
            Role::Lower => Role::Upper,
        }
    }

    fn arc_letter(self) -> char {
        match self {
            Role::Upper => 'o',
            Role::Lower => 'u',
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Upper => "upper",
            Role::Lower => "lower",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

/// Local handedness of an R2 bigon. `Right` gives the first new crossing a
/// positive sign and the second a negative one; `Left` the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Handedness {
    Left,
    Right,
}

/// Relative direction of the under strand in an R2 bigon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrandDirection {
    Parallel,
    Antiparallel,
}

/// A point of a circle where it passes through a crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub crossing: String,
    pub role: Role,
}

/// One component of the link in a still. Slots are listed in the direction of
/// the strand; arc `i` runs from slot `i` to slot `i + 1` (cyclically).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circle {
    pub id: String,
    pub component: String,
    pub orient: Sign,
    pub slots: Vec<Slot>,
}

impl Circle {
    pub fn is_crossing_free(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot_index(&self, crossing: &str, role: Role) -> Option<usize> {
        self.slots
            .iter()
            .position(|s| s.crossing == crossing && s.role == role)
    }

    /// Both names of arc `i`: the one leaving slot `i` and the one entering
    /// slot `i + 1`. A crossing-free circle has a single arc named after it.
    pub fn arc_names(&self, i: usize) -> Vec<String> {
        if self.slots.is_empty() {
            return vec![self.id.clone()];
        }
        let n = self.slots.len();
        let from = &self.slots[i];
        let to = &self.slots[(i + 1) % n];
        vec![
            format!("{}.{}1", from.crossing, from.role.arc_letter()),
            format!("{}.{}2", to.crossing, to.role.arc_letter()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: String,
    pub sign: Sign,
    pub over_circle: String,
    pub under_circle: String,
}

/// A link diagram. Planarity is not tracked; the still records only the
/// combinatorics the invariant consumes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Still {
    pub circles: BTreeMap<String, Circle>,
    pub crossings: BTreeMap<String, Crossing>,
}

/// A resolved arc: circle id plus arc index along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcPos<'a> {
    pub circle: &'a str,
    pub index: usize,
}

impl Still {
    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Resolves an arc name (a crossing-free circle id or `x.o1`, `x.o2`,
    /// `x.u1`, `x.u2`).
    pub fn resolve_arc(&self, name: &str) -> Option<ArcPos<'_>> {
        if let Some(c) = self.circles.get(name) {
            if c.is_crossing_free() {
                return Some(ArcPos {
                    circle: &c.id,
                    index: 0,
                });
            }
        }
        let (crossing, suffix) = name.rsplit_once('.')?;
        let (role, entering) = match suffix {
            "o1" => (Role::Upper, false),
            "o2" => (Role::Upper, true),
            "u1" => (Role::Lower, false),
            "u2" => (Role::Lower, true),
            _ => return None,
        };
        let x = self.crossings.get(crossing)?;
        let circle_id = match role {
            Role::Upper => &x.over_circle,
            Role::Lower => &x.under_circle,
        };
        let circle = self.circles.get(circle_id)?;
        let i = circle.slot_index(crossing, role)?;
        let n = circle.slots.len();
        let index = if entering { (i + n - 1) % n } else { i };
        Some(ArcPos {
            circle: &circle.id,
            index,
        })
    }

    pub fn circle_of(&self, crossing: &str, role: Role) -> Option<&Circle> {
        let x = self.crossings.get(crossing)?;
        let id = match role {
            Role::Upper => &x.over_circle,
            Role::Lower => &x.under_circle,
        };
        self.circles.get(id)
    }
}

/// An elementary transition between stills.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Birth {
        circle: String,
        component: String,
        orient: Sign,
    },
    Death {
        circle: String,
    },
    Saddle {
        a: String,
        b: String,
        outputs: Vec<String>,
    },
    R1Plus {
        arc: String,
        sign: Sign,
        crossing: String,
    },
    R1Minus {
        crossing: String,
        arc: Option<String>,
    },
    R2Plus {
        over: String,
        under: String,
        config: Handedness,
        dir: StrandDirection,
        crossings: [String; 2],
    },
    R2Minus {
        crossings: [String; 2],
        over: Option<String>,
        under: Option<String>,
    },
    R3 {
        crossings: [String; 3],
    },
}

impl Event {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Event::Birth { .. } => "birth",
            Event::Death { .. } => "death",
            Event::Saddle { .. } => "saddle",
            Event::R1Plus { .. } => "r1+",
            Event::R1Minus { .. } => "r1-",
            Event::R2Plus { .. } => "r2+",
            Event::R2Minus { .. } => "r2-",
            Event::R3 { .. } => "r3",
        }
    }

    pub fn is_morse(&self) -> bool {
        matches!(
            self,
            Event::Birth { .. } | Event::Death { .. } | Event::Saddle { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocatedEvent {
    pub event: Event,
    /// 1-based line in the source script (0 when built programmatically).
    pub line: usize,
}

/// A validated movie. The initial and final stills are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Movie {
    pub name: String,
    pub events: Vec<LocatedEvent>,
    /// Surface component labels in order of first birth.
    pub components: Vec<String>,
}

impl Movie {
    /// Validates a programmatically assembled event list.
    pub fn new(name: impl Into<String>, events: Vec<Event>) -> Result<Movie, MovieError> {
        let events = events
            .into_iter()
            .map(|event| LocatedEvent { event, line: 0 })
            .collect();
        Movie::from_located(name.into(), events)
    }

    pub(crate) fn from_located(
        name: String,
        events: Vec<LocatedEvent>,
    ) -> Result<Movie, MovieError> {
        let mut replayer = Replayer::new();
        for (index, ev) in events.iter().enumerate() {
            replayer.apply(&ev.event).map_err(|kind| MovieError::Invalid {
                event: index,
                line: ev.line,
                kind,
            })?;
        }
        if !replayer.still().is_empty() {
            let left: Vec<_> = replayer.still().circles.keys().cloned().collect();
            return Err(MovieError::NotClosed { remaining: left });
        }
        let mut components: Vec<String> = Vec::new();
        for ev in &events {
            if let Event::Birth { component, .. } = &ev.event {
                if !components.contains(component) {
                    components.push(component.clone());
                }
            }
        }
        Ok(Movie {
            name,
            events,
            components,
        })
    }

    /// True iff the movie never performs a Reidemeister III move, the only
    /// transition that produces a triple point in the projected surface.
    pub fn is_p_movie(&self) -> bool {
        !self.events.iter().any(|e| matches!(e.event, Event::R3 { .. }))
    }

    pub fn morse_euler_characteristic(&self) -> i64 {
        self.events
            .iter()
            .map(|e| match e.event {
                Event::Birth { .. } | Event::Death { .. } => 1,
                Event::Saddle { .. } => -1,
                _ => 0,
            })
            .sum()
    }

    /// Renders the movie back to script form.
    pub fn to_script(&self) -> String {
        let mut out = format!("movie {}\n", self.name);
        for e in &self.events {
            out.push_str(&format_event(&e.event));
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }
}

pub fn format_event(e: &Event) -> String {
    match e {
        Event::Birth {
            circle,
            component,
            orient,
        } => format!("birth {circle} component={component} orient={orient}"),
        Event::Death { circle } => format!("death {circle}"),
        Event::Saddle { a, b, outputs } => {
            if outputs.is_empty() {
                format!("saddle {a} {b}")
            } else {
                format!("saddle {a} {b} -> {}", outputs.join(" "))
            }
        }
        Event::R1Plus {
            arc,
            sign,
            crossing,
        } => format!("r1+ {arc} sign={sign} -> {crossing}"),
        Event::R1Minus { crossing, arc } => match arc {
            Some(a) => format!("r1- {crossing} arc={a}"),
            None => format!("r1- {crossing}"),
        },
        Event::R2Plus {
            over,
            under,
            config,
            dir,
            crossings,
        } => {
            let c = match config {
                Handedness::Left => "l",
                Handedness::Right => "r",
            };
            let d = match dir {
                StrandDirection::Parallel => "",
                StrandDirection::Antiparallel => " dir=a",
            };
            format!(
                "r2+ over={over} under={under} config={c}{d} -> {} {}",
                crossings[0], crossings[1]
            )
        }
        Event::R2Minus {
            crossings,
            over,
            under,
        } => {
            let mut s = format!("r2- {} {}", crossings[0], crossings[1]);
            if let Some(o) = over {
                s.push_str(&format!(" over={o}"));
            }
            if let Some(u) = under {
                s.push_str(&format!(" under={u}"));
            }
            s
        }
        Event::R3 { crossings } => {
            format!("r3 {} {} {}", crossings[0], crossings[1], crossings[2])
        }
    }
}

/// Why an event cannot fire in the current still.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("dangling reference: no {what} named `{id}`")]
    Dangling { what: &'static str, id: String },
    #[error("identifier `{0}` is already in use")]
    Duplicate(String),
    #[error("{event} touches `{arc}`, which is adjacent to a crossing")]
    MorseOnCrossing { event: &'static str, arc: String },
    #[error("saddle joins circles of different surface components `{0}` and `{1}`")]
    ComponentMismatch(String, String),
    #[error("saddle joins circles `{0}` and `{1}` with incompatible orientations (non-orientable surface)")]
    NonOrientable(String, String),
    #[error("crossings `{0}` and `{1}` do not bound a bigon: {2}")]
    NotABigon(String, String, String),
    #[error("crossing `{0}` is not a kink: {1}")]
    NotAKink(String, String),
    #[error("r3 crossings do not form a triangle: {0}")]
    NotATriangle(String),
    #[error("{0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MovieError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("event {event} (line {line}): {kind}")]
    Invalid {
        event: usize,
        line: usize,
        kind: EventError,
    },
    #[error("final still is not empty; remaining circles: {}", remaining.join(", "))]
    NotClosed { remaining: Vec<String> },
}
