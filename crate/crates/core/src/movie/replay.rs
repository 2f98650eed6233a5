use super::{
    Circle, Crossing, Event, EventError, Handedness, Movie, MovieError, Role, Sign, Slot, Still,
    StrandDirection,
};

/// Arc of a circle in the still *before* an event fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcRef {
    pub circle: String,
    pub index: usize,
}

/// Resolved description of what an event did, in terms of the still it fired
/// in. The surface builder consumes this instead of re-resolving names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Birth {
        circle: String,
    },
    Death {
        circle: String,
    },
    Merge {
        a: String,
        b: String,
        into: String,
    },
    Split {
        from: String,
        into: [String; 2],
    },
    /// Slots inserted into arcs. Each entry is one arc with the new slots in
    /// strand order; consecutive new slots are joined by the arc that closes
    /// the decker trace at its birth.
    Insert {
        insertions: Vec<(ArcRef, Vec<Slot>)>,
    },
    /// Slots removed. `joins` are the arcs between the removed slots (bigon
    /// sides or kink loop).
    Remove {
        crossings: Vec<String>,
        joins: Vec<ArcRef>,
    },
    Triangle,
}

/// Incremental event validator and still tracker.
#[derive(Debug, Clone, Default)]
pub struct Replayer {
    still: Still,
    fired: usize,
}

impl Replayer {
    pub fn new() -> Replayer {
        Replayer::default()
    }

    pub fn still(&self) -> &Still {
        &self.still
    }

    pub fn apply(&mut self, event: &Event) -> Result<Effect, EventError> {
        let index = self.fired;
        let effect = match event {
            Event::Birth {
                circle,
                component,
                orient,
            } => {
                self.fresh_circle(circle)?;
                self.still.circles.insert(
                    circle.clone(),
                    Circle {
                        id: circle.clone(),
                        component: component.clone(),
                        orient: *orient,
                        slots: Vec::new(),
                    },
                );
                Effect::Birth {
                    circle: circle.clone(),
                }
            }
            Event::Death { circle } => {
                let c = self.crossing_free("death", circle)?;
                let id = c.id.clone();
                self.still.circles.remove(&id);
                Effect::Death { circle: id }
            }
            Event::Saddle { a, b, outputs } => self.saddle(a, b, outputs, index)?,
            Event::R1Plus {
                arc,
                sign,
                crossing,
            } => self.r1_plus(arc, *sign, crossing)?,
            Event::R1Minus { crossing, arc } => self.r1_minus(crossing, arc.as_deref())?,
            Event::R2Plus {
                over,
                under,
                config,
                dir,
                crossings,
            } => self.r2_plus(over, under, *config, *dir, crossings)?,
            Event::R2Minus {
                crossings,
                over,
                under,
            } => self.r2_minus(crossings, over.as_deref(), under.as_deref())?,
            Event::R3 { crossings } => self.r3(crossings)?,
        };
        self.fired += 1;
        Ok(effect)
    }

    fn fresh_circle(&self, id: &str) -> Result<(), EventError> {
        if self.still.circles.contains_key(id) {
            Err(EventError::Duplicate(id.to_string()))
        } else {
            Ok(())
        }
    }

    fn fresh_crossing(&self, id: &str) -> Result<(), EventError> {
        if self.still.crossings.contains_key(id) {
            Err(EventError::Duplicate(id.to_string()))
        } else {
            Ok(())
        }
    }

    fn crossing_free(&self, event: &'static str, name: &str) -> Result<&Circle, EventError> {
        let pos = self
            .still
            .resolve_arc(name)
            .ok_or_else(|| EventError::Dangling {
                what: "arc",
                id: name.to_string(),
            })?;
        let c = &self.still.circles[pos.circle];
        if !c.is_crossing_free() {
            return Err(EventError::MorseOnCrossing {
                event,
                arc: name.to_string(),
            });
        }
        Ok(c)
    }

    fn arc(&self, name: &str) -> Result<ArcRef, EventError> {
        let pos = self
            .still
            .resolve_arc(name)
            .ok_or_else(|| EventError::Dangling {
                what: "arc",
                id: name.to_string(),
            })?;
        Ok(ArcRef {
            circle: pos.circle.to_string(),
            index: pos.index,
        })
    }

    fn crossing(&self, id: &str) -> Result<&Crossing, EventError> {
        self.still
            .crossings
            .get(id)
            .ok_or_else(|| EventError::Dangling {
                what: "crossing",
                id: id.to_string(),
            })
    }

    fn saddle(
        &mut self,
        a: &str,
        b: &str,
        outputs: &[String],
        index: usize,
    ) -> Result<Effect, EventError> {
        let ca = self.crossing_free("saddle", a)?.clone();
        let cb = self.crossing_free("saddle", b)?.clone();
        if ca.id == cb.id {
            let into: [String; 2] = match outputs {
                [] => [ca.id.clone(), format!("{}_{}", ca.id, index)],
                [x, y] => [x.clone(), y.clone()],
                _ => {
                    return Err(EventError::Malformed(
                        "a splitting saddle names exactly two output circles".into(),
                    ))
                }
            };
            if into[0] == into[1] {
                return Err(EventError::Duplicate(into[0].clone()));
            }
            self.still.circles.remove(&ca.id);
            for id in &into {
                self.fresh_circle(id)?;
            }
            for id in &into {
                self.still.circles.insert(
                    id.clone(),
                    Circle {
                        id: id.clone(),
                        slots: Vec::new(),
                        ..ca.clone()
                    },
                );
            }
            Ok(Effect::Split {
                from: ca.id,
                into,
            })
        } else {
            if ca.component != cb.component {
                return Err(EventError::ComponentMismatch(ca.component, cb.component));
            }
            if ca.orient != cb.orient {
                return Err(EventError::NonOrientable(ca.id, cb.id));
            }
            let into = match outputs {
                [] => ca.id.clone().min(cb.id.clone()),
                [x] => x.clone(),
                _ => {
                    return Err(EventError::Malformed(
                        "a merging saddle names at most one output circle".into(),
                    ))
                }
            };
            self.still.circles.remove(&ca.id);
            self.still.circles.remove(&cb.id);
            self.fresh_circle(&into)?;
            self.still.circles.insert(
                into.clone(),
                Circle {
                    id: into.clone(),
                    slots: Vec::new(),
                    ..ca.clone()
                },
            );
            Ok(Effect::Merge {
                a: ca.id,
                b: cb.id,
                into,
            })
        }
    }

    fn insert_slots(&mut self, insertions: &[(ArcRef, Vec<Slot>)]) {
        // Insert back-to-front per circle so earlier indices stay valid.
        let mut sorted: Vec<&(ArcRef, Vec<Slot>)> = insertions.iter().collect();
        sorted.sort_by(|x, y| x.0.circle.cmp(&y.0.circle).then(y.0.index.cmp(&x.0.index)));
        for (arc, slots) in sorted {
            let circle = self.still.circles.get_mut(&arc.circle).expect("resolved");
            let at = if circle.slots.is_empty() {
                0
            } else {
                arc.index + 1
            };
            for (k, s) in slots.iter().enumerate() {
                circle.slots.insert(at + k, s.clone());
            }
        }
    }

    fn remove_crossings(&mut self, ids: &[String]) {
        for c in self.still.circles.values_mut() {
            c.slots.retain(|s| !ids.contains(&s.crossing));
        }
        for id in ids {
            self.still.crossings.remove(id);
        }
    }

    fn r1_plus(&mut self, arc: &str, sign: Sign, crossing: &str) -> Result<Effect, EventError> {
        let a = self.arc(arc)?;
        self.fresh_crossing(crossing)?;
        let slots = vec![
            Slot {
                crossing: crossing.to_string(),
                role: Role::Upper,
            },
            Slot {
                crossing: crossing.to_string(),
                role: Role::Lower,
            },
        ];
        let insertions = vec![(a.clone(), slots)];
        self.insert_slots(&insertions);
        self.still.crossings.insert(
            crossing.to_string(),
            Crossing {
                id: crossing.to_string(),
                sign,
                over_circle: a.circle.clone(),
                under_circle: a.circle,
            },
        );
        Ok(Effect::Insert { insertions })
    }

    /// Arc index on `circle` running from slot `from` directly to slot `to`.
    fn direct_arc(circle: &Circle, from: (&str, Role), to: (&str, Role)) -> Option<usize> {
        let i = circle.slot_index(from.0, from.1)?;
        let j = circle.slot_index(to.0, to.1)?;
        ((i + 1) % circle.slots.len() == j).then_some(i)
    }

    fn check_named_arc(
        &self,
        name: &str,
        circle: &Circle,
        candidates: &[Option<usize>],
        err: impl Fn(String) -> EventError,
    ) -> Result<usize, EventError> {
        let a = self.arc(name)?;
        if a.circle == circle.id && candidates.contains(&Some(a.index)) {
            Ok(a.index)
        } else {
            Err(err(format!("arc `{name}` does not join the two slots")))
        }
    }

    fn r1_minus(&mut self, crossing: &str, arc: Option<&str>) -> Result<Effect, EventError> {
        let x = self.crossing(crossing)?.clone();
        if x.over_circle != x.under_circle {
            return Err(EventError::NotAKink(
                crossing.into(),
                "its strands lie on different circles".into(),
            ));
        }
        let circle = self.still.circles[&x.over_circle].clone();
        let o2u = Self::direct_arc(&circle, (crossing, Role::Upper), (crossing, Role::Lower));
        let u2o = Self::direct_arc(&circle, (crossing, Role::Lower), (crossing, Role::Upper));
        let kink = match arc {
            Some(name) => self.check_named_arc(name, &circle, &[o2u, u2o], |m| {
                EventError::NotAKink(crossing.into(), m)
            })?,
            None => o2u.or(u2o).ok_or_else(|| {
                EventError::NotAKink(crossing.into(), "its two slots are not adjacent".into())
            })?,
        };
        self.remove_crossings(&[crossing.to_string()]);
        Ok(Effect::Remove {
            crossings: vec![crossing.to_string()],
            joins: vec![ArcRef {
                circle: circle.id,
                index: kink,
            }],
        })
    }

    fn r2_plus(
        &mut self,
        over: &str,
        under: &str,
        config: Handedness,
        dir: StrandDirection,
        crossings: &[String; 2],
    ) -> Result<Effect, EventError> {
        let a = self.arc(over)?;
        let b = self.arc(under)?;
        let [x1, x2] = crossings;
        if x1 == x2 {
            return Err(EventError::Duplicate(x1.clone()));
        }
        self.fresh_crossing(x1)?;
        self.fresh_crossing(x2)?;
        let slot = |x: &String, role| Slot {
            crossing: x.clone(),
            role,
        };
        let over_slots = vec![slot(x1, Role::Upper), slot(x2, Role::Upper)];
        let under_slots = match dir {
            StrandDirection::Parallel => vec![slot(x1, Role::Lower), slot(x2, Role::Lower)],
            StrandDirection::Antiparallel => vec![slot(x2, Role::Lower), slot(x1, Role::Lower)],
        };
        let insertions = if a == b {
            vec![(a.clone(), [over_slots, under_slots].concat())]
        } else {
            vec![(a.clone(), over_slots), (b.clone(), under_slots)]
        };
        self.insert_slots(&insertions);
        let (s1, s2) = match config {
            Handedness::Right => (Sign::Positive, Sign::Negative),
            Handedness::Left => (Sign::Negative, Sign::Positive),
        };
        for (x, sign) in [(x1, s1), (x2, s2)] {
            self.still.crossings.insert(
                x.clone(),
                Crossing {
                    id: x.clone(),
                    sign,
                    over_circle: a.circle.clone(),
                    under_circle: b.circle.clone(),
                },
            );
        }
        Ok(Effect::Insert { insertions })
    }

    fn bigon_side(
        &self,
        x1: &str,
        x2: &str,
        role: Role,
        named: Option<&str>,
    ) -> Result<ArcRef, EventError> {
        let circle = self.still.circle_of(x1, role).expect("crossing exists").clone();
        let fwd = Self::direct_arc(&circle, (x1, role), (x2, role));
        let bwd = Self::direct_arc(&circle, (x2, role), (x1, role));
        let err = |m: String| EventError::NotABigon(x1.into(), x2.into(), m);
        let index = match named {
            Some(name) => self.check_named_arc(name, &circle, &[fwd, bwd], err)?,
            None => fwd
                .or(bwd)
                .ok_or_else(|| err(format!("their {role} slots are not adjacent")))?,
        };
        Ok(ArcRef {
            circle: circle.id,
            index,
        })
    }

    fn r2_minus(
        &mut self,
        crossings: &[String; 2],
        over: Option<&str>,
        under: Option<&str>,
    ) -> Result<Effect, EventError> {
        let [x1, x2] = crossings;
        let c1 = self.crossing(x1)?.clone();
        let c2 = self.crossing(x2)?.clone();
        let err = |m: &str| EventError::NotABigon(x1.clone(), x2.clone(), m.to_string());
        if x1 == x2 {
            return Err(err("the same crossing is named twice"));
        }
        if c1.over_circle != c2.over_circle || c1.under_circle != c2.under_circle {
            return Err(err("they do not share both strands"));
        }
        if c1.sign == c2.sign {
            return Err(err("bigon crossings must have opposite signs"));
        }
        let top = self.bigon_side(x1, x2, Role::Upper, over)?;
        let bottom = self.bigon_side(x1, x2, Role::Lower, under)?;
        self.remove_crossings(&[x1.clone(), x2.clone()]);
        Ok(Effect::Remove {
            crossings: vec![x1.clone(), x2.clone()],
            joins: vec![top, bottom],
        })
    }

    fn r3(&mut self, crossings: &[String; 3]) -> Result<Effect, EventError> {
        for x in crossings {
            self.crossing(x)?;
        }
        if crossings[0] == crossings[1]
            || crossings[1] == crossings[2]
            || crossings[0] == crossings[2]
        {
            return Err(EventError::NotATriangle("repeated crossing".into()));
        }
        let pairs = [(0, 1), (1, 2), (0, 2)];
        let mut swaps = Vec::new();
        for (p, q) in pairs {
            let (p, q) = (&crossings[p], &crossings[q]);
            let found = self.still.circles.values().find_map(|c| {
                let n = c.slots.len();
                (0..n).find_map(|i| {
                    let j = (i + 1) % n;
                    let (a, b) = (&c.slots[i].crossing, &c.slots[j].crossing);
                    ((a == p && b == q) || (a == q && b == p)).then(|| (c.id.clone(), i, j))
                })
            });
            match found {
                Some(s) => swaps.push(s),
                None => {
                    return Err(EventError::NotATriangle(format!(
                        "no strand passes directly from `{p}` to `{q}`"
                    )))
                }
            }
        }
        for (c, i, j) in swaps {
            self.still.circles.get_mut(&c).expect("exists").slots.swap(i, j);
        }
        Ok(Effect::Triangle)
    }
}

/// Returns the still after each event, preceded by the initial empty still.
pub fn replay(movie: &Movie) -> Result<Vec<Still>, MovieError> {
    let mut r = Replayer::new();
    let mut out = vec![r.still().clone()];
    for (event, ev) in movie.events.iter().enumerate() {
        r.apply(&ev.event).map_err(|kind| MovieError::Invalid {
            event,
            line: ev.line,
            kind,
        })?;
        out.push(r.still().clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::movie::parse_movie;

    fn still_after(script: &str, n: usize) -> Still {
        let m = parse_movie(script).unwrap();
        replay(&m).unwrap()[n].clone()
    }

    #[test]
    fn sphere_replay_is_empty_full_empty() {
        let m = parse_movie("movie s\nbirth a component=c1 orient=+\ndeath a\nend\n").unwrap();
        let stills = replay(&m).unwrap();
        assert_eq!(stills.len(), 3);
        assert!(stills[0].is_empty());
        assert_eq!(stills[1].circles.keys().collect::<Vec<_>>(), vec!["a"]);
        assert!(stills[2].is_empty());
    }

    #[test]
    fn self_r2_creates_opposite_signs() {
        let s = "movie f\nbirth a component=c orient=+\n\
                 r2+ over=a under=a config=r -> x1 x2\nr2- x1 x2\ndeath a\nend\n";
        let st = still_after(s, 2);
        assert_eq!(st.crossing_count(), 2);
        assert_eq!(st.crossings["x1"].sign, Sign::Positive);
        assert_eq!(st.crossings["x2"].sign, Sign::Negative);
        let slots: Vec<_> = st.circles["a"]
            .slots
            .iter()
            .map(|s| format!("{}{}", s.crossing, s.role.arc_letter()))
            .collect();
        assert_eq!(slots, ["x1o", "x2o", "x1u", "x2u"]);
    }

    #[test]
    fn arc_aliases_resolve_to_same_arc() {
        let s = "movie f\nbirth a component=c orient=+\nbirth b component=d orient=+\n\
                 r2+ over=a under=b config=l -> x y\nr2- x y\ndeath a\ndeath b\nend\n";
        let st = still_after(s, 3);
        assert_eq!(st.resolve_arc("x.o1"), st.resolve_arc("y.o2"));
        assert_eq!(st.resolve_arc("y.u1"), st.resolve_arc("x.u2"));
        assert_ne!(st.resolve_arc("x.o1"), st.resolve_arc("x.o2"));
        assert!(st.resolve_arc("a").is_none());
        assert!(st.resolve_arc("x.q1").is_none());
    }

    #[test]
    fn saddle_next_to_crossing_is_rejected_at_its_index() {
        let s = "movie f\nbirth a component=c orient=+\n\
                 r1+ a sign=+ -> k\nsaddle k.o1 k.o1\nr1- k\ndeath a\nend\n";
        match parse_movie(s) {
            Err(MovieError::Invalid { event, kind, .. }) => {
                assert_eq!(event, 2);
                assert!(matches!(kind, EventError::MorseOnCrossing { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn merging_mismatched_orientations_is_non_orientable() {
        let s = "movie f\nbirth a component=c orient=+\nbirth b component=c orient=-\n\
                 saddle a b\ndeath a\nend\n";
        assert!(matches!(
            parse_movie(s),
            Err(MovieError::Invalid {
                kind: EventError::NonOrientable(..),
                ..
            })
        ));
    }

    #[test]
    fn r2_minus_rejects_a_side_that_is_not_a_bigon() {
        let s = "movie f\nbirth a component=c orient=+\nbirth b component=d orient=+\n\
                 r2+ over=a under=b config=r -> x1 x2\nr2+ over=x1.o1 under=x1.u1 config=r -> y1 y2\n\
                 r2- x1 x2 over=x1.o1\nend\n";
        assert!(matches!(
            parse_movie(s),
            Err(MovieError::Invalid {
                event: 4,
                kind: EventError::NotABigon(..),
                ..
            })
        ));
    }

    #[test]
    fn r3_swaps_adjacent_slots() {
        let s = "movie t\n\
                 birth a component=c orient=+\nbirth b component=c orient=+\nbirth c component=c orient=+\n\
                 r2+ over=a under=b config=r -> p1 p2\n\
                 r2+ over=p2.o1 under=c config=r -> q1 q2\n\
                 r2+ over=p2.u1 under=q1.u2 config=r dir=a -> s1 s2\n\
                 r3 p2 q1 s1\nr3 p2 q1 s1\n\
                 r2- s1 s2\nr2- q1 q2\nr2- p1 p2\n\
                 death a\ndeath b\ndeath c\nend\n";
        let m = parse_movie(s).unwrap();
        let stills = replay(&m).unwrap();
        let order = |st: &Still, c: &str| -> Vec<String> {
            st.circles[c].slots.iter().map(|s| s.crossing.clone()).collect()
        };
        assert_eq!(order(&stills[6], "a"), ["p1", "p2", "q1", "q2"]);
        assert_eq!(order(&stills[7], "a"), ["p1", "q1", "p2", "q2"]);
        assert_eq!(order(&stills[7], "b"), ["p1", "s1", "p2", "s2"]);
        assert_eq!(order(&stills[8], "b"), order(&stills[6], "b"));
    }
}
