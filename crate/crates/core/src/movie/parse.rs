use std::collections::BTreeMap;

use super::{Event, Handedness, LocatedEvent, Movie, MovieError, Sign, StrandDirection};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> Line<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> MovieError {
        MovieError::Syntax {
            line: self.number,
            column,
            message: message.into(),
        }
    }
}

fn tokenize(number: usize, raw: &str) -> Line<'_> {
    let content = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &content[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &content[s..],
            column: s + 1,
        });
    }
    Line {
        number,
        tokens,
        end_column: content.trim_end().len() + 1,
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// Splits event arguments into positionals, `key=value` options and the
/// outputs after `->`.
struct Args<'a, 'l> {
    line: &'l Line<'a>,
    positional: Vec<Token<'a>>,
    options: BTreeMap<&'a str, Token<'a>>,
    outputs: Option<Vec<Token<'a>>>,
}

impl<'a, 'l> Args<'a, 'l> {
    fn new(line: &'l Line<'a>) -> Result<Args<'a, 'l>, MovieError> {
        let mut positional = Vec::new();
        let mut options = BTreeMap::new();
        let mut outputs: Option<Vec<Token<'a>>> = None;
        for tok in &line.tokens[1..] {
            if let Some(out) = outputs.as_mut() {
                if tok.text == "->" {
                    return Err(line.error(tok.column, "`->` may appear only once"));
                }
                out.push(*tok);
                continue;
            }
            if tok.text == "->" {
                outputs = Some(Vec::new());
            } else if let Some((k, v)) = tok.text.split_once('=') {
                let value = Token {
                    text: v,
                    column: tok.column + k.len() + 1,
                };
                if options.insert(k, value).is_some() {
                    return Err(line.error(tok.column, format!("option `{k}` given twice")));
                }
            } else {
                positional.push(*tok);
            }
        }
        Ok(Args {
            line,
            positional,
            options,
            outputs,
        })
    }

    fn ident(&self, tok: Token<'a>) -> Result<String, MovieError> {
        if is_ident(tok.text) {
            Ok(tok.text.to_string())
        } else {
            Err(self
                .line
                .error(tok.column, format!("`{}` is not a valid identifier", tok.text)))
        }
    }

    fn positionals(&self, n: usize) -> Result<Vec<String>, MovieError> {
        if self.positional.len() != n {
            let column = self
                .positional
                .get(n)
                .map_or(self.line.end_column, |t| t.column);
            return Err(self.line.error(
                column,
                format!(
                    "expected {n} operand(s), found {}",
                    self.positional.len()
                ),
            ));
        }
        self.positional.iter().map(|t| self.ident(*t)).collect()
    }

    fn outputs(&self, allowed: &[usize]) -> Result<Vec<String>, MovieError> {
        let outs = self.outputs.clone().unwrap_or_default();
        if !allowed.contains(&outs.len()) {
            let column = outs.first().map_or(self.line.end_column, |t| t.column);
            return Err(self.line.error(
                column,
                format!("expected {allowed:?} output name(s) after `->`"),
            ));
        }
        outs.into_iter().map(|t| self.ident(t)).collect()
    }

    fn option(&mut self, key: &str) -> Option<Token<'a>> {
        self.options.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<Token<'a>, MovieError> {
        let end = self.line.end_column;
        self.option(key)
            .ok_or_else(|| self.line.error(end, format!("missing `{key}=`")))
    }

    fn sign(&self, tok: Token<'a>) -> Result<Sign, MovieError> {
        match tok.text {
            "+" => Ok(Sign::Positive),
            "-" => Ok(Sign::Negative),
            other => Err(self
                .line
                .error(tok.column, format!("expected `+` or `-`, found `{other}`"))),
        }
    }

    fn finish(self) -> Result<(), MovieError> {
        if let Some((k, tok)) = self.options.into_iter().next() {
            return Err(self
                .line
                .error(tok.column - k.len() - 1, format!("unknown option `{k}`")));
        }
        Ok(())
    }
}

fn parse_event(line: &Line<'_>) -> Result<Event, MovieError> {
    let head = line.tokens[0];
    let mut args = Args::new(line)?;
    let no_outputs = |args: &Args| -> Result<(), MovieError> {
        match &args.outputs {
            Some(o) => Err(line.error(
                o.first().map_or(line.end_column, |t| t.column),
                format!("`{}` takes no outputs", head.text),
            )),
            None => Ok(()),
        }
    };
    let event = match head.text {
        "birth" => {
            no_outputs(&args)?;
            let circle = args.positionals(1)?.remove(0);
            let component = args.required("component")?;
            let component = args.ident(component)?;
            let orient = args.required("orient")?;
            let orient = args.sign(orient)?;
            args.finish()?;
            Event::Birth {
                circle,
                component,
                orient,
            }
        }
        "death" => {
            no_outputs(&args)?;
            let circle = args.positionals(1)?.remove(0);
            args.finish()?;
            Event::Death { circle }
        }
        "saddle" => {
            let p = args.positionals(2)?;
            let outputs = args.outputs(&[0, 1, 2])?;
            args.finish()?;
            Event::Saddle {
                a: p[0].clone(),
                b: p[1].clone(),
                outputs,
            }
        }
        "r1+" => {
            let arc = args.positionals(1)?.remove(0);
            let sign = args.required("sign")?;
            let sign = args.sign(sign)?;
            let crossing = args.outputs(&[1])?.remove(0);
            args.finish()?;
            Event::R1Plus {
                arc,
                sign,
                crossing,
            }
        }
        "r1-" => {
            no_outputs(&args)?;
            let crossing = args.positionals(1)?.remove(0);
            let arc = match args.option("arc") {
                Some(t) => Some(args.ident(t)?),
                None => None,
            };
            args.finish()?;
            Event::R1Minus { crossing, arc }
        }
        "r2+" => {
            args.positionals(0)?;
            let over = args.required("over")?;
            let over = args.ident(over)?;
            let under = args.required("under")?;
            let under = args.ident(under)?;
            let config = args.required("config")?;
            let config = match config.text {
                "l" => Handedness::Left,
                "r" => Handedness::Right,
                other => {
                    return Err(line.error(
                        config.column,
                        format!("config must be `l` or `r`, found `{other}`"),
                    ))
                }
            };
            let dir = match args.option("dir") {
                None => StrandDirection::Parallel,
                Some(t) if t.text == "p" => StrandDirection::Parallel,
                Some(t) if t.text == "a" => StrandDirection::Antiparallel,
                Some(t) => {
                    return Err(line.error(
                        t.column,
                        format!("dir must be `p` or `a`, found `{}`", t.text),
                    ))
                }
            };
            let outs = args.outputs(&[2])?;
            args.finish()?;
            Event::R2Plus {
                over,
                under,
                config,
                dir,
                crossings: [outs[0].clone(), outs[1].clone()],
            }
        }
        "r2-" => {
            no_outputs(&args)?;
            let p = args.positionals(2)?;
            let over = match args.option("over") {
                Some(t) => Some(args.ident(t)?),
                None => None,
            };
            let under = match args.option("under") {
                Some(t) => Some(args.ident(t)?),
                None => None,
            };
            args.finish()?;
            Event::R2Minus {
                crossings: [p[0].clone(), p[1].clone()],
                over,
                under,
            }
        }
        "r3" => {
            no_outputs(&args)?;
            let p = args.positionals(3)?;
            args.finish()?;
            Event::R3 {
                crossings: [p[0].clone(), p[1].clone(), p[2].clone()],
            }
        }
        other => {
            return Err(line.error(head.column, format!("unknown event `{other}`")));
        }
    };
    Ok(event)
}

/// Parses and validates a movie script.
///
/// Accepts a `movie <name>` header, one event per line and a closing `end`.
/// Everything after `#` on a line is ignored. The returned movie has been
/// replayed event by event and ends in the empty still.
pub fn parse_movie(text: &str) -> Result<Movie, MovieError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| tokenize(i + 1, raw))
        .filter(|l| !l.tokens.is_empty());

    let header = lines.next().ok_or(MovieError::Syntax {
        line: 1,
        column: 1,
        message: "empty script; expected `movie <name>`".into(),
    })?;
    let name = match header.tokens.as_slice() {
        [kw, name] if kw.text == "movie" => {
            if !is_ident(name.text) {
                return Err(header.error(name.column, "invalid movie name"));
            }
            name.text.to_string()
        }
        [kw, ..] if kw.text == "movie" => {
            return Err(header.error(kw.column, "expected `movie <name>`"))
        }
        [kw, ..] => return Err(header.error(kw.column, "script must start with `movie <name>`")),
        [] => unreachable!("blank lines are filtered"),
    };

    let mut events = Vec::new();
    let mut ended = false;
    let mut last_line = header.number;
    for line in lines {
        last_line = line.number;
        if ended {
            return Err(line.error(line.tokens[0].column, "content after `end`"));
        }
        if line.tokens[0].text == "end" {
            if line.tokens.len() > 1 {
                return Err(line.error(line.tokens[1].column, "`end` takes no arguments"));
            }
            ended = true;
            continue;
        }
        events.push(LocatedEvent {
            event: parse_event(&line)?,
            line: line.number,
        });
    }
    if !ended {
        return Err(MovieError::Syntax {
            line: last_line + 1,
            column: 1,
            message: "missing `end`".into(),
        });
    }
    Movie::from_located(name, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::movie::EventError;

    #[test]
    fn smallest_closed_movie() {
        let m = parse_movie("movie s\nbirth a component=c1 orient=+\ndeath a\nend").unwrap();
        assert_eq!(m.events.len(), 2);
        assert_eq!(m.components, vec!["c1".to_string()]);
        assert!(m.is_p_movie());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let m = parse_movie(
            "# header\n\nmovie s # name\n  birth a component=c1 orient=-  # cap\n\ndeath a\nend\n",
        )
        .unwrap();
        assert_eq!(m.events[0].line, 4);
        assert_eq!(m.events[1].line, 6);
    }

    #[test]
    fn dangling_r1_minus() {
        let err = parse_movie("movie s\nbirth a component=c orient=+\nr1- x1\ndeath a\nend")
            .unwrap_err();
        match err {
            MovieError::Invalid {
                event,
                line,
                kind: EventError::Dangling { id, .. },
            } => {
                assert_eq!((event, line), (1, 3));
                assert_eq!(id, "x1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_movie("movie s\nbirth a component=c orient=x\nend").unwrap_err();
        assert_eq!(
            err,
            MovieError::Syntax {
                line: 2,
                column: 28,
                message: "expected `+` or `-`, found `x`".into()
            }
        );
        let err = parse_movie("movie s\nfrobnicate a\nend").unwrap_err();
        assert!(matches!(err, MovieError::Syntax { line: 2, column: 1, .. }));
        let err = parse_movie("movie s\nbirth a component=c orient=+ colour=red\nend").unwrap_err();
        assert!(matches!(err, MovieError::Syntax { line: 2, column: 30, .. }), "{err:?}");
        let err = parse_movie("movie s\nbirth a component=c orient=+\ndeath a").unwrap_err();
        assert!(matches!(err, MovieError::Syntax { line: 4, .. }));
    }

    #[test]
    fn unclosed_movie_is_rejected() {
        let err = parse_movie("movie s\nbirth a component=c orient=+\nend").unwrap_err();
        assert_eq!(
            err,
            MovieError::NotClosed {
                remaining: vec!["a".into()]
            }
        );
    }

    #[test]
    fn r3_marks_movie_as_not_p() {
        let s = "movie t\n\
                 birth a component=c orient=+\nbirth b component=c orient=+\nbirth c component=c orient=+\n\
                 r2+ over=a under=b config=r -> p1 p2\n\
                 r2+ over=p2.o1 under=c config=r -> q1 q2\n\
                 r2+ over=p2.u1 under=q1.u2 config=r dir=a -> s1 s2\n\
                 r3 p2 q1 s1\nr3 p2 q1 s1\n\
                 r2- s1 s2\nr2- q1 q2\nr2- p1 p2\n\
                 death a\ndeath b\ndeath c\nend\n";
        let m = parse_movie(s).unwrap();
        assert!(!m.is_p_movie());
    }

    #[test]
    fn script_round_trip() {
        let s = "movie rt\nbirth a component=c orient=+\nbirth b component=d orient=-\n\
                 r2+ over=a under=b config=l dir=a -> x y\nr1+ x.o1 sign=- -> k\nr1- k arc=k.o1\n\
                 r2- x y over=x.o1 under=y.u1\ndeath a\ndeath b\nend\n";
        let m = parse_movie(s).unwrap();
        let again = parse_movie(&m.to_script()).unwrap();
        assert_eq!(
            m.events.iter().map(|e| &e.event).collect::<Vec<_>>(),
            again.events.iter().map(|e| &e.event).collect::<Vec<_>>()
        );
    }
}
