//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input (including movies with
//! triple points), 3 based-surface mismatch, 4 internal error.

pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::decker::{assemble_decker, DeckerError, DeckerSet};
use crate::invariant::{
    checkerboard, compare, invariant_result, polarities, FrameSignTable, InvariantError,
};
use crate::movie::{parse_movie, Event, Movie, MovieError};
use crate::moves::{applicable_moves, apply_move, verify_transition, MoveError, MoveInstance};
use crate::surface::{build_surface, SurfaceComplex, SurfaceError};
use report::{
    to_json, ColoringRow, CompareReport, DeckerSection, InvariantSection, MoveSection, Report,
    SurfaceSection, Validation,
};

#[derive(Debug, Parser)]
#[command(
    name = "pequiv",
    version,
    about = "Double decker invariants of triple-point-free surface diagrams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Polarity bits (one per surface component, in birth order) for the
    /// class shown as `selected`. Defaults to all ones.
    #[arg(long, global = true, value_name = "BITS")]
    pub polarity: Option<String>,
    /// Directory searched for movie names that are not existing paths.
    #[arg(long, global = true, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
    /// Add per-stage wall-clock times to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and replay a movie; succeed only for valid p-movies.
    Validate { movie: String },
    /// Build the surface cell complex.
    Surface { movie: String },
    /// List the double decker circles and their mates.
    Decker { movie: String },
    /// Compute the invariant for every coloring polarity.
    Invariant { movie: String },
    /// Apply a move to a diagram (a movie or a surface report) and emit the
    /// rewritten diagram report.
    ApplyMove {
        input: String,
        /// Move as JSON, e.g. '{"kind":"III","direction":"forward",
        /// "location":{"at":"faces","upper":3,"lower":3}}'.
        #[arg(long = "move", value_name = "JSON", conflicts_with_all = ["index", "list"])]
        descriptor: Option<String>,
        /// Index into the list printed by `--list`.
        #[arg(long, conflicts_with = "list")]
        index: Option<usize>,
        /// List the applicable moves instead of applying one.
        #[arg(long)]
        list: bool,
    },
    /// Compare the invariants of two diagrams of the same based surface.
    Compare { left: String, right: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<MovieError> for CliError {
    fn from(e: MovieError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<DeckerError> for CliError {
    fn from(e: DeckerError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::SurfaceMismatch(..) => CliError::Mismatch(e.to_string()),
            InvariantError::PolarityLength { .. } | InvariantError::PolarityBit(_) => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<MoveError> for CliError {
    fn from(e: MoveError) -> Self {
        match e {
            MoveError::Precondition(..) | MoveError::WrongLocation { .. } => {
                CliError::Invalid(e.to_string())
            }
            MoveError::Decker(d) => d.into(),
            MoveError::Invariant(i) => i.into(),
        }
    }
}

/// Output of a successful command.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// JSON document for `--report` or standard output.
    pub report: String,
    /// Line printed before the report (the verdict of `compare`).
    pub headline: Option<String>,
    /// Nonzero when the command ran but its subject failed validation.
    pub code: i32,
    pub diagnostic: Option<String>,
}

struct Stopwatch {
    enabled: bool,
    start: Instant,
    laps: std::collections::BTreeMap<String, f64>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Stopwatch {
        Stopwatch {
            enabled,
            start: Instant::now(),
            laps: Default::default(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        let ms = (now - self.start).as_secs_f64() * 1e3;
        self.laps.insert(stage.into(), (ms * 1e3).round() / 1e3);
        self.start = now;
    }

    fn finish(self) -> Option<std::collections::BTreeMap<String, f64>> {
        self.enabled.then_some(self.laps)
    }
}

fn resolve(name: &str, fixtures: Option<&Path>) -> PathBuf {
    let direct = PathBuf::from(name);
    if direct.exists() {
        return direct;
    }
    if let Some(dir) = fixtures {
        for candidate in [dir.join(name), dir.join(format!("{name}.movie"))] {
            if candidate.exists() {
                return candidate;
            }
        }
    }
    direct
}

fn read(name: &str, common: &Common) -> Result<String, CliError> {
    let path = resolve(name, common.fixtures.as_deref());
    std::fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_movie(name: &str, common: &Common) -> Result<Movie, CliError> {
    Ok(parse_movie(&read(name, common)?)?)
}

/// Movie stages up to the surface, refusing anything with a triple point.
fn surface_of(movie: &Movie, report: &mut Report) -> Result<SurfaceComplex, CliError> {
    report.validation = Some(Validation::of(movie));
    if movie
        .events
        .iter()
        .any(|e| matches!(e.event, Event::R3 { .. }))
    {
        return Err(SurfaceError::NotPMovie.into());
    }
    Ok(build_surface(movie)?)
}

fn parse_polarity(bits: &str) -> Result<Vec<u8>, CliError> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Invalid(format!(
                "polarity must be a string of 0 and 1, found `{bits}`"
            ))),
        })
        .collect()
}

fn add_invariant(
    cx: &SurfaceComplex,
    decker: &DeckerSet,
    common: &Common,
    report: &mut Report,
) -> Result<crate::invariant::InvariantResult, CliError> {
    let k = cx.components.len();
    let selected = match &common.polarity {
        Some(b) => parse_polarity(b)?,
        None => vec![1; k],
    };
    if selected.len() != k {
        return Err(InvariantError::PolarityLength {
            expected: k,
            found: selected.len(),
        }
        .into());
    }
    let colorings = polarities(k)
        .iter()
        .map(|p| checkerboard(cx, decker, p).map(|c| ColoringRow::of(&c)))
        .collect::<Result<Vec<_>, _>>()?;
    let result = invariant_result(cx, decker, &FrameSignTable::default())?;
    report.colorings = Some(colorings);
    report.invariant = InvariantSection::of(&result, &selected);
    Ok(result)
}

fn diagram_report(
    command: &str,
    movie: &Movie,
    common: &Common,
    depth: u8,
) -> Result<(Report, Option<crate::invariant::InvariantResult>), CliError> {
    let mut clock = Stopwatch::new(common.timing);
    let mut report = Report::new(command, &movie.name);
    let cx = surface_of(movie, &mut report)?;
    clock.lap("surface");
    report.surface = Some(SurfaceSection::of(&cx));
    let mut result = None;
    if depth >= 2 {
        let decker = assemble_decker(&cx)?;
        clock.lap("decker");
        report.decker = Some(DeckerSection::of(&cx, &decker));
        if depth >= 3 {
            result = Some(add_invariant(&cx, &decker, common, &mut report)?);
            clock.lap("invariant");
        }
    } else {
        report.complex = Some(cx);
    }
    report.timing = clock.finish();
    Ok((report, result))
}

/// Reads either a movie script or a JSON report carrying a `complex`.
fn load_diagram(name: &str, common: &Common) -> Result<SurfaceComplex, CliError> {
    let text = read(name, common)?;
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("report is not valid JSON: {e}")))?;
        let complex = value.get("complex").cloned().ok_or_else(|| {
            CliError::Invalid("report has no `complex`; produce it with `surface`".into())
        })?;
        let cx: SurfaceComplex = serde_json::from_value(complex)
            .map_err(|e| CliError::Invalid(format!("malformed complex: {e}")))?;
        cx.check().map_err(SurfaceError::Malformed)?;
        Ok(cx)
    } else {
        let movie = parse_movie(&text)?;
        let mut scratch = Report::new("apply-move", &movie.name);
        surface_of(&movie, &mut scratch)
    }
}

fn apply_move_report(
    input: &str,
    descriptor: Option<&str>,
    index: Option<usize>,
    list: bool,
    common: &Common,
) -> Result<Report, CliError> {
    let mut clock = Stopwatch::new(common.timing);
    let cx = load_diagram(input, common)?;
    let mut report = Report::new("apply-move", &cx.name);
    let moves = applicable_moves(&cx)?;
    clock.lap("enumerate");
    if list || (descriptor.is_none() && index.is_none()) {
        report.surface = Some(SurfaceSection::of(&cx));
        report.applicable_moves = Some(moves);
        report.timing = clock.finish();
        return Ok(report);
    }
    let mi: MoveInstance = match (descriptor, index) {
        (Some(json), _) => serde_json::from_str(json)
            .map_err(|e| CliError::Invalid(format!("bad move descriptor: {e}")))?,
        (None, Some(i)) => moves.get(i).cloned().ok_or_else(|| {
            CliError::Invalid(format!("move index {i} out of range ({} moves)", moves.len()))
        })?,
        (None, None) => unreachable!("handled above"),
    };
    let (after, inverse) = apply_move(&cx, &mi)?;
    clock.lap("apply");
    let preserved = verify_transition(&cx, &after)?;
    clock.lap("verify");
    let decker = assemble_decker(&after)?;
    report.surface = Some(SurfaceSection::of(&after));
    report.decker = Some(DeckerSection::of(&after, &decker));
    add_invariant(&after, &decker, common, &mut report)?;
    clock.lap("invariant");
    report.move_applied = Some(MoveSection {
        applied: mi,
        inverse,
        invariant_preserved: preserved,
    });
    report.complex = Some(after);
    report.timing = clock.finish();
    Ok(report)
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let common = &cli.common;
    let plain = |report: Report| Outcome {
        report: to_json(&report),
        headline: None,
        code: 0,
        diagnostic: None,
    };
    match &cli.command {
        Command::Validate { movie } => {
            let text = read(movie, common)?;
            let (name, validation) = match parse_movie(&text) {
                Ok(m) => (m.name.clone(), Validation::of(&m)),
                Err(e) => (movie.clone(), Validation::invalid(e.to_string())),
            };
            let failed = validation.status != "ok";
            let diagnostic = failed.then(|| validation.diagnostics.join("; "));
            let mut report = Report::new("validate", &name);
            report.validation = Some(validation);
            Ok(Outcome {
                code: if failed { 2 } else { 0 },
                diagnostic,
                ..plain(report)
            })
        }
        Command::Surface { movie } => {
            let m = load_movie(movie, common)?;
            Ok(plain(diagram_report("surface", &m, common, 1)?.0))
        }
        Command::Decker { movie } => {
            let m = load_movie(movie, common)?;
            Ok(plain(diagram_report("decker", &m, common, 2)?.0))
        }
        Command::Invariant { movie } => {
            let m = load_movie(movie, common)?;
            Ok(plain(diagram_report("invariant", &m, common, 3)?.0))
        }
        Command::ApplyMove {
            input,
            descriptor,
            index,
            list,
        } => Ok(plain(apply_move_report(
            input,
            descriptor.as_deref(),
            *index,
            *list,
            common,
        )?)),
        Command::Compare { left, right } => {
            let (a, b) = (load_movie(left, common)?, load_movie(right, common)?);
            let (left, ra) = diagram_report("compare", &a, common, 3)?;
            let (right, rb) = diagram_report("compare", &b, common, 3)?;
            let verdict = compare(
                &ra.expect("invariant computed"),
                &rb.expect("invariant computed"),
            )?;
            Ok(Outcome {
                report: to_json(&CompareReport {
                    schema: report::SCHEMA,
                    tool: Default::default(),
                    command: "compare",
                    verdict,
                    left,
                    right,
                }),
                headline: Some(verdict.to_string()),
                code: 0,
                diagnostic: None,
            })
        }
    }
}

/// Parses arguments, runs the command and writes its output. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if let Some(h) = &out.headline {
                println!("{h}");
            }
            match &cli.common.report {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.report) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 1;
                    }
                }
                None if out.headline.is_none() => print!("{}", out.report),
                None => {}
            }
            if let Some(d) = &out.diagnostic {
                eprintln!("error: {d}");
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
