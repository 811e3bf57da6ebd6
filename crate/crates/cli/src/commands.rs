//! Argument parsing and the four subcommands. Everything here is in-process
//! so tests can drive the exact code path the binary uses.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tamlab_core::engine::{black_set, check_directed, run_to_quiescence, DirectednessVerdict};
use tamlab_core::paths::pumpability_scan;
use tamlab_core::periodic::{fit_union, predictive_check, FitConfig, FitOutcome, Prediction};
use tamlab_core::{Error as CoreError, TileAssemblySystem, Vec2, Window};

use crate::points::{parse_points, write_points};
use crate::render;
use crate::report::{self, Report};
use crate::tas::{parse_tas, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ENGINE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_SEARCH_SPACE: i32 = 4;
pub const EXIT_CONFLICT: i32 = 5;
pub const EXIT_INCONCLUSIVE: i32 = 6;
pub const EXIT_USAGE: i32 = 64;

/// Lists in pump-scan reports are cut to this many entries; totals are
/// always reported.
const LIST_LIMIT: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "tamlab", version, about = "Tile assembly simulation and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grow a system inside a window and render the result.
    Run(RunArgs),
    /// Scan every seed-rooted path up to a length for pumpable repetitions.
    PumpScan(PumpScanArgs),
    /// Fit a union of periodic parts to a point set.
    Fit(FitArgs),
    /// Check whether growth inside a window is deterministic.
    Directed(DirectedArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Ascii,
    Svg,
    Json,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub tas: PathBuf,
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true, required = true)]
    pub window: Vec<i64>,
    #[arg(long, value_enum, default_value = "ascii")]
    pub out: OutFormat,
    /// Maximum number of attachments.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Also write the black set here in point-set format.
    #[arg(long)]
    pub emit_points: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PumpScanArgs {
    #[arg(long)]
    pub tas: PathBuf,
    /// Longest path scanned, in moves.
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true, required = true)]
    pub window: Vec<i64>,
    /// Maximum number of parts (K).
    #[arg(long, default_value_t = 4)]
    pub max_parts: usize,
    /// Bound on period coordinates (B).
    #[arg(long, default_value_t = 8)]
    pub max_coord: i64,
    /// Compare the fitted union with the points on this larger window.
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true)]
    pub predict_window: Option<Vec<i64>>,
    /// Give up with exit code 4 beyond this many candidate parts.
    #[arg(long, default_value_t = FitConfig::new(0, 0).candidate_cap)]
    pub candidate_cap: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
}

#[derive(Args, Debug)]
pub struct DirectedArgs {
    #[arg(long)]
    pub tas: PathBuf,
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true, required = true)]
    pub window: Vec<i64>,
    /// Work budget for the exact check.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        let mut stderr = stderr.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        CmdOutput {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

struct Failure(CmdOutput);

impl Failure {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Failure(CmdOutput::fail(EXIT_USAGE, format!("error: {msg}")))
    }

    fn engine(e: CoreError) -> Self {
        Failure(CmdOutput::fail(EXIT_ENGINE, format!("error: {e}")))
    }

    fn parse(code: i32, path: &Path, e: ParseError) -> Self {
        Failure(CmdOutput::fail(code, format!("error: {}:{e}", path.display())))
    }
}

type Step<T> = Result<T, Failure>;

fn read(path: &Path) -> Step<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn text(path: &Path, bytes: &[u8], parse_code: i32) -> Step<String> {
    String::from_utf8(bytes.to_vec()).map_err(|_| {
        Failure::parse(
            parse_code,
            path,
            ParseError {
                line: 0,
                message: "file is not valid UTF-8".into(),
            },
        )
    })
}

fn window(v: &[i64]) -> Step<Window> {
    match v {
        [x0, y0, x1, y1] => Window::new(*x0, *y0, *x1, *y1).map_err(Failure::usage),
        _ => Err(Failure::usage("a window needs four integers X0 Y0 X1 Y1")),
    }
}

fn load_system(path: &Path, parse_code: i32) -> Step<(Vec<u8>, TileAssemblySystem)> {
    let bytes = read(path)?;
    let doc = parse_tas(&text(path, &bytes, parse_code)?)
        .map_err(|e| Failure::parse(parse_code, path, e))?;
    let sys = doc.to_system().map_err(Failure::engine)?;
    Ok((bytes, sys))
}

fn json_only(out: OutFormat, command: &str) -> Step<()> {
    match out {
        OutFormat::Json => Ok(()),
        other => Err(Failure::usage(format!(
            "`{command}` only writes json reports, not {other:?}"
        ))),
    }
}

fn cmd_run(a: &RunArgs) -> Step<CmdOutput> {
    let w = window(&a.window)?;
    let (bytes, sys) = load_system(&a.tas, EXIT_ENGINE)?;
    let run = run_to_quiescence(&sys, &w, a.budget).map_err(Failure::engine)?;
    let tiles = sys.tiles();
    let black = black_set(tiles, &run.assembly);
    if let Some(path) = &a.emit_points {
        fs::write(path, write_points(&black)).map_err(|e| {
            Failure(CmdOutput::fail(
                EXIT_ENGINE,
                format!("error: cannot write {}: {e}", path.display()),
            ))
        })?;
    }
    let stdout = match a.out {
        OutFormat::Ascii => render::ascii(tiles, &run.assembly, &w),
        OutFormat::Svg => render::svg(tiles, &run.assembly, sys.seed(), &w),
        OutFormat::Json => Report::new("run")
            .input("tas", &bytes)
            .param("window", report::window(&w))
            .param("budget", a.budget)
            .outcome(json!({
                "placements": run.assembly.len(),
                "attachments": run.trace.len(),
                "exhausted": run.exhausted,
                "black": report::points(&black),
                "black_count": black.len(),
            }))
            .to_json(),
    };
    Ok(CmdOutput::ok(stdout))
}

fn cmd_pump_scan(a: &PumpScanArgs) -> Step<CmdOutput> {
    json_only(a.out, "pump-scan")?;
    let (bytes, sys) = load_system(&a.tas, EXIT_ENGINE)?;
    let scan = pumpability_scan(&sys, a.max_len).map_err(Failure::engine)?;
    let tiles = sys.tiles();
    let blocked: Vec<Value> = scan
        .blocked_examples
        .iter()
        .take(LIST_LIMIT)
        .map(|b| {
            json!({
                "path": report::path(tiles, &b.path),
                "i": b.i,
                "j": b.j,
                "copy_index": b.copy_index,
                "collision": report::point(b.collision_pos),
            })
        })
        .collect();
    let violations: Vec<Value> = scan
        .violations
        .iter()
        .take(LIST_LIMIT)
        .map(|p| report::path(tiles, p))
        .collect();
    let text = Report::new("pump-scan")
        .input("tas", &bytes)
        .param("max_len", a.max_len)
        .outcome(json!({
            "max_len_scanned": scan.max_len_scanned,
            "paths_scanned": scan.paths_scanned,
            "tile_types": scan.tile_types,
            "c_estimate": scan.c_estimate,
            "longest_path": scan.longest_path,
            "reached_pigeonhole": scan.reached_pigeonhole,
            "violations": violations,
            "violations_total": scan.violations.len(),
            "blocked_examples": blocked,
            "blocked_total": scan.blocked_examples.len(),
        }))
        .to_json();
    let code = if scan.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok(CmdOutput {
        code,
        stdout: text,
        stderr: String::new(),
    })
}

fn cmd_fit(a: &FitArgs) -> Step<CmdOutput> {
    json_only(a.out, "fit")?;
    let w = window(&a.window)?;
    let w2 = a.predict_window.as_deref().map(window).transpose()?;
    if let Some(w2) = &w2 {
        if !w2.contains_window(&w) {
            return Err(Failure::usage(format!(
                "prediction window {w2} does not contain fit window {w}"
            )));
        }
    }
    let bytes = read(&a.points)?;
    let all = parse_points(&text(&a.points, &bytes, EXIT_USAGE)?)
        .map_err(|e| Failure::parse(EXIT_USAGE, &a.points, e))?;
    let sample: BTreeSet<Vec2> = all.iter().copied().filter(|p| w.contains(*p)).collect();
    let base = Report::new("fit")
        .input("points", &bytes)
        .param("window", report::window(&w))
        .param("max_parts", a.max_parts)
        .param("max_coord", a.max_coord)
        .param("predict_window", w2.as_ref().map_or(Value::Null, report::window))
        .param("candidate_cap", a.candidate_cap);

    let cfg = FitConfig {
        candidate_cap: a.candidate_cap,
        ..FitConfig::new(a.max_parts, a.max_coord)
    };
    let fit = match fit_union(&sample, &w, &cfg) {
        Ok(r) => r,
        Err(CoreError::SearchSpaceExceeded { cap }) => {
            let text = base
                .outcome(json!({
                    "status": "search_space_exceeded",
                    "cap": cap,
                    "sample_size": sample.len(),
                }))
                .to_json();
            return Ok(CmdOutput {
                code: EXIT_SEARCH_SPACE,
                stdout: text,
                stderr: String::new(),
            });
        }
        Err(e) => return Err(Failure::engine(e)),
    };

    let mut outcome = json!({
        "sample_size": fit.sample_size,
        "points_outside_window": all.len() - sample.len(),
        "period_pairs": fit.period_pairs,
        "candidates": fit.candidates,
        "largest_candidate": fit.largest_candidate,
        "greedy_succeeded": fit.greedy_succeeded,
        "search_nodes": fit.search_nodes,
        "effective_base_bound": fit.effective_base_bound,
        "nearest_miss": fit.nearest_miss.as_ref().map_or(Value::Null, |m| json!({
            "union": report::union(&m.union),
            "uncovered": m.uncovered,
            "witnesses": report::points(&m.witnesses),
        })),
    });
    let fields = outcome.as_object_mut().expect("object");
    match &fit.outcome {
        FitOutcome::NoFit => {
            fields.insert("status".into(), json!("no_fit"));
            fields.insert("union".into(), Value::Null);
            fields.insert("prediction".into(), Value::Null);
        }
        FitOutcome::Found(u) => {
            fields.insert("status".into(), json!("found"));
            fields.insert("union".into(), report::union(u));
            let prediction = match &w2 {
                None => Value::Null,
                Some(w2) => {
                    let observed: BTreeSet<Vec2> =
                        all.iter().copied().filter(|p| w2.contains(*p)).collect();
                    match predictive_check(u, &observed, &w, w2).map_err(Failure::engine)? {
                        Prediction::Confirmed => json!({ "confirmed": true, "mismatch": null }),
                        Prediction::Mismatch(p) => {
                            json!({ "confirmed": false, "mismatch": report::point(p) })
                        }
                    }
                }
            };
            fields.insert("prediction".into(), prediction);
        }
    }
    Ok(CmdOutput::ok(base.outcome(outcome).to_json()))
}

fn cmd_directed(a: &DirectedArgs) -> Step<CmdOutput> {
    json_only(a.out, "directed")?;
    let w = window(&a.window)?;
    let (bytes, sys) = load_system(&a.tas, EXIT_USAGE)?;
    let verdict = check_directed(&sys, &w, a.budget);
    let tiles = sys.tiles();
    let (code, outcome) = match &verdict {
        DirectednessVerdict::Directed => (EXIT_OK, json!({ "verdict": "directed" })),
        DirectednessVerdict::Conflict(wit) => (
            EXIT_CONFLICT,
            json!({ "verdict": "conflict", "witness": report::witness(tiles, wit) }),
        ),
        DirectednessVerdict::Inconclusive(why) => (
            EXIT_INCONCLUSIVE,
            json!({ "verdict": "inconclusive", "reason": why }),
        ),
    };
    let text = Report::new("directed")
        .input("tas", &bytes)
        .param("window", report::window(&w))
        .param("budget", a.budget)
        .outcome(outcome)
        .to_json();
    Ok(CmdOutput {
        code,
        stdout: text,
        stderr: String::new(),
    })
}

pub fn execute(cli: &Cli) -> CmdOutput {
    let step = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::PumpScan(a) => cmd_pump_scan(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Directed(a) => cmd_directed(a),
    };
    step.unwrap_or_else(|Failure(out)| out)
}

/// Parse `args` (program name first) and run the command.
pub fn run_cli<I, T>(args: I) -> CmdOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CmdOutput::ok(e.to_string()),
            _ => CmdOutput::fail(EXIT_USAGE, e.to_string()),
        },
    }
}
