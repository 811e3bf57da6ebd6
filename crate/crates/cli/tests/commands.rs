use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tamlab_cli::commands::{
    EXIT_CONFLICT, EXIT_ENGINE, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_SEARCH_SPACE, EXIT_USAGE,
};
use tamlab_cli::points::{parse_points, write_points};
use tamlab_cli::tas::{parse_tas, TasDocument};
use tamlab_cli::{run_cli, CmdOutput};
use tamlab_core::fixtures;
use tamlab_core::periodic::{fit_union, window_points, FitConfig, SdpSet, SdpUnion};
use tamlab_core::{Vec2, Window};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}.tas", env!("CARGO_MANIFEST_DIR"))
}

fn tamlab(args: &[&str]) -> CmdOutput {
    run_cli(std::iter::once("tamlab").chain(args.iter().copied()))
}

fn json(out: &CmdOutput) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn success(out: &CmdOutput) {
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stderr.is_empty());
}

#[test]
fn bundled_fixture_files_match_library() {
    for (name, sys) in [
        ("row", fixtures::row()),
        ("comb", fixtures::comb()),
        ("two_arm", fixtures::two_arm()),
        ("sierpinski", fixtures::sierpinski()),
        ("two_choice", fixtures::two_choice()),
        ("blocked_spiral", fixtures::blocked_spiral()),
    ] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(parse_tas(&text).unwrap(), TasDocument::from_system(&sys), "{name}");
    }
}

#[test]
fn run_sierpinski_ascii_matches_bitwise_oracle() {
    let out = tamlab(&["run", "--tas", &fixture("sierpinski"), "--window", "0", "0", "31", "31"]);
    success(&out);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 32);
    for (row, line) in lines.iter().enumerate() {
        let y = 31 - row as i64;
        for (x, ch) in line.chars().enumerate() {
            assert_eq!(ch == '#', (x as i64) & y == 0, "({x}, {y})");
        }
    }
}

#[test]
fn run_without_growth_shows_only_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solo.tas");
    std::fs::write(
        &path,
        "temperature 1\ntile s\n north - 0\n east - 0\n south - 0\n west - 0\nend\nseed 1 1 s\n",
    )
    .unwrap();
    let out = tamlab(&["run", "--tas", path.to_str().unwrap(), "--window", "0", "0", "2", "2"]);
    success(&out);
    assert_eq!(out.stdout, "...\n.*.\n...\n");
}

#[test]
fn run_window_excluding_seed_is_engine_error() {
    let out = tamlab(&["run", "--tas", &fixture("row"), "--window", "5", "5", "8", "8"]);
    assert_eq!(out.code, EXIT_ENGINE);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("outside"), "{}", out.stderr);
}

#[test]
fn run_svg_and_json() {
    let args = ["run", "--tas", &fixture("two_arm"), "--window", "0", "0", "5", "5"];
    let svg = tamlab(&[&args[..], &["--out", "svg"]].concat());
    success(&svg);
    assert!(svg.stdout.starts_with("<svg"));
    let rep = tamlab(&[&args[..], &["--out", "json"]].concat());
    success(&rep);
    let v = json(&rep);
    assert_eq!(v["version"], "tamlab-report/1");
    assert_eq!(v["command"], "run");
    let black: BTreeSet<(i64, i64)> = v["outcome"]["black"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_i64().unwrap(), p[1].as_i64().unwrap()))
        .collect();
    let want: BTreeSet<(i64, i64)> = [(1, 0), (4, 0), (0, 2), (0, 4)].into_iter().collect();
    assert_eq!(black, want);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(tamlab(&["run", "--tas", &fixture("row")]).code, EXIT_USAGE);
    assert_eq!(tamlab(&["frobnicate"]).code, EXIT_USAGE);
    let out = tamlab(&["run", "--tas", "/no/such/file.tas", "--window", "0", "0", "1", "1"]);
    assert_eq!(out.code, EXIT_USAGE);
    let out = tamlab(&["run", "--tas", &fixture("row"), "--window", "3", "0", "1", "1"]);
    assert_eq!(out.code, EXIT_USAGE);
    let out = tamlab(&["pump-scan", "--tas", &fixture("row"), "--out", "svg"]);
    assert_eq!(out.code, EXIT_USAGE);
    let help = tamlab(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("pump-scan"));
}

#[test]
fn pump_scan_examples() {
    let out = tamlab(&["pump-scan", "--tas", &fixture("row"), "--max-len", "10"]);
    success(&out);
    assert_eq!(json(&out)["outcome"]["c_estimate"], 2);

    let out = tamlab(&["pump-scan", "--tas", &fixture("blocked_spiral"), "--max-len", "14"]);
    success(&out);
    let v = json(&out);
    assert!(v["outcome"]["blocked_total"].as_u64().unwrap() > 0);
    assert_eq!(v["outcome"]["violations_total"], 0);

    let out = tamlab(&["pump-scan", "--tas", &fixture("sierpinski")]);
    assert_eq!(out.code, EXIT_ENGINE);
    assert!(out.stdout.is_empty());
}

#[test]
fn fit_generated_union_and_predict() {
    let truth = SdpUnion::new(vec![
        SdpSet::new(Vec2::new(0, 0), Vec2::new(3, 0), Vec2::new(0, 2)),
        SdpSet::new(Vec2::new(1, 1), Vec2::new(2, 2), Vec2::new(0, 4)),
    ]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.txt");
    let pts = window_points(&truth, &Window::square(40)).unwrap();
    std::fs::write(&path, write_points(&pts)).unwrap();
    let out = tamlab(&[
        "fit", "--points", path.to_str().unwrap(), "--window", "0", "0", "19", "19",
        "--max-parts", "2", "--max-coord", "5", "--predict-window", "0", "0", "39", "39",
    ]);
    success(&out);
    let v = json(&out);
    assert_eq!(v["outcome"]["status"], "found");
    assert_eq!(v["outcome"]["prediction"]["confirmed"], true);
    assert_eq!(v["outcome"]["union"].as_array().unwrap().len(), 2);
}

#[test]
fn fit_sierpinski_is_no_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sierp.txt");
    let run = tamlab(&[
        "run", "--tas", &fixture("sierpinski"), "--window", "0", "0", "63", "63",
        "--emit-points", path.to_str().unwrap(),
    ]);
    success(&run);
    let out = tamlab(&[
        "fit", "--points", path.to_str().unwrap(), "--window", "0", "0", "63", "63",
        "--max-parts", "4", "--max-coord", "8",
    ]);
    success(&out);
    assert_eq!(json(&out)["outcome"]["status"], "no_fit");
}

#[test]
fn fit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\nthree 4\n").unwrap();
    let out = tamlab(&["fit", "--points", bad.to_str().unwrap(), "--window", "0", "0", "3", "3"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains(":line 2:"), "{}", out.stderr);

    let full = dir.path().join("full.txt");
    let pts: BTreeSet<Vec2> = Window::square(30).points().collect();
    std::fs::write(&full, write_points(&pts)).unwrap();
    let out = tamlab(&[
        "fit", "--points", full.to_str().unwrap(), "--window", "0", "0", "29", "29",
        "--max-coord", "2", "--candidate-cap", "10",
    ]);
    assert_eq!(out.code, EXIT_SEARCH_SPACE, "{}", out.stderr);
    assert_eq!(json(&out)["outcome"]["status"], "search_space_exceeded");
}

#[test]
fn directed_examples() {
    let row = tamlab(&["directed", "--tas", &fixture("row"), "--window", "0", "0", "20", "2"]);
    success(&row);
    assert_eq!(json(&row)["outcome"]["verdict"], "directed");

    let two = tamlab(&["directed", "--tas", &fixture("two_choice"), "--window", "0", "0", "5", "5"]);
    assert_eq!(two.code, EXIT_CONFLICT);
    assert!(two.stderr.is_empty());
    let v = json(&two);
    assert_eq!(v["outcome"]["witness"]["position"], serde_json::json!([1, 0]));

    let huge = tamlab(&[
        "directed", "--tas", &fixture("row"), "--window", "0", "0", "1000000", "0", "--budget", "10",
    ]);
    assert_eq!(huge.code, EXIT_INCONCLUSIVE);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tas");
    std::fs::write(&bad, "temperature 1\nseed 0 0 nope\n").unwrap();
    let out = tamlab(&["directed", "--tas", bad.to_str().unwrap(), "--window", "0", "0", "1", "1"]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn emitted_points_fit_like_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("comb.txt");
    let run = tamlab(&[
        "run", "--tas", &fixture("comb"), "--window", "0", "0", "15", "15",
        "--emit-points", path.to_str().unwrap(),
    ]);
    success(&run);
    let pts = parse_points(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let w = Window::square(16);
    let direct = fit_union(&pts, &w, &FitConfig::new(3, 3)).unwrap();
    let out = tamlab(&[
        "fit", "--points", path.to_str().unwrap(), "--window", "0", "0", "15", "15",
        "--max-parts", "3", "--max-coord", "3",
    ]);
    success(&out);
    let v = json(&out);
    let tamlab_core::periodic::FitOutcome::Found(u) = direct.outcome else {
        panic!("comb should fit");
    };
    assert_eq!(v["outcome"]["union"], tamlab_cli::report::union(&u));
    assert_eq!(v["outcome"]["candidates"], direct.candidates);
}

#[test]
fn binary_matches_library_and_keeps_stderr_quiet() {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_tamlab"));
    let args = ["directed", "--tas", &fixture("two_choice"), "--window", "0", "0", "4", "4"];
    let proc = Command::new(&bin).args(args).output().unwrap();
    let lib = tamlab(&args);
    assert_eq!(proc.status.code(), Some(lib.code));
    assert_eq!(String::from_utf8(proc.stdout).unwrap(), lib.stdout);
    assert!(proc.stderr.is_empty());
}
