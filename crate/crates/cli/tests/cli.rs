//! End-to-end runs of the `treeheat` binary on the shipped configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn treeheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeheat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(command: &str, config: &Path, out: &Path) -> Output {
    treeheat(&[command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV written by the tool, header row included.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn heat_on_half_line_matches_universal_bound_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("half_line_heat.cfg");
    let o = run_config("heat", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("heat.csv")).unwrap();

    let digest = hex::encode(Sha256::digest(std::fs::read(&cfg).unwrap()));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(format!("# treeheat {}", env!("CARGO_PKG_VERSION")).as_str()));
    assert_eq!(lines.next(), Some(format!("# config_sha256 {digest}").as_str()));
    assert_eq!(lines.next(), Some("# command heat refine 1"));
    assert!(!text.contains('\r'));

    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["x_id", "t", "k", "envelope", "universal_bound"]);
    let origin: Vec<&Vec<String>> = rows[1..].iter().filter(|r| r[0] == "0").collect();
    assert_eq!(origin.len(), 12);
    for r in origin {
        let t: f64 = r[1].parse().unwrap();
        let k: f64 = r[2].parse().unwrap();
        assert!((k * (std::f64::consts::PI * t).sqrt() - 1.0).abs() < 1e-3, "t = {t}");
    }
}

#[test]
fn bounds_on_dyadic_tree_all_hold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("bounds", &configs().join("dyadic_d2_bounds.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let verdict = std::fs::read_to_string(dir.path().join("bounds_verdict.txt")).unwrap();
    for kind in ["universal", "two_sided", "dim_bound"] {
        let line = verdict
            .lines()
            .find(|l| l.split_whitespace().next() == Some(kind))
            .unwrap_or_else(|| panic!("{kind} missing from\n{verdict}"));
        assert!(line.contains("holds"), "{line}");
    }
    assert!(dir.path().join("bounds_summary.csv").exists());
    assert!(dir.path().join("bounds.csv").exists());
}

#[test]
fn geometry_flags_exponential_growth() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("geometry", &configs().join("homogeneous_b2_geometry.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("dim_sup diverges"));
    let rows = csv_rows(&std::fs::read_to_string(dir.path().join("geometry.csv")).unwrap());
    let flag = rows.iter().find(|r| r[1] == "dim_sup_unbounded").unwrap();
    assert_eq!(flag[2].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn seed_is_rejected() {
    let o = treeheat(&["heat", "--config", configs().join("half_line_heat.cfg").to_str().unwrap(), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed is not supported"));
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[tree]\ngenerator = half_line\n[solver]\nR = 20\npoints_per_unit = 16\nt_max = 1\n[sweep]\nt = 0.5 x 1\n", "line 8, column 9"),
        ("[tree]\ngenerator = half_line\n  colour = red\n", "line 3, column 3"),
        ("[tree]\ngenerator = half_line\n[extra]\nk = 1\n", "line 3, column 1"),
        ("[tree\n", "line 1, column 6"),
    ];
    for (i, (text, at)) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.cfg"));
        std::fs::write(&cfg, text).unwrap();
        let o = run_config("heat", &cfg, dir.path());
        assert_eq!(o.status.code(), Some(2), "case {i}");
        assert!(stderr(&o).contains(at), "case {i}: {}", stderr(&o));
    }
}

#[test]
fn missing_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("heat", &dir.path().join("nope.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.cfg"));
}

#[test]
fn refine_is_recorded_and_changes_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("half_line_heat.cfg");
    let out = dir.path().join("r2");
    let o = treeheat(&["heat", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--refine", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("heat.csv")).unwrap();
    assert!(text.contains("# command heat refine 2"));
    let o = treeheat(&["heat", "--config", cfg.to_str().unwrap(), "--refine", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
