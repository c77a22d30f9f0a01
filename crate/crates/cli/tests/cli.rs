use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spin7geom::pde::GridField;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spin7geom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("spin7geom_cli_{}_{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn list_shows_tags_and_kinds() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("glps_spin7 §6"));
    assert!(s.contains("airy_example §12"));
    let spin7 = s.lines().filter(|l| l.split('\t').nth(1) == Some("spin7")).count();
    assert!(spin7 >= 7, "{spin7}");
}

#[test]
fn describe_prints_descriptor_json() {
    let o = run(&["describe", "constant_I", "--param", "q=2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["name"], "constant_I");
    assert_eq!(v["params"]["q"], 2.0);
}

#[test]
fn verify_glps_passes_and_writes_report() {
    let dir = scratch("verify");
    let path = dir.join("glps.json");
    let o = run(&["verify", "glps_spin7", "--points", "100", "--json", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["points"], 100);
    assert_eq!(v["seed"], 1);
    assert!(v["max_residuals"]["d_phi"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["rank_certificate"]["operator_rank"], 21);
}

#[test]
fn verify_is_reproducible_for_a_seed() {
    let dir = scratch("repro");
    let mut reports = vec![];
    for k in 0..2 {
        let p = dir.join(format!("r{k}.json"));
        let o = run(&["--single-thread", "verify", "tod_spin7", "--points", "20", "--seed", "42", "--json", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        reports.push(v["max_residuals"].clone());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn verify_rejects_bad_parameters_with_exit_2() {
    let o = run(&["verify", "constant_I", "--param", "p=-5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("p + qs > |a + bs|"));
    assert_eq!(run(&["verify", "no_such_entry"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "glps_spin7", "--param", "oops"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "glps_spin7", "--param", "zeta=1"]).status.code(), Some(2));
}

#[test]
fn verify_perturbed_entry_passes() {
    let o = run(&["verify", "perturbed_glps"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("printed_metric"));
}

#[test]
fn verify_failure_names_the_criterion() {
    // a tolerance below round-off cannot be met
    let o = run(&["verify", "nil24_spin7", "--points", "5", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("criterion `"), "{}", stderr(&o));
}

#[test]
fn holonomy_ranks() {
    for (name, rank) in [("glps_spin7", 21), ("glps_g2", 14), ("flat_spin7", 0)] {
        let o = run(&["holonomy", name, "--points", "2"]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let s = stdout(&o);
        assert!(s.contains(&format!("rank {rank}\n")), "{s}");
        assert!(s.contains("status certified"));
    }
}

#[test]
fn solve_ode1_truncated_case() {
    let o = run(&["solve", "ode1", "--a", "0", "--c", "-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 12);
    assert!(s.lines().all(|l| l.contains(" s=1 ")), "{s}");
    let o = run(&["solve", "ode1", "--a", "2", "--c", "0.5", "--h", "0.5,3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    assert_eq!(run(&["solve", "ode1", "--a", "0", "--c", "1"]).status.code(), Some(2));
}

#[test]
fn hitchin_check_glps() {
    let o = run(&["hitchin-check", "glps_spin7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("hit1"));
    assert_eq!(run(&["hitchin-check", "glps_cy"]).status.code(), Some(2));
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn evolve_ma_study_prints_table_and_writes_outputs() {
    let dir = scratch("ma_study");
    let cfg = write_config(
        &dir,
        "ma.json",
        r#"{"mode": "study", "case": {"case": "perturbed_glps", "s_range": [0.5, 0.6]}, "resolutions": [8, 16], "min_steps": 20}"#,
    );
    let out = dir.join("out");
    let o = run(&["evolve", "ma", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("order"), "{s}");
    let order: f64 = s.lines().last().unwrap().split_whitespace().last().unwrap().parse().unwrap();
    assert!((1.8..=2.2).contains(&order), "{s}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let csv = GridField::from_csv(&std::fs::read_to_string(out.join("final.csv")).unwrap()).unwrap();
    assert_eq!(csv.shape, vec![16, 1, 1, 1]);
    assert!(out.join("convergence.json").exists());
}

#[test]
fn evolve_from_grids_is_deterministic_single_threaded() {
    let dir = scratch("dude4_grid");
    let sp = [0.25, 0.25];
    let u0 = GridField::periodic_from_fn(&[8, 8], &sp, 0.5, |x| 2.0 + (2.0 * std::f64::consts::PI * x[0]).sin() * 0.1).unwrap();
    let u1 = GridField::periodic_from_fn(&[8, 8], &sp, 0.5, |_| 0.0).unwrap();
    let g = GridField::periodic_from_fn(&[8, 8], &sp, 0.5, |_| 1.0).unwrap();
    for (n, f) in [("u0.csv", &u0), ("u1.csv", &u1), ("g.csv", &g)] {
        std::fs::write(dir.join(n), f.to_csv()).unwrap();
    }
    let cfg = write_config(&dir, "d.json", r#"{"mode": "grid", "u0": "u0.csv", "u1": "u1.csv", "g": "g.csv", "y_range": [0.5, 1.0], "steps": 50}"#);
    let mut texts = vec![];
    for k in 0..2 {
        let out = dir.join(format!("out{k}"));
        let o = run(&["--single-thread", "evolve", "dude4", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        texts.push((std::fs::read(out.join("report.json")).unwrap(), std::fs::read(out.join("final.csv")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn evolve_abort_exits_4_with_step() {
    let dir = scratch("ma_abort");
    let f = GridField::periodic_from_fn(&[4, 4, 4, 4], &[0.25; 4], 1.0, |_| 0.0).unwrap();
    std::fs::write(dir.join("f.csv"), f.to_csv()).unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"mode": "grid", "f0": "f.csv", "f1": "f.csv", "c": 0.0, "s_range": [1.0, 1.1], "steps": 200, "background": [[1.0, 0.0], [-1.0, 0.0]]}"#,
    );
    let o = run(&["evolve", "ma", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("step 0"), "{}", stderr(&o));
}

#[test]
fn evolve_schema_violation_exits_2() {
    let dir = scratch("schema");
    let cfg = write_config(&dir, "x.json", r#"{"mode": "study", "case": {"case": "airy", "y_range": [0.5, 1.0]}, "resolutions": [8], "steps": 10, "extra": 1}"#);
    let o = run(&["evolve", "dude4", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let cfg = write_config(&dir, "y.json", r#"{"mode": "study", "case": {"case": "airy", "y_range": [0.5, 1.0]}, "resolutions": [2], "steps": 10}"#);
    assert_eq!(run(&["evolve", "dude4", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
