use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spde-manifold"));
    c.env_remove("SPDE_MANIFOLD_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with(".log"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn manifest(dir: &Path, prefix: &str) -> serde_json::Value {
    let path = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with(prefix) && name.ends_with(".manifest.json")
        })
        .expect("manifest written");
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = run(&["check", "--preset", "heat", "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("tangent"));
    let bad = run(&["check", "--preset", "negative_control", "--out", out]);
    assert_eq!(bad.status.code(), Some(2));
    let m = manifest(dir.path(), "check-negative_control");
    assert_eq!(m["verdict"], "not_tangent");
    assert!(m["check"]["max_rho_j"].as_f64().unwrap() >= 0.9);
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = run(&["check", "--config", "/nonexistent/config.json", "--out", out]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/config.json"));

    let cfg = dir.path().join("typo.json");
    std::fs::write(&cfg, r#"{"preset": "heat", "check": {"sampling": {"kind": "lattice", "per_axiz": 3}}}"#).unwrap();
    let typo = run(&["check", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(typo.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&typo.stderr);
    assert!(msg.contains("check.sampling") && msg.contains("per_axiz"), "{msg}");

    let empty = tempfile::tempdir().unwrap();
    let report = run(&["report", empty.path().to_str().unwrap()]);
    assert_eq!(report.status.code(), Some(1));

    let bad = tempfile::tempdir().unwrap();
    let cfg = bad.path().join("bad_dt.json");
    std::fs::write(&cfg, r#"{"preset": "zero", "simulate": {"dt": 0.03}}"#).unwrap();
    let sim = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(sim.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(&["check", "--preset", "plaplace_p2_eigen", "--out", out]).status.code(), Some(0));
        assert_eq!(run(&["simulate", "--preset", "zero", "--out", out, "--seed", "7"]).status.code(), Some(0));
        assert_eq!(run(&["report", out]).status.code(), Some(0));
    }
    let (fa, fb) = (outputs(a.path()), outputs(b.path()));
    assert!(fa.len() >= 8);
    assert_eq!(fa, fb);
    assert!(fa.keys().any(|k| k.contains("seed7")));
}

#[test]
fn seed_changes_the_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = dir.path().join("noisy.json");
    std::fs::write(
        &cfg,
        r#"{"preset": "plaplace_p2_eigen", "simulate": {"paths": 1, "horizon": 0.001, "scheme_error": false}}"#,
    )
    .unwrap();
    for seed in ["1", "2"] {
        assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out, "--seed", seed]).status.code(), Some(0));
    }
    let traj: Vec<_> = ["seed1", "seed2"]
        .iter()
        .map(|s| {
            let p = std::fs::read_dir(dir.path())
                .unwrap()
                .map(|e| e.unwrap().path())
                .find(|p| {
                    let n = p.to_string_lossy();
                    n.contains(s) && n.ends_with(".trajectory.csv")
                })
                .unwrap();
            std::fs::read(p).unwrap()
        })
        .collect();
    assert_ne!(traj[0], traj[1]);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/runs");
    let status = bin()
        .env("SPDE_MANIFOLD_OUT", &target)
        .args(["check", "--preset", "zero"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(outputs(&target).keys().any(|k| k.ends_with(".report.json")));
}

#[test]
fn report_tracks_truncation_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for n in [16, 32, 64] {
        let cfg = dir.path().join(format!("order{n}.json"));
        std::fs::write(&cfg, format!(r#"{{"preset": "ito_translation_d1", "model": {{"order": {n}}}}}"#)).unwrap();
        assert_eq!(run(&["check", "--config", cfg.to_str().unwrap(), "--out", out]).status.code(), Some(0));
    }
    assert_eq!(run(&["report", out]).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let f: Vec<_> = l.split(',').collect();
            (f[col("resolution")].parse().unwrap(), f[col("max_rho_l")].parse().unwrap())
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![16, 32, 64]);
    assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1), "{rows:?}");
    assert!(std::fs::read_to_string(dir.path().join("curves.csv")).unwrap().starts_with("manifest,t"));
}
