//! End-to-end runs of the `uavcov` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use uavcov_cli::config::parse_config;
use uavcov_cli::sweep::CSV_COLUMNS;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uavcov"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn shipped_configs_parse() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let cfg = configs().join("quick.toml");
    let o = run(&["sweep", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, angle) in rows.iter().zip(["10", "25", "40"]) {
        assert_eq!(row[0], "theta_bar");
        assert_eq!(row[1], angle);
        let p: f64 = row[2].parse().unwrap();
        let z: f64 = row[5].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(z.abs() < 4.0, "z = {z}");
        assert_eq!(row[6], "5000");
        assert_eq!(row[7], "7");
    }
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("quick.toml");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        assert!(run(&["sweep", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()])
            .status
            .success());
        // Drop the wall-time column before comparing.
        let text = fs::read_to_string(out).unwrap();
        let stripped: Vec<String> = text
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(8);
                f.join(",")
            })
            .collect();
        outputs.push(stripped);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn json_sweep_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "mode = \"analytic\"\nformat = \"json\"\nsweep_var = \"beta\"\nsweep_start = -20\nsweep_stop = 10\nsweep_steps = 4\n").unwrap();
    let o = run(&["sweep", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["sweep_value"], -20.0);
    assert!(rows[0]["p_mc"].is_null());
}

#[test]
fn point_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "mode = \"analytic\"\nmetric = \"cellfree\"\nlambda = 1e-6\nbeta_db = 45\n",
    )
    .unwrap();
    let o = run(&["point", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["params"]["lambda"], 1e-6);
    assert_eq!(doc["elevation"]["kind"], "constant");
    let p = doc["result"]["p_analytic"].as_f64().unwrap();
    assert!(p > 0.4 && p < 0.6, "{p}");
}

#[test]
fn bad_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "alpha = 1.5\n").unwrap();
    let o = run(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("alpha") && msg.contains("alpha > 2"), "{msg}");

    fs::write(&cfg, "lamda = 1e-6\n").unwrap();
    let o = run(&["point", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));

    assert_eq!(run(&["sweep", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "everything"]).status.code(), Some(2));
}

#[test]
fn numerics_validation_passes() {
    let o = run(&["validate", "numerics"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert!(!report["checks"].as_array().unwrap().is_empty());
}

/// The fuzz target's property, run over its seed corpus and some
/// non-finite variants on the stable toolchain.
#[test]
fn fuzz_corpus_round_trips() {
    use uavcov_cli::config::emit;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus/parse_config");
    let mut inputs: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    assert!(inputs.len() >= 10);
    for key in [
        "lambda",
        "alpha",
        "ell",
        "beta_db",
        "noise_dbm",
        "theta_bar_deg",
        "sweep_start",
        "guard_tolerance",
    ] {
        for v in ["nan", "inf", "-inf", "-0.0", "1e308"] {
            inputs.push(format!("{key} = {v}\n"));
            inputs.push(format!("sweep_var = \"beta\"\nsweep_start = -20\n{key} = {v}\n"));
        }
    }
    for text in &inputs {
        if let Ok(cfg) = parse_config(text) {
            let again = parse_config(&emit(&cfg)).unwrap_or_else(|e| panic!("{text:?}: {e}"));
            assert_eq!(cfg, again, "{text:?}");
        }
    }
}
