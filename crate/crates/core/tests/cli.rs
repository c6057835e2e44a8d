use std::path::Path;
use std::process::{Command, Output};

fn atm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atm")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = atm(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    atm(dir, args).status.code().unwrap()
}

#[test]
fn simulate_fit_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = ["--grid-m", "200", "--seed", "5", "simulate", "--alpha", "0.4", "--n", "60", "--family", "power"];
    let first = ok(d, &sim);
    assert_eq!(first, ok(d, &sim), "seeded simulation is reproducible");
    assert!(first.starts_with("object_id,node,value\nT1,0,0\n"));
    assert_eq!(first.lines().count(), 1 + 60 * 201);

    ok(d, &[&sim[..], &["--out", "maps.csv"]].concat());
    assert_eq!(std::fs::read_to_string(d.join("maps.csv")).unwrap(), first);

    let fit: serde_json::Value = serde_json::from_str(&ok(d, &["fit", "--input", "maps.csv", "--format", "json"])).unwrap();
    assert_eq!(fit["n"], 60);
    assert!((fit["alpha_hat"].as_f64().unwrap() - 0.4).abs() < 0.3);

    let table = ok(d, &["diagnose", "--input", "maps.csv", "--k", "3,6"]);
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "test,K,statistic,dof,p_value,f_n,l_n");
    assert_eq!(rows.len(), 5);
    assert!(rows[3].starts_with("split,3,") && rows[3].ends_with(",30,60"));

    let split = ok(d, &["diagnose", "--input", "maps.csv", "--k", "3", "--test", "split", "--f-n", "40", "--l-n", "20"]);
    assert!(split.lines().nth(1).unwrap().ends_with(",40,20"));

    // curves in JSON form are accepted too
    ok(d, &["--grid-m", "200", "--seed", "5", "simulate", "--alpha", "0.4", "--n", "30", "--format", "json", "--out", "m.json"]);
    ok(d, &["fit", "--input", "m.json"]);
}

#[test]
fn panel_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ["--grid-m", "200", "--seed", "8", "simulate", "--panel", "--n", "40", "--points-per-period", "80", "--out", "panel.csv"];
    ok(d, &gen);
    let text = std::fs::read_to_string(d.join("panel.csv")).unwrap();
    assert!(text.starts_with("period,value\n"));
    assert_eq!(text.lines().count(), 1 + 40 * 80);

    let summary: serde_json::Value =
        serde_json::from_str(&ok(d, &["--grid-m", "200", "analyze", "--input", "panel.csv", "--k", "3,6", "--format", "json"]))
            .unwrap();
    assert_eq!(summary["n"], 40);
    assert_eq!(summary["tests"].as_array().unwrap().len(), 4);

    let fc = ok(d, &["--grid-m", "200", "forecast", "--input", "panel.csv", "--train-len", "25", "--start", "30"]);
    let lines: Vec<&str> = fc.lines().collect();
    assert_eq!(lines[0], "period,index,alpha_hat,wasserstein_error,baseline_error");
    assert_eq!(lines.len(), 1 + 10);
    assert!(lines[1].starts_with("31,30,"));
    let inc = ok(d, &["--grid-m", "200", "forecast", "--input", "panel.csv", "--train-len", "25", "--transport-mode", "incremental"]);
    assert_eq!(inc.lines().count(), 1 + 15);

    let q = ok(d, &["--grid-m", "10", "export", "--input", "panel.csv"]);
    assert_eq!(q.lines().count(), 1 + 40 * 11);
    let t = ok(d, &["--grid-m", "10", "export", "--input", "panel.csv", "--what", "transports", "--transport-mode", "incremental"]);
    assert_eq!(t.lines().count(), 1 + 39 * 11);
    assert!(t.lines().nth(1).unwrap().starts_with("2,"));
    let acf: serde_json::Value = serde_json::from_str(&ok(
        d,
        &["--grid-m", "100", "export", "--input", "panel.csv", "--what", "acf", "--k", "4", "--format", "json"],
    ))
    .unwrap();
    assert_eq!(acf[1]["object_id"], "split");
    assert_eq!(acf[1]["values"].as_array().unwrap().len(), 4);
}

#[test]
fn study_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("size.toml"),
        "kind = \"size\"\nalphas = [0.3]\nns = [30]\nks = [3]\nreps = 6\nfamily = \"power\"\ngrid_cells = 100\nmaster_seed = 1\n",
    )
    .unwrap();
    let a = ok(d, &["mc-size", "--config", "size.toml"]);
    assert_eq!(a, ok(d, &["mc-size", "--config", "size.toml"]));
    assert_eq!(a.lines().count(), 3);
    assert!(a.lines().nth(1).unwrap().starts_with("size,power,0.3,30,3,mcleod,"));
    let b = ok(d, &["--seed", "2", "mc-size", "--config", "size.toml", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(v["metadata"]["master_seed"], 2);

    let power = ok(d, &["--grid-m", "100", "--seed", "3", "mc-power", "--reps", "3"]);
    assert!(power.lines().nth(1).unwrap().starts_with("power,trig,"));
    assert_eq!(code(d, &["mc-power", "--config", "size.toml"]), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["no-such-command"]), 2);
    assert_eq!(code(d, &["simulate", "--format", "xml"]), 2);
    assert_eq!(code(d, &["simulate", "--alpha", "1.5"]), 2);
    assert_eq!(code(d, &["--help"]), 0);

    assert_eq!(code(d, &["fit", "--input", "missing.csv"]), 3);
    std::fs::write(d.join("bad.csv"), "period,value\n1,0.5\n1,zz\n").unwrap();
    let out = atm(d, &["analyze", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    std::fs::write(d.join("cols.csv"), "year,temp\n1,0.5\n").unwrap();
    assert_eq!(code(d, &["analyze", "--input", "cols.csv"]), 3);

    // identical maps leave nothing to fit
    let id: String = std::iter::once("object_id,node,value\n".to_string())
        .chain((1..=25).flat_map(|i| (0..=4).map(move |j| format!("T{i},{},{}\n", j as f64 / 4.0, j as f64 / 4.0))))
        .collect();
    std::fs::write(d.join("id.csv"), id).unwrap();
    assert_eq!(code(d, &["fit", "--input", "id.csv"]), 4);
}
