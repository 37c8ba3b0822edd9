use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn radiance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radiance"))
        .args(args)
        .env_remove("RADIANCE_THREADS")
        .output()
        .expect("run radiance")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn circular_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = radiance(&[
        "circular", "--xi", "0.5", "--pminus", "1.0", "--dphi", "31.4159", "--omega-max", "4", "--rel-tol", "1e-6",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,omega,theta,dW,dW_err");
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("total,,,"), "{last}");
    let rows = csv_rows(&out);
    let sum: f64 = rows[..rows.len() - 1].iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    let total: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!((sum - total).abs() <= 1e-12 * total.abs());
}

#[test]
fn theta_resolved_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let o = radiance(&[
        "circular", "--xi", "0.3", "--pminus", "1.0", "--dphi", "20", "--omega-max", "3", "--rel-tol", "1e-6",
        "--theta-points", "4", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out);
    let first_n1 = rows.iter().find(|r| r[0] == "1").unwrap();
    assert!(!first_n1[1].is_empty() && !first_n1[2].is_empty() && !first_n1[4].is_empty());
    let n0 = rows.iter().find(|r| r[0] == "0").unwrap();
    assert!(n0[1].is_empty());
}

#[test]
fn schott_dipole_value() {
    let o = radiance(&["schott", "--xi", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let v: f64 = s.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((v / 1e-4 - 2.0 / 3.0).abs() < 1e-3, "{s}");
}

#[test]
fn unknown_config_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"xi": 0.5, "window_length": 3}"#).unwrap();
    let o = radiance(&["schott", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window_length"));
}

#[test]
fn missing_and_conflicting_parameters_exit_1() {
    assert_eq!(radiance(&["circular", "--xi", "0.5", "--dphi", "3"]).status.code(), Some(1));
    let o = radiance(&["linear", "--xi", "0.5", "--dphi", "3", "--pminus", "1", "--rest-frame", "true"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(radiance(&["rest-frame-circular", "--xi", "0.5", "--dphi", "3", "--pminus", "1"]).status.code(), Some(1));
    assert_eq!(radiance(&["circular", "--bogus"]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_2_with_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = radiance(&["schott", "--xi", "1", "--max-subdivisions", "1", "--rel-tol", "1e-12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.exists());
}

#[test]
fn json_output_reruns_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = radiance(&[
        "rest-frame-linear", "--xi", "0.4", "--dphi", "12", "--omega-max", "3", "--rel-tol", "1e-6",
        "--format", "json", "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = radiance(&["rest-frame-linear", "--config", a.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (ja, jb) = (read_json(&a), read_json(&b));
    assert_eq!(ja["result"], jb["result"]);
    assert_eq!(ja["total"].as_f64().unwrap().to_bits(), jb["total"].as_f64().unwrap().to_bits());
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(format!("t{t}.csv"));
        let o = radiance(&[
            "linear", "--xi", "0.5", "--pminus", "1", "--dphi", "10", "--omega-max", "3", "--rel-tol", "1e-6",
            "--threads", t, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn physical_units_need_wave_frequency() {
    assert_eq!(radiance(&["schott", "--xi", "0.1", "--units", "physical"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.json");
    let o = radiance(&[
        "schott", "--xi", "0.1", "--units", "physical", "--omega-w", "2.35e15", "--format", "json",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&out);
    let t = doc["units"]["time_s"].as_f64().unwrap();
    assert!((t * 2.35e15 - 1.0).abs() < 1e-15);
}

#[test]
fn schott_sweep_is_monotone_and_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = radiance(&[
        "sweep", "--sweep-mode", "schott", "--sweep-param", "xi", "--sweep-from", "0.1", "--sweep-to", "2",
        "--sweep-steps", "20", "--rel-tol", "1e-7", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 20);
    let totals: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(totals.windows(2).all(|w| w[1] > w[0]));
    // Direct evaluation of one grid point.
    let xi = rows[7][1].clone();
    let s = stdout(&radiance(&["schott", "--xi", &xi, "--rel-tol", "1e-7"]));
    let direct: f64 = s.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert_eq!(direct.to_bits(), totals[7].to_bits());
}

#[test]
fn one_step_sweep_equals_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let o = radiance(&[
        "sweep", "--sweep-mode", "rest-frame-circular", "--sweep-param", "dphi", "--sweep-from", "25",
        "--sweep-to", "99", "--sweep-steps", "1", "--xi", "0.3", "--omega-max", "3", "--rel-tol", "1e-6",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let swept: f64 = csv_rows(&out)[0][2].parse().unwrap();
    let s = stdout(&radiance(&["rest-frame-circular", "--xi", "0.3", "--dphi", "25", "--omega-max", "3", "--rel-tol", "1e-6"]));
    let single: f64 = s.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert_eq!(swept.to_bits(), single.to_bits());
}

#[test]
fn interrupted_sweep_resumes_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let args = [
        "sweep", "--sweep-mode", "nikishov-ritus", "--sweep-param", "xi", "--sweep-from", "0.2", "--sweep-to", "0.6",
        "--sweep-steps", "3", "--rel-tol", "1e-6", "--out", out.to_str().unwrap(),
    ];
    assert_eq!(radiance(&args).status.code(), Some(0));
    let mpath = dir.path().join("r.csv.manifest.json");
    let mut m = read_json(&mpath);
    // Mark point 1 with a sentinel and drop point 2, as after an interruption.
    m["points"][1]["total"] = serde_json::json!(123.0);
    m["points"].as_array_mut().unwrap().truncate(2);
    std::fs::write(&mpath, serde_json::to_vec(&m).unwrap()).unwrap();
    assert_eq!(radiance(&args).status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 123.0);
    assert_ne!(rows[2][2].parse::<f64>().unwrap(), 123.0);
    // A different configuration must not reuse the manifest.
    let mut other = args.to_vec();
    other[10] = "4";
    assert_eq!(radiance(&other).status.code(), Some(1));
}

#[test]
fn oracle_compare_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("cmp.json");
    std::fs::write(
        &cfg,
        r#"{"polarization": "circular", "xi": 0.1, "pminus": 1.0, "dphi": 6.283185307179586, "omega_max": 2.0, "rel_tol": 1e-6}"#,
    )
    .unwrap();
    let o = radiance(&["oracle-compare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out);
    assert!(doc["result"]["current_max_rel_error"].as_f64().unwrap() < 1e-8);
    assert!(doc["result"]["energy"]["rel_error"].as_f64().unwrap() < 1e-4);
    assert_eq!(doc["result"]["points"].as_array().unwrap().len(), 9);
}

#[test]
fn classical_limit_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cl.csv");
    let o = radiance(&[
        "classical-limit", "--polarization", "circular", "--xi", "0.3", "--dphis", "20,200", "--rel-tol", "1e-6",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out);
    let rel: Vec<f64> = rows.iter().map(|r| r[4].parse::<f64>().unwrap().abs()).collect();
    assert!(rel[1] < 1e-2);
}
