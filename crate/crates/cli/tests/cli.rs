use std::path::Path;
use std::process::{Command, Output};
use railconc_cli::{render, Format, RunConfig};
use serde_json::Value;

fn railconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railconc")).args(args).output().unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn json(cfg: &RunConfig, command: &str) -> Value {
    let cfg = RunConfig { format: Format::Json, ..cfg.clone() };
    serde_json::from_str(&render(command, &cfg).unwrap().text).unwrap()
}

/// Every CSV field must spell the same value as the JSON row.
fn assert_same_values(command: &str, cfg: &RunConfig) {
    let csv = render(command, &RunConfig { format: Format::Csv, ..cfg.clone() }).unwrap().text;
    let (header, rows) = csv_rows(&csv);
    let doc = json(cfg, command);
    let json_rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), json_rows.len());
    for (row, obj) in rows.iter().zip(json_rows) {
        for (name, field) in header.iter().zip(row) {
            let v = &obj[name.as_str()];
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            assert_eq!(&text, field, "{command}: column {name}");
        }
    }
}

#[test]
fn csv_and_json_agree() {
    let cfg = RunConfig { trials: 2_000, seed: 5, ..RunConfig::default() };
    for command in ["generate", "swap-chain", "concentrate", "yield"] {
        assert_same_values(command, &cfg);
    }
}

#[test]
fn json_layout() {
    let doc = json(&RunConfig::default(), "concentrate");
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "rows", "summary"]);
    assert_eq!(doc["config"]["command"], "concentrate");
    assert_eq!(doc["config"]["rounds"], 5);
    assert!(doc["summary"]["documented_discrepancies"].as_u64().unwrap() > 0);
    assert_eq!(doc["summary"]["checks_pass"], true);
}

#[test]
fn csv_format() {
    let text = render("swap-chain", &RunConfig::default()).unwrap().text;
    assert!(text.ends_with('\n') && !text.contains('\r'));
    assert!(text.starts_with("alpha_sq,n,alpha_n_sq,entanglement_ratio,closed_form_check\n"));
}

#[test]
fn generate_examples() {
    let cfg = RunConfig { p_a: vec![0.01, 0.016], p_b: vec![0.01, 0.004], ..RunConfig::default() };
    let (header, rows) = csv_rows(&render("generate", &cfg).unwrap().text);
    assert_eq!(header, ["p_a", "p_b", "herald_prob", "alpha_sq", "beta_sq", "phase"]);
    assert_eq!(rows.len(), 4);
    let find = |a: &str, b: &str| rows.iter().find(|r| r[0] == a && r[1] == b).unwrap().clone();
    assert_eq!(find("0.01", "0.01")[3], "0.5");
    assert_eq!(find("0.016", "0.004")[3], "0.8");

    let cfg = RunConfig { trials: 10_000, ..cfg };
    let (header, _) = csv_rows(&render("generate", &cfg).unwrap().text);
    assert!(header.iter().any(|h| h == "mc_click_freq"));
}

#[test]
fn swap_chain_examples() {
    let cfg = RunConfig { alpha_sq: vec![0.5, 0.8], swap_depth: 4, theta_ab: 0.9, ..RunConfig::default() };
    let (_, rows) = csv_rows(&render("swap-chain", &cfg).unwrap().text);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[4] == "pass"));
    assert!(rows.iter().filter(|r| r[0] == "0.5").all(|r| r[3] == "1.0"));
    let first = rows.iter().find(|r| r[0] == "0.8" && r[1] == "1").unwrap();
    assert_eq!(first[3], "0.0625");
}

#[test]
fn concentrate_examples() {
    let cfg = RunConfig { alpha_sq: vec![0.5, 0.8], trials: 100_000, seed: 3, ..RunConfig::default() };
    let doc = json(&cfg, "concentrate");
    let rows = doc["rows"].as_array().unwrap();
    let balanced = &rows[0];
    assert_eq!(balanced["n"], 1);
    assert_eq!(balanced["y_formula"].as_f64().unwrap(), 0.25);
    let biased = rows.iter().find(|r| r["alpha_sq"] == 0.8 && r["n"] == 1).unwrap();
    assert!((biased["success_probability"].as_f64().unwrap() - 0.32).abs() < 1e-12);
    for row in rows.iter().filter(|r| r["n"].is_u64()) {
        let (mc, se, exact) = (row["mc_estimate"].as_f64().unwrap(), row["mc_stderr"].as_f64().unwrap(),
            row["y_oracle"].as_f64().unwrap());
        // rounds with no sampled success carry a zero stderr
        assert!((mc - exact).abs() <= 3.0 * se || (mc == 0.0 && exact < 1e-4), "{row}");
    }
    let footers: Vec<_> = rows.iter().filter(|r| r["n"] == "total").collect();
    assert_eq!(footers.len(), 2);
    assert!(footers[0]["success_probability"].is_null());
}

#[test]
fn generic_qnd_phase_stops_recycling() {
    let cfg = RunConfig { alpha_sq: vec![0.8], qnd_theta: 0.3, rounds: 3, ..RunConfig::default() };
    let doc = json(&cfg, "concentrate");
    assert_eq!(doc["summary"]["exact_source"], "round ledger");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[1]["y_oracle"].as_f64().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    let ok = railconc(&["concentrate", "--alpha-sq", "0.7", "--rounds", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8(ok.stdout).unwrap().starts_with("alpha_sq,n,"));

    for args in [
        &["concentrate", "--alpha-sq", "1.2"][..],
        &["concentrate", "--rounds", "0"],
        &["swap-chain", "--swap-depth", "0"],
        &["generate", "--p-a", "0"],
        &["yield", "--qnd-theta", "half"],
        &["yield", "--config", "/nonexistent/run.toml"],
        &["nonsense"],
        &["yield", "--trials", "-3"],
    ] {
        let out = railconc(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(railconc(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "alpha_sq = 0.9\nrounds = 2\nformat = \"json\"\n").unwrap();
    let out = dir.path().join("out.json");
    let arg = |p: &Path| p.to_str().unwrap().to_owned();
    let status = railconc(&["yield", "--config", &arg(&config), "--rounds", "3", "--output", &arg(&out)]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["config"]["rounds"], 3);
    assert_eq!(doc["config"]["alpha_sq"][0], 0.9);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);

    std::fs::write(&config, "alpha_sq = 0.9\nunknown_key = 1\n").unwrap();
    assert_eq!(railconc(&["yield", "--config", &arg(&config)]).status.code(), Some(1));
}

#[test]
fn seeds_change_only_sampled_columns() {
    let base = RunConfig { alpha_sq: vec![0.7], trials: 20_000, ..RunConfig::default() };
    let a = render("concentrate", &RunConfig { seed: 1, ..base.clone() }).unwrap().text;
    let b = render("concentrate", &RunConfig { seed: 2, ..base.clone() }).unwrap().text;
    assert_ne!(a, b);
    let (header, ra) = csv_rows(&a);
    let (_, rb) = csv_rows(&b);
    let exact_cols: Vec<usize> = header.iter().enumerate()
        .filter(|(_, h)| !h.starts_with("mc_")).map(|(i, _)| i).collect();
    for (x, y) in ra.iter().zip(&rb) {
        for &i in &exact_cols {
            assert_eq!(x[i], y[i]);
        }
    }
}
