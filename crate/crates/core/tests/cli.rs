use std::path::Path;
use std::process::{Command, Output};

use laddyn::output::Table;

fn laddyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laddyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evolve_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let out = laddyn(&["evolve", "--d", "0.6", "--t-max", "12", "--output", path_str(p)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# laddyn schema v1\n"));
    assert!(!text.contains('\r'));

    let table = Table::from_csv(&text).unwrap();
    assert_eq!(table.rows.len(), 1201);
    assert_eq!(table.column_f64("c_12").unwrap()[0], 1.0);
    assert!(table.column_f64("c_34").unwrap()[0].abs() < 1e-15);
    assert!((table.column_f64("sz_tot").unwrap()[0] + 1.0).abs() < 1e-15);
    assert!(table.column_f64("max_discrepancy").unwrap().iter().all(|&x| x <= 1e-9));
}

#[test]
fn evolve_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = laddyn(&["evolve", "--t-max", "2", "--dt", "0.25", "--format", "json", "--output", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let table = Table::from_json(&text).unwrap();
    assert_eq!(table.to_json(), text);
    assert_eq!(table.rows.len(), 9);
}

#[test]
fn evolve_without_dm_drops_analytic_columns() {
    let out = laddyn(&["evolve", "--d", "0", "--t-max", "1", "--dt", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(table.column_index("c_13").is_some());
    assert!(table.column_index("ca_13").is_none());
}

#[test]
fn events_at_unit_d() {
    let out = laddyn(&["events", "--d", "1", "--t-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.columns, ["kind", "n", "t_predicted", "t_detected", "residual"]);
    let kinds: Vec<String> = table
        .rows
        .iter()
        .map(|r| match &r[0] {
            laddyn::output::Cell::Text(s) => s.clone(),
            other => panic!("kind cell {other:?}"),
        })
        .collect();
    let detected = table.column_f64("t_detected").unwrap();
    let predicted = table.column_f64("t_predicted").unwrap();
    let transfers: Vec<f64> = kinds.iter().zip(&detected).filter(|(k, _)| *k == "transfer").map(|(_, t)| *t).collect();
    assert_eq!(transfers.len(), 2);
    assert!((transfers[0] - 2.221441).abs() < 1e-6);
    assert!((transfers[1] - 6.664324).abs() < 1e-6);
    let first_w = kinds.iter().position(|k| k == "w_state").unwrap();
    assert!((detected[first_w] - 1.110721).abs() < 1e-6);
    assert!(detected.iter().zip(&predicted).all(|(a, b)| (a - b).abs() <= 1e-8));
}

#[test]
fn events_before_first_w_time_is_empty() {
    let out = laddyn(&["events", "--d", "1", "--t-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(table.rows.is_empty());
}

#[test]
fn sweep_writes_rows_and_w_time_curves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = laddyn(&["sweep", "--d-grid", "0.1:4.0:0.1", "--t-max", "1", "--dt", "0.5", "--output", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = Table::from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.rows.len(), 40 * 3);
    let curves = Table::from_csv(&std::fs::read_to_string(dir.path().join("sweep_wtimes.csv")).unwrap()).unwrap();
    assert_eq!(curves.columns.len(), 11);
    for n in 0..10 {
        let c = curves.column_f64(&format!("t_w_{n}")).unwrap();
        assert!(c.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn sweep_single_point() {
    let out = laddyn(&["sweep", "--d", "0.5", "--t-max", "0.001", "--dt", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.split("# laddyn schema v1\n").nth(1).unwrap();
    let table = Table::from_csv(&format!("# laddyn schema v1\n{first}")).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.column_f64("c_first").unwrap()[0], 1.0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "d = 1.0\nt_max = 10\n").unwrap();
    let from_file = laddyn(&["events", "--config", path_str(&cfg)]);
    let overridden = laddyn(&["events", "--config", path_str(&cfg), "--t-max", "1"]);
    let rows = |o: &Output| Table::from_csv(&String::from_utf8_lossy(&o.stdout)).unwrap().rows.len();
    assert_eq!(rows(&from_file), 7);
    assert_eq!(rows(&overridden), 0);
}

#[test]
fn verify_default_passes() {
    let out = laddyn(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    let leak = text.lines().find_map(|l| l.strip_prefix("sector leakage: ")).unwrap();
    assert!(leak.trim().parse::<f64>().unwrap() <= 1e-12);
    assert!(text.contains("[H, S^z_tot]"));
}

#[test]
fn verify_with_wrong_bond_fails() {
    let dir = tempfile::tempdir().unwrap();
    let top = dir.path().join("bad.top");
    std::fs::write(&top, "rung 1 2\nrung 2 3\nrung 3 4\nrung 4 1\nleg 1 3\nleg 4 2\n").unwrap();
    let out = laddyn(&["verify", "--topology", path_str(&top)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("[FAIL] concurrence vs closed form"));
}

#[test]
fn exit_codes() {
    assert_eq!(laddyn(&["evolve", "--bogus"]).status.code(), Some(2));
    assert_eq!(laddyn(&["evolve", "--d", "-1"]).status.code(), Some(2));
    assert_eq!(laddyn(&["evolve", "--dt", "0"]).status.code(), Some(2));
    assert_eq!(laddyn(&["evolve", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(laddyn(&["events", "--d", "0"]).status.code(), Some(2));
    assert_eq!(laddyn(&["sweep", "--d-grid", "1:0:1"]).status.code(), Some(2));
    assert_eq!(laddyn(&["verify", "--topology", "/nonexistent/top"]).status.code(), Some(3));
    let out = laddyn(&["evolve", "--t-max", "1", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/out.csv"));
}

#[test]
fn thread_count_is_respected() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_laddyn"))
            .args(["evolve", "--t-max", "3"])
            .env("LADDYN_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, auto) = (run("1"), run("0"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, auto.stdout);
    assert_eq!(run("many").status.code(), Some(2));
}
