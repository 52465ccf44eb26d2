//! End-to-end runs of the `csx` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use csx_core::grid::{build_grid, read_field, write_field, DumpFormat, Field};
use csx_core::kernel::FractionalOrder;

fn csx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let line = err.lines().rev().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

/// Numeric rows of a CSV table after checking its header.
fn csv_rows(text: &str, header: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn dsconst_table() {
    let o = csx(&["dsconst", "--s", "0.5,0.001,0.25,0.75"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o), "s,ds,two_s_ds,ds_over_two_one_minus_s");
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
    assert!((rows[1][2] - 1.0).abs() < 0.01);
    // 2^{2s-1} Γ(s) / Γ(1-s) from tabulated Γ(1/4) and Γ(3/4)
    let (g14, g34) = (3.625_609_908_221_908, 1.225_416_702_465_177_7);
    let d14 = 2f64.powf(-0.5) * g14 / g34;
    let d34 = 2f64.powf(0.5) * g34 / g14;
    assert!((rows[2][1] / d14 - 1.0).abs() < 1e-12);
    assert!((rows[3][1] / d34 - 1.0).abs() < 1e-12);
    for r in &rows {
        assert!((r[2] - 2.0 * r[0] * r[1]).abs() <= 1e-15 * r[2]);
    }
}

#[test]
fn dsconst_json() {
    let o = csx(&["dsconst", "--s", "0.5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["ds"], 1.0);
}

#[test]
fn bad_order_is_config_error() {
    let o = csx(&["dsconst", "--s", "1.5"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "config");
    assert_eq!(csx(&["no-such-command"]).status.code(), Some(4));
}

#[test]
fn sine_layer_matches_arctan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = csx(&["layer", "--s", "0.5", "--nl", "sine_halfs", "--R", "40", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&read(dir.path(), "layer_s0p5_R40_trace.csv"), "x,u");
    let err = rows
        .iter()
        .filter(|r| r[0].abs() <= 10.0)
        .map(|r| (r[1] - 2.0 / PI * r[0].atan()).abs())
        .fold(0.0, f64::max);
    assert!(err <= 2e-2, "{err}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "layer_s0p5_R40_report.json")).unwrap();
    assert_eq!(report["converged"], true);
    let dump = std::fs::File::open(dir.path().join("layer_s0p5_R40.csx")).unwrap();
    let f: Field<f64> = read_field(dump).unwrap();
    assert_eq!(f.grid().nx(), 320);
    assert_eq!(f.trace().len(), rows.len());
}

#[test]
fn allen_cahn_layer_is_odd_and_monotone() {
    let o = csx(&["layer", "--s", "0.5", "--R", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let trace: String = text
        .split("# ")
        .find(|b| b.starts_with("layer_s0p5_R16_trace.csv"))
        .map(|b| b.split_once('\n').unwrap().1.to_string())
        .unwrap();
    let rows = csv_rows(&trace, "x,u");
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    let mid = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(mid[1].abs() < 1e-12);
}

#[test]
fn low_order_layer_converges_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = csx(&["layer", "--s", "0.25", "--R", "40", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "layer_s0p25_R40_report.json")).unwrap();
    assert_eq!(report["converged"], true);
    assert!(report["iterations"].as_u64().unwrap() <= 200);
}

#[test]
fn critical_growth_is_logarithmic() {
    let dir = tempfile::tempdir().unwrap();
    let o = csx(&["energy-scan", "--s", "0.5", "--R", "8,16,32,64", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_str(&read(dir.path(), "growth_s0p5.json")).unwrap();
    assert_eq!(fit["regime"], "critical");
    let rows = csv_rows(&read(dir.path(), "energy_s0p5.csv"), "radius,dirichlet,potential,total");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| (r[1] + r[2] - r[3]).abs() <= 1e-12 * r[3]));
}

#[test]
fn monotonicity_passes_on_layer() {
    let o = csx(&["monotonicity", "--s", "0.3", "--R", "4,8,16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o), "R,phi");
    assert_eq!(rows.len(), 3);
}

#[test]
fn pohozaev_vanishes_on_constant_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csx");
    let g = Arc::new(build_grid(1, 8.0, 8.0, 32, 32, 1.0).unwrap());
    let f = Field::constant(g, FractionalOrder::new(0.5).unwrap(), 1.0);
    write_field(&f, DumpFormat::Binary, std::fs::File::create(&path).unwrap()).unwrap();
    let o = csx(&["pohozaev", "--R", "5", "--input", path.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o), "R,lhs,rhs,residual");
    assert!(rows[0][3].abs() <= 1e-12);
}

#[test]
fn pohozaev_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    std::fs::write(&cfg, "[tolerances]\npohozaev_max = 1e-12\n").unwrap();
    let o = csx(&["pohozaev", "--R", "5", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "invariant_violation");
}

#[test]
fn newton_budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, "[tolerances]\nnewton_max_iter = 1\n").unwrap();
    let o = csx(&["layer", "--R", "16", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "solver_failure");
    assert_eq!(err["report"]["converged"], false);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "s = [0.25, 0.75]\nformat = \"json\"\n").unwrap();
    let o = csx(&["dsconst", "--config", cfg.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let o = csx(&["dsconst", "--config", cfg.to_str().unwrap(), "--s", "0.5", "--format", "csv"]);
    assert_eq!(csv_rows(&stdout(&o), "s,ds,two_s_ds,ds_over_two_one_minus_s").len(), 1);

    std::fs::write(&cfg, "sigma = 0.5\n").unwrap();
    assert_eq!(csx(&["dsconst", "--config", cfg.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn scans_are_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(&cfg, "panels = 16\ntraces = 3\n").unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = Command::new(env!("CARGO_BIN_EXE_csx"))
            .args(["psi-scan", "--s", "0.25", "--R", "8,16", "--seed", "7"])
            .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("CSX_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push((read(&out, "psi_s0p25.csv"), read(&out, "extension_s0p25.json")));
    }
    assert_eq!(outputs[0], outputs[1]);
    csv_rows(&outputs[0].0, "epsilon,l2,frac,weig,total,bound,ratio");
}

#[test]
fn comparison_reports_minimality() {
    let dir = tempfile::tempdir().unwrap();
    let o = csx(&["compare", "--s", "0.5", "--R", "8", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let rep: serde_json::Value = serde_json::from_str(&read(dir.path(), "compare_s0p5_R8.json")).unwrap();
    assert_eq!(rep["minimality_ok"], true);
    assert!(rep["e_v"]["total"].as_f64().unwrap() <= rep["e_wbar"]["total"].as_f64().unwrap());
}

#[test]
fn invalid_thread_count_is_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_csx"))
        .args(["dsconst"])
        .env("CSX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}
