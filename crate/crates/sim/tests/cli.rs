//! End-to-end checks of the `dwrosn` binary on a reduced constellation:
//! table shapes, edge-list round trips, determinism across processes, and
//! machine-readable failures.

use std::path::Path;
use std::process::{Command, Output};

use dwrosn_core::{las, metrics, topology, Scheme};
use dwrosn_sim::config::ExperimentConfig;
use dwrosn_sim::edgelist;
use dwrosn_sim::experiment::{las_seed, pooled_selection};

const MINI_CFG: &str = "\
leo.sats = 24
leo.planes = 4
leo.phase = 1
leo.alt_km = 1200
leo.incl_deg = 55
leo.period_s = 6565
geo.sats = 2
geo.planes = 1
geo.phase = 0
geo.alt_km = 35786
geo.incl_deg = 0
geo.period_s = 86400
earth.radius_km = 6378.137
earth.clearance_km = 100
slot.dt_s = 600
slot.horizon_s = 1200
slot.step_s = 10
las.count = 4
las.schemes = peim, act, greedy
nodes.d_leo = 4
nodes.d_geo = 6
rwa.max_hops = 2, 4, 6
rwa.k_cap = 8
rwa.reps = 3
seed = 7
";

fn write_mini_cfg(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("mini.cfg");
    std::fs::write(&path, MINI_CFG).unwrap();
    path
}

fn dwrosn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwrosn")).args(args).output().unwrap()
}

fn stdout_lines(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(str::to_owned).collect()
}

#[test]
fn census_reports_every_slot_and_class() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini_cfg(dir.path());
    let lines = stdout_lines(&dwrosn(&["--config", cfg.to_str().unwrap(), "census"]));
    assert_eq!(lines[0], "t,class,visible,potential");
    // Two slots, three classes each.
    assert_eq!(lines.len(), 1 + 2 * 3);
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let visible: u32 = cells[2].parse().unwrap();
        let potential: u32 = cells[3].parse().unwrap();
        assert!(potential <= visible, "potential set exceeds visible: {row}");
    }
}

#[test]
fn propagate_rows_sit_on_their_orbit_spheres() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini_cfg(dir.path());
    let lines =
        stdout_lines(&dwrosn(&["--config", cfg.to_str().unwrap(), "propagate", "--slot", "1"]));
    assert_eq!(lines.len(), 1 + 26);
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], "600");
        let r = (cells[2].parse::<f64>().unwrap().powi(2)
            + cells[3].parse::<f64>().unwrap().powi(2)
            + cells[4].parse::<f64>().unwrap().powi(2))
        .sqrt();
        let want = if cells[1].starts_with("LEO") { 6378.137 + 1200.0 } else { 6378.137 + 35786.0 };
        assert!((r - want).abs() < 1e-6, "{} off its sphere: |r|={r}", cells[1]);
    }
}

#[test]
fn assign_matches_the_in_process_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_mini_cfg(dir.path());
    let out = dwrosn(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "assign",
        "--scheme",
        "peim",
        "--slot",
        "1",
    ]);
    assert!(out.status.success());
    let got = String::from_utf8(out.stdout).unwrap();

    let cfg = ExperimentConfig::parse_str(MINI_CFG).unwrap();
    let nodes = cfg.node_set(cfg.d_geo[0]).unwrap();
    let l0 = topology::build_potential_matrix(
        &cfg.constellation,
        &nodes,
        cfg.slot_start_s(1),
        cfg.slot_dt_s,
        cfg.step_s,
    )
    .unwrap();
    let pool = pooled_selection(
        &l0,
        &nodes,
        Scheme::Peim,
        cfg.count,
        las_seed(cfg.seed, 1, Scheme::Peim),
    )
    .unwrap();
    let want = edgelist::write_edge_list(&cfg.constellation, &nodes, &pool.snapshot);
    assert_eq!(got, want);

    // The emitted topology parses back, respects the terminal budgets, and
    // is connected.
    let snap = edgelist::parse_edge_list(&got, &cfg.constellation, &nodes).unwrap();
    assert!(topology::is_connected(&snap));
    for v in 0..nodes.len() {
        assert!(snap.used_terminals(v) <= nodes.degree(v));
    }
    let hops = las::hop_matrix(&snap);
    assert!(metrics::connectivity_from_hops(&hops, 12) == 1.0);
}

#[test]
fn rwa_table_loosens_with_the_hop_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini_cfg(dir.path());
    let lines = stdout_lines(&dwrosn(&[
        "--config",
        cfg.to_str().unwrap(),
        "rwa",
        "--scheme",
        "act",
    ]));
    assert_eq!(lines[0], "slot,scheme,max_hops,rep,n_lambda,beta,delay_ms");
    assert_eq!(lines.len(), 1 + 3 * 3);
    let mut beta_by_bound = Vec::new();
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1], "act");
        let beta: f64 = cells[5].parse().unwrap();
        assert!((0.0..=1.0).contains(&beta));
        assert!(cells[4].parse::<u64>().unwrap() >= 1);
        beta_by_bound.push((cells[2].parse::<u32>().unwrap(), beta));
    }
    for pair in beta_by_bound.windows(2) {
        if pair[0].0 < pair[1].0 {
            assert!(pair[0].1 <= pair[1].1, "beta shrank as the bound grew: {pair:?}");
        }
    }
}

#[test]
fn json_output_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini_cfg(dir.path());
    let out = dwrosn(&["--config", cfg.to_str().unwrap(), "--format", "json", "census"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert!(row.get("t").is_some() && row.get("class").is_some());
        assert!(row["visible"].as_u64().unwrap() >= row["potential"].as_u64().unwrap());
    }
}

#[test]
fn failures_exit_nonzero_with_a_json_error_line() {
    let out = dwrosn(&["--config", "/definitely/missing.cfg", "census"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let line = stderr.lines().last().unwrap();
    let err: serde_json::Value = serde_json::from_str(line).unwrap();
    assert!(err["error"].as_str().unwrap().contains("missing.cfg"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "leo.sats = twelve\n").unwrap();
    let out = dwrosn(&["--config", bad.to_str().unwrap(), "census"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let err: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("leo.sats"));

    let out = dwrosn(&["--config", MINI_CFG, "experiment"]);
    assert!(!out.status.success(), "experiment without --out must fail");
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini_cfg(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out_dir, threads) in [(&out_a, "4"), (&out_b, "1")] {
        let status = Command::new(env!("CARGO_BIN_EXE_dwrosn"))
            .args(["--config", cfg.to_str().unwrap(), "experiment", "--out"])
            .arg(out_dir)
            .env("DWROSN_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let names = |d: &Path| {
        let mut v: Vec<String> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    let files = names(&out_a);
    assert_eq!(files, names(&out_b));
    assert!(files.contains(&"summary.csv".to_string()));
    assert!(files.contains(&"wavelength.csv".to_string()));
    for name in &files {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between thread counts");
    }
}
