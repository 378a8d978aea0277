//! Experiment pipeline: per-slot potential matrices, pooled link assignment
//! per scheme, topology metrics, and repeated wavelength assignment,
//! exported as a fixed set of CSV tables.
//!
//! Every random draw comes from a substream addressed by
//! (purpose, GEO degree, slot, scheme, member-or-repetition), so any cell
//! can be recomputed in isolation and parallel execution cannot change
//! results.

use std::fs;
use std::path::{Path, PathBuf};

use dwrosn_core::las::{self, LasError, PoolSelection};
use dwrosn_core::metrics::{self, MetricsError, StatSummary};
use dwrosn_core::rwa::{self, RwaError, RwaResult, DEFAULT_PROCESSING_DELAY_MS};
use dwrosn_core::topology::{self, LinkCensus, PotentialLinkMatrix, TopologyError};
use dwrosn_core::{ConstellationSpec, NodeSet, Scheme, StreamSeed};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::edgelist;
use crate::output::Table;

/// Purpose axis of the seed tree: link assignment draws.
const STREAM_LAS: u64 = 0;
/// Purpose axis of the seed tree: RWA request shuffles.
const STREAM_RWA: u64 = 1;

/// Delay time series sampling interval within a slot, seconds.
const DELAY_SAMPLE_S: f64 = 100.0;

/// Census link classes in output order, with their count accessors.
pub const LINK_CLASSES: [(&str, fn(&topology::ClassCounts) -> u32); 3] = [
    ("intra_orbit", |c| c.intra_orbit),
    ("inter_orbit", |c| c.inter_orbit_same_layer),
    ("inter_layer", |c| c.inter_layer),
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("assignment: {0}")]
    Las(#[from] LasError),
    #[error("rwa: {0}")]
    Rwa(#[from] RwaError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Seed for the pool member draws of one (slot, scheme) cell. Member `i`
/// uses this seed's `i`-th child. Degree variants share streams on purpose:
/// a terminal-budget sweep then runs under common random numbers, so its
/// trends are not drowned by pool resampling noise.
pub fn las_seed(master: u64, slot: usize, scheme: Scheme) -> StreamSeed {
    StreamSeed::new(master).child(STREAM_LAS).child(slot as u64).child(scheme_index(scheme))
}

/// Seed for one RWA repetition of a cell. Reusing the same repetition seed
/// across hop bounds keeps the request service order identical, which the
/// demand-monotonicity property relies on.
pub fn rwa_seed(master: u64, slot: usize, scheme: Scheme, rep: usize) -> StreamSeed {
    StreamSeed::new(master)
        .child(STREAM_RWA)
        .child(slot as u64)
        .child(scheme_index(scheme))
        .child(rep as u64)
}

fn scheme_index(scheme: Scheme) -> u64 {
    Scheme::ALL.iter().position(|&s| s == scheme).expect("ALL lists every scheme") as u64
}

/// Pool generation with members drawn in parallel. Member `i` depends only
/// on `seed.child(i)`, so the outcome is identical to the sequential
/// [`las::generate_and_select_from`] regardless of thread count.
pub fn pooled_selection(
    l0: &PotentialLinkMatrix,
    nodes: &NodeSet,
    scheme: Scheme,
    count: usize,
    seed: StreamSeed,
) -> Result<PoolSelection, LasError> {
    if count == 0 {
        return Err(LasError::InvalidCount);
    }
    let members: Result<Vec<_>, LasError> = (0..count)
        .into_par_iter()
        .map(|i| las::generate_connected_member(l0, nodes, scheme, seed.child(i as u64)))
        .collect();
    Ok(las::select_pool_member(members?))
}

/// Files written by [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub files: Vec<PathBuf>,
}

/// Runs the full pipeline for a validated config and writes the CSV bundle
/// under `out_dir`.
///
/// Always written: `census.csv`, `census_nodes.csv`, and one metrics set
/// (`topo_metrics.csv`, `connectivity.csv`, `hopdist.csv`,
/// `wavelength.csv`, `delay.csv`, `summary.csv`). A single GEO degree puts
/// the metrics set directly in `out_dir`; a degree sweep puts one set per
/// degree under `dg_<value>/` and adds a top-level `dg_sweep.csv` with
/// per-hop-bound wavelength demand measured under identical service orders.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentReport, ExperimentError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let spec = &cfg.constellation;
    let slots = cfg.slot_count();
    let sweep = cfg.d_geo.len() > 1;
    let mut files = Vec::new();

    // Census and potential matrices depend on geometry only, never on
    // terminal budgets, so one pass serves every degree variant.
    let nodes0 = cfg.node_set(cfg.d_geo[0])?;
    let mut census = Table::new(&["t", "class", "visible", "potential"]);
    let mut census_nodes = Table::new(&["t", "sat", "class", "visible", "potential"]);
    let mut l0s: Vec<PotentialLinkMatrix> = Vec::with_capacity(slots);
    for slot in 0..slots {
        let t_s = cfg.slot_start_s(slot);
        let tally = topology::link_census(spec, &nodes0, t_s, cfg.slot_dt_s, cfg.step_s)?;
        push_census_rows(&mut census, &mut census_nodes, spec, &tally);
        l0s.push(topology::build_potential_matrix(spec, &nodes0, t_s, cfg.slot_dt_s, cfg.step_s)?);
    }
    write_csv(out_dir, "census.csv", &census, &mut files)?;
    write_csv(out_dir, "census_nodes.csv", &census_nodes, &mut files)?;

    let mut sweep_table =
        Table::new(&["d_g", "slot", "scheme", "max_hops", "hbar", "beta", "n_lambda_mean"]);

    for &d_geo in &cfg.d_geo {
        let block_dir =
            if sweep { out_dir.join(format!("dg_{d_geo}")) } else { out_dir.to_path_buf() };
        fs::create_dir_all(&block_dir).map_err(io_err(&block_dir))?;
        let nodes = cfg.node_set(d_geo)?;

        let mut topo_metrics = Table::new(&["slot", "scheme", "alpha", "hbar"]);
        let mut connectivity = Table::new(&["slot", "scheme", "max_hops", "beta"]);
        let mut hopdist = Table::new(&["slot", "scheme", "hops", "fraction"]);
        let mut wavelength = Table::new(&["slot", "scheme", "rep", "n_lambda"]);
        let mut delay = Table::new(&["slot", "scheme", "tau_s", "mean_delay_ms"]);
        let mut summary = Table::new(&[
            "slot",
            "scheme",
            "alpha",
            "hbar",
            "pool_hbar_min",
            "pool_hbar_max",
            "n_lambda_mean",
            "n_lambda_min",
            "n_lambda_max",
            "delay_mean_ms",
        ]);

        for slot in 0..slots {
            let t_s = cfg.slot_start_s(slot);
            for &scheme in &cfg.schemes {
                let pool = pooled_selection(
                    &l0s[slot],
                    &nodes,
                    scheme,
                    cfg.count,
                    las_seed(cfg.seed, slot, scheme),
                )?;
                let snap = &pool.snapshot;
                let hops = las::hop_matrix(snap);
                let alpha = metrics::utilization(snap, &nodes)?;
                let hbar = pool.avg_hops;
                let pool_max =
                    pool.pool_avg_hops.iter().copied().fold(f64::NEG_INFINITY, f64::max);

                topo_metrics.push(vec![
                    slot.into(),
                    scheme.name().into(),
                    alpha.into(),
                    hbar.into(),
                ]);
                for &bound in &cfg.max_hops {
                    connectivity.push(vec![
                        slot.into(),
                        scheme.name().into(),
                        bound.into(),
                        metrics::connectivity_from_hops(&hops, bound).into(),
                    ]);
                }
                let dist = metrics::hop_distribution_from_hops(&hops);
                for (h, &fraction) in dist.fractions.iter().enumerate().skip(1) {
                    hopdist.push(vec![
                        slot.into(),
                        scheme.name().into(),
                        h.into(),
                        fraction.into(),
                    ]);
                }

                // Unbounded-hop repetitions drive the wavelength, delay,
                // and summary tables.
                let runs =
                    rwa_repetitions(cfg, spec, &nodes, snap, slot, scheme, u32::MAX, t_s)?;
                let mut delay_means = Vec::with_capacity(runs.len());
                for (rep, run) in runs.iter().enumerate() {
                    wavelength.push(vec![
                        slot.into(),
                        scheme.name().into(),
                        rep.into(),
                        run.n_lambda.into(),
                    ]);
                    delay_means.push(mean_total_delay(run));
                }
                let n_lambda = StatSummary::from_values(
                    &runs.iter().map(|r| r.n_lambda as f64).collect::<Vec<_>>(),
                )
                .expect("reps is validated positive");
                let delay_stats = StatSummary::from_values(&delay_means).expect("reps positive");

                push_delay_series(&mut delay, cfg, spec, &nodes, slot, scheme, &runs[0])?;

                summary.push(vec![
                    slot.into(),
                    scheme.name().into(),
                    alpha.into(),
                    hbar.into(),
                    pool.avg_hops.into(),
                    pool_max.into(),
                    n_lambda.mean.into(),
                    n_lambda.min.into(),
                    n_lambda.max.into(),
                    delay_stats.mean.into(),
                ]);

                if sweep {
                    for &bound in &cfg.max_hops {
                        let bounded =
                            rwa_repetitions(cfg, spec, &nodes, snap, slot, scheme, bound, t_s)?;
                        let mean = bounded.iter().map(|r| r.n_lambda as f64).sum::<f64>()
                            / bounded.len() as f64;
                        sweep_table.push(vec![
                            d_geo.into(),
                            slot.into(),
                            scheme.name().into(),
                            bound.into(),
                            hbar.into(),
                            metrics::connectivity_from_hops(&hops, bound).into(),
                            mean.into(),
                        ]);
                    }
                }

                eprintln!(
                    "d_g {d_geo} slot {slot} {scheme}: pool hbar [{:.4}, {:.4}], alpha {:.4}, \
                     n_lambda mean {:.2}",
                    pool.avg_hops, pool_max, alpha, n_lambda.mean
                );
            }
        }

        write_csv(&block_dir, "topo_metrics.csv", &topo_metrics, &mut files)?;
        write_csv(&block_dir, "connectivity.csv", &connectivity, &mut files)?;
        write_csv(&block_dir, "hopdist.csv", &hopdist, &mut files)?;
        write_csv(&block_dir, "wavelength.csv", &wavelength, &mut files)?;
        write_csv(&block_dir, "delay.csv", &delay, &mut files)?;
        write_csv(&block_dir, "summary.csv", &summary, &mut files)?;
    }

    if sweep {
        write_csv(out_dir, "dg_sweep.csv", &sweep_table, &mut files)?;
    }
    Ok(ExperimentReport { files })
}

/// One RWA run per repetition, in parallel; repetition `j` always uses the
/// same substream no matter the hop bound or thread count.
fn rwa_repetitions(
    cfg: &ExperimentConfig,
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    snap: &dwrosn_core::TopologySnapshot,
    slot: usize,
    scheme: Scheme,
    max_hops: u32,
    eval_time_s: f64,
) -> Result<Vec<RwaResult>, ExperimentError> {
    let runs: Result<Vec<RwaResult>, RwaError> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rwa_seed(cfg.seed, slot, scheme, rep).rng();
            rwa::rwa_run(spec, nodes, snap, max_hops, cfg.k_cap, eval_time_s, &mut rng)
        })
        .collect();
    Ok(runs?)
}

/// Mean served-request delay of one run, milliseconds.
pub fn mean_total_delay(run: &RwaResult) -> f64 {
    if run.assignments.is_empty() {
        return 0.0;
    }
    run.assignments.iter().map(|a| a.total_delay_ms()).sum::<f64>() / run.assignments.len() as f64
}

/// Re-evaluates the first repetition's routes across the slot to show how
/// request delay drifts as the satellites move.
fn push_delay_series(
    table: &mut Table,
    cfg: &ExperimentConfig,
    spec: &ConstellationSpec,
    nodes: &NodeSet,
    slot: usize,
    scheme: Scheme,
    run: &RwaResult,
) -> Result<(), ExperimentError> {
    let t_s = cfg.slot_start_s(slot);
    let samples = ((cfg.slot_dt_s / DELAY_SAMPLE_S).floor() as usize).max(1);
    for k in 0..samples {
        let tau = t_s + DELAY_SAMPLE_S * k as f64;
        let mut total = 0.0;
        for a in &run.assignments {
            total += rwa::path_delay(spec, nodes, &a.path, tau, DEFAULT_PROCESSING_DELAY_MS)?;
        }
        let mean = if run.assignments.is_empty() {
            0.0
        } else {
            total / run.assignments.len() as f64
        };
        table.push(vec![slot.into(), scheme.name().into(), tau.into(), mean.into()]);
    }
    Ok(())
}

fn push_census_rows(
    census: &mut Table,
    census_nodes: &mut Table,
    spec: &ConstellationSpec,
    tally: &LinkCensus,
) {
    for (name, pick) in LINK_CLASSES {
        census.push(vec![
            tally.slot_start_s.into(),
            name.into(),
            pick(&tally.visible).into(),
            pick(&tally.potential).into(),
        ]);
    }
    for node in &tally.per_node {
        let label = edgelist::sat_label(spec, node.sat);
        for (name, pick) in LINK_CLASSES {
            census_nodes.push(vec![
                tally.slot_start_s.into(),
                label.as_str().into(),
                name.into(),
                pick(&node.visible).into(),
                pick(&node.potential).into(),
            ]);
        }
    }
}

fn write_csv(
    dir: &Path,
    name: &str,
    table: &Table,
    files: &mut Vec<PathBuf>,
) -> Result<(), ExperimentError> {
    let path = dir.join(name);
    fs::write(&path, table.to_csv())
        .map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
    files.push(path);
    Ok(())
}
