//! Command line front end. Failures print one JSON object to stderr and
//! exit nonzero so wrappers can parse the cause.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dwrosn_core::topology;
use dwrosn_core::{rwa, Scheme};
use dwrosn_sim::config::ExperimentConfig;
use dwrosn_sim::experiment::{self, las_seed, pooled_selection, rwa_seed};
use dwrosn_sim::output::{Format, Table};
use dwrosn_sim::edgelist;

#[derive(Parser)]
#[command(
    name = "dwrosn",
    version,
    about = "Dual-layer wavelength-routed optical satellite network simulator"
)]
struct Cli {
    /// Scenario config file (key = value lines); built-in reference
    /// scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (tables, edge lists) or directory (experiment);
    /// stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Rendering for table output.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Satellite positions at slot starts.
    Propagate(SlotFilter),
    /// Visible and potential link counts per slot.
    Census,
    /// Pooled link assignment for one scheme and slot, as an edge list.
    Assign(CellArgs),
    /// Wavelength assignment sweep over the configured hop bounds.
    Rwa(CellArgs),
    /// Full pipeline; writes the CSV bundle into --out.
    Experiment,
}

#[derive(Args)]
struct SlotFilter {
    /// Restrict to one slot index.
    #[arg(long)]
    slot: Option<usize>,
}

#[derive(Args)]
struct CellArgs {
    /// Assignment scheme.
    #[arg(long, value_parser = parse_scheme)]
    scheme: Scheme,

    /// Slot index.
    #[arg(long, default_value_t = 0)]
    slot: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(arg: FormatArg) -> Format {
        match arg {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|_| format!("unknown scheme '{s}' (expected peim, act, or greedy)"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&e.to_string()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&format!("{e:#}")),
    }
}

fn fail(message: &str) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": message }));
    ExitCode::FAILURE
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentConfig::parse_str(&text)
                .with_context(|| format!("config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Propagate(filter) => cmd_propagate(&cli, &cfg, filter.slot),
        Command::Census => cmd_census(&cli, &cfg),
        Command::Assign(cell) => cmd_assign(&cli, &cfg, cell),
        Command::Rwa(cell) => cmd_rwa(&cli, &cfg, cell),
        Command::Experiment => cmd_experiment(&cli, &cfg),
    }
}

/// DWROSN_THREADS caps the worker pool; unset leaves rayon's default.
fn init_threads() -> Result<()> {
    if let Ok(value) = std::env::var("DWROSN_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .context("DWROSN_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool init")?;
    }
    Ok(())
}

fn slot_range(cfg: &ExperimentConfig, filter: Option<usize>) -> Result<Vec<usize>> {
    let slots = cfg.slot_count();
    match filter {
        Some(slot) if slot >= slots => {
            bail!("slot {slot} out of range (config has {slots} slots)")
        }
        Some(slot) => Ok(vec![slot]),
        None => Ok((0..slots).collect()),
    }
}

fn emit_table(cli: &Cli, table: &Table) -> Result<()> {
    emit_text(cli, &table.render(cli.format.into()))
}

fn emit_text(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_propagate(cli: &Cli, cfg: &ExperimentConfig, filter: Option<usize>) -> Result<()> {
    let spec = &cfg.constellation;
    let mut table = Table::new(&["t_s", "sat", "x_km", "y_km", "z_km"]);
    for slot in slot_range(cfg, filter)? {
        let t_s = cfg.slot_start_s(slot);
        for sat in spec.satellites() {
            let p = dwrosn_core::orbital::position(spec, sat, t_s)?;
            table.push(vec![
                t_s.into(),
                edgelist::sat_label(spec, sat).into(),
                p.x_km.into(),
                p.y_km.into(),
                p.z_km.into(),
            ]);
        }
    }
    emit_table(cli, &table)
}

fn cmd_census(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let nodes = cfg.node_set(cfg.d_geo[0])?;
    let mut table = Table::new(&["t", "class", "visible", "potential"]);
    for slot in 0..cfg.slot_count() {
        let tally = topology::link_census(
            &cfg.constellation,
            &nodes,
            cfg.slot_start_s(slot),
            cfg.slot_dt_s,
            cfg.step_s,
        )?;
        for (name, pick) in experiment::LINK_CLASSES {
            table.push(vec![
                tally.slot_start_s.into(),
                name.into(),
                pick(&tally.visible).into(),
                pick(&tally.potential).into(),
            ]);
        }
    }
    emit_table(cli, &table)
}

/// Pool seeds match the experiment pipeline, so `assign` reproduces exactly
/// the topology a full run would select for the cell.
fn selected_snapshot(
    cfg: &ExperimentConfig,
    cell: &CellArgs,
) -> Result<(dwrosn_core::NodeSet, dwrosn_core::TopologySnapshot, f64)> {
    slot_range(cfg, Some(cell.slot))?;
    let d_geo = cfg.d_geo[0];
    let nodes = cfg.node_set(d_geo)?;
    let t_s = cfg.slot_start_s(cell.slot);
    let l0 = topology::build_potential_matrix(
        &cfg.constellation,
        &nodes,
        t_s,
        cfg.slot_dt_s,
        cfg.step_s,
    )?;
    let pool = pooled_selection(
        &l0,
        &nodes,
        cell.scheme,
        cfg.count,
        las_seed(cfg.seed, cell.slot, cell.scheme),
    )?;
    eprintln!(
        "slot {} {}: selected member {} of {}, hbar {:.4}",
        cell.slot,
        cell.scheme,
        pool.selected,
        cfg.count,
        pool.avg_hops
    );
    Ok((nodes, pool.snapshot, t_s))
}

fn cmd_assign(cli: &Cli, cfg: &ExperimentConfig, cell: &CellArgs) -> Result<()> {
    let spec = &cfg.constellation;
    let (nodes, snapshot, _) = selected_snapshot(cfg, cell)?;
    let text = match cli.format {
        FormatArg::Csv => edgelist::write_edge_list(spec, &nodes, &snapshot),
        FormatArg::Json => {
            let edges: Vec<[String; 2]> = snapshot
                .edges()
                .map(|(i, j)| {
                    [
                        edgelist::sat_label(spec, nodes.sat(i)),
                        edgelist::sat_label(spec, nodes.sat(j)),
                    ]
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&serde_json::json!({
                "t": snapshot.slot_start_s(),
                "dt": snapshot.slot_len_s(),
                "edges": edges,
            }))
            .expect("static structure");
            text.push('\n');
            text
        }
    };
    emit_text(cli, &text)
}

fn cmd_rwa(cli: &Cli, cfg: &ExperimentConfig, cell: &CellArgs) -> Result<()> {
    let spec = &cfg.constellation;
    let (nodes, snapshot, t_s) = selected_snapshot(cfg, cell)?;
    let mut table =
        Table::new(&["slot", "scheme", "max_hops", "rep", "n_lambda", "beta", "delay_ms"]);
    for &bound in &cfg.max_hops {
        for rep in 0..cfg.reps {
            let mut rng = rwa_seed(cfg.seed, cell.slot, cell.scheme, rep).rng();
            let run =
                rwa::rwa_run(spec, &nodes, &snapshot, bound, cfg.k_cap, t_s, &mut rng)?;
            table.push(vec![
                cell.slot.into(),
                cell.scheme.name().into(),
                bound.into(),
                rep.into(),
                run.n_lambda.into(),
                run.beta.into(),
                experiment::mean_total_delay(&run).into(),
            ]);
        }
    }
    emit_table(cli, &table)
}

fn cmd_experiment(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let out = cli
        .out
        .as_ref()
        .context("experiment writes a directory of tables; pass --out <dir>")?;
    let report = experiment::run_experiment(cfg, out)?;
    for file in &report.files {
        println!("{}", file.display());
    }
    Ok(())
}
