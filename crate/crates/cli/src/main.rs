use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wsndiag::experiment::{calibrate, emit, run, summarize, ExperimentConfig, CALIBRATION_ORDER};
use wsndiag::seeding::{self, tag};
use wsndiag::topology::{self, TopologyKind};
use wsndiag::world::deploy_covered;
use wsndiag::{Result, SimError};

/// Deterministic wireless sensor network simulator: topology routing, energy
/// drain, data aggregation, and diagnostic error tracking.
#[derive(Parser)]
#[command(name = "wsndiag", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Distributed,
    Hierarchical,
    Centralized,
    Decentralized,
}

impl From<TopologyArg> for TopologyKind {
    fn from(value: TopologyArg) -> Self {
        match value {
            TopologyArg::Distributed => TopologyKind::Distributed,
            TopologyArg::Hierarchical => TopologyKind::Hierarchical,
            TopologyArg::Centralized => TopologyKind::Centralized,
            TopologyArg::Decentralized => TopologyKind::Decentralized,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full experiment and write results.csv, summary.csv, and one
    /// SVG error chart per topology.
    Simulate {
        /// JSON experiment config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the configured seed count.
        #[arg(long)]
        seeds: Option<u32>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the radio-constant scale that lands the centralized
    /// topology's first node death on its target, then report all four.
    Calibrate {
        /// First-death targets: centralized,hierarchical,distributed,decentralized.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where the calibrated radio-constant fragment is written.
        #[arg(long, default_value = "calibrated_radio.json")]
        out: PathBuf,
        /// Bisection bounds on the scale factor.
        #[arg(long, default_value_t = 0.01)]
        scale_min: f64,
        #[arg(long, default_value_t = 100.0)]
        scale_max: f64,
        /// Seeds averaged per probe.
        #[arg(long, default_value_t = 5)]
        probe_seeds: u32,
    },
    /// Deploy and build one topology, then dump its routing structure as CSV.
    TopologyDump {
        #[arg(long)]
        kind: TopologyArg,
        #[arg(long)]
        seed: u32,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| SimError::io(p, e))?;
            ExperimentConfig::from_json(&text)
        }
    }
}

fn cmd_simulate(config: Option<PathBuf>, seeds: Option<u32>, out: Option<PathBuf>) -> Result<()> {
    let mut config = load_config(config.as_deref())?;
    if let Some(seeds) = seeds {
        config.seeds = seeds;
    }
    if let Some(out) = out {
        config.output_dir = out.to_string_lossy().into_owned();
    }
    let started = std::time::Instant::now();
    let table = run(&config)?;
    let summary = summarize(&table, &config);
    let out_dir = PathBuf::from(&config.output_dir);
    let written = emit(&table, &summary, &config, &out_dir)?;
    println!(
        "simulated {} topologies x {} algorithms x {} steps x {} seeds in {:.1}s",
        config.topologies.len(),
        config.algorithms.len(),
        config.t_max + 1,
        config.seeds,
        started.elapsed().as_secs_f64()
    );
    for lt in &summary.lifetimes {
        println!(
            "{:<14} mean first death t={:<6.1} mean delivery blackout t={:.1}",
            lt.topology.name(),
            lt.mean_first_death,
            lt.mean_whole_network_death
        );
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_calibrate(
    config: Option<PathBuf>,
    targets: Vec<f64>,
    out: PathBuf,
    bounds: (f64, f64),
    probe_seeds: u32,
) -> Result<()> {
    let config = load_config(config.as_deref())?;
    let targets: [f64; 4] = targets
        .try_into()
        .map_err(|_| SimError::InvalidConfig("calibrate needs exactly four targets".into()))?;
    let report = calibrate(&config, targets, bounds, probe_seeds)?;
    println!("scale factor {:.6}", report.scale);
    println!(
        "radio constants: e_elec={:.6} e_elec_rx={:.6} e_amp={:.6} e_da={:.6}",
        report.radio.e_elec, report.radio.e_elec_rx, report.radio.e_amp, report.radio.e_da
    );
    for (i, kind) in CALIBRATION_ORDER.iter().enumerate() {
        println!(
            "{:<14} target t={:<6.1} achieved first death t={:.1}",
            kind.name(),
            report.targets[i],
            report.achieved[i]
        );
    }
    std::fs::write(&out, report.fragment_json()).map_err(|e| SimError::io(&out, e))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_topology_dump(
    kind: TopologyKind,
    seed: u32,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let config = load_config(config.as_deref())?;
    let mut fleet = deploy_covered(
        config.region()?,
        config.sensor_counts,
        config.leaf_battery,
        config.min_initial_coverage,
        config.deploy_attempts,
        config.coverage_resolution,
        &mut seeding::stream(config.master_seed, &[seed as u64, tag::DEPLOY]),
    )?;
    let plan = topology::build(
        kind,
        &mut fleet,
        &config.topology_config(),
        &mut seeding::stream(
            config.master_seed,
            &[seed as u64, kind.index() as u64, tag::BUILD],
        ),
    )?;
    let csv = topology::snapshot_csv(&fleet, &plan);
    match out {
        Some(path) => {
            std::fs::write(&path, csv).map_err(|e| SimError::io(&path, e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { config, seeds, out } => cmd_simulate(config, seeds, out),
        Command::Calibrate {
            targets,
            config,
            out,
            scale_min,
            scale_max,
            probe_seeds,
        } => cmd_calibrate(config, targets, out, (scale_min, scale_max), probe_seeds),
        Command::TopologyDump {
            kind,
            seed,
            config,
            out,
        } => cmd_topology_dump(kind.into(), seed, config, out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
