use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mmwave_vr::runner::config::parse_scenarios;
use mmwave_vr::runner::csv_io::format_sig9;
use mmwave_vr::runner::{
    min_statistic, mode_statistic, read_results_csv, write_results_csv, write_summary_csv,
    QueueUnits, Simulator, SweepConfig,
};
use mmwave_vr::SimError;

#[derive(Parser)]
#[command(
    name = "mmwave-vr",
    version,
    about = "Indoor mmWave VR link-level sweep simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Mean,
    Min,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    #[value(name = "paper")]
    AsPrinted,
    Reciprocal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Min,
    Mode,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep and write results.csv and summary.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        #[arg(long)]
        seed: Option<u64>,
        /// Es/N0 grid as start:step:stop in dB.
        #[arg(long)]
        esn0: Option<String>,
        /// Comma-separated NTxNRF list, e.g. 2x1,8x2.
        #[arg(long)]
        codebook: Option<String>,
        #[arg(long = "queue-units", value_enum)]
        queue_units: Option<UnitsArg>,
    },
    /// Per-link min or binned mode of the transmission delay over Es/N0.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
        /// Bin width in seconds for the mode.
        #[arg(long, default_value_t = 1e-6)]
        bin: f64,
    },
    /// Parse and validate a configuration without running it.
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn simulate(
    config: PathBuf,
    out: PathBuf,
    scenario: Option<ScenarioArg>,
    seed: Option<u64>,
    esn0: Option<String>,
    codebook: Option<String>,
    queue_units: Option<UnitsArg>,
) -> Result<(), SimError> {
    let mut cfg = SweepConfig::from_file(&config)?;
    if let Some(s) = scenario {
        cfg.scenarios = parse_scenarios(match s {
            ScenarioArg::Mean => "mean",
            ScenarioArg::Min => "min",
            ScenarioArg::Both => "both",
        })?;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(spec) = esn0 {
        cfg.set_esn0_spec(&spec)?;
    }
    if let Some(spec) = codebook {
        cfg.set_codebook_spec(&spec)?;
    }
    if let Some(u) = queue_units {
        cfg.set_queue_units(match u {
            UnitsArg::AsPrinted => QueueUnits::AsPrinted,
            UnitsArg::Reciprocal => QueueUnits::Reciprocal,
        });
    }
    cfg.validate()?;

    let sim = Simulator::new(&cfg)?;
    let result = sim.run()?;
    std::fs::create_dir_all(&out).map_err(|e| SimError::Io {
        path: out.clone(),
        source: e,
    })?;
    let results_path = out.join("results.csv");
    write_results_csv(&result.records, &results_path)?;
    write_summary_csv(&result.summary, &out.join("summary.csv"))?;

    println!(
        "{} records ({} sweep points) written to {}",
        result.records.len(),
        result.points.len(),
        results_path.display()
    );
    for &scenario in &cfg.scenarios {
        for d in sim.designs() {
            println!(
                "{scenario:>4} {:>5} mean utility {}",
                d.codebook.label(),
                format_sig9(result.mean_utility(scenario, &d.codebook))
            );
        }
    }
    Ok(())
}

fn stats(input: PathBuf, metric: Metric, bin: f64) -> Result<(), SimError> {
    let records = read_results_csv(&input)?;
    let mut groups: BTreeMap<(&str, usize, usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in &records {
        groups
            .entry((r.scenario.as_str(), r.n_tx, r.n_rf, r.ap, r.user))
            .or_default()
            .push(r.d_trans_s);
    }
    let column = match metric {
        Metric::Min => "min_d_trans_s",
        Metric::Mode => "mode_d_trans_s",
    };
    println!("scenario,n_tx,n_rf,ap,user,{column}");
    for ((scenario, n_tx, n_rf, ap, user), delays) in &groups {
        let v = match metric {
            Metric::Min => min_statistic(delays)?,
            Metric::Mode => mode_statistic(delays, bin)?,
        };
        println!("{scenario},{n_tx},{n_rf},{ap},{user},{}", format_sig9(v));
    }
    Ok(())
}

fn check_config(config: PathBuf) -> Result<(), SimError> {
    let cfg = SweepConfig::from_file(&config)?;
    let codebooks: Vec<String> = cfg.codebooks()?.iter().map(|c| c.label()).collect();
    let grid = cfg.esn0_grid()?;
    println!(
        "ok: {} APs, {} users, {} subcarriers, codebooks [{}], {} Es/N0 points, {} scenario(s)",
        cfg.n_aps,
        cfg.n_users,
        cfg.n_sc,
        codebooks.join(", "),
        grid.len(),
        cfg.scenarios.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            config,
            out,
            scenario,
            seed,
            esn0,
            codebook,
            queue_units,
        } => simulate(config, out, scenario, seed, esn0, codebook, queue_units),
        Command::Stats { input, metric, bin } => stats(input, metric, bin),
        Command::CheckConfig { config } => check_config(config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
