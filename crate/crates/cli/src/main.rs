//! `gnne`: generate training networks, train the GNNE models, rank nodes,
//! and evaluate rankings under targeted attack and SIR spreading.

mod commands;
mod config;
mod error;
mod output;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AttackMetric, Globals};
use error::{CliError, CliResult};
use gnne_core::methods::Method;

#[derive(Debug, Parser)]
#[command(name = "gnne", version, about = "Vital node identification with graph neural networks and neighbor entropy")]
struct Cli {
    /// Seed for every random choice; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root under which timestamped run directories are created.
    #[arg(long, global = true, env = output::OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,

    /// Write into exactly this directory instead of a new timestamped one.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a Barabási–Albert edge list.
    Generate {
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Edge-list path; defaults to `ba.edges` in the run directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train the task model (and embedding baselines) on a synthetic network.
    Train {
        /// SIR realizations per node for the training labels.
        #[arg(long)]
        label_runs: Option<usize>,
        #[arg(long)]
        ba_nodes: Option<usize>,
        #[arg(long)]
        epochs_feature: Option<usize>,
        #[arg(long)]
        epochs_task: Option<usize>,
        /// Methods whose models to train; GAT/GCN add the embedding baselines.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Rank the nodes of a dataset with one method.
    Rank {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        method: String,
        /// Directory written by `train`; required by GNNE, GAT and GCN.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        epochs_feature: Option<usize>,
    },
    /// Attack curves and threshold removal ratios for ranking files.
    Attack {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        rankings: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        metric: AttackMetric,
    },
    /// SIR spreading curves seeded with each ranking's top nodes.
    Spread {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        rankings: Vec<PathBuf>,
        #[arg(long)]
        top_frac: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Infection probability; the dataset's epidemic threshold by default.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Train once, rank every dataset with every method, and write all tables and curves.
    Reproduce {
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        label_runs: Option<usize>,
        #[arg(long)]
        spread_runs: Option<usize>,
    },
}

fn parse_methods(names: &[String]) -> CliResult<Vec<Method>> {
    names
        .iter()
        .map(|n| n.parse().map_err(|e: gnne_core::Error| CliError::usage(e.to_string())))
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    let globals = Globals {
        seed: cli.seed,
        config: cli.config,
        output_dir: cli.output_dir,
        run_dir: cli.run_dir,
    };
    match cli.command {
        Command::Generate { nodes, m, output } => commands::generate(&globals, nodes, m, output.as_deref()),
        Command::Train {
            label_runs,
            ba_nodes,
            epochs_feature,
            epochs_task,
            methods,
        } => {
            let mut cfg = globals.resolve()?;
            if let Some(r) = label_runs {
                cfg.training.label_runs = r;
            }
            if let Some(n) = ba_nodes {
                cfg.training.ba_nodes = n;
            }
            if let Some(e) = epochs_feature {
                cfg.training.model.epochs_feature = e;
            }
            if let Some(e) = epochs_task {
                cfg.training.model.epochs_task = e;
            }
            if let Some(m) = methods {
                cfg.methods = parse_methods(&m)?;
            }
            cfg.validate()?;
            commands::train(&globals, cfg)
        }
        Command::Rank {
            dataset,
            method,
            checkpoint,
            output,
            epochs_feature,
        } => {
            let mut cfg = globals.resolve()?;
            if let Some(e) = epochs_feature {
                cfg.training.model.epochs_feature = e;
            }
            commands::rank(&globals, cfg, &dataset, &method, checkpoint.as_deref(), output.as_deref())
        }
        Command::Attack {
            dataset,
            rankings,
            metric,
        } => commands::attack(&globals, globals.resolve()?, &dataset, &rankings, metric),
        Command::Spread {
            dataset,
            rankings,
            top_frac,
            runs,
            beta,
        } => commands::spread(&globals, globals.resolve()?, &dataset, &rankings, top_frac, runs, beta),
        Command::Reproduce {
            methods,
            label_runs,
            spread_runs,
        } => {
            let mut cfg = globals.resolve()?;
            if let Some(m) = methods {
                cfg.methods = parse_methods(&m)?;
            }
            if let Some(r) = label_runs {
                cfg.training.label_runs = r;
            }
            if let (Some(r), Some(s)) = (spread_runs, cfg.evaluation.spread.as_mut()) {
                s.runs = r;
            }
            cfg.validate()?;
            commands::reproduce(&globals, cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::Exit::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit as u8)
        }
    }
}
