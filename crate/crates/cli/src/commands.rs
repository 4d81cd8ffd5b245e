use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gnne_core::evaluation::{
    compare_methods, efficiency, efficiency_curve, efficiency_ratio_at, lcc_curve, removal_ratio_at, Grid,
    MethodReport,
};
use gnne_core::graph::{generate_ba, write_edge_list};
use gnne_core::methods::Method;
use gnne_core::sir::{epidemic_threshold, spreading_ability, write_spread_csv, SirConfig};
use gnne_core::{Graph, NodeMap, RankedList};
use log::info;
use serde::Serialize;

use crate::config::{ExperimentConfig, SweepConfig};
use crate::error::{CliError, CliResult, Context};
use crate::output::{write_with, RunDir};
use crate::pipeline::{load_dataset, load_models, rank_all, train_models, Models, TrainingSummary};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub seed: Option<u64>,
    pub config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub run_dir: Option<PathBuf>,
}

impl Globals {
    /// Config file (or defaults) with the global flags applied.
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn run_dir(&self, command: &str) -> CliResult<RunDir> {
        let run = RunDir::create(self.run_dir.as_deref(), self.output_dir.as_deref(), command)?;
        info!("writing to {}", run.path().display());
        Ok(run)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AttackMetric {
    Lcc,
    Efficiency,
    Both,
}

fn method_file_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "ranking".into(), |s| s.to_string_lossy().into_owned())
}

fn read_rankings(paths: &[PathBuf], map: &NodeMap) -> CliResult<Vec<(String, RankedList)>> {
    paths
        .iter()
        .map(|p| {
            let file = std::fs::File::open(p).context(format!("ranking {}", p.display()))?;
            let r = RankedList::read_csv(std::io::BufReader::new(file), map)
                .context(format!("ranking {}", p.display()))?;
            Ok((method_file_name(p), r))
        })
        .collect()
}

pub fn generate(globals: &Globals, nodes: usize, m: usize, output: Option<&Path>) -> CliResult<()> {
    let cfg = globals.resolve()?;
    let g = generate_ba(nodes, m, cfg.seed)?;
    let map = NodeMap::identity(g.node_count());
    let path = match output {
        Some(p) => {
            write_with(p, |out| write_edge_list(&g, &map, out))?;
            p.to_path_buf()
        }
        None => {
            let run = globals.run_dir("generate")?;
            run.write_json("config.json", &cfg)?;
            run.write_with("ba.edges", |out| write_edge_list(&g, &map, out))?
        }
    };
    info!("{} nodes, {} edges -> {}", g.node_count(), g.edge_count(), path.display());
    Ok(())
}

pub fn train(globals: &Globals, cfg: ExperimentConfig) -> CliResult<()> {
    let run = globals.run_dir("train")?;
    run.write_json("config.json", &cfg)?;
    let baselines = cfg.methods.iter().any(|m| matches!(m, Method::Gat | Method::Gcn));
    let (models, summary) = train_models(&cfg, &cfg.train_config(), baselines, &run, Path::new(""))?;
    run.write_json("training.json", &summary)?;
    for (file, hash) in &models.hashes {
        info!("{file}: sha256 {hash}");
    }
    Ok(())
}

pub fn rank(
    globals: &Globals,
    cfg: ExperimentConfig,
    dataset: &Path,
    method: &str,
    checkpoint: Option<&Path>,
    output: Option<&Path>,
) -> CliResult<()> {
    let method: Method = method.parse().map_err(|e: gnne_core::Error| CliError::usage(e.to_string()))?;
    let models = if method.needs_training() {
        let dir = checkpoint.ok_or_else(|| {
            CliError::usage(format!("{method} needs --checkpoint <directory written by `gnne train`>"))
        })?;
        let models = load_models(dir)?;
        if method == Method::Gat && models.gat.is_none() || method == Method::Gcn && models.gcn.is_none() {
            return Err(CliError::data(format!("{} has no {method} baseline checkpoint", dir.display())));
        }
        Some(models)
    } else {
        None
    };
    let (g, map) = load_dataset(dataset)?;
    let ranked = rank_all(&g, &[method], &cfg, &cfg.train_config(), models.as_ref())?;
    let (_, list) = &ranked[0];
    let path = match output {
        Some(p) => {
            write_with(p, |out| list.write_csv(&map, out))?;
            p.to_path_buf()
        }
        None => {
            let run = globals.run_dir("rank")?;
            run.write_json("config.json", &cfg)?;
            run.write_with(format!("{method}.csv"), |out| list.write_csv(&map, out))?
        }
    };
    info!("{method} ranking -> {}", path.display());
    Ok(())
}

pub fn attack(
    globals: &Globals,
    cfg: ExperimentConfig,
    dataset: &Path,
    rankings: &[PathBuf],
    metric: AttackMetric,
) -> CliResult<()> {
    let (g, map) = load_dataset(dataset)?;
    let rankings = read_rankings(rankings, &map)?;
    let run = globals.run_dir("attack")?;
    run.write_json("config.json", &cfg)?;
    let ev = &cfg.evaluation;
    let figure = Grid::Step(ev.figure_step);
    let want_lcc = metric != AttackMetric::Efficiency;
    let want_eff = metric != AttackMetric::Lcc;
    let eff_threshold = ev.efficiency_fraction * efficiency(&g, ev.efficiency_norm);
    let mut table = String::from("method");
    if want_lcc {
        table.push_str(",lcc_removal_ratio,lcc_reached");
    }
    if want_eff {
        table.push_str(",efficiency_removal_ratio,efficiency_reached");
    }
    table.push('\n');
    for (name, r) in &rankings {
        table.push_str(name);
        if want_lcc {
            let t = removal_ratio_at(&lcc_curve(&g, r, Grid::PerNode, name)?, ev.lcc_threshold);
            run.write_with(format!("curves/lcc_{name}.csv"), |out| lcc_curve(&g, r, figure, name)?.write_csv(out))?;
            table.push_str(&format!(",{},{}", t.ratio, t.reached));
        }
        if want_eff {
            let t = efficiency_ratio_at(&g, r, eff_threshold, ev.efficiency_norm)?;
            run.write_with(format!("curves/efficiency_{name}.csv"), |out| {
                efficiency_curve(&g, r, figure, ev.efficiency_norm, name)?.write_csv(out)
            })?;
            table.push_str(&format!(",{},{}", t.ratio, t.reached));
        }
        table.push('\n');
        info!("{name}: attack curves written");
    }
    run.write("attack.csv", table.as_bytes())?;
    Ok(())
}

pub fn spread(
    globals: &Globals,
    cfg: ExperimentConfig,
    dataset: &Path,
    rankings: &[PathBuf],
    top_frac: Option<f64>,
    runs: Option<usize>,
    beta: Option<f64>,
) -> CliResult<()> {
    let (g, map) = load_dataset(dataset)?;
    let rankings = read_rankings(rankings, &map)?;
    let defaults = cfg.evaluation.spread.unwrap_or_default();
    let top_frac = top_frac.unwrap_or(defaults.top_frac);
    let runs = runs.unwrap_or(defaults.runs);
    let beta = match beta.or(defaults.beta) {
        Some(b) => b,
        None => epidemic_threshold(&g)?,
    };
    let run = globals.run_dir("spread")?;
    run.write_json("config.json", &cfg)?;
    let sir = SirConfig::new(beta);
    let mut summary = String::from("method,spread_final\n");
    for (name, r) in &rankings {
        let f = spreading_ability(&g, r, top_frac, &sir, runs, cfg.seed)?;
        run.write_with(format!("spread_{name}.csv"), |out| write_spread_csv(&f, out))?;
        summary.push_str(&format!("{name},{}\n", f.last().copied().unwrap_or(0.0)));
        info!("{name}: F(t) over {runs} runs at beta {beta:.5}");
    }
    run.write("spread.csv", summary.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct DatasetSummary {
    name: String,
    path: String,
    nodes: usize,
    edges: usize,
    average_degree: f64,
    epidemic_threshold: Option<f64>,
    intact_efficiency: f64,
    /// Hash of the task model used for this dataset's GNNE ranking.
    task_model_sha256: Option<String>,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    methods: Vec<Method>,
    training: Option<TrainingSummary>,
    checkpoints: BTreeMap<String, String>,
    datasets: Vec<DatasetSummary>,
}

fn table(methods: &[Method], datasets: &[String], cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = String::from("method");
    for d in datasets {
        out.push(',');
        out.push_str(d);
    }
    out.push('\n');
    for (mi, m) in methods.iter().enumerate() {
        out.push_str(m.name());
        for di in 0..datasets.len() {
            out.push(',');
            out.push_str(&cell(mi, di));
        }
        out.push('\n');
    }
    out
}

fn write_report(run: &RunDir, dataset: &str, report: &MethodReport) -> CliResult<()> {
    run.write_with(format!("{dataset}/report.csv"), |out| report.write_csv(out))?;
    for c in &report.lcc_curves {
        run.write_with(format!("{dataset}/curves/lcc_{}.csv", c.method), |out| c.write_csv(out))?;
    }
    for c in &report.efficiency_curves {
        run.write_with(format!("{dataset}/curves/efficiency_{}.csv", c.method), |out| c.write_csv(out))?;
    }
    for (m, f) in &report.spread_curves {
        run.write_with(format!("{dataset}/curves/spread_{m}.csv"), |out| write_spread_csv(f, out))?;
    }
    Ok(())
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot the curve CSVs of a reproduce run: python3 plot_curves.py <run dir>."""
import csv, pathlib, sys

import matplotlib.pyplot as plt

run = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
for dataset in sorted(p for p in run.iterdir() if (p / "curves").is_dir()):
    for kind, xlabel, ylabel in (("lcc", "r", "LCC"), ("efficiency", "r", "efficiency"), ("spread", "t", "F(t)")):
        files = sorted((dataset / "curves").glob(f"{kind}_*.csv"))
        if not files:
            continue
        fig, ax = plt.subplots()
        for f in files:
            rows = list(csv.reader(f.open()))[1:]
            ax.plot([float(r[0]) for r in rows], [float(r[1]) for r in rows], label=f.stem[len(kind) + 1:])
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(dataset.name)
        ax.legend(fontsize="small")
        fig.savefig(dataset / f"{kind}.png", dpi=150)
        plt.close(fig)
"#;

struct Loaded {
    name: String,
    path: PathBuf,
    graph: Graph,
    map: NodeMap,
}

pub fn reproduce(globals: &Globals, cfg: ExperimentConfig) -> CliResult<()> {
    if cfg.datasets.is_empty() {
        return Err(CliError::usage(
            "reproduce needs at least one dataset; list them under \"datasets\" in the config",
        ));
    }
    let started = Instant::now();
    let datasets: Vec<Loaded> = cfg
        .datasets
        .iter()
        .map(|d| {
            let (graph, map) = load_dataset(&d.path)?;
            Ok(Loaded {
                name: d.name.clone(),
                path: d.path.clone(),
                graph,
                map,
            })
        })
        .collect::<CliResult<_>>()?;
    let run = globals.run_dir("reproduce")?;
    run.write_json("config.json", &cfg)?;
    let model_cfg = cfg.train_config();

    let needs_training = cfg.methods.iter().any(|m| m.needs_training());
    let baselines = cfg.methods.iter().any(|m| matches!(m, Method::Gat | Method::Gcn));
    let (models, training): (Option<Models>, Option<TrainingSummary>) = if needs_training {
        let (m, s) = train_models(&cfg, &model_cfg, baselines, &run, Path::new("training"))?;
        (Some(m), Some(s))
    } else {
        (None, None)
    };

    let mut reports = Vec::with_capacity(datasets.len());
    let mut summaries = Vec::with_capacity(datasets.len());
    for d in &datasets {
        let clock = Instant::now();
        let ranked = rank_all(&d.graph, &cfg.methods, &cfg, &model_cfg, models.as_ref())
            .context(format!("dataset {}", d.name))?;
        for (m, r) in &ranked {
            run.write_with(format!("{}/rankings/{m}.csv", d.name), |out| r.write_csv(&d.map, out))?;
        }
        let named: Vec<(String, RankedList)> = ranked.into_iter().map(|(m, r)| (m.name().to_string(), r)).collect();
        let mut eval = cfg.evaluation;
        if let Some(s) = &mut eval.spread {
            s.seed = cfg.seed;
        }
        let report = compare_methods(&d.graph, &named, &eval).context(format!("dataset {}", d.name))?;
        write_report(&run, &d.name, &report)?;
        info!("{}: evaluated {} methods ({:.1?})", d.name, named.len(), clock.elapsed());
        summaries.push(DatasetSummary {
            name: d.name.clone(),
            path: d.path.display().to_string(),
            nodes: d.graph.node_count(),
            edges: d.graph.edge_count(),
            average_degree: d.graph.average_degree(),
            epidemic_threshold: epidemic_threshold(&d.graph).ok(),
            intact_efficiency: report.intact_efficiency,
            task_model_sha256: models
                .as_ref()
                .filter(|_| cfg.methods.contains(&Method::Gnne))
                .and_then(|m| m.hashes.get(crate::pipeline::TASK_MODEL_FILE).cloned()),
        });
        reports.push(report);
    }

    let names: Vec<String> = datasets.iter().map(|d| d.name.clone()).collect();
    let lcc = table(&cfg.methods, &names, |m, d| reports[d].rows[m].lcc.ratio.to_string());
    let eff = table(&cfg.methods, &names, |m, d| reports[d].rows[m].efficiency.ratio.to_string());
    run.write("table_lcc.csv", lcc.as_bytes())?;
    run.write("table_efficiency.csv", eff.as_bytes())?;
    if cfg.evaluation.spread.is_some() {
        let spread = table(&cfg.methods, &names, |m, d| {
            reports[d].rows[m].spread_final.map_or(String::new(), |f| f.to_string())
        });
        run.write("table_spread.csv", spread.as_bytes())?;
    }
    run.write("plot_curves.py", PLOT_SCRIPT.as_bytes())?;

    if let Some(sweep) = &cfg.sweep {
        run_sweep(&cfg, sweep, &datasets, &run)?;
    }

    run.write_json(
        "manifest.json",
        &Manifest {
            seed: cfg.seed,
            methods: cfg.methods.clone(),
            training,
            checkpoints: models.map(|m| m.hashes).unwrap_or_default(),
            datasets: summaries,
        },
    )?;
    info!("reproduce finished in {:.1?}", started.elapsed());
    Ok(())
}

/// Retrains GNNE with one hyperparameter changed at a time and records the
/// threshold ratios and final spread on every dataset.
fn run_sweep(cfg: &ExperimentConfig, sweep: &SweepConfig, datasets: &[Loaded], run: &RunDir) -> CliResult<()> {
    let base = cfg.train_config();
    let mut variants = Vec::new();
    for &l in &sweep.layers {
        variants.push(("layers", l, gnne_core::gnne::TrainConfig { layers: l, ..base }));
    }
    for &d in &sweep.feature_dim {
        variants.push(("feature_dim", d, gnne_core::gnne::TrainConfig { feature_dim: d, ..base }));
    }
    for &k in &sweep.heads {
        variants.push(("heads", k, gnne_core::gnne::TrainConfig { heads: k, ..base }));
    }
    let mut out = String::from("parameter,value,dataset,lcc_removal_ratio,efficiency_removal_ratio,spread_final\n");
    for (param, value, model_cfg) in variants {
        let dir = PathBuf::from(format!("sweep/{param}_{value}"));
        let (models, _) = train_models(cfg, &model_cfg, false, run, &dir)?;
        for d in datasets {
            let ranked = rank_all(&d.graph, &[Method::Gnne], cfg, &model_cfg, Some(&models))?;
            let named = vec![("GNNE".to_string(), ranked.into_iter().next().unwrap().1)];
            let mut eval = cfg.evaluation;
            if let Some(s) = &mut eval.spread {
                s.seed = cfg.seed;
            }
            let report = compare_methods(&d.graph, &named, &eval)?;
            let row = &report.rows[0];
            out.push_str(&format!(
                "{param},{value},{},{},{},{}\n",
                d.name,
                row.lcc.ratio,
                row.efficiency.ratio,
                row.spread_final.map_or(String::new(), |f| f.to_string())
            ));
        }
        info!("sweep {param}={value} done");
    }
    run.write("sweep.csv", out.as_bytes())?;
    Ok(())
}
