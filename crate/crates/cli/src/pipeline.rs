//! Training and ranking steps shared by several subcommands.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use gnne_core::embedding::{deepwalk, EmbeddingTable};
use gnne_core::gnne::{train_baseline, train_feature_extractor, train_task_model, GnnBaseline, TrainConfig};
use gnne_core::graph::{generate_ba, read_edge_list, write_edge_list};
use gnne_core::methods::{rank, Method, RankInputs};
use gnne_core::nn::{Checkpoint, GraphNet};
use gnne_core::seed::derive_seed;
use gnne_core::sir::{epidemic_threshold, sir_node_scores, SirConfig};
use gnne_core::{Graph, NodeMap, RankedList};
use log::info;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, Context};
use crate::output::{sha256_hex, RunDir};

const LABEL_STREAM: u64 = 0x4c41_4245_4c;
const EMBED_STREAM: u64 = 0x454d_4245_44;

pub const TASK_MODEL_FILE: &str = "task_model.json";
pub const GAT_BASELINE_FILE: &str = "gat_baseline.json";
pub const GCN_BASELINE_FILE: &str = "gcn_baseline.json";
pub const CHECKPOINT_INDEX_FILE: &str = "checkpoints.json";

/// Trained models plus the SHA-256 of each checkpoint file, keyed by file name.
#[derive(Debug, Clone)]
pub struct Models {
    pub task: GraphNet,
    pub gat: Option<GraphNet>,
    pub gcn: Option<GraphNet>,
    pub hashes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainingSummary {
    pub nodes: usize,
    pub edges: usize,
    pub label_beta: f64,
    pub label_runs: usize,
    pub final_feature_loss: f64,
    pub final_task_loss: f64,
}

fn loss_csv(trace: &[f64]) -> Vec<u8> {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in trace.iter().enumerate() {
        s.push_str(&format!("{},{l}\n", i + 1));
    }
    s.into_bytes()
}

fn save_checkpoint(
    run: &RunDir,
    dir: &Path,
    file: &str,
    net: GraphNet,
    meta: &[(&str, String)],
    hashes: &mut BTreeMap<String, String>,
) -> CliResult<GraphNet> {
    let mut ckpt = Checkpoint::new(net);
    for (k, v) in meta {
        ckpt = ckpt.with_meta(k, v);
    }
    let text = ckpt.to_json()?;
    run.write(dir.join(file), text.as_bytes())?;
    hashes.insert(file.to_string(), sha256_hex(text.as_bytes()));
    Ok(ckpt.model)
}

/// Walk embeddings of a graph being ranked.
pub fn dataset_embedding(g: &Graph, cfg: &ExperimentConfig) -> CliResult<EmbeddingTable> {
    Ok(deepwalk(g, &cfg.embedding, derive_seed(cfg.seed, EMBED_STREAM, 1))?)
}

/// Generates the synthetic network, simulates labels, trains the task model
/// and (when `baselines`) the GAT/GCN baselines, writing everything under
/// `dir` inside `run`.
pub fn train_models(
    cfg: &ExperimentConfig,
    model_cfg: &TrainConfig,
    baselines: bool,
    run: &RunDir,
    dir: &Path,
) -> CliResult<(Models, TrainingSummary)> {
    let t = &cfg.training;
    let ba = generate_ba(t.ba_nodes, t.ba_m, cfg.seed)?;
    let map = NodeMap::identity(ba.node_count());
    run.write_with(dir.join("ba.edges"), |out| write_edge_list(&ba, &map, out))?;

    let beta = match t.label_beta {
        Some(b) => b,
        None => epidemic_threshold(&ba)?,
    };
    let clock = Instant::now();
    let labels = sir_node_scores(&ba, &SirConfig::new(beta), t.label_runs, derive_seed(cfg.seed, LABEL_STREAM, 0))?;
    info!(
        "labels: {} SIR runs per node at beta {beta:.5} on {} nodes ({:.1?})",
        t.label_runs,
        ba.node_count(),
        clock.elapsed()
    );
    let mut text = String::from("node_label,score\n");
    for (v, s) in labels.iter().enumerate() {
        text.push_str(&format!("{v},{s}\n"));
    }
    run.write(dir.join("ba_labels.csv"), text.as_bytes())?;

    let clock = Instant::now();
    let fx = train_feature_extractor(&ba, model_cfg).context("feature extractor training")?;
    run.write(dir.join("loss_feature.csv"), &loss_csv(&fx.trained.loss_trace))?;
    let task = train_task_model(&ba, &fx.features, &labels, model_cfg).context("task model training")?;
    run.write(dir.join("loss_task.csv"), &loss_csv(&task.loss_trace))?;
    info!("task model trained ({:.1?})", clock.elapsed());

    let meta = vec![
        ("training_nodes", ba.node_count().to_string()),
        ("training_edges", ba.edge_count().to_string()),
        ("label_beta", beta.to_string()),
        ("seed", cfg.seed.to_string()),
    ];
    let mut hashes = BTreeMap::new();
    let summary = TrainingSummary {
        nodes: ba.node_count(),
        edges: ba.edge_count(),
        label_beta: beta,
        label_runs: t.label_runs,
        final_feature_loss: *fx.trained.loss_trace.last().unwrap_or(&f64::NAN),
        final_task_loss: *task.loss_trace.last().unwrap_or(&f64::NAN),
    };
    let task_net = save_checkpoint(run, dir, TASK_MODEL_FILE, task.net, &meta, &mut hashes)?;

    let (mut gat, mut gcn) = (None, None);
    if baselines {
        let clock = Instant::now();
        let emb = deepwalk(&ba, &cfg.embedding, derive_seed(cfg.seed, EMBED_STREAM, 0))?;
        for kind in [GnnBaseline::Gat, GnnBaseline::Gcn] {
            let trained = train_baseline(kind, &ba, &emb.vectors, &labels, model_cfg)
                .context(format!("{kind:?} baseline training"))?;
            let (file, loss_file) = match kind {
                GnnBaseline::Gat => (GAT_BASELINE_FILE, "loss_gat.csv"),
                GnnBaseline::Gcn => (GCN_BASELINE_FILE, "loss_gcn.csv"),
            };
            run.write(dir.join(loss_file), &loss_csv(&trained.loss_trace))?;
            let net = save_checkpoint(run, dir, file, trained.net, &meta, &mut hashes)?;
            match kind {
                GnnBaseline::Gat => gat = Some(net),
                GnnBaseline::Gcn => gcn = Some(net),
            }
        }
        info!("embedding baselines trained ({:.1?})", clock.elapsed());
    }
    run.write_json(dir.join(CHECKPOINT_INDEX_FILE), &hashes)?;
    Ok((
        Models {
            task: task_net,
            gat,
            gcn,
            hashes,
        },
        summary,
    ))
}

fn load_one(dir: &Path, file: &str, hashes: &mut BTreeMap<String, String>) -> CliResult<Option<GraphNet>> {
    let path = dir.join(file);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).context(format!("reading {}", path.display()))?;
    let ckpt = Checkpoint::from_json(&text).context(format!("loading {}", path.display()))?;
    hashes.insert(file.to_string(), sha256_hex(text.as_bytes()));
    Ok(Some(ckpt.model))
}

/// Loads the checkpoints written by `train` from `dir`.
pub fn load_models(dir: &Path) -> CliResult<Models> {
    let mut hashes = BTreeMap::new();
    let task = load_one(dir, TASK_MODEL_FILE, &mut hashes)?.ok_or_else(|| {
        CliError::data(format!(
            "{} not found in {}; point --checkpoint at a `train` run directory",
            TASK_MODEL_FILE,
            dir.display()
        ))
    })?;
    let gat = load_one(dir, GAT_BASELINE_FILE, &mut hashes)?;
    let gcn = load_one(dir, GCN_BASELINE_FILE, &mut hashes)?;
    Ok(Models { task, gat, gcn, hashes })
}

pub fn load_dataset(path: &Path) -> CliResult<(Graph, NodeMap)> {
    read_edge_list(path).context(format!("dataset {}", path.display()))
}

/// Ranks `g` with every requested method, in the given order.
pub fn rank_all(
    g: &Graph,
    methods: &[Method],
    cfg: &ExperimentConfig,
    model_cfg: &TrainConfig,
    models: Option<&Models>,
) -> CliResult<Vec<(Method, RankedList)>> {
    let embedding = if methods.iter().any(|m| m.needs_embedding()) {
        Some(dataset_embedding(g, cfg)?)
    } else {
        None
    };
    let inputs = RankInputs {
        seed: cfg.seed,
        ci_radius: cfg.ci_radius,
        embedding: embedding.as_ref().map(|e| &e.vectors),
        task_model: models.map(|m| &m.task),
        gat_model: models.and_then(|m| m.gat.as_ref()),
        gcn_model: models.and_then(|m| m.gcn.as_ref()),
        train: *model_cfg,
    };
    methods
        .iter()
        .map(|&m| {
            let clock = Instant::now();
            let r = rank(m, g, &inputs).context(format!("ranking with {m}"))?;
            info!("{m}: ranked {} nodes ({:.1?})", g.node_count(), clock.elapsed());
            Ok((m, r))
        })
        .collect()
}
