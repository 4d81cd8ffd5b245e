//! The GNNE pipeline: a per-network GCN feature extractor trained on degree
//! labels, a transferable GAT task model trained once on SIR labels, and the
//! neighbor-entropy ranking computed from the GAT's influence factors. Also
//! hosts the plain GAT/GCN baselines that regress SIR labels from walk
//! embeddings.

use serde::{Deserialize, Serialize};

use crate::centrality::RankedList;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;
use crate::nn::{Activation, AdamConfig, GraphContext, GraphNet, LayerSpec, ModelSpec};
use crate::seed::derive_seed;

/// Lower end of the range influence factors are mapped onto before the
/// entropy is taken, keeping every logarithm finite.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

const FEATURE_STREAM: u64 = 0x4645_4154;
const TASK_STREAM: u64 = 0x5441_534b;
const GAT_BASELINE_STREAM: u64 = 0x4741_5442;
const GCN_BASELINE_STREAM: u64 = 0x4743_4e42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub epochs_feature: usize,
    pub epochs_task: usize,
    /// Graph layers in both the feature extractor and the task model.
    pub layers: usize,
    /// Width of every hidden graph layer (per head for GAT).
    pub hidden: usize,
    /// Width of the extracted features.
    pub feature_dim: usize,
    /// Attention heads in every GAT layer but the last, which has one.
    pub heads: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            weight_decay: 0.0005,
            epochs_feature: 500,
            epochs_task: 2000,
            layers: 2,
            hidden: 16,
            feature_dim: 64,
            heads: 2,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.hidden == 0 || self.feature_dim == 0 || self.heads == 0 {
            return Err(Error::invalid("layers, hidden, feature_dim and heads must be positive"));
        }
        if !(self.lr > 0.0) || !(self.weight_decay >= 0.0) {
            return Err(Error::invalid("learning rate must be positive and weight decay non-negative"));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            weight_decay: self.weight_decay,
            ..AdamConfig::default()
        }
    }

    /// GCN stack `n -> hidden -> ... -> feature_dim`, ReLU throughout, and a
    /// linear read-out to one value.
    pub fn feature_spec(&self, n: usize) -> ModelSpec {
        let mut layers: Vec<LayerSpec> = (1..self.layers)
            .map(|_| LayerSpec::gcn(self.hidden, Activation::Relu))
            .collect();
        layers.push(LayerSpec::gcn(self.feature_dim, Activation::Relu));
        ModelSpec {
            input: n,
            layers,
            output: 1,
        }
    }

    /// GAT stack: multi-head ELU layers of width `hidden`, then a single
    /// head of width `hidden`, then a linear read-out.
    pub fn task_spec(&self, input: usize) -> ModelSpec {
        let mut layers: Vec<LayerSpec> = (1..self.layers)
            .map(|_| LayerSpec::gat(self.hidden, self.heads, Activation::Elu))
            .collect();
        layers.push(LayerSpec::gat(self.hidden, 1, Activation::Identity));
        ModelSpec {
            input,
            layers,
            output: 1,
        }
    }

    /// Plain GCN regressor with the task model's widths.
    pub fn gcn_baseline_spec(&self, input: usize) -> ModelSpec {
        ModelSpec {
            input,
            layers: (0..self.layers)
                .map(|_| LayerSpec::gcn(self.hidden, Activation::Relu))
                .collect(),
            output: 1,
        }
    }
}

/// A trained network plus the loss recorded before every update.
#[derive(Debug, Clone)]
pub struct Trained {
    pub net: GraphNet,
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    pub trained: Trained,
    /// Output of the last GCN layer, `n x feature_dim`.
    pub features: DenseMatrix,
}

fn ensure_nonempty(g: &Graph) -> Result<()> {
    if g.node_count() == 0 {
        return Err(Error::invalid("graph has no nodes"));
    }
    Ok(())
}

/// Trains the GCN on Laplacian-row inputs against raw degrees and returns
/// the features it produces for `g`.
pub fn train_feature_extractor(g: &Graph, cfg: &TrainConfig) -> Result<FeatureExtractor> {
    ensure_nonempty(g)?;
    cfg.validate()?;
    let n = g.node_count();
    let ctx = GraphContext::new(g);
    let x = g.laplacian();
    let target = DenseMatrix::column(&g.degrees().iter().map(|&k| k as f64).collect::<Vec<_>>());
    let mut net = GraphNet::new(&cfg.feature_spec(n), derive_seed(cfg.seed, FEATURE_STREAM, 0))?;
    let loss_trace = net.fit(&ctx, &x, &target, cfg.epochs_feature, cfg.adam())?;
    let mut fwd = net.forward(&ctx, &x)?;
    let features = fwd.hidden.pop().expect("feature extractor has graph layers");
    features.ensure_finite("extracted features")?;
    Ok(FeatureExtractor {
        trained: Trained { net, loss_trace },
        features,
    })
}

fn fit_regressor(
    g: &Graph,
    features: &DenseMatrix,
    labels: &[f64],
    spec: &ModelSpec,
    epochs: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<Trained> {
    ensure_nonempty(g)?;
    cfg.validate()?;
    let n = g.node_count();
    if features.rows() != n || labels.len() != n {
        return Err(Error::shape(
            "regressor",
            format!("{n} nodes, {} feature rows, {} labels", features.rows(), labels.len()),
        ));
    }
    let target = DenseMatrix::column(&labels.iter().map(|&s| s / n as f64).collect::<Vec<_>>());
    let mut net = GraphNet::new(spec, seed)?;
    let loss_trace = net.fit(&GraphContext::new(g), features, &target, epochs, cfg.adam())?;
    Ok(Trained { net, loss_trace })
}

/// Trains the GAT task model on `(ba, h_train)` against SIR node scores,
/// which are divided by the node count to make the loss size-independent.
pub fn train_task_model(ba: &Graph, h_train: &DenseMatrix, labels: &[f64], cfg: &TrainConfig) -> Result<Trained> {
    fit_regressor(
        ba,
        h_train,
        labels,
        &cfg.task_spec(h_train.cols()),
        cfg.epochs_task,
        cfg,
        derive_seed(cfg.seed, TASK_STREAM, 0),
    )
}

/// One forward pass of a trained regressor.
pub fn infer_influence(g: &Graph, features: &DenseMatrix, net: &GraphNet) -> Result<Vec<f64>> {
    if features.rows() != g.node_count() {
        return Err(Error::shape(
            "infer_influence",
            format!("{} feature rows for {} nodes", features.rows(), g.node_count()),
        ));
    }
    let out = net.forward(&GraphContext::new(g), features)?.output;
    out.ensure_finite("influence factors")?;
    Ok(out.column_block(0, 1).into_vec())
}

/// Affine map of `y` onto `[POSITIVITY_FLOOR, 1]`; a constant vector maps to 1.
pub fn positivity_map(y: &[f64]) -> Vec<f64> {
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![1.0; y.len()];
    }
    y.iter()
        .map(|&v| POSITIVITY_FLOOR + (1.0 - POSITIVITY_FLOOR) * (v - lo) / (hi - lo))
        .collect()
}

/// `E_i = -sum_{j in N(i)} (y_i / Y_j) log2(y_i / Y_j)` with
/// `Y_j = sum_{k in N(j)} y_k`. Isolated nodes score 0.
///
/// Note the literal form rewards a node whose neighbors have many other
/// neighbors: in a two-leaf star with uniform `y` the hub scores 0 (each
/// leaf's only neighbor is the hub) and each leaf scores 1/2.
pub fn entropy_scores(g: &Graph, y: &[f64]) -> Result<Vec<f64>> {
    let n = g.node_count();
    if y.len() != n {
        return Err(Error::shape("entropy_scores", format!("{} values for {n} nodes", y.len())));
    }
    if let Some(i) = y.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "influence factor of node {i} is {}; entropy needs strictly positive values",
            y[i]
        )));
    }
    let mass: Vec<f64> = (0..n)
        .map(|j| g.neighbors(j).iter().map(|&k| y[k as usize]).sum())
        .collect();
    Ok((0..n)
        .map(|i| {
            -g.neighbors(i)
                .iter()
                .map(|&j| {
                    let p = y[i] / mass[j as usize];
                    p * p.log2()
                })
                .sum::<f64>()
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct GnneScores {
    pub features: DenseMatrix,
    /// Raw task-model output.
    pub influence: Vec<f64>,
    pub entropy: Vec<f64>,
    pub ranking: RankedList,
}

/// Trains a feature extractor for `g`, runs the task model, and ranks by
/// neighbor entropy of the positivity-mapped influence factors.
pub fn rank_gnne(g: &Graph, task: &GraphNet, cfg: &TrainConfig) -> Result<GnneScores> {
    let extractor = train_feature_extractor(g, cfg)?;
    let influence = infer_influence(g, &extractor.features, task)?;
    let entropy = entropy_scores(g, &positivity_map(&influence))?;
    Ok(GnneScores {
        features: extractor.features,
        influence,
        ranking: RankedList::from_scores(entropy.clone()),
        entropy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GnnBaseline {
    Gat,
    Gcn,
}

impl GnnBaseline {
    pub fn spec(self, input: usize, cfg: &TrainConfig) -> ModelSpec {
        match self {
            GnnBaseline::Gat => cfg.task_spec(input),
            GnnBaseline::Gcn => cfg.gcn_baseline_spec(input),
        }
    }

    fn stream(self) -> u64 {
        match self {
            GnnBaseline::Gat => GAT_BASELINE_STREAM,
            GnnBaseline::Gcn => GCN_BASELINE_STREAM,
        }
    }
}

/// Trains a baseline regressor on the training graph's embedding features
/// with the same labels, optimizer and epoch budget as the task model.
pub fn train_baseline(
    kind: GnnBaseline,
    ba: &Graph,
    features: &DenseMatrix,
    labels: &[f64],
    cfg: &TrainConfig,
) -> Result<Trained> {
    fit_regressor(
        ba,
        features,
        labels,
        &kind.spec(features.cols(), cfg),
        cfg.epochs_task,
        cfg,
        derive_seed(cfg.seed, kind.stream(), 0),
    )
}

/// Baselines rank directly by predicted influence.
pub fn rank_baseline(g: &Graph, features: &DenseMatrix, net: &GraphNet) -> Result<RankedList> {
    Ok(RankedList::from_scores(infer_influence(g, features, net)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::fixtures::{complete, star};
    use crate::graph::generate_ba;

    #[test]
    fn entropy_hand_cases() {
        let k3 = entropy_scores(&complete(3), &[0.3; 3]).unwrap();
        assert!(k3.iter().all(|&e| e == 1.0));
        let s = entropy_scores(&star(2), &[1.0; 3]).unwrap();
        assert_eq!(s, vec![0.0, 0.5, 0.5]);
        let iso = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(entropy_scores(&iso, &[1.0, 2.0, 3.0]).unwrap()[2], 0.0);
        assert!(entropy_scores(&complete(3), &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn positivity_map_range_and_order() {
        let y = [-2.0, 0.5, 3.0, 0.5];
        let p = positivity_map(&y);
        assert_eq!(p[0], POSITIVITY_FLOOR);
        assert_eq!(p[2], 1.0);
        assert!(p[1] > p[0] && p[1] < p[2] && p[1] == p[3]);
        assert_eq!(positivity_map(&[4.0, 4.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn default_architectures() {
        let cfg = TrainConfig::default();
        let f = cfg.feature_spec(100);
        assert_eq!(f.layers.iter().map(|l| l.out).collect::<Vec<_>>(), vec![16, 64]);
        let t = cfg.task_spec(64);
        assert_eq!(t.layers[0], LayerSpec::gat(16, 2, Activation::Elu));
        assert_eq!(t.layers[1], LayerSpec::gat(16, 1, Activation::Identity));
        assert_eq!(t.embedding_width(), 16);
    }

    #[test]
    fn small_pipeline_runs_and_transfers() {
        let cfg = TrainConfig {
            epochs_feature: 30,
            epochs_task: 30,
            ..TrainConfig::default()
        };
        let ba = generate_ba(60, 2, 1).unwrap();
        let fx = train_feature_extractor(&ba, &cfg).unwrap();
        assert_eq!(fx.features.shape(), (60, 64));
        assert!(fx.trained.loss_trace.last().unwrap() < &fx.trained.loss_trace[0]);
        let labels: Vec<f64> = ba.degrees().iter().map(|&k| k as f64).collect();
        let task = train_task_model(&ba, &fx.features, &labels, &cfg).unwrap();
        let other = generate_ba(45, 3, 2).unwrap();
        let a = rank_gnne(&other, &task.net, &cfg).unwrap();
        let b = rank_gnne(&other, &task.net, &cfg).unwrap();
        assert_eq!(a.influence.len(), 45);
        assert_eq!(a.ranking, b.ranking);
        assert!(infer_influence(&other, &fx.features, &task.net).is_err());
    }
}
