//! DeepWalk node embeddings: uniform random walks and skip-gram with
//! negative sampling.

use std::io::{BufRead, Write};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeMap};
use crate::matrix::DenseMatrix;
use crate::seed::stream;

/// Stream tag for the per-round start-order shuffle.
const ORDER_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<u32>>,
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Degree of every node in the source graph; drives negative sampling.
    pub degrees: Vec<usize>,
}

/// `walks_per_node` rounds; each round starts one walk at every node, in a
/// freshly shuffled order. Walks stop early at a node with no neighbors.
pub fn random_walks(g: &Graph, walks_per_node: usize, walk_length: usize, seed: u64) -> Result<WalkCorpus> {
    if walk_length < 2 {
        return Err(Error::invalid("walk length must be at least 2"));
    }
    if g.edge_count() == 0 {
        return Err(Error::invalid("random walks need a graph with at least one edge"));
    }
    let n = g.node_count();
    let mut walks = Vec::with_capacity(n * walks_per_node);
    for round in 0..walks_per_node {
        let mut starts: Vec<usize> = (0..n).collect();
        starts.shuffle(&mut stream(seed, ORDER_STREAM, round as u64));
        let batch: Vec<Vec<u32>> = starts
            .par_iter()
            .map(|&start| {
                let mut rng = stream(seed, round as u64, start as u64);
                let mut walk = Vec::with_capacity(walk_length);
                walk.push(start as u32);
                let mut cur = start;
                while walk.len() < walk_length {
                    let nbrs = g.neighbors(cur);
                    if nbrs.is_empty() {
                        break;
                    }
                    cur = nbrs[rng.gen_range(0..nbrs.len())] as usize;
                    walk.push(cur as u32);
                }
                walk
            })
            .collect();
        walks.extend(batch);
    }
    Ok(WalkCorpus {
        walks,
        walk_length,
        walks_per_node,
        degrees: g.degrees(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly toward zero over training.
    pub lr: f64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        Self {
            dim: 64,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
        }
    }
}

/// One embedding row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub vectors: DenseMatrix,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn node_count(&self) -> usize {
        self.vectors.rows()
    }

    /// CSV with header `node_label,v0,...,v{d-1}`.
    pub fn write_csv<W: Write>(&self, map: &NodeMap, mut out: W) -> Result<()> {
        write!(out, "node_label")?;
        for k in 0..self.dim() {
            write!(out, ",v{k}")?;
        }
        writeln!(out)?;
        for v in 0..self.node_count() {
            write!(out, "{}", map.label(v))?;
            for x in self.vectors.row(v) {
                write!(out, ",{x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R, map: &NodeMap) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let dim = match lines.next() {
            Some((_, header)) => header?.split(',').count().saturating_sub(1),
            None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
        };
        let mut data = DenseMatrix::zeros(map.len(), dim);
        let mut seen = vec![false; map.len()];
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: idx + 1, message };
            let mut fields = line.split(',');
            let label = fields.next().unwrap_or_default();
            let v = map
                .id(label)
                .ok_or_else(|| parse_err(format!("unknown node label {label:?}")))?;
            let row: Vec<f64> = fields
                .map(|f| f.trim().parse::<f64>().map_err(|e| parse_err(e.to_string())))
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(parse_err(format!("expected {dim} values, found {}", row.len())));
            }
            data.row_mut(v).copy_from_slice(&row);
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("no embedding for node {:?}", map.label(v))));
        }
        data.ensure_finite("embedding")?;
        Ok(Self { vectors: data })
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Skip-gram with negative sampling over `corpus`. Negatives are drawn with
/// probability proportional to `degree^0.75`. Returns the table and the mean
/// pair loss of each epoch.
pub fn train_skip_gram(corpus: &WalkCorpus, cfg: &SkipGramConfig, seed: u64) -> Result<(EmbeddingTable, Vec<f64>)> {
    if cfg.dim < 2 {
        return Err(Error::invalid("embedding dimension must be at least 2"));
    }
    if cfg.window == 0 || cfg.epochs == 0 || !(cfg.lr > 0.0) {
        return Err(Error::invalid("window, epochs and learning rate must be positive"));
    }
    let n = corpus.degrees.len();
    let d = cfg.dim;
    let noise = WeightedIndex::new(corpus.degrees.iter().map(|&k| (k as f64).powf(0.75)))
        .map_err(|e| Error::invalid(format!("negative sampling distribution: {e}")))?;
    let mut rng = stream(seed, 0x5347_4e53, 0);
    let mut input: Vec<f64> = (0..n * d)
        .map(|_| (rng.gen::<f64>() - 0.5) / d as f64)
        .collect();
    let mut output = vec![0.0; n * d];
    let mut grad = vec![0.0; d];

    let pairs_per_epoch: usize = corpus
        .walks
        .iter()
        .map(|w| {
            (0..w.len())
                .map(|i| i.min(cfg.window) + (w.len() - 1 - i).min(cfg.window))
                .sum::<usize>()
        })
        .sum();
    let total = (pairs_per_epoch * cfg.epochs).max(1) as f64;
    let mut processed = 0usize;
    let mut trace = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        let mut loss = 0.0;
        for walk in &corpus.walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window).min(walk.len() - 1);
                for (j, &context) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let lr = cfg.lr * (1.0 - processed as f64 / total).max(1e-4);
                    processed += 1;
                    let c = center as usize * d;
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for s in 0..=cfg.negatives {
                        let (target, label) = if s == 0 {
                            (context as usize, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context as usize {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let o = target * d;
                        let score: f64 = (0..d).map(|k| input[c + k] * output[o + k]).sum();
                        let p = sigmoid(score);
                        loss -= if label == 1.0 { p } else { 1.0 - p }.max(1e-12).ln();
                        let step = lr * (label - p);
                        for k in 0..d {
                            grad[k] += step * output[o + k];
                            output[o + k] += step * input[c + k];
                        }
                    }
                    for k in 0..d {
                        input[c + k] += grad[k];
                    }
                }
            }
        }
        trace.push(loss / pairs_per_epoch.max(1) as f64);
    }
    let vectors = DenseMatrix::from_vec(n, d, input)?;
    vectors.ensure_finite("skip-gram embedding")?;
    Ok((EmbeddingTable { vectors }, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeepWalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    #[serde(flatten)]
    pub skip_gram: SkipGramConfig,
}

impl Default for DeepWalkConfig {
    fn default() -> Self {
        Self {
            walks_per_node: 10,
            walk_length: 80,
            skip_gram: SkipGramConfig::default(),
        }
    }
}

/// Walks followed by skip-gram training, both driven by `seed`.
pub fn deepwalk(g: &Graph, cfg: &DeepWalkConfig, seed: u64) -> Result<EmbeddingTable> {
    let corpus = random_walks(g, cfg.walks_per_node, cfg.walk_length, seed)?;
    Ok(train_skip_gram(&corpus, &cfg.skip_gram, seed)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::fixtures::path;
    use crate::graph::generate_ba;

    #[test]
    fn two_node_walks_alternate() {
        let c = random_walks(&path(2), 3, 5, 1).unwrap();
        assert_eq!(c.walks.len(), 6);
        for w in &c.walks {
            assert_eq!(w.len(), 5);
            assert!(w.windows(2).all(|p| p[0] != p[1]));
        }
    }

    #[test]
    fn isolated_node_walk_has_length_one() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let c = random_walks(&g, 1, 10, 0).unwrap();
        assert!(c.walks.iter().any(|w| w == &vec![2]));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(random_walks(&path(3), 1, 1, 0).is_err());
        assert!(random_walks(&Graph::empty(3), 1, 5, 0).is_err());
        let c = random_walks(&path(3), 1, 5, 0).unwrap();
        let cfg = SkipGramConfig {
            dim: 1,
            ..SkipGramConfig::default()
        };
        assert!(train_skip_gram(&c, &cfg, 0).is_err());
    }

    fn two_cliques() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 6] {
            for i in 0..6 {
                for j in (i + 1)..6 {
                    edges.push((base + i, base + j));
                }
            }
        }
        Graph::from_edges(12, edges).unwrap()
    }

    #[test]
    fn cliques_separate_and_loss_falls() {
        let g = two_cliques();
        let corpus = random_walks(&g, 10, 40, 3).unwrap();
        let cfg = SkipGramConfig {
            dim: 16,
            epochs: 10,
            ..SkipGramConfig::default()
        };
        let (table, trace) = train_skip_gram(&corpus, &cfg, 3).unwrap();
        assert!(trace.last().unwrap() < &trace[0]);
        let dist = |a: usize, b: usize| -> f64 {
            let (x, y) = (table.vectors.row(a), table.vectors.row(b));
            x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
        };
        let (mut intra, mut inter, mut ni, mut ne) = (0.0, 0.0, 0, 0);
        for a in 0..12 {
            for b in (a + 1)..12 {
                if (a < 6) == (b < 6) {
                    intra += dist(a, b);
                    ni += 1;
                } else {
                    inter += dist(a, b);
                    ne += 1;
                }
            }
        }
        assert!(intra / (ni as f64) < inter / (ne as f64));
    }

    #[test]
    fn deterministic_and_csv_round_trip() {
        let g = generate_ba(40, 2, 2).unwrap();
        let cfg = DeepWalkConfig {
            walks_per_node: 2,
            walk_length: 10,
            skip_gram: SkipGramConfig {
                dim: 4,
                epochs: 1,
                ..SkipGramConfig::default()
            },
        };
        let a = deepwalk(&g, &cfg, 5).unwrap();
        assert_eq!(a, deepwalk(&g, &cfg, 5).unwrap());
        let map = NodeMap::identity(40);
        let mut buf = Vec::new();
        a.write_csv(&map, &mut buf).unwrap();
        assert!(buf.starts_with(b"node_label,v0,v1,v2,v3\n"));
        assert_eq!(EmbeddingTable::read_csv(&buf[..], &map).unwrap(), a);
    }
}
