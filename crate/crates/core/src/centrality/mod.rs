//! Classical baseline rankings and the shared [`RankedList`] output type.

mod hybrid;
mod paths;
mod shell;
mod spectral;

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeMap};

pub use hybrid::gehc;
pub use paths::{betweenness, closeness, collective_influence, harmonic};
pub use shell::{iks, iks_entropy, k_shell, shell_indices};
pub use spectral::{eigenvector, EigenvectorCentrality};

/// Radius used by collective influence unless configured otherwise.
pub const DEFAULT_CI_RADIUS: usize = 2;

/// Per-node scores plus the node order they induce: descending score,
/// ties broken by ascending node id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    scores: Vec<f64>,
    order: Vec<u32>,
}

impl RankedList {
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut order: Vec<u32> = (0..scores.len() as u32).collect();
        order.sort_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then(a.cmp(&b))
        });
        Self { scores, order }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// The `k` highest-ranked nodes.
    pub fn top(&self, k: usize) -> Vec<usize> {
        self.order[..k.min(self.order.len())]
            .iter()
            .map(|&v| v as usize)
            .collect()
    }

    /// CSV with header `node_label,score,rank`, rows in rank order, ranks
    /// starting at 1.
    pub fn write_csv<W: Write>(&self, map: &NodeMap, mut out: W) -> Result<()> {
        writeln!(out, "node_label,score,rank")?;
        for (rank, &v) in self.order.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                map.label(v as usize),
                self.scores[v as usize],
                rank + 1
            )?;
        }
        Ok(())
    }

    /// Reads a ranking written by [`RankedList::write_csv`]. Every node of
    /// `map` must appear exactly once.
    pub fn read_csv<R: BufRead>(reader: R, map: &NodeMap) -> Result<Self> {
        let mut scores = vec![f64::NAN; map.len()];
        let mut seen = vec![false; map.len()];
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut fields = line.split(',');
            let (Some(label), Some(score)) = (fields.next(), fields.next()) else {
                return Err(parse_err(format!("expected label,score,rank: {line:?}")));
            };
            let id = map
                .id(label.trim())
                .ok_or_else(|| parse_err(format!("unknown node label {label:?}")))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad score {score:?}: {e}")))?;
            if seen[id] {
                return Err(parse_err(format!("node {label:?} listed twice")));
            }
            seen[id] = true;
            scores[id] = score;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!(
                "ranking lacks node {:?}",
                map.label(missing)
            )));
        }
        Ok(Self::from_scores(scores))
    }
}

/// `DC_i = k_i / (n - 1)`.
pub fn degree_centrality(g: &Graph) -> Result<RankedList> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::invalid("degree centrality needs at least two nodes"));
    }
    let denom = (n - 1) as f64;
    Ok(RankedList::from_scores(
        (0..n).map(|v| g.degree(v) as f64 / denom).collect(),
    ))
}

/// Seeded uniform shuffle; the sanity floor for every comparison.
pub fn random_ranking(n: usize, seed: u64) -> RankedList {
    let mut rng = crate::seed::stream(seed, 0x5241_4e44, 0);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut scores = vec![0.0; n];
    for (pos, &v) in perm.iter().enumerate() {
        scores[v] = (n - pos) as f64;
    }
    RankedList::from_scores(scores)
}

/// Sources per work item in the parallel all-sources loops. Fixed so the
/// reduction order does not depend on the worker count.
const SOURCE_CHUNK: usize = 32;

/// Runs `visit(source, acc, scratch)` for every source and sums the
/// per-chunk accumulators in chunk order.
pub(crate) fn accumulate_over_sources<S, I, F>(n: usize, width: usize, scratch: I, visit: F) -> Vec<f64>
where
    I: Fn() -> S + Sync,
    F: Fn(usize, &mut [f64], &mut S) + Sync,
{
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(SOURCE_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![0.0; width];
            let mut s = scratch();
            let start = chunk * SOURCE_CHUNK;
            for source in start..(start + SOURCE_CHUNK).min(n) {
                visit(source, &mut acc, &mut s);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(
            n,
            (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))),
        )
        .unwrap()
    }

    /// Triangle 0-1-2 with pendant 3 hanging off node 2.
    pub fn triangle_pendant() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn ties_break_by_ascending_id() {
        let r = RankedList::from_scores(vec![1.0, 3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r.order(), &[1, 3, 4, 0, 2]);
    }

    #[test]
    fn degree_small_cases() {
        let s = degree_centrality(&star(4)).unwrap();
        assert_eq!(s.scores()[0], 1.0);
        assert_eq!(s.scores()[1], 0.25);
        let k = degree_centrality(&complete(6)).unwrap();
        assert!(k.scores().iter().all(|&v| v == 1.0));
        assert!(degree_centrality(&Graph::empty(1)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let map = NodeMap::identity(4);
        let r = RankedList::from_scores(vec![0.5, 1.0 / 3.0, 0.1, 0.1]);
        let mut buf = Vec::new();
        r.write_csv(&map, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_label,score,rank\n0,0.5,1\n"));
        let back = RankedList::read_csv(buf.as_slice(), &map).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_rejects_missing_nodes() {
        let map = NodeMap::identity(3);
        let text = "node_label,score,rank\n0,1,1\n1,0.5,2\n";
        assert!(RankedList::read_csv(text.as_bytes(), &map).is_err());
    }

    #[test]
    fn random_ranking_is_seeded_permutation() {
        let a = random_ranking(50, 3);
        assert_eq!(a, random_ranking(50, 3));
        assert_ne!(a.order(), random_ranking(50, 4).order());
        let mut seen = a.order().to_vec();
        seen.sort_unstable();
        assert_eq!(seen, (0..50).collect::<Vec<_>>());
    }
}
