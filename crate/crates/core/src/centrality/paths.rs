use std::collections::VecDeque;

use rayon::prelude::*;

use super::{accumulate_over_sources, RankedList};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Graph, UNREACHABLE};

/// Shortest-path betweenness with a single global normalizer:
///
/// `BC_i = Σ_{j≠k≠i} L_jk(i) / Σ_{j≠k} L_jk`
///
/// where `L_jk` counts shortest paths between `j` and `k` and `L_jk(i)` those
/// passing through `i`. Both sums run over ordered pairs. Path counts are
/// accumulated Brandes-style: in the shortest-path DAG of source `s`, the
/// number of `s`-paths through `v` is `σ_sv · τ_v`, with `τ_v` the number of
/// DAG paths leaving `v`.
pub fn betweenness(g: &Graph) -> RankedList {
    let n = g.node_count();
    // Slot n carries the denominator.
    let totals = accumulate_over_sources(
        n,
        n + 1,
        || vec![0.0f64; n],
        |s, acc, tau| {
            let bfs = g.bfs_layers(s);
            tau.iter_mut().for_each(|t| *t = 0.0);
            for &w in bfs.order.iter().rev() {
                let w = w as usize;
                let through = 1.0 + tau[w];
                for &p in &bfs.preds[w] {
                    tau[p as usize] += through;
                }
            }
            let mut paths = 0.0;
            for &v in &bfs.order[1..] {
                let v = v as usize;
                acc[v] += bfs.sigma[v] * tau[v];
                paths += bfs.sigma[v];
            }
            acc[n] += paths;
        },
    );
    let denom = totals[n];
    let scores = totals[..n]
        .iter()
        .map(|&c| if denom > 0.0 { c / denom } else { 0.0 })
        .collect();
    RankedList::from_scores(scores)
}

struct DistanceSums {
    reached: usize,
    total: f64,
    inverse: f64,
}

fn distance_sums(g: &Graph) -> Vec<DistanceSums> {
    (0..g.node_count())
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), s| {
                bfs_distances(g, s, dist, queue);
                let mut sums = DistanceSums {
                    reached: 0,
                    total: 0.0,
                    inverse: 0.0,
                };
                for &d in dist.iter() {
                    if d != UNREACHABLE {
                        sums.reached += 1;
                        if d > 0 {
                            sums.total += d as f64;
                            sums.inverse += 1.0 / d as f64;
                        }
                    }
                }
                sums
            },
        )
        .collect()
}

/// `CC_i = (n_i - 1) / Σ_j d_ij` over the `n_i` nodes reachable from `i`
/// (its own component); isolated nodes score 0.
pub fn closeness(g: &Graph) -> RankedList {
    let scores = distance_sums(g)
        .into_iter()
        .map(|s| {
            if s.total > 0.0 {
                (s.reached - 1) as f64 / s.total
            } else {
                0.0
            }
        })
        .collect();
    RankedList::from_scores(scores)
}

/// `HC_i = Σ_{j≠i} (1 / d_ij) / (n - 1)` with unreachable pairs adding 0.
pub fn harmonic(g: &Graph) -> RankedList {
    let n = g.node_count();
    let denom = n.saturating_sub(1).max(1) as f64;
    let scores = distance_sums(g)
        .into_iter()
        .map(|s| s.inverse / denom)
        .collect();
    RankedList::from_scores(scores)
}

/// `CI_ℓ(i) = (k_i - 1) · Σ_{j : d_ij = ℓ} (k_j - 1)`.
pub fn collective_influence(g: &Graph, radius: usize) -> Result<RankedList> {
    if radius < 1 {
        return Err(Error::invalid("collective influence radius must be >= 1"));
    }
    let limit = radius as u32;
    let scores = (0..g.node_count())
        .into_par_iter()
        .map_init(
            || (vec![UNREACHABLE; g.node_count()], Vec::new(), VecDeque::new()),
            |(dist, touched, queue), s| {
                let ki = g.degree(s);
                if ki <= 1 {
                    return 0.0;
                }
                dist[s] = 0;
                touched.push(s as u32);
                queue.push_back(s as u32);
                let mut frontier = 0.0;
                while let Some(u) = queue.pop_front() {
                    let du = dist[u as usize];
                    if du == limit {
                        frontier += (g.degree(u as usize) as f64 - 1.0).max(0.0);
                        continue;
                    }
                    for &v in g.neighbors(u as usize) {
                        if dist[v as usize] == UNREACHABLE {
                            dist[v as usize] = du + 1;
                            touched.push(v);
                            queue.push_back(v);
                        }
                    }
                }
                for &v in touched.iter() {
                    dist[v as usize] = UNREACHABLE;
                }
                touched.clear();
                (ki as f64 - 1.0) * frontier
            },
        )
        .collect();
    Ok(RankedList::from_scores(scores))
}
