use super::{shell_indices, RankedList};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;

/// Graph-embedding hybrid centrality:
/// `GEHC(i) = Σ_{j∈N(i)} w_i·w_j·exp(-|r_i - r_j|²)` with `w = degree · K_s`.
pub fn gehc(g: &Graph, embedding: &DenseMatrix) -> Result<RankedList> {
    let n = g.node_count();
    if embedding.rows() != n {
        return Err(Error::shape(
            "gehc",
            format!("{} embedding rows for {n} nodes", embedding.rows()),
        ));
    }
    let shells = shell_indices(g);
    let weight: Vec<f64> = (0..n).map(|v| (g.degree(v) * shells[v]) as f64).collect();
    let scores = (0..n)
        .map(|i| {
            let ri = embedding.row(i);
            g.neighbors(i)
                .iter()
                .map(|&j| {
                    let j = j as usize;
                    let d2: f64 = ri
                        .iter()
                        .zip(embedding.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    weight[i] * weight[j] * (-d2).exp()
                })
                .sum()
        })
        .collect();
    Ok(RankedList::from_scores(scores))
}
