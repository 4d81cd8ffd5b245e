use super::RankedList;
use crate::error::{Error, Result};
use crate::graph::Graph;

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct EigenvectorCentrality {
    pub ranking: RankedList,
    /// Rayleigh quotient of the final iterate, an estimate of `λ_max(A)`.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// `false` when the iteration cap was hit; the ranking then holds the
    /// last iterate.
    pub converged: bool,
}

/// Principal eigenvector of the adjacency matrix, unit L2 norm, nonnegative.
///
/// Power iteration runs on `A + I`: same eigenvectors, but the shift keeps
/// bipartite graphs (eigenvalues `±λ`) from oscillating.
pub fn eigenvector(g: &Graph) -> Result<EigenvectorCentrality> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::invalid("eigenvector centrality of an empty graph"));
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        for (v, out) in y.iter_mut().enumerate() {
            *out = x[v] + g.neighbors(v).iter().map(|&u| x[u as usize]).sum::<f64>();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let mut delta: f64 = 0.0;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = yi / norm;
            delta = delta.max((next - *xi).abs());
            *xi = next;
        }
        if delta < TOLERANCE {
            converged = true;
            break;
        }
    }
    let mut eigenvalue = 0.0;
    for v in 0..n {
        eigenvalue += x[v] * g.neighbors(v).iter().map(|&u| x[u as usize]).sum::<f64>();
    }
    Ok(EigenvectorCentrality {
        ranking: RankedList::from_scores(x),
        eigenvalue,
        iterations,
        converged,
    })
}
