use crate::graph::Graph;
use crate::matrix::DenseMatrix;

/// Symmetric-normalized propagation `S = D̃^{-1/2} (A + I) D̃^{-1/2}`, where
/// `D̃` is the degree matrix of `A + I`. Stored row-wise over `N(i) ∪ {i}`.
#[derive(Debug, Clone)]
pub struct Propagation {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Propagation {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|v| 1.0 / ((g.degree(v) + 1) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(n + 2 * g.edge_count());
        let mut weights = Vec::with_capacity(targets.capacity());
        offsets.push(0);
        for i in 0..n {
            for j in closed_neighborhood(g, i) {
                targets.push(j as u32);
                weights.push(inv_sqrt[i] * inv_sqrt[j]);
            }
            offsets.push(targets.len());
        }
        Self {
            offsets,
            targets,
            weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `S · x`.
    pub fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(x.rows(), x.cols());
        for i in 0..self.node_count() {
            let row = out.row_mut(i);
            for k in self.offsets[i]..self.offsets[i + 1] {
                let w = self.weights[k];
                for (o, v) in row.iter_mut().zip(x.row(self.targets[k] as usize)) {
                    *o += w * v;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.node_count();
        let mut s = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for k in self.offsets[i]..self.offsets[i + 1] {
                s[(i, self.targets[k] as usize)] = self.weights[k];
            }
        }
        s
    }
}

/// Attention neighborhoods `N̄(i) = N(i) ∪ {i}` in CSR layout, sorted.
#[derive(Debug, Clone)]
pub struct AttentionNeighborhoods {
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
}

impl AttentionNeighborhoods {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(n + 2 * g.edge_count());
        offsets.push(0);
        for i in 0..n {
            targets.extend(closed_neighborhood(g, i).map(|j| j as u32));
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_slots(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

fn closed_neighborhood(g: &Graph, i: usize) -> impl Iterator<Item = usize> + '_ {
    let nbrs = g.neighbors(i);
    let split = nbrs.partition_point(|&j| (j as usize) < i);
    nbrs[..split]
        .iter()
        .map(|&j| j as usize)
        .chain(std::iter::once(i))
        .chain(nbrs[split..].iter().map(|&j| j as usize))
}

/// Everything a layer needs to know about the graph.
#[derive(Debug, Clone)]
pub struct GraphContext {
    pub propagation: Propagation,
    pub attention: AttentionNeighborhoods,
}

impl GraphContext {
    pub fn new(g: &Graph) -> Self {
        Self {
            propagation: Propagation::new(g),
            attention: AttentionNeighborhoods::new(g),
        }
    }

    pub fn node_count(&self) -> usize {
        self.propagation.node_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_propagation_is_half() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = Propagation::new(&g).to_dense();
        assert!(s.as_slice().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn isolated_node_propagation_is_identity() {
        let s = Propagation::new(&Graph::empty(1)).to_dense();
        assert_eq!(s.as_slice(), &[1.0]);
    }

    #[test]
    fn propagation_is_symmetric_and_contractive() {
        let g = crate::graph::generate_ba(60, 2, 3).unwrap();
        let s = Propagation::new(&g).to_dense();
        assert!(s.max_abs_diff(&s.transpose()) < 1e-15);
        // Power iteration estimate of the spectral radius.
        let mut x = DenseMatrix::filled(60, 1, 1.0);
        let mut rho = 0.0;
        for _ in 0..500 {
            let y = s.matmul(&x).unwrap();
            rho = y.frobenius_norm() / x.frobenius_norm();
            x = y;
            let norm = x.frobenius_norm();
            x.scale(1.0 / norm);
        }
        assert!(rho <= 1.0 + 1e-9, "spectral radius {rho}");
    }

    #[test]
    fn attention_neighborhoods_include_self_in_order() {
        let g = Graph::from_edges(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        let a = AttentionNeighborhoods::new(&g);
        let slots: Vec<u32> = a.range(2).map(|k| a.targets[k]).collect();
        assert_eq!(slots, vec![0, 1, 2, 3]);
        assert_eq!(a.edge_slots(), 4 + 6);
    }
}
