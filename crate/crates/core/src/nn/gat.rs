use serde::{Deserialize, Serialize};

use super::{Activation, AttentionNeighborhoods, ATTENTION_LEAKY_SLOPE};
use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

/// One attention head: a shared projection `W` and an attention vector
/// `a = [a_self ∥ a_neighbor]`, stored as a `2 x out` matrix (row 0 scores
/// `W·h_i`, row 1 scores `W·h_j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatHead {
    pub weight: DenseMatrix,
    pub attention: DenseMatrix,
}

/// Multi-head graph attention; head outputs are concatenated column-wise.
///
/// Per head: `e_ij = a·[W h_i ∥ W h_j]`, `α_ij = softmax_{j∈N̄(i)}
/// LeakyReLU(e_ij)`, `h'_i = σ(Σ_j α_ij W h_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatLayer {
    pub heads: Vec<GatHead>,
    pub activation: Activation,
}

#[derive(Debug, Clone)]
pub struct HeadCache {
    /// `X·W`.
    pub projected: DenseMatrix,
    /// Raw logits `e_ij` per attention slot.
    pub logits: Vec<f64>,
    /// Normalized coefficients `α_ij` per attention slot.
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GatCache {
    pub heads: Vec<HeadCache>,
    /// Concatenated aggregates before the activation.
    pub pre: DenseMatrix,
}

impl GatLayer {
    pub fn init<R: rand::Rng>(
        rng: &mut R,
        input: usize,
        output: usize,
        heads: usize,
        activation: Activation,
    ) -> Self {
        let heads = (0..heads)
            .map(|_| {
                let weight = super::glorot(rng, input, output);
                let a = super::glorot(rng, 2 * output, 1);
                GatHead {
                    weight,
                    attention: DenseMatrix::from_vec(2, output, a.into_vec()).expect("attention shape"),
                }
            })
            .collect();
        Self { heads, activation }
    }

    pub fn in_dim(&self) -> usize {
        self.heads[0].weight.rows()
    }

    pub fn head_dim(&self) -> usize {
        self.heads[0].weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.head_dim() * self.heads.len()
    }

    pub fn forward(
        &self,
        nbhd: &AttentionNeighborhoods,
        x: &DenseMatrix,
    ) -> Result<(DenseMatrix, GatCache)> {
        let n = nbhd.node_count();
        if x.rows() != n || x.cols() != self.in_dim() {
            return Err(Error::shape(
                "gat_forward",
                format!("input {:?}, expected ({n}, {})", x.shape(), self.in_dim()),
            ));
        }
        let width = self.head_dim();
        let mut pre = DenseMatrix::zeros(n, self.out_dim());
        let mut caches = Vec::with_capacity(self.heads.len());
        for (h, head) in self.heads.iter().enumerate() {
            let z = x.matmul(&head.weight)?;
            let a_self = head.attention.row(0);
            let a_nbr = head.attention.row(1);
            let s: Vec<f64> = (0..n).map(|i| dot(z.row(i), a_self)).collect();
            let t: Vec<f64> = (0..n).map(|j| dot(z.row(j), a_nbr)).collect();

            let slots = nbhd.edge_slots();
            let mut logits = vec![0.0; slots];
            let mut alpha = vec![0.0; slots];
            for i in 0..n {
                let range = nbhd.range(i);
                let mut max_u = f64::NEG_INFINITY;
                for k in range.clone() {
                    let e = s[i] + t[nbhd.targets[k] as usize];
                    logits[k] = e;
                    let u = Activation::LeakyRelu(ATTENTION_LEAKY_SLOPE).apply(e);
                    alpha[k] = u;
                    max_u = max_u.max(u);
                }
                let mut total = 0.0;
                for k in range.clone() {
                    alpha[k] = (alpha[k] - max_u).exp();
                    total += alpha[k];
                }
                let out = &mut pre.row_mut(i)[h * width..(h + 1) * width];
                for k in range {
                    alpha[k] /= total;
                    let zj = z.row(nbhd.targets[k] as usize);
                    for (o, v) in out.iter_mut().zip(zj) {
                        *o += alpha[k] * v;
                    }
                }
            }
            caches.push(HeadCache {
                projected: z,
                logits,
                alpha,
            });
        }
        let out = pre.map(|v| self.activation.apply(v));
        Ok((out, GatCache { heads: caches, pre }))
    }

    /// Gradients per head as `(dW, d_attention)` plus `dX` when requested.
    #[allow(clippy::type_complexity)]
    pub fn backward(
        &self,
        nbhd: &AttentionNeighborhoods,
        x: &DenseMatrix,
        cache: &GatCache,
        d_out: &DenseMatrix,
        need_input_grad: bool,
    ) -> Result<(Vec<(DenseMatrix, DenseMatrix)>, Option<DenseMatrix>)> {
        let n = nbhd.node_count();
        let width = self.head_dim();
        let mut d_pre = d_out.clone();
        for (g, &z) in d_pre.as_mut_slice().iter_mut().zip(cache.pre.as_slice()) {
            *g *= self.activation.derivative(z);
        }
        let mut dx = need_input_grad.then(|| DenseMatrix::zeros(n, x.cols()));
        let mut grads = Vec::with_capacity(self.heads.len());
        let leaky = Activation::LeakyRelu(ATTENTION_LEAKY_SLOPE);

        for (h, (head, hc)) in self.heads.iter().zip(&cache.heads).enumerate() {
            let z = &hc.projected;
            let d_agg = d_pre.column_block(h * width, width);
            let mut dz = DenseMatrix::zeros(n, width);
            let mut ds = vec![0.0; n];
            let mut dt = vec![0.0; n];
            for i in 0..n {
                let range = nbhd.range(i);
                let dpi = d_agg.row(i);
                // dL/dα_ij and the softmax-weighted mean of it.
                let mut weighted = 0.0;
                for k in range.clone() {
                    let j = nbhd.targets[k] as usize;
                    let da = dot(dpi, z.row(j));
                    weighted += hc.alpha[k] * da;
                }
                for k in range {
                    let j = nbhd.targets[k] as usize;
                    let a = hc.alpha[k];
                    let da = dot(dpi, z.row(j));
                    let de = a * (da - weighted) * leaky.derivative(hc.logits[k]);
                    ds[i] += de;
                    dt[j] += de;
                    for (g, v) in dz.row_mut(j).iter_mut().zip(dpi) {
                        *g += a * v;
                    }
                }
            }
            let a_self = head.attention.row(0);
            let a_nbr = head.attention.row(1);
            let mut d_attention = DenseMatrix::zeros(2, width);
            for i in 0..n {
                let zi = z.row(i);
                for c in 0..width {
                    d_attention[(0, c)] += ds[i] * zi[c];
                    d_attention[(1, c)] += dt[i] * zi[c];
                }
                let row = dz.row_mut(i);
                for c in 0..width {
                    row[c] += ds[i] * a_self[c] + dt[i] * a_nbr[c];
                }
            }
            let dw = x.t_matmul(&dz)?;
            if let Some(dx) = dx.as_mut() {
                dx.add_assign(&dz.matmul_t(&head.weight)?)?;
            }
            grads.push((dw, d_attention));
        }
        Ok((grads, dx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;

    fn layer(input: usize, output: usize, heads: usize, seed: u64) -> GatLayer {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        GatLayer::init(&mut rng, input, output, heads, Activation::Elu)
    }

    #[test]
    fn attention_rows_sum_to_one() {
        let g = crate::graph::generate_ba(40, 2, 9).unwrap();
        let nbhd = AttentionNeighborhoods::new(&g);
        let l = layer(5, 3, 2, 1);
        let x = super::super::glorot(&mut rand_chacha::ChaCha8Rng::seed_from_u64(2), 40, 5);
        let (_, cache) = l.forward(&nbhd, &x).unwrap();
        for hc in &cache.heads {
            for i in 0..40 {
                let s: f64 = nbhd.range(i).map(|k| hc.alpha[k]).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn isolated_node_attends_to_itself() {
        let nbhd = AttentionNeighborhoods::new(&Graph::empty(1));
        let l = layer(3, 2, 1, 4);
        let x = DenseMatrix::from_rows(&[vec![0.3, -1.0, 2.0]]).unwrap();
        let (out, cache) = l.forward(&nbhd, &x).unwrap();
        assert_eq!(cache.heads[0].alpha, vec![1.0]);
        let wh = x.matmul(&l.heads[0].weight).unwrap().map(|v| Activation::Elu.apply(v));
        assert!(out.max_abs_diff(&wh) < 1e-15);
    }

    #[test]
    fn zero_attention_vector_gives_uniform_weights() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let nbhd = AttentionNeighborhoods::new(&g);
        let mut l = layer(2, 2, 1, 5);
        l.heads[0].attention = DenseMatrix::zeros(2, 2);
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![2.0, 2.0],
            vec![-1.0, 3.0],
        ])
        .unwrap();
        let (_, cache) = l.forward(&nbhd, &x).unwrap();
        for k in nbhd.range(0) {
            assert!((cache.heads[0].alpha[k] - 0.25).abs() < 1e-15);
        }
        for k in nbhd.range(1) {
            assert!((cache.heads[0].alpha[k] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn heads_concatenate() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let l = layer(4, 3, 2, 6);
        let (out, _) = l
            .forward(&AttentionNeighborhoods::new(&g), &DenseMatrix::filled(3, 4, 0.1))
            .unwrap();
        assert_eq!(out.shape(), (3, 6));
        assert!(l
            .forward(&AttentionNeighborhoods::new(&g), &DenseMatrix::zeros(3, 5))
            .is_err());
    }
}
