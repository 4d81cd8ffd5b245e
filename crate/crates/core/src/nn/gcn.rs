use serde::{Deserialize, Serialize};

use super::{Activation, Propagation};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Graph convolution `H' = σ(S·H·W)` with the renormalized propagation `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnLayer {
    pub weight: DenseMatrix,
    pub activation: Activation,
}

#[derive(Debug, Clone)]
pub struct GcnCache {
    /// `S·H·W` before the activation.
    pub pre: DenseMatrix,
}

impl GcnLayer {
    pub fn init<R: rand::Rng>(rng: &mut R, input: usize, output: usize, activation: Activation) -> Self {
        Self {
            weight: super::glorot(rng, input, output),
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn forward(&self, prop: &Propagation, x: &DenseMatrix) -> Result<(DenseMatrix, GcnCache)> {
        if x.rows() != prop.node_count() {
            return Err(Error::shape(
                "gcn_forward",
                format!("{} feature rows for {} nodes", x.rows(), prop.node_count()),
            ));
        }
        // S·(H·W) equals (S·H)·W and is cheaper when the input is wider.
        let pre = prop.apply(&x.matmul(&self.weight)?);
        let out = pre.map(|v| self.activation.apply(v));
        Ok((out, GcnCache { pre }))
    }

    /// Returns `(dW, dX)`; `dX` is skipped when `need_input_grad` is false.
    pub fn backward(
        &self,
        prop: &Propagation,
        x: &DenseMatrix,
        cache: &GcnCache,
        d_out: &DenseMatrix,
        need_input_grad: bool,
    ) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
        let mut d_pre = d_out.clone();
        for (g, &z) in d_pre.as_mut_slice().iter_mut().zip(cache.pre.as_slice()) {
            *g *= self.activation.derivative(z);
        }
        // S is symmetric, so Sᵀ·dZ = S·dZ.
        let back = prop.apply(&d_pre);
        let dw = x.t_matmul(&back)?;
        let dx = if need_input_grad {
            Some(back.matmul_t(&self.weight)?)
        } else {
            None
        };
        Ok((dw, dx))
    }
}
