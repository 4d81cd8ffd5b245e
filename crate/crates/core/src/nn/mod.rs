//! Small dense neural engine for full-batch node regression: GCN and GAT
//! layers, a linear head, MSE loss, hand-written backward passes, and Adam.

mod adam;
mod checkpoint;
mod context;
mod gat;
mod gcn;
mod linear;
mod loss;
mod model;

use serde::{Deserialize, Serialize};

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use context::{AttentionNeighborhoods, GraphContext, Propagation};
pub use gat::{GatCache, GatHead, GatLayer};
pub use gcn::{GcnCache, GcnLayer};
pub use linear::Linear;
pub use loss::{mse, mse_grad};
pub use model::{Forward, GraphLayer, GraphNet, LayerKind, LayerSpec, ModelSpec};

/// Slope of the LeakyReLU applied to raw attention logits.
pub const ATTENTION_LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    Elu,
    LeakyRelu(f64),
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
            Activation::LeakyRelu(slope) => {
                if x > 0.0 {
                    x
                } else {
                    slope * x
                }
            }
        }
    }

    /// Derivative evaluated at the pre-activation `x`.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    x.exp()
                }
            }
            Activation::LeakyRelu(slope) => {
                if x > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
        }
    }
}

/// Glorot/Xavier uniform initialization.
pub(crate) fn glorot<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> crate::DenseMatrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-limit..=limit))
        .collect();
    crate::DenseMatrix::from_vec(rows, cols, data).expect("glorot shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_derivatives_match_finite_differences() {
        let h = 1e-6;
        for act in [
            Activation::Identity,
            Activation::Relu,
            Activation::Elu,
            Activation::LeakyRelu(0.2),
        ] {
            for &x in &[-2.0, -0.3, 0.4, 1.7] {
                let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                assert!((fd - act.derivative(x)).abs() < 1e-8, "{act:?} at {x}");
            }
        }
    }
}
