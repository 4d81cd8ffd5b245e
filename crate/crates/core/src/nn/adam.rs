use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            weight_decay: 0.0005,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias correction. Weight decay enters as an L2 term added to
/// the gradient before the moment update.
#[derive(Debug, Clone)]
pub struct Adam {
    pub config: AdamConfig,
    first: Vec<DenseMatrix>,
    second: Vec<DenseMatrix>,
    step: i32,
}

impl Adam {
    pub fn new(config: AdamConfig, params: &[&DenseMatrix]) -> Self {
        let zeros = || {
            params
                .iter()
                .map(|p| DenseMatrix::zeros(p.rows(), p.cols()))
                .collect()
        };
        Self {
            config,
            first: zeros(),
            second: zeros(),
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> i32 {
        self.step
    }

    pub fn step(&mut self, params: Vec<&mut DenseMatrix>, grads: &[DenseMatrix]) -> Result<()> {
        if params.len() != self.first.len() || grads.len() != self.first.len() {
            return Err(Error::shape(
                "adam_step",
                format!(
                    "{} params / {} grads for {} moment slots",
                    params.len(),
                    grads.len(),
                    self.first.len()
                ),
            ));
        }
        self.step += 1;
        let AdamConfig {
            lr,
            weight_decay,
            beta1,
            beta2,
            eps,
        } = self.config;
        let c1 = 1.0 - beta1.powi(self.step);
        let c2 = 1.0 - beta2.powi(self.step);
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return Err(Error::shape(
                    "adam_step",
                    format!("param {:?} grad {:?}", p.shape(), g.shape()),
                ));
            }
            for (((w, &gr), mi), vi) in p
                .as_mut_slice()
                .iter_mut()
                .zip(g.as_slice())
                .zip(m.as_mut_slice())
                .zip(v.as_mut_slice())
            {
                let gr = gr + weight_decay * *w;
                *mi = beta1 * *mi + (1.0 - beta1) * gr;
                *vi = beta2 * *vi + (1.0 - beta2) * gr * gr;
                let m_hat = *mi / c1;
                let v_hat = *vi / c2;
                *w -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_without_decay_is_a_no_op() {
        let mut p = DenseMatrix::from_rows(&[vec![0.3, -1.2]]).unwrap();
        let before = p.clone();
        let cfg = AdamConfig {
            weight_decay: 0.0,
            ..AdamConfig::default()
        };
        let mut adam = Adam::new(cfg, &[&p]);
        for _ in 0..5 {
            adam.step(vec![&mut p], &[DenseMatrix::zeros(1, 2)]).unwrap();
        }
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let mut p = DenseMatrix::zeros(1, 3);
        let cfg = AdamConfig {
            lr: 0.01,
            weight_decay: 0.0,
            ..AdamConfig::default()
        };
        let mut adam = Adam::new(cfg, &[&p]);
        let g = DenseMatrix::from_rows(&[vec![2.5, -0.003, 40.0]]).unwrap();
        adam.step(vec![&mut p], &[g.clone()]).unwrap();
        for (w, gr) in p.as_slice().iter().zip(g.as_slice()) {
            // m̂ = g, v̂ = g², so the step is lr·g/(|g| + ε).
            let expected = -0.01 * gr / (gr.abs() + 1e-8);
            assert!((w - expected).abs() < 1e-15);
            assert!((w.abs() - 0.01).abs() < 1e-7);
        }
    }

    #[test]
    fn weight_decay_pulls_toward_zero() {
        let mut p = DenseMatrix::filled(1, 1, 2.0);
        let mut adam = Adam::new(AdamConfig::default(), &[&p]);
        adam.step(vec![&mut p], &[DenseMatrix::zeros(1, 1)]).unwrap();
        assert!(p[(0, 0)] < 2.0);
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut p = DenseMatrix::from_rows(&[vec![0.1, 0.2]]).unwrap();
            let mut adam = Adam::new(AdamConfig::default(), &[&p]);
            for k in 0..10 {
                let g = DenseMatrix::from_rows(&[vec![k as f64 * 0.1, -1.0]]).unwrap();
                adam.step(vec![&mut p], &[g]).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_mismatched_slots() {
        let mut p = DenseMatrix::zeros(2, 2);
        let mut adam = Adam::new(AdamConfig::default(), &[&p]);
        assert!(adam.step(vec![&mut p], &[]).is_err());
    }
}
