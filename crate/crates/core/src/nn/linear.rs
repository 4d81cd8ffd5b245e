use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Affine map `Y = X·W + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub weight: DenseMatrix,
    /// `1 x out`, broadcast over rows.
    pub bias: DenseMatrix,
}

impl Linear {
    pub fn new(weight: DenseMatrix, bias: DenseMatrix) -> Result<Self> {
        if bias.rows() != 1 || bias.cols() != weight.cols() {
            return Err(Error::shape(
                "linear",
                format!("bias {:?} for weight {:?}", bias.shape(), weight.shape()),
            ));
        }
        Ok(Self { weight, bias })
    }

    pub fn init<R: rand::Rng>(rng: &mut R, input: usize, output: usize) -> Self {
        Self {
            weight: super::glorot(rng, input, output),
            bias: DenseMatrix::zeros(1, output),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let mut y = x.matmul(&self.weight)?;
        let b = self.bias.row(0);
        for i in 0..y.rows() {
            for (v, bj) in y.row_mut(i).iter_mut().zip(b) {
                *v += bj;
            }
        }
        Ok(y)
    }

    /// Returns `(dW, db, dX)`.
    pub fn backward(
        &self,
        x: &DenseMatrix,
        dy: &DenseMatrix,
    ) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix)> {
        let dw = x.t_matmul(dy)?;
        let db = dy.column_sums();
        let dx = dy.matmul_t(&self.weight)?;
        Ok((dw, db, dx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_gives_bias() {
        let lin = Linear::new(
            DenseMatrix::filled(3, 2, 0.7),
            DenseMatrix::from_rows(&[vec![1.0, -2.0]]).unwrap(),
        )
        .unwrap();
        let y = lin.forward(&DenseMatrix::zeros(4, 3)).unwrap();
        for i in 0..4 {
            assert_eq!(y.row(i), &[1.0, -2.0]);
        }
    }

    #[test]
    fn identity_weight_passes_through() {
        let lin = Linear::new(DenseMatrix::identity(3), DenseMatrix::zeros(1, 3)).unwrap();
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.0]]).unwrap();
        assert_eq!(lin.forward(&x).unwrap(), x);
    }

    #[test]
    fn scalar_case() {
        let lin = Linear::new(DenseMatrix::column(&[3.0]), DenseMatrix::column(&[1.0])).unwrap();
        assert_eq!(lin.forward(&DenseMatrix::column(&[2.0])).unwrap().as_slice(), &[7.0]);
    }

    #[test]
    fn rejects_bad_bias() {
        assert!(Linear::new(DenseMatrix::zeros(2, 3), DenseMatrix::zeros(1, 2)).is_err());
    }
}
