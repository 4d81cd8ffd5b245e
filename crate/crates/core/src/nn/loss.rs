use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Mean squared error over all entries.
pub fn mse(pred: &DenseMatrix, target: &DenseMatrix) -> Result<f64> {
    check(pred, target)?;
    let n = pred.as_slice().len().max(1) as f64;
    Ok(pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n)
}

/// `∂ mse / ∂ pred = 2 (pred − target) / N`.
pub fn mse_grad(pred: &DenseMatrix, target: &DenseMatrix) -> Result<DenseMatrix> {
    check(pred, target)?;
    let n = pred.as_slice().len().max(1) as f64;
    let data = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| 2.0 * (p - t) / n)
        .collect();
    DenseMatrix::from_vec(pred.rows(), pred.cols(), data)
}

fn check(pred: &DenseMatrix, target: &DenseMatrix) -> Result<()> {
    if pred.shape() != target.shape() {
        return Err(Error::shape(
            "mse",
            format!("prediction {:?} vs target {:?}", pred.shape(), target.shape()),
        ));
    }
    Ok(())
}
