//! Ridge regression on `±1` targets, used as a classifier through the sign.
//!
//! `θ = argmin ‖Xθ - y‖² + α‖θ‖²`, solved through whichever of the two
//! equivalent systems is smaller:
//! primal `(XᵀX + αI) θ = Xᵀy` or dual `θ = Xᵀ (XXᵀ + αI)⁻¹ y`.

use nalgebra::{DMatrix, DVector};

use super::data::design;
use crate::error::{Error, Result};
use crate::gaussian_shift::{LabeledSample, LinearClassifier};

pub fn train_ridge(data: &[LabeledSample], reg_alpha: f64) -> Result<LinearClassifier> {
    let (x, y) = checked_design(data, reg_alpha)?;
    let theta = if x.ncols() > x.nrows() {
        solve_dual(&x, &y, reg_alpha)?
    } else {
        solve_primal(&x, &y, reg_alpha)?
    };
    LinearClassifier::new(theta.iter().copied().collect())
}

/// Ridge weights from the `d × d` normal equations.
pub fn ridge_primal(data: &[LabeledSample], reg_alpha: f64) -> Result<Vec<f64>> {
    let (x, y) = checked_design(data, reg_alpha)?;
    Ok(solve_primal(&x, &y, reg_alpha)?.iter().copied().collect())
}

/// Ridge weights from the `n × n` kernel system.
pub fn ridge_dual(data: &[LabeledSample], reg_alpha: f64) -> Result<Vec<f64>> {
    let (x, y) = checked_design(data, reg_alpha)?;
    Ok(solve_dual(&x, &y, reg_alpha)?.iter().copied().collect())
}

fn checked_design(data: &[LabeledSample], reg_alpha: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if !(reg_alpha > 0.0 && reg_alpha.is_finite()) {
        return Err(Error::domain(format!("ridge penalty {reg_alpha} must be positive")));
    }
    design(data)
}

fn solve_primal(x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    let mut gram = x.tr_mul(x);
    for j in 0..gram.nrows() {
        gram[(j, j)] += alpha;
    }
    gram.cholesky()
        .map(|c| c.solve(&x.tr_mul(y)))
        .ok_or_else(|| Error::Degenerate("ridge normal equations not positive definite".into()))
}

fn solve_dual(x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    let mut kernel = x * x.transpose();
    for i in 0..kernel.nrows() {
        kernel[(i, i)] += alpha;
    }
    let coef = kernel
        .cholesky()
        .map(|c| c.solve(y))
        .ok_or_else(|| Error::Degenerate("ridge kernel system not positive definite".into()))?;
    Ok(x.tr_mul(&coef))
}
