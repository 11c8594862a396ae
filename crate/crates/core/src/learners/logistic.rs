//! Logistic regression without intercept.
//!
//! Minimizes `(1/C)·R(θ) + Σ_i log(1 + exp(-y_i θᵀx_i))` with
//! `R = ½‖θ‖²` (L2) or `R = ‖θ‖₁` (L1).
//!
//! * L2, `d <= n`: damped Newton in the primal.
//! * L2, `d > n`: the optimum lies in the row span of `X`, so Newton runs on
//!   `θ = Xᵀa` with `n × n` systems only.
//! * L1: proximal Newton; each direction comes from cyclic coordinate
//!   descent on the local quadratic model, followed by a backtracking line
//!   search on the true objective.
//!
//! Convergence is declared when the (minimum-norm sub)gradient has sup-norm
//! at most `tol`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::data::{design, feature_dim};
use crate::error::{Error, Result};
use crate::gaussian_shift::{LabeledSample, LinearClassifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Penalty {
    L1,
    L2,
}

impl Penalty {
    pub fn name(self) -> &'static str {
        match self {
            Penalty::L1 => "l1",
            Penalty::L2 => "l2",
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

pub fn train_logistic(
    data: &[LabeledSample],
    penalty: Penalty,
    inv_reg_c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LinearClassifier> {
    if !(inv_reg_c > 0.0 && inv_reg_c.is_finite()) {
        return Err(Error::domain(format!("inverse regularization C = {inv_reg_c} must be positive")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let d = feature_dim(data)?;
    let has_pos = data.iter().any(|s| s.y > 0.0);
    let has_neg = data.iter().any(|s| s.y < 0.0);
    if !(has_pos && has_neg) {
        return Err(Error::domain("logistic regression needs both labels present"));
    }
    let (x, y) = design(data)?;
    let theta = match penalty {
        Penalty::L2 if d <= data.len() => l2_primal(&x, &y, inv_reg_c, tol, max_iter)?,
        Penalty::L2 => l2_kernel(&x, &y, inv_reg_c, tol, max_iter)?,
        Penalty::L1 => l1_prox_newton(&x, &y, 1.0 / inv_reg_c, tol, max_iter)?,
    };
    LinearClassifier::new(theta.iter().copied().collect())
}

/// `log(1 + exp(-m))`
#[inline]
fn loss(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

/// `1 / (1 + exp(-t))`
#[inline]
fn sigmoid(t: f64) -> f64 {
    crate::numerics::inv_logit(t)
}

fn total_loss(margins: impl Iterator<Item = f64>) -> f64 {
    margins.map(loss).sum()
}

/// Armijo backtracking along a direction; `eval(t)` returns the objective
/// at step `t`. Returns the accepted step.
fn backtrack(f0: f64, slope: f64, mut eval: impl FnMut(f64) -> f64) -> f64 {
    // Allow for rounding in f near the optimum.
    let slack = 8.0 * f64::EPSILON * f0.abs().max(1.0);
    let mut t = 1.0;
    for _ in 0..MAX_HALVINGS {
        if eval(t) <= f0 + ARMIJO * t * slope + slack {
            return t;
        }
        t *= 0.5;
    }
    t
}

fn l2_primal(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let (n, d) = x.shape();
    let mut theta = DVector::zeros(d);
    let mut z = DVector::zeros(n);
    let objective = |theta: &DVector<f64>, z: &DVector<f64>| {
        0.5 * theta.norm_squared() / c + total_loss(z.iter().zip(y.iter()).map(|(z, y)| y * z))
    };
    let mut gap = f64::INFINITY;
    for _ in 0..max_iter {
        let margins: Vec<f64> = z.iter().zip(y.iter()).map(|(z, y)| y * z).collect();
        let r = DVector::from_iterator(n, margins.iter().zip(y.iter()).map(|(m, y)| -y * sigmoid(-m)));
        let grad = &theta / c + x.tr_mul(&r);
        gap = grad.amax();
        if gap <= tol {
            return Ok(theta);
        }
        let w: Vec<f64> = margins.iter().map(|&m| sigmoid(m) * sigmoid(-m)).collect();
        let mut xw = x.clone();
        for (i, wi) in w.iter().enumerate() {
            xw.row_mut(i).scale_mut(wi.sqrt());
        }
        let mut hess = xw.tr_mul(&xw);
        for j in 0..d {
            hess[(j, j)] += 1.0 / c;
        }
        let step = hess
            .cholesky()
            .ok_or_else(|| Error::Degenerate("logistic Hessian is not positive definite".into()))?
            .solve(&(-&grad));
        let xs = x * &step;
        let f0 = objective(&theta, &z);
        let t = backtrack(f0, grad.dot(&step), |t| objective(&(&theta + t * &step), &(&z + t * &xs)));
        theta += t * &step;
        z += t * &xs;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        gap,
    })
}

fn l2_kernel(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let n = x.nrows();
    let gram = x * x.transpose();
    let mut a = DVector::zeros(n);
    let mut ka = DVector::zeros(n);
    let objective = |a: &DVector<f64>, ka: &DVector<f64>| {
        0.5 * a.dot(ka) / c + total_loss(ka.iter().zip(y.iter()).map(|(k, y)| y * k))
    };
    let mut gap = f64::INFINITY;
    for _ in 0..max_iter {
        let margins: Vec<f64> = ka.iter().zip(y.iter()).map(|(k, y)| y * k).collect();
        // θ-space gradient is Xᵀr.
        let r = DVector::from_iterator(
            n,
            a.iter()
                .zip(margins.iter().zip(y.iter()))
                .map(|(ai, (m, yi))| ai / c - yi * sigmoid(-m)),
        );
        gap = x.tr_mul(&r).amax();
        if gap <= tol {
            return Ok(x.tr_mul(&a));
        }
        // (I/C + W K) b = -r
        let mut system = gram.clone();
        for (i, m) in margins.iter().enumerate() {
            let wi = sigmoid(*m) * sigmoid(-m);
            system.row_mut(i).scale_mut(wi);
            system[(i, i)] += 1.0 / c;
        }
        let b = system
            .lu()
            .solve(&(-&r))
            .ok_or_else(|| Error::Degenerate("singular kernel Newton system".into()))?;
        let kb = &gram * &b;
        let f0 = objective(&a, &ka);
        let t = backtrack(f0, r.dot(&kb), |t| objective(&(&a + t * &b), &(&ka + t * &kb)));
        a += t * &b;
        ka += t * &kb;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        gap,
    })
}

/// Minimum-norm subgradient sup-norm of `loss + λ‖θ‖₁`.
fn l1_gap(grad: &[f64], theta: &[f64], lambda: f64) -> f64 {
    grad.iter()
        .zip(theta)
        .map(|(&g, &t)| {
            if t > 0.0 {
                (g + lambda).abs()
            } else if t < 0.0 {
                (g - lambda).abs()
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

#[inline]
fn soft_threshold(v: f64, k: f64) -> f64 {
    if v > k {
        v - k
    } else if v < -k {
        v + k
    } else {
        0.0
    }
}

fn l1_prox_newton(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    const INNER_SWEEPS: usize = 2000;
    let (n, d) = x.shape();
    let mut theta = vec![0.0; d];
    let objective = |theta: &[f64], z: &[f64]| {
        lambda * theta.iter().map(|t| t.abs()).sum::<f64>()
            + total_loss(z.iter().zip(y.iter()).map(|(z, y)| y * z))
    };
    let mut gap = f64::INFINITY;
    for _ in 0..max_iter {
        // Recomputed rather than updated so rounding does not accumulate.
        let z: Vec<f64> = (x * DVector::from_column_slice(&theta)).iter().copied().collect();
        let margins: Vec<f64> = z.iter().zip(y.iter()).map(|(z, y)| y * z).collect();
        let r = DVector::from_iterator(n, margins.iter().zip(y.iter()).map(|(m, y)| -y * sigmoid(-m)));
        let grad: Vec<f64> = x.tr_mul(&r).iter().copied().collect();
        gap = l1_gap(&grad, &theta, lambda);
        if gap <= tol {
            if theta.iter().all(|&t| t == 0.0) {
                return Err(Error::ZeroClassifier);
            }
            return Ok(DVector::from_vec(theta));
        }
        let w: Vec<f64> = margins.iter().map(|&m| sigmoid(m) * sigmoid(-m)).collect();
        let col_curv: Vec<f64> = (0..d)
            .map(|j| x.column(j).iter().zip(&w).map(|(v, wi)| wi * v * v).sum())
            .collect();

        // Coordinate descent on gᵀs + ½ sᵀXᵀWXs + λ‖θ + s‖₁, tracking u = Xs.
        // Full sweeps alternate with sweeps over the nonzero coordinates.
        let mut s = vec![0.0; d];
        let mut u = vec![0.0; n];
        // Tightening with the gap makes the outer iteration superlinear.
        let inner_tol = 0.1 * gap * gap.min(1.0);
        let sweep = |coords: &mut dyn Iterator<Item = usize>, s: &mut [f64], u: &mut [f64]| {
            let mut worst = 0.0_f64;
            for j in coords {
                let a = col_curv[j];
                if a <= 0.0 {
                    continue;
                }
                let col = x.column(j);
                let b = grad[j] + col.iter().zip(&w).zip(u.iter()).map(|((v, wi), ui)| v * wi * ui).sum::<f64>();
                let cur = theta[j] + s[j];
                let new = soft_threshold(cur - b / a, lambda / a);
                let diff = new - cur;
                if diff != 0.0 {
                    s[j] += diff;
                    for (ui, v) in u.iter_mut().zip(col.iter()) {
                        *ui += diff * v;
                    }
                    worst = worst.max(diff.abs() * a);
                }
            }
            worst
        };
        let mut sweeps = 0;
        while sweeps < INNER_SWEEPS {
            sweeps += 1;
            if sweep(&mut (0..d), &mut s, &mut u) <= inner_tol {
                break;
            }
            while sweeps < INNER_SWEEPS {
                sweeps += 1;
                let active: Vec<usize> = (0..d).filter(|&j| theta[j] + s[j] != 0.0).collect();
                if sweep(&mut active.into_iter(), &mut s, &mut u) <= inner_tol {
                    break;
                }
            }
        }

        let l1_now: f64 = theta.iter().map(|t| t.abs()).sum();
        let l1_next: f64 = theta.iter().zip(&s).map(|(t, s)| (t + s).abs()).sum();
        let decrease = grad.iter().zip(&s).map(|(g, s)| g * s).sum::<f64>() + lambda * (l1_next - l1_now);
        if decrease >= 0.0 {
            // The model cannot improve further at this precision.
            break;
        }
        let f0 = objective(&theta, &z);
        let t = if -decrease <= 16.0 * f64::EPSILON * f0.abs() {
            // Below the resolution of f, where the line search cannot
            // distinguish steps; the local model is accurate here.
            1.0
        } else {
            backtrack(f0, decrease, |t| {
                let th: Vec<f64> = theta.iter().zip(&s).map(|(a, b)| a + t * b).collect();
                let zz: Vec<f64> = z.iter().zip(&u).map(|(a, b)| a + t * b).collect();
                objective(&th, &zz)
            })
        };
        for (th, sj) in theta.iter_mut().zip(&s) {
            *th += t * sj;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        gap,
    })
}
