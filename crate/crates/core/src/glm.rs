//! Binary logistic regression via iteratively reweighted least squares.
//!
//! This backs Platt scaling and logistic recalibration. The solver is
//! deliberately plain: zero initialization, no regularization, and a direct
//! Cholesky factorization of the p×p weighted normal equations (p is tiny
//! for every use in this crate).

use crate::error::{Error, Result};
use crate::scalar::{expit, real, Real};
use serde::Serialize;

/// Relative deviance change that counts as converged.
const DEVIANCE_TOL: f64 = 1e-8;
/// Iteration cap.
const MAX_ITER: usize = 25;
/// Lower clamp for IRLS working weights.
const MIN_WEIGHT: f64 = 1e-10;
/// |coefficient| beyond this flags quasi-separation: expit(30) is 1 within
/// double precision.
const SEPARATION_BOUND: f64 = 30.0;

/// Result of a logistic fit.
#[derive(Debug, Clone, Serialize)]
pub struct LogisticFit<F> {
    /// Coefficients, intercept first (matches the design's leading column).
    pub coefficients: Vec<F>,
    pub converged: bool,
    pub iterations: usize,
    /// Residual deviance at the final coefficients.
    pub deviance: F,
    /// Set when any |coefficient| exceeds the divergence bound.
    pub separation_flag: bool,
    /// Deviance after each accepted IRLS step, starting at the null point.
    pub deviance_trace: Vec<F>,
}

/// ln(1 + e^x) without overflow.
fn softplus<F: Real>(x: F) -> F {
    let hi = real::<F>(30.0);
    if x > hi {
        x
    } else if x < -hi {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Residual deviance −2·log-likelihood for 0/1 labels.
fn deviance<F: Real>(design: &[Vec<F>], labels: &[u8], beta: &[F]) -> F {
    let two = real::<F>(2.0);
    let mut dev = F::zero();
    for (row, &y) in design.iter().zip(labels) {
        let eta = dot(row, beta);
        // y=1 contributes softplus(-eta), y=0 contributes softplus(eta)
        dev = dev + if y == 1 { softplus(-eta) } else { softplus(eta) };
    }
    two * dev
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solves the symmetric positive-definite system `a x = b` in place via
/// Cholesky. Fails with a rank-deficiency error when a pivot collapses.
fn cholesky_solve<F: Real>(a: &mut [Vec<F>], b: &[F]) -> Result<Vec<F>> {
    let p = a.len();
    let scale = (0..p)
        .map(|i| a[i][i].abs())
        .fold(F::zero(), |m, v| m.max(v))
        .max(F::one());
    let tol = scale * real::<F>(1e-12);

    for j in 0..p {
        let mut d = a[j][j];
        for k in 0..j {
            d = d - a[j][k] * a[j][k];
        }
        if d <= tol {
            return Err(Error::RankDeficient(format!(
                "pivot {j} of the weighted normal equations is not positive"
            )));
        }
        a[j][j] = d.sqrt();
        for i in (j + 1)..p {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - a[i][k] * a[j][k];
            }
            a[i][j] = s / a[j][j];
        }
    }

    // Forward then backward substitution on the factor.
    let mut x = b.to_vec();
    for i in 0..p {
        for k in 0..i {
            let v = x[k];
            x[i] = x[i] - a[i][k] * v;
        }
        x[i] = x[i] / a[i][i];
    }
    for i in (0..p).rev() {
        for k in (i + 1)..p {
            let v = x[k];
            x[i] = x[i] - a[k][i] * v;
        }
        x[i] = x[i] / a[i][i];
    }
    Ok(x)
}

/// Fits a logistic regression of 0/1 `labels` on `design` (rows of length p,
/// leading intercept column supplied by the caller).
///
/// Convergence follows the relative deviance criterion
/// `|dev_t − dev_{t−1}| / (|dev_t| + 0.1) < 1e−8` with at most 25 iterations.
/// A non-converged fit is still returned with `converged = false`; callers
/// decide what to do with it.
pub fn fit_logistic<F: Real>(design: &[Vec<F>], labels: &[u8]) -> Result<LogisticFit<F>> {
    let n = design.len();
    if n == 0 || design[0].is_empty() {
        return Err(Error::Shape("empty design matrix".into()));
    }
    let p = design[0].len();
    if design.iter().any(|r| r.len() != p) {
        return Err(Error::Shape("ragged design matrix".into()));
    }
    if n < p {
        return Err(Error::Shape(format!("{n} rows for {p} coefficients")));
    }
    if labels.len() != n {
        return Err(Error::Shape(format!("{n} rows vs {} labels", labels.len())));
    }
    if design.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("design contains non-finite entries".into()));
    }
    let ones = labels.iter().filter(|&&y| y == 1).count();
    if ones == 0 || ones == n {
        return Err(Error::DegenerateLabels(
            "labels contain a single class".into(),
        ));
    }

    let min_w = real::<F>(MIN_WEIGHT);
    let tol = real::<F>(DEVIANCE_TOL);
    let point_one = real::<F>(0.1);

    let mut beta = vec![F::zero(); p];
    let mut dev = deviance(design, labels, &beta);
    let mut trace = vec![dev];
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_ITER {
        // Weighted normal equations XtWX beta = XtW z with the working
        // response z = eta + (y - mu) / w.
        let mut xtwx = vec![vec![F::zero(); p]; p];
        let mut xtwz = vec![F::zero(); p];
        for (row, &y) in design.iter().zip(labels) {
            let eta = dot(row, &beta);
            let mu = expit(eta);
            let w = (mu * (F::one() - mu)).max(min_w);
            let yf = if y == 1 { F::one() } else { F::zero() };
            let wz = w * eta + (yf - mu);
            for i in 0..p {
                for j in 0..=i {
                    xtwx[i][j] = xtwx[i][j] + w * row[i] * row[j];
                }
                xtwz[i] = xtwz[i] + row[i] * wz;
            }
        }
        for i in 0..p {
            for j in (i + 1)..p {
                xtwx[i][j] = xtwx[j][i];
            }
        }

        let proposal = cholesky_solve(&mut xtwx, &xtwz)?;

        // Step-halve toward the previous point if the proposal raises the
        // deviance, keeping the trace non-increasing.
        let mut candidate = proposal;
        let mut new_dev = deviance(design, labels, &candidate);
        let mut halvings = 0;
        let half = real::<F>(0.5);
        while new_dev > dev && halvings < 20 {
            for (c, &b) in candidate.iter_mut().zip(&beta) {
                *c = (*c + b) * half;
            }
            new_dev = deviance(design, labels, &candidate);
            halvings += 1;
        }
        if new_dev > dev {
            break; // no improving step remains
        }

        beta = candidate;
        iterations = iter;
        trace.push(new_dev);
        let change = (dev - new_dev).abs() / (new_dev.abs() + point_one);
        dev = new_dev;
        if change < tol {
            converged = true;
            break;
        }
    }

    let bound = real::<F>(SEPARATION_BOUND);
    let separation_flag = beta.iter().any(|c| c.abs() > bound);

    Ok(LogisticFit {
        coefficients: beta,
        converged,
        iterations,
        deviance: dev,
        separation_flag,
        deviance_trace: trace,
    })
}

/// Applies a fitted model to a design matrix, producing per-row
/// probabilities `expit(row · coefficients)`.
pub fn predict_prob<F: Real>(fit: &LogisticFit<F>, design: &[Vec<F>]) -> Result<Vec<F>> {
    let p = fit.coefficients.len();
    if design.iter().any(|r| r.len() != p) {
        return Err(Error::Shape(format!(
            "design width does not match {p} coefficients"
        )));
    }
    Ok(design
        .iter()
        .map(|row| expit(dot(row, &fit.coefficients)))
        .collect())
}

/// Convenience: design rows `(1, x)` for a single covariate.
pub fn intercept_design<F: Real>(x: &[F]) -> Vec<Vec<F>> {
    x.iter().map(|&v| vec![F::one(), v]).collect()
}
