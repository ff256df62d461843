use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{Dataset, LassoPrior};
use crate::linalg::{cholesky, gram};
use crate::{Error, Result};

fn check_dims(beta: &DVector<f64>, data: &Dataset) -> Result<()> {
    if beta.len() != data.d() {
        return Err(Error::param(format!("beta has length {} but data has d = {}", beta.len(), data.d())));
    }
    Ok(())
}

/// Unnormalised lasso log-posterior of `(β, v)` with the intercept
/// integrated out:
/// `−(n+d+2α+1)/2·log v − ‖ỹ − Xβ‖²/(2v) − λ‖β‖₁/√v − ξ/v`.
///
/// Returns `−∞` for `v ≤ 0`.
pub fn lasso_log_posterior(beta: &DVector<f64>, v: f64, data: &Dataset, prior: &LassoPrior) -> Result<f64> {
    check_dims(beta, data)?;
    if !(v > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let (n, d) = (data.n() as f64, data.d() as f64);
    let resid = data.centered_response() - &data.x * beta;
    Ok(-0.5 * (n + d + 2.0 * prior.alpha + 1.0) * v.ln()
        - resid.norm_squared() / (2.0 * v)
        - prior.lambda * beta.lp_norm(1) / v.sqrt()
        - prior.xi / v)
}

/// `(φ, ρ) = (β/√v, 1/√v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedState {
    pub phi: DVector<f64>,
    pub rho: f64,
}

/// Forward map `T(β, v)`.
pub fn lasso_transform(beta: &DVector<f64>, v: f64) -> Result<TransformedState> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(format!("v = {v} must be positive and finite")));
    }
    let rho = 1.0 / v.sqrt();
    Ok(TransformedState { phi: beta * rho, rho })
}

/// Inverse map `T⁻¹(φ, ρ) = (φ/ρ, 1/ρ²)`.
pub fn lasso_transform_inv(s: &TransformedState) -> (DVector<f64>, f64) {
    (&s.phi / s.rho, 1.0 / (s.rho * s.rho))
}

/// `log|det ∇T⁻¹(φ, ρ)| = log 2 − (3 + d)·log ρ`.
pub fn lasso_transform_log_abs_det_inv(rho: f64, d: usize) -> f64 {
    LN_2 - (3.0 + d as f64) * rho.ln()
}

/// Log-density of the transformed target
/// `ρ^{n+2α−2} exp(−½‖ρỹ − Xφ‖² − λ‖φ‖₁ − ρ²ξ)`; `−∞` for `ρ ≤ 0`.
pub fn lasso_transformed_log_target(phi: &DVector<f64>, rho: f64, data: &Dataset, prior: &LassoPrior) -> Result<f64> {
    check_dims(phi, data)?;
    if !(rho > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let n = data.n() as f64;
    let resid = data.centered_response() * rho - &data.x * phi;
    Ok((n + 2.0 * prior.alpha - 2.0) * rho.ln()
        - 0.5 * resid.norm_squared()
        - prior.lambda * phi.lp_norm(1)
        - rho * rho * prior.xi)
}

/// Unnormalised log-density of the lasso feasible start:
/// `−(n+d+2α+1)/2·log v − ‖ỹ − Xβ‖²/(2v) − λ‖β‖₂²/v − ξ/v`.
pub fn lasso_feasible_start_log_density(beta: &DVector<f64>, v: f64, data: &Dataset, prior: &LassoPrior) -> Result<f64> {
    check_dims(beta, data)?;
    if !(v > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let (n, d) = (data.n() as f64, data.d() as f64);
    let resid = data.centered_response() - &data.x * beta;
    Ok(-0.5 * (n + d + 2.0 * prior.alpha + 1.0) * v.ln()
        - resid.norm_squared() / (2.0 * v)
        - prior.lambda * beta.norm_squared() / v
        - prior.xi / v)
}

/// The three factors of the feasible-start warmness bound, in log-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarmnessParts {
    /// `λd + d·log(√2/(λ√π))`.
    pub a: f64,
    /// `½ log|XᵀX + 2λI|`.
    pub b: f64,
    /// `(n+2α−1)/2 · log((ξ + ½ỹᵀ(I − X(XᵀX+2λI)⁻¹Xᵀ)ỹ)/ξ)`.
    pub c: f64,
    pub total: f64,
}

/// `ỹᵀ(I − X(XᵀX + sI)⁻¹Xᵀ)ỹ`, clamped at zero against rounding.
pub(crate) fn lasso_ridge(
    x: &DMatrix<f64>,
    ytil: &DVector<f64>,
    shift: &DVector<f64>,
) -> Result<(f64, nalgebra::Cholesky<f64, nalgebra::Dyn>, DVector<f64>)> {
    let mut a = gram(x);
    for j in 0..a.nrows() {
        a[(j, j)] += shift[j];
    }
    let chol = cholesky(a, "ridge precision")?;
    let xty = x.tr_mul(ytil);
    let mean = chol.solve(&xty);
    let q = (ytil.norm_squared() - xty.dot(&mean)).max(0.0);
    Ok((q, chol, mean))
}

/// Factors of the log warmness of the lasso feasible start.
pub fn lasso_warmness_parts(data: &Dataset, prior: &LassoPrior) -> Result<WarmnessParts> {
    if !(prior.xi > 0.0) {
        return Err(Error::param("warmness bound needs a proper variance prior (xi > 0)"));
    }
    let (n, d) = (data.n() as f64, data.d());
    let lam = prior.lambda;
    let ytil = data.centered_response();
    let (q, chol, _) = lasso_ridge(&data.x, &ytil, &DVector::from_element(d, 2.0 * lam))?;
    let df = d as f64;
    let a = lam * df + df * ((2.0f64).sqrt() / (lam * PI.sqrt())).ln();
    let b = chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let c = 0.5 * (n + 2.0 * prior.alpha - 1.0) * ((prior.xi + 0.5 * q) / prior.xi).ln();
    Ok(WarmnessParts { a, b, c, total: a + b + c })
}

/// Log of the warmness bound of the lasso feasible start.
pub fn lasso_warmness_exponent(data: &Dataset, prior: &LassoPrior) -> Result<f64> {
    Ok(lasso_warmness_parts(data, prior)?.total)
}
