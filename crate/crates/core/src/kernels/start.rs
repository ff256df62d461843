use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::ChainState;
use crate::linalg::sample_from_precision;
use crate::models::lasso_ridge;
use crate::models::{smoothness_report, Dataset, GaussianPrior, Glm, GlmPosterior, LassoPrior};
use crate::{Error, Result};

/// Result of the gradient-descent mode search.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCertificate {
    pub x_star: DVector<f64>,
    /// `‖∇f(x⋆)‖` at termination.
    pub grad_norm: f64,
    pub iterations: usize,
    /// Step size `1/L′`.
    pub step: f64,
}

/// Gradient descent with step `1/L′` from the prior mean until
/// `‖∇f‖ ≤ tol`, giving up after `10·κ·log(1/tol)` iterations.
pub fn find_mode(data: &Dataset, prior: &GaussianPrior, glm: Glm, tol: f64) -> Result<ModeCertificate> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::param(format!("mode tolerance {tol} must lie in (0, 1)")));
    }
    let post = GlmPosterior::new(glm, data, prior)?;
    let sm = smoothness_report(data, prior, glm)?;
    let step = 1.0 / sm.l_prime;
    let max_iter = (10.0 * sm.kappa * (1.0 / tol).ln()).ceil().max(1.0) as usize;
    let mut x = prior.b.clone();
    for it in 0..=max_iter {
        let g = post.grad_potential(&x);
        let gn = g.norm();
        if gn <= tol {
            return Ok(ModeCertificate { x_star: x, grad_norm: gn, iterations: it, step });
        }
        x -= g * step;
    }
    Err(Error::NoConvergence(format!("gradient descent did not reach ‖∇f‖ ≤ {tol} in {max_iter} iterations")))
}

/// Gaussian feasible start `N(x⋆, I/L′)` for probit/logit.
pub fn feasible_start_gaussian<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &GaussianPrior,
    glm: Glm,
    mode_solver_tol: f64,
    rng: &mut R,
) -> Result<(ChainState, ModeCertificate)> {
    let cert = find_mode(data, prior, glm, mode_solver_tol)?;
    let sd = cert.step.sqrt();
    let beta = cert.x_star.map(|m| m + sd * rng.sample::<f64, _>(StandardNormal));
    Ok((ChainState::glm(beta, data.n()), cert))
}

/// Lasso feasible start: `ρ² ∼ Gamma((n+2α−1)/2, ξ + ½ỹᵀ(I − X(XᵀX+2λI)⁻¹Xᵀ)ỹ)`
/// (shape, rate), `φ ∼ N(ρ(XᵀX+2λI)⁻¹Xᵀỹ, (XᵀX+2λI)⁻¹)`, mapped back to
/// `(β, v) = (φ/ρ, 1/ρ²)`.
pub fn feasible_start_lasso<R: Rng + ?Sized>(data: &Dataset, prior: &LassoPrior, rng: &mut R) -> Result<ChainState> {
    if !(prior.xi > 0.0) {
        return Err(Error::param("the lasso feasible start needs xi > 0"));
    }
    data.check_centered()?;
    let shape = 0.5 * (data.n() as f64 + 2.0 * prior.alpha - 1.0);
    if !(shape > 0.0) {
        return Err(Error::param(format!("Gamma shape (n + 2 alpha - 1)/2 = {shape} must be positive")));
    }
    let d = data.d();
    let ytil = data.centered_response();
    let (q, chol, mean) = lasso_ridge(&data.x, &ytil, &DVector::from_element(d, 2.0 * prior.lambda))?;
    let rate = prior.xi + 0.5 * q;
    let gamma = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::param(e.to_string()))?.sample(rng);
    let rho = gamma.sqrt();
    let phi = sample_from_precision(&chol, &(mean * rho), 1.0, rng);
    let v = 1.0 / (rho * rho);
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Breakdown(format!("feasible start produced v = {v}")));
    }
    Ok(ChainState::lasso(phi / rho, v))
}
