use nalgebra::{DMatrix, DVector};

use super::{weighted_gram, Dataset, GaussianPrior};
use crate::special::{log1p_exp, logistic};
use crate::{Error, Result};

fn check(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> Result<()> {
    data.check_binary()?;
    if beta.len() != data.d() || prior.dim() != data.d() {
        return Err(Error::param(format!(
            "dimension mismatch: beta {}, data d = {}, prior {}",
            beta.len(),
            data.d(),
            prior.dim()
        )));
    }
    Ok(())
}

/// Unnormalised logit log-posterior
/// `Σ y_i x_iᵀβ − log(1 + e^{x_iᵀβ}) − ½(β − b)ᵀB⁻¹(β − b)`.
pub fn logit_log_posterior(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> Result<f64> {
    check(beta, data, prior)?;
    Ok(log_posterior_unchecked(beta, data, prior))
}

/// Gradient and Hessian of the potential `f = −log π`:
/// `−Xᵀy + Σ l(x_iᵀβ)x_i + B⁻¹(β − b)` and `Σ l(1 − l)x_ix_iᵀ + B⁻¹`.
pub fn logit_grad_hess(
    beta: &DVector<f64>,
    data: &Dataset,
    prior: &GaussianPrior,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check(beta, data, prior)?;
    Ok(grad_hess_unchecked(beta, data, prior))
}

pub(super) fn log_posterior_unchecked(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> f64 {
    let eta = &data.x * beta;
    let lik: f64 = eta.iter().zip(data.y.iter()).map(|(&e, &y)| y * e - log1p_exp(e)).sum();
    lik + prior.log_kernel(beta)
}

pub(super) fn grad_unchecked(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> DVector<f64> {
    let eta = &data.x * beta;
    let w = eta.zip_map(&data.y, |e, y| logistic(e) - y);
    data.x.tr_mul(&w) + prior.precision() * (beta - &prior.b)
}

pub(super) fn grad_hess_unchecked(
    beta: &DVector<f64>,
    data: &Dataset,
    prior: &GaussianPrior,
) -> (DVector<f64>, DMatrix<f64>) {
    let eta = &data.x * beta;
    let l = eta.map(logistic);
    let grad = data.x.tr_mul(&(&l - &data.y)) + prior.precision() * (beta - &prior.b);
    let curv = l.map(|p| p * (1.0 - p));
    let hess = weighted_gram(&data.x, &curv) + prior.precision();
    (grad, hess)
}
