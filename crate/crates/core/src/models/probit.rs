use nalgebra::{DMatrix, DVector};

use super::{weighted_gram, Dataset, GaussianPrior};
use crate::special::{inv_mills, log_norm_cdf, q_mills};
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

/// Unnormalised probit log-posterior
/// `Σ y_i log Φ(x_iᵀβ) + (1 − y_i) log Φ(−x_iᵀβ) − ½(β − b)ᵀB⁻¹(β − b)`.
pub fn probit_log_posterior(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> Result<f64> {
    check(beta, data, prior)?;
    Ok(log_posterior_unchecked(beta, data, prior))
}

/// Gradient and Hessian of the potential `f = −log π`.
pub fn probit_grad_hess(
    beta: &DVector<f64>,
    data: &Dataset,
    prior: &GaussianPrior,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check(beta, data, prior)?;
    Ok(grad_hess_unchecked(beta, data, prior))
}

pub(super) fn log_posterior_unchecked(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> f64 {
    let eta = &data.x * beta;
    let lik: f64 = eta
        .iter()
        .zip(data.y.iter())
        .map(|(&e, &y)| if y == 1.0 { log_norm_cdf(e) } else { log_norm_cdf(-e) })
        .sum();
    lik + prior.log_kernel(beta)
}

// Per-observation derivative of −log Φ(±η) with respect to η.
fn score_weights(eta: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    eta.zip_map(y, |e, y| if y == 1.0 { -inv_mills(e) } else { inv_mills(-e) })
}

pub(super) fn grad_unchecked(beta: &DVector<f64>, data: &Dataset, prior: &GaussianPrior) -> DVector<f64> {
    let eta = &data.x * beta;
    let w = score_weights(&eta, &data.y);
    data.x.tr_mul(&w) + prior.precision() * (beta - &prior.b)
}

pub(super) fn grad_hess_unchecked(
    beta: &DVector<f64>,
    data: &Dataset,
    prior: &GaussianPrior,
) -> (DVector<f64>, DMatrix<f64>) {
    let eta = &data.x * beta;
    let w = score_weights(&eta, &data.y);
    let grad = data.x.tr_mul(&w) + prior.precision() * (beta - &prior.b);
    let curv = eta.zip_map(&data.y, |e, y| if y == 1.0 { q_mills(e) } else { q_mills(-e) });
    let hess = weighted_gram(&data.x, &curv) + prior.precision();
    (grad, hess)
}
