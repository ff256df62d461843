use serde::Serialize;

use super::{Dataset, GaussianPrior, Glm};
use crate::linalg::{gram, lambda_max_sym, lambda_min_sym};
use crate::{Error, Result};

/// Strong log-concavity and smoothness constants of a probit/logit posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub model: Glm,
    /// `λ_min(B⁻¹)`.
    pub m_prime: f64,
    /// `‖XᵀX‖ + ‖B⁻¹‖` (probit) or `¼‖XᵀX‖ + ‖B⁻¹‖` (logit).
    pub l_prime: f64,
    pub kappa: f64,
    pub lam_max_xtx: f64,
    /// `n·d·M²`.
    pub lam_max_bound: f64,
    /// `(d/2)·log(L′/m′)`, the log-warmness of the Gaussian feasible start.
    pub eta_star_log: f64,
}

/// Computes `m′`, `L′`, `κ`, `λ_max(XᵀX)`, its `ndM²` bound and `log η⋆`.
pub fn smoothness_report(data: &Dataset, prior: &GaussianPrior, model: Glm) -> Result<SmoothnessReport> {
    if prior.dim() != data.d() {
        return Err(Error::param(format!("prior dimension {} but data has d = {}", prior.dim(), data.d())));
    }
    let prec = prior.precision();
    let m_prime = lambda_min_sym(prec);
    let prec_norm = lambda_max_sym(prec);
    let lam_max_xtx = lambda_max_sym(&gram(&data.x)).max(0.0);
    let scale = match model {
        Glm::Probit => 1.0,
        Glm::Logit => 0.25,
    };
    let l_prime = scale * lam_max_xtx + prec_norm;
    let kappa = l_prime / m_prime;
    let m = data.entry_bound();
    Ok(SmoothnessReport {
        model,
        m_prime,
        l_prime,
        kappa,
        lam_max_xtx,
        lam_max_bound: data.n() as f64 * data.d() as f64 * m * m,
        eta_star_log: 0.5 * data.d() as f64 * kappa.ln(),
    })
}
