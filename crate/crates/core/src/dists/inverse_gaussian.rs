use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::special::{log_norm_cdf, norm_cdf, norm_quantile};
use crate::{Error, Result};

/// Inverse Gaussian `IG(mu, lambda)` with mean `mu` and shape `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGaussianParams {
    pub mu: f64,
    pub lambda: f64,
}

impl InverseGaussianParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(format!("IG(mu = {mu}, lambda = {lambda})")));
        }
        Ok(Self { mu, lambda })
    }
}

/// `log √(λ/(2πx³)) − λ(x−μ)²/(2μ²x)`; an infinite `mu` gives the Lévy limit.
pub fn inverse_gaussian_log_pdf(mu: f64, lambda: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let norm = 0.5 * (lambda / (2.0 * PI * x * x * x)).ln();
    if mu.is_infinite() {
        return norm - lambda / (2.0 * x);
    }
    norm - lambda * (x - mu).powi(2) / (2.0 * mu * mu * x)
}

/// Closed-form cdf `Φ(√(λ/x)(x/μ−1)) + e^{2λ/μ}Φ(−√(λ/x)(x/μ+1))`.
pub fn inverse_gaussian_cdf(mu: f64, lambda: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return levy_cdf(lambda, x);
    }
    let r = (lambda / x).sqrt();
    let first = norm_cdf(r * (x / mu - 1.0));
    let second = (2.0 * lambda / mu + log_norm_cdf(-r * (x / mu + 1.0))).exp();
    (first + second).min(1.0)
}

/// cdf of the `mu → ∞` limit of `IG(mu, lambda)`: `2Φ(−√(λ/x))`.
pub fn levy_cdf(lambda: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    2.0 * norm_cdf(-(lambda / x).sqrt())
}

/// Michael–Schucany–Haas transformation with root selection.
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(p: InverseGaussianParams, rng: &mut R) -> f64 {
    let InverseGaussianParams { mu, lambda } = p;
    let nu: f64 = rng.sample(StandardNormal);
    let w = mu * nu * nu / (2.0 * lambda);
    // Smaller root μ(1 + w − √(w² + 2w)), written without cancellation.
    let denom = 1.0 + w + (w * (w + 2.0)).sqrt();
    let x = mu / denom;
    let u: f64 = rng.random();
    if u <= mu / (mu + x) {
        x
    } else {
        mu * denom
    }
}

/// Draws from the `mu → ∞` limit of `IG(mu, lambda)` by inverting its cdf.
pub fn sample_inverse_gaussian_limit<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(rand::distr::Open01);
    let q = norm_quantile(0.5 * u);
    lambda / (q * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn cdf_matches_integrated_density() {
        for &(mu, lam, x) in &[(1.0, 1.0, 0.7), (2.0, 3.0, 4.0), (100.0, 1.0, 3.0), (0.1, 5.0, 0.08)] {
            let q = integrate(|t| inverse_gaussian_log_pdf(mu, lam, t).exp(), 0.0, x, 1e-12, 0.0);
            assert!((q - inverse_gaussian_cdf(mu, lam, x)).abs() < 1e-10, "{mu} {lam} {x}");
        }
    }

    #[test]
    fn levy_cdf_matches_integrated_density() {
        let q = integrate(|t| inverse_gaussian_log_pdf(f64::INFINITY, 2.0, t).exp(), 0.0, 5.0, 1e-12, 0.0);
        assert!((q - levy_cdf(2.0, 5.0)).abs() < 1e-10);
    }

    #[test]
    fn huge_mean_approaches_the_limit_law() {
        let a = inverse_gaussian_cdf(1e12, 1.0, 3.0);
        let b = levy_cdf(1.0, 3.0);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(InverseGaussianParams::new(0.0, 1.0).is_err());
        assert!(InverseGaussianParams::new(1.0, -1.0).is_err());
        assert!(InverseGaussianParams::new(f64::INFINITY, 1.0).is_err());
    }
}
