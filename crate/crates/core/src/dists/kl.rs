use std::f64::consts::PI;

use super::trunc_normal::{Side, TruncNormalParams};
use crate::special::{inv_mills, log_cosh, log_norm_cdf, tanh_half_over};
use crate::{Error, Result};

/// `KL(TN(mu₁, 1; side) ‖ TN(mu₂, 1; side))` in closed form:
/// `log Φ(d₂) − log Φ(d₁) + (d₁ − d₂)·φ(d₁)/Φ(d₁) + ½(d₁ − d₂)²` on the
/// positive side, with `dᵢ = muᵢ`; the negative side is its mirror image.
pub fn kl_trunc_normal(p1: TruncNormalParams, p2: TruncNormalParams) -> Result<f64> {
    if p1.side != p2.side {
        return Err(Error::SideMismatch);
    }
    let (d1, d2) = match p1.side {
        Side::Positive => (p1.mu, p2.mu),
        Side::Negative => (-p1.mu, -p2.mu),
    };
    if d1 == d2 {
        return Ok(0.0);
    }
    let delta = d1 - d2;
    let kl = log_norm_cdf(d2) - log_norm_cdf(d1) + delta * inv_mills(d1) + 0.5 * delta * delta;
    Ok(kl.max(0.0))
}

/// `KL(PG(1, c₁) ‖ PG(1, c₂))`
/// `= (c₂² − c₁²)·tanh(c₁/2)/(4c₁) + log cosh(c₁/2) − log cosh(c₂/2)`,
/// with the `c₁ → 0` limit `tanh(c₁/2)/(4c₁) → 1/8`.
pub fn kl_polya_gamma(c1: f64, c2: f64) -> f64 {
    if c1.abs() == c2.abs() {
        return 0.0;
    }
    let kl = (c2 * c2 - c1 * c1) * 0.25 * tanh_half_over(c1) + log_cosh(0.5 * c1) - log_cosh(0.5 * c2);
    kl.max(0.0)
}

/// KL between the lasso latent laws `IG(λ/|φ₁|, λ²)` and `IG(λ/|φ₂|, λ²)`:
/// `λ[(φ₂²/2 − φ₁²/2)/|φ₁| + |φ₁| − |φ₂|]`, evaluated as `λ(|φ₂| − |φ₁|)²/(2|φ₁|)`.
///
/// Diverges at `φ₁ = 0`, which is reported as a domain error.
pub fn kl_inverse_gaussian_lasso(phi1: f64, phi2: f64, lambda: f64) -> Result<f64> {
    if phi1 == 0.0 {
        return Err(Error::Domain("IG KL diverges at phi1 = 0; use the TV bound".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda = {lambda}")));
    }
    let (a1, a2) = (phi1.abs(), phi2.abs());
    Ok(lambda * (a2 - a1).powi(2) / (2.0 * a1))
}

/// Upper bound `√(4λ/(π·min(μ₁, μ₂)))` on the TV distance between
/// `IG(μ₁, λ)` and `IG(μ₂, λ)`.
pub fn tv_inverse_gaussian_bound(mu1: f64, mu2: f64, lambda: f64) -> f64 {
    (4.0 * lambda / (PI * mu1.min(mu2))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trunc_normal_kl_fixtures() {
        let p = |m| TruncNormalParams::new(m, Side::Positive);
        assert_eq!(kl_trunc_normal(p(0.7), p(0.7)).unwrap(), 0.0);
        let n = TruncNormalParams::new(0.0, Side::Negative);
        assert!(matches!(kl_trunc_normal(p(0.0), n), Err(Error::SideMismatch)));
    }

    #[test]
    fn trunc_normal_sides_mirror() {
        let a = kl_trunc_normal(
            TruncNormalParams::new(1.2, Side::Positive),
            TruncNormalParams::new(-0.4, Side::Positive),
        )
        .unwrap();
        let b = kl_trunc_normal(
            TruncNormalParams::new(-1.2, Side::Negative),
            TruncNormalParams::new(0.4, Side::Negative),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn polya_gamma_kl_fixtures() {
        assert_eq!(kl_polya_gamma(2.0, 2.0), 0.0);
        assert_eq!(kl_polya_gamma(0.5, -0.5), 0.0);
        // c₁ = 0: (c₂²/8) − log cosh(c₂/2)
        let want = 1.0 / 8.0 - (0.5f64).cosh().ln();
        assert!((kl_polya_gamma(0.0, 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn inverse_gaussian_kl_fixtures() {
        assert_eq!(kl_inverse_gaussian_lasso(0.3, 0.3, 1.0).unwrap(), 0.0);
        assert!((kl_inverse_gaussian_lasso(1.0, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(kl_inverse_gaussian_lasso(0.0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tv_bound_fixture() {
        let b = tv_inverse_gaussian_bound(100.0, 200.0, 1.0);
        assert!((b - 0.112_837_916_709_551_26).abs() < 1e-12);
    }
}
