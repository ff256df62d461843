use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::dists::{kl_inverse_gaussian_lasso, kl_polya_gamma, kl_trunc_normal, tv_inverse_gaussian_bound, Side, TruncNormalParams};
use crate::models::Dataset;
use crate::{Error, Result};

/// Absolute slack on KL comparisons.
pub const OVERLAP_TOL: f64 = 1e-12;
/// Constant `C` of the lasso extreme/regular split.
pub const LASSO_C: f64 = PI / 64.0;

/// Exact latent KL against its quadratic upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapCheck {
    pub kl_exact: f64,
    pub rhs: f64,
    pub ok: bool,
}

fn quad_form(beta1: &DVector<f64>, beta2: &DVector<f64>, data: &Dataset) -> Result<f64> {
    if beta1.len() != data.d() || beta2.len() != data.d() {
        return Err(Error::param("beta dimension does not match the data"));
    }
    let xd = &data.x * (beta1 - beta2);
    Ok(xd.norm_squared())
}

/// `Σᵢ KL(TN(x_iᵀβ₁) ‖ TN(x_iᵀβ₂))` against `½(β₁−β₂)ᵀXᵀX(β₁−β₂)`.
pub fn verify_overlap_probit(beta1: &DVector<f64>, beta2: &DVector<f64>, data: &Dataset) -> Result<OverlapCheck> {
    let rhs = 0.5 * quad_form(beta1, beta2, data)?;
    data.check_binary()?;
    let (e1, e2) = (&data.x * beta1, &data.x * beta2);
    let mut kl = 0.0;
    for i in 0..data.n() {
        let side = Side::from_response(data.y[i])?;
        kl += kl_trunc_normal(TruncNormalParams::new(e1[i], side), TruncNormalParams::new(e2[i], side))?;
    }
    Ok(OverlapCheck { kl_exact: kl, rhs, ok: kl <= rhs + OVERLAP_TOL })
}

/// `Σᵢ KL(PG(1, x_iᵀβ₁) ‖ PG(1, x_iᵀβ₂))` against `⅛(β₁−β₂)ᵀXᵀX(β₁−β₂)`.
pub fn verify_overlap_logit(beta1: &DVector<f64>, beta2: &DVector<f64>, data: &Dataset) -> Result<OverlapCheck> {
    let rhs = 0.125 * quad_form(beta1, beta2, data)?;
    let (e1, e2) = (&data.x * beta1, &data.x * beta2);
    let kl: f64 = e1.iter().zip(e2.iter()).map(|(&a, &b)| kl_polya_gamma(a, b)).sum();
    Ok(OverlapCheck { kl_exact: kl, rhs, ok: kl <= rhs + OVERLAP_TOL })
}

/// Largest `|φ|` treated as extreme: `C/(λd²)`. With latent laws
/// `IG(λ/|φ|, λ²)` this keeps each extreme TV bound at most `1/(4d)`.
pub fn lasso_extreme_threshold(lambda: f64, d: usize) -> f64 {
    LASSO_C / (lambda * (d * d) as f64)
}

/// Per-coordinate part of the lasso overlap bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordOverlap {
    pub extreme: bool,
    /// TV bound for extreme coordinates, `√(KL/2)` for regular ones.
    pub tv_bound: f64,
    /// Latent KL for regular coordinates, 0 for extreme ones.
    pub kl: f64,
}

/// Lasso one-step overlap bound between two transformed states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LassoOverlap {
    pub coords: Vec<CoordOverlap>,
    /// `Σ_extreme TV_j + √(½ Σ_regular KL_j)`.
    pub tv_bound_total: f64,
    /// `¼ + λd‖φ₁−φ₂‖/(2√C)`.
    pub closed_form: f64,
    pub ok: bool,
}

/// Splits coordinates at [`lasso_extreme_threshold`]: extreme ones use the
/// IG TV bound, regular ones the latent KL with Pinsker.
pub fn verify_overlap_lasso(phi1: &DVector<f64>, phi2: &DVector<f64>, lambda: f64, d: usize) -> Result<LassoOverlap> {
    if phi1.len() != d || phi2.len() != d || d == 0 {
        return Err(Error::param(format!("phi lengths {} and {} for d = {d}", phi1.len(), phi2.len())));
    }
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda = {lambda}")));
    }
    let thr = lasso_extreme_threshold(lambda, d);
    let cap = 1.0 / (4.0 * d as f64);
    let mut coords = Vec::with_capacity(d);
    let (mut tv_ext, mut kl_reg, mut ok) = (0.0, 0.0, true);
    for j in 0..d {
        let (a, b) = (phi1[j].abs(), phi2[j].abs());
        if a.max(b) <= thr {
            // Equal |φ| means identical latent laws.
            let tv = if a == b {
                0.0
            } else {
                tv_inverse_gaussian_bound(lambda / a, lambda / b, lambda * lambda)
            };
            ok &= tv <= cap + OVERLAP_TOL;
            tv_ext += tv;
            coords.push(CoordOverlap { extreme: true, tv_bound: tv, kl: 0.0 });
        } else {
            let (big, small) = if a >= b { (a, b) } else { (b, a) };
            let kl = kl_inverse_gaussian_lasso(big, small, lambda)?;
            kl_reg += kl;
            coords.push(CoordOverlap { extreme: false, tv_bound: (0.5 * kl).sqrt(), kl });
        }
    }
    let tv_bound_total = tv_ext + (0.5 * kl_reg).sqrt();
    let closed_form = 0.25 + lambda * d as f64 * (phi1 - phi2).norm() / (2.0 * LASSO_C.sqrt());
    ok &= tv_bound_total <= closed_form + OVERLAP_TOL;
    Ok(LassoOverlap { coords, tv_bound_total, closed_form, ok })
}
