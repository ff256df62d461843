use rayon::prelude::*;
use serde::Serialize;

use super::{generate, DataRegime, GeneratorSpec};
use crate::linalg::{gram, lambda_max_sym};
use crate::seeds::{derive_seed, seeded_rng};
use crate::{Error, Result};

/// One replicate of the concentration check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub replicate: usize,
    pub n: usize,
    pub d: usize,
    pub lam_max_xtx: f64,
    /// `ndM²`, always valid for entries bounded by `M`.
    pub deterministic_bound: f64,
    /// `nS + c·T` (bounded regime only; NaN otherwise).
    pub bernstein_bound: f64,
    pub violated: bool,
    pub deterministic_violated: bool,
}

/// `(nS, T)` with `T = log(2d/δ)·dM²/3 + √(2 log(2d/δ)·ndM²S)`, so the
/// bounded-regime bound on `‖XᵀX‖` reads `nS + c·T`.
pub fn concentration_scale(n: usize, d: usize, m: f64, s: f64, delta: f64) -> (f64, f64) {
    let (n, d, m2) = (n as f64, d as f64, m * m);
    let l = (2.0 * d / delta).ln();
    (n * s, l * d * m2 / 3.0 + (2.0 * l * n * d * m2 * s).sqrt())
}

fn lam_max_draws(spec: &GeneratorSpec, replicates: usize, seed: u64) -> Result<Vec<f64>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_rng(derive_seed(seed, &[r as u64]));
            let data = generate(spec, &mut rng)?;
            Ok(lambda_max_sym(&gram(&data.x)))
        })
        .collect()
}

/// Smallest `c` for which the bound holds on a `1 − δ/2` fraction of
/// `pilot` fresh replicates (clamped at 0). Targeting `δ/2` leaves room for
/// the sampling error of the pilot quantile.
pub fn calibrate_concentration_c(spec: &GeneratorSpec, delta: f64, pilot: usize, seed: u64) -> Result<f64> {
    require_bounded(spec, delta)?;
    if pilot == 0 {
        return Err(Error::param("calibration needs at least one pilot replicate"));
    }
    let s = spec.sigma_norm_bound()?;
    let (base, t) = concentration_scale(spec.n, spec.d, spec.m, s, delta);
    let mut c: Vec<f64> = lam_max_draws(spec, pilot, seed)?.into_iter().map(|l| (l - base) / t).collect();
    c.sort_by(f64::total_cmp);
    let k = ((1.0 - 0.5 * delta) * pilot as f64).ceil() as usize;
    Ok(c[k.clamp(1, pilot) - 1].max(0.0))
}

fn require_bounded(spec: &GeneratorSpec, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta = {delta} must lie in (0, 1)")));
    }
    spec.validate()
}

/// `λ_max(XᵀX)` of `replicates` fresh datasets against `ndM²` and, in the
/// bounded regime, the matrix-Bernstein bound with constant `c`.
pub fn matrix_concentration_check(
    spec: &GeneratorSpec,
    replicates: usize,
    delta: f64,
    c: f64,
    seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    require_bounded(spec, delta)?;
    let bounded = spec.regime == DataRegime::Bounded;
    let s = spec.sigma_norm_bound()?;
    let (base, t) = concentration_scale(spec.n, spec.d, spec.m, s, delta);
    let det = spec.n as f64 * spec.d as f64 * spec.m * spec.m;
    let lams = lam_max_draws(spec, replicates, seed)?;
    Ok(lams
        .into_iter()
        .enumerate()
        .map(|(replicate, lam)| {
            let bernstein_bound = if bounded { base + c * t } else { f64::NAN };
            ConcentrationRow {
                replicate,
                n: spec.n,
                d: spec.d,
                lam_max_xtx: lam,
                deterministic_bound: det,
                bernstein_bound,
                violated: bounded && lam > bernstein_bound,
                deterministic_violated: bounded && lam > det * (1.0 + 1e-12),
            }
        })
        .collect())
}
