use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::kernels::{LogitDa, ProbitDa};
use crate::models::{Dataset, GaussianPrior, Glm};
use crate::theory::{verify_overlap_logit, verify_overlap_probit};
use crate::{Error, Result};

/// Histogram bins of the lower estimate.
pub const TV_PROBE_BINS: usize = 16;
/// Failure probability of the lower estimate's concentration correction.
pub const TV_PROBE_DELTA: f64 = 1e-3;
const EDGE_PILOT: usize = 512;

/// Two-sided estimate of the TV distance between the one-step β-laws from
/// two starting points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvProbe {
    /// Summed exact latent KL between the two starting points.
    pub kl_exact: f64,
    /// `min(1, √(2·KL))`: data processing plus Pinsker.
    pub upper: f64,
    /// Histogram TV minus its concentration slack, floored at 0.
    pub lower: f64,
    /// Raw histogram TV of the projected samples.
    pub tv_hist: f64,
    /// Slack subtracted from `tv_hist`.
    pub slack: f64,
}

enum Glmk {
    Probit(ProbitDa),
    Logit(LogitDa),
}

impl Glmk {
    fn step<R: Rng + ?Sized>(&self, beta: &DVector<f64>, z: &mut DVector<f64>, rng: &mut R) -> Result<DVector<f64>> {
        match self {
            Glmk::Probit(k) => {
                k.draw_latent(beta, z, rng);
                Ok(k.draw_beta(z, rng))
            }
            Glmk::Logit(k) => {
                k.draw_latent(beta, z, rng)?;
                k.draw_beta(z, rng)
            }
        }
    }
}

/// Projects `count` one-step draws from `beta` onto `dir`.
fn projected<R: Rng + ?Sized>(k: &Glmk, beta: &DVector<f64>, dir: &DVector<f64>, count: usize, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let mut z = DVector::zeros(n);
    (0..count).map(|_| Ok(k.step(beta, &mut z, rng)?.dot(dir))).collect()
}

/// Upper bound from the exact latent KL; lower estimate from a 16-bin
/// histogram of both one-step laws projected on `β₁ − β₂`. Bin edges come
/// from an independent pilot, and the slack `√(2(k log 2 + log(2/δ))/m)`
/// makes the lower value a `1 − δ` lower bound on the true TV.
pub fn one_step_tv_probe<R: Rng + ?Sized>(
    glm: Glm,
    beta1: &DVector<f64>,
    beta2: &DVector<f64>,
    data: &Dataset,
    prior: &GaussianPrior,
    mc_draws: usize,
    rng: &mut R,
) -> Result<TvProbe> {
    if mc_draws < TV_PROBE_BINS {
        return Err(Error::param(format!("need at least {TV_PROBE_BINS} Monte Carlo draws")));
    }
    let (kl_exact, kernel) = match glm {
        Glm::Probit => (verify_overlap_probit(beta1, beta2, data)?.kl_exact, Glmk::Probit(ProbitDa::new(data, prior)?)),
        Glm::Logit => (verify_overlap_logit(beta1, beta2, data)?.kl_exact, Glmk::Logit(LogitDa::new(data, prior)?)),
    };
    let upper = (2.0 * kl_exact).sqrt().min(1.0);
    let diff = beta1 - beta2;
    let dir = if diff.norm() > 0.0 {
        diff.normalize()
    } else {
        let mut e = DVector::zeros(data.d());
        e[0] = 1.0;
        e
    };
    let n = data.n();
    let mut pilot = projected(&kernel, beta1, &dir, EDGE_PILOT, n, rng)?;
    pilot.extend(projected(&kernel, beta2, &dir, EDGE_PILOT, n, rng)?);
    pilot.sort_by(f64::total_cmp);
    let edges: Vec<f64> =
        (1..TV_PROBE_BINS).map(|b| pilot[b * pilot.len() / TV_PROBE_BINS]).collect();
    let hist = |xs: Vec<f64>| {
        let mut h = vec![0.0; TV_PROBE_BINS];
        for x in xs {
            h[edges.partition_point(|&e| e <= x)] += 1.0 / mc_draws as f64;
        }
        h
    };
    let p = hist(projected(&kernel, beta1, &dir, mc_draws, n, rng)?);
    let q = hist(projected(&kernel, beta2, &dir, mc_draws, n, rng)?);
    let tv_hist = 0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let slack = (2.0 * (TV_PROBE_BINS as f64 * std::f64::consts::LN_2 + (2.0 / TV_PROBE_DELTA).ln()) / mc_draws as f64).sqrt();
    Ok(TvProbe { kl_exact, upper, lower: (tv_hist - slack).max(0.0), tv_hist, slack })
}
