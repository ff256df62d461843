use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::iat_series;
use crate::kernels::{feasible_start_gaussian, run_chain, KernelConfig, LogitDa, ProbitDa};
use crate::models::{Dataset, GaussianPrior, Glm};
use crate::seeds::{derive_seed, seeded_rng};
use crate::{Error, Result};

/// Grid and chain settings of a scaling sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: Glm,
    pub n_grid: Vec<usize>,
    pub d_grid: Vec<usize>,
    pub replicates: usize,
    pub iters: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in_frac: f64,
    /// Hold probability; 0 runs the plain (non-lazy) chain.
    #[serde(default)]
    pub zeta: f64,
    /// Prior `N(0, prior_scale·I)`.
    #[serde(default = "one")]
    pub prior_scale: f64,
    pub seed: u64,
    /// Record wall-clock ns/iter; when false the column is written as 0 so
    /// the CSV is a pure function of the configuration.
    #[serde(default)]
    pub record_timing: bool,
    /// Bootstrap resamples for the slope interval.
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

fn default_burn_in() -> f64 {
    super::DEFAULT_BURN_IN
}

fn one() -> f64 {
    1.0
}

fn default_bootstrap() -> usize {
    2000
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.d_grid.is_empty() || self.replicates == 0 {
            return Err(Error::param("sweep grid and replicate count must be non-empty"));
        }
        if self.n_grid.contains(&0) || self.d_grid.contains(&0) {
            return Err(Error::param("sweep grid values must be positive"));
        }
        if self.iters < 10 || !(0.0..1.0).contains(&self.burn_in_frac) {
            return Err(Error::param("sweep needs iters >= 10 and burn-in in [0, 1)"));
        }
        KernelConfig::new(self.zeta, self.seed)?;
        Ok(())
    }
}

/// One chain of the sweep. Columns follow the sweep CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub replicate: usize,
    pub seed: u64,
    /// Worst per-coordinate IAT after burn-in.
    pub iat: f64,
    pub ess: f64,
    pub ns_per_iter: f64,
    /// Regressor of the slope fit, `n·d`.
    pub slope_context: f64,
}

/// Ordinary least-squares slope with a pairs-bootstrap percentile interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub points: usize,
}

/// Median IAT and runtime of one `(n, d)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub nd: f64,
    pub iat_median: f64,
    pub ns_per_iter_median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `log iat` on `log(n·d)` over all rows; `None` if the grid has a
    /// single `n·d` value.
    pub fit: Option<SlopeFit>,
}

impl SweepResult {
    pub fn cells(&self) -> Vec<CellSummary> {
        let mut keys: Vec<(usize, usize)> = self.rows.iter().map(|r| (r.n, r.d)).collect();
        keys.dedup();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(n, d)| {
                let (iat, ns): (Vec<f64>, Vec<f64>) =
                    self.rows.iter().filter(|r| r.n == n && r.d == d).map(|r| (r.iat, r.ns_per_iter)).unzip();
                CellSummary { n, d, nd: (n * d) as f64, iat_median: median(iat), ns_per_iter_median: median(ns) }
            })
            .collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Runs one ProbitDA or LogitDA chain per `(n, d, replicate)` cell in
/// parallel. `generator(n, d, rng)` supplies each cell's dataset; the chain
/// starts from the Gaussian feasible start. Rows come back in grid order
/// (n outer, d, replicate inner) whatever the thread count.
pub fn scaling_sweep<G>(spec: &SweepSpec, generator: &G) -> Result<SweepResult>
where
    G: Fn(usize, usize, &mut ChaCha8Rng) -> Result<Dataset> + Sync,
{
    spec.validate()?;
    let mut cells = Vec::new();
    for &n in &spec.n_grid {
        for &d in &spec.d_grid {
            for r in 0..spec.replicates {
                cells.push((n, d, r));
            }
        }
    }
    let rows = cells
        .into_par_iter()
        .map(|(n, d, r)| run_cell(spec, generator, n, d, r))
        .collect::<Result<Vec<_>>>()?;
    let fit = if rows.iter().any(|r| r.slope_context != rows[0].slope_context) {
        let x: Vec<f64> = rows.iter().map(|r| r.slope_context).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.iat).collect();
        Some(fit_loglog_slope(&x, &y, spec.bootstrap, derive_seed(spec.seed, &[u64::MAX]))?)
    } else {
        None
    };
    Ok(SweepResult { rows, fit })
}

fn run_cell<G>(spec: &SweepSpec, generator: &G, n: usize, d: usize, r: usize) -> Result<SweepRow>
where
    G: Fn(usize, usize, &mut ChaCha8Rng) -> Result<Dataset>,
{
    let seed = derive_seed(spec.seed, &[n as u64, d as u64, r as u64]);
    let mut rng = seeded_rng(seed);
    let data = generator(n, d, &mut rng)?;
    if data.n() != n || data.d() != d {
        return Err(Error::param(format!("generator returned {}x{} for cell {n}x{d}", data.n(), data.d())));
    }
    let prior = GaussianPrior::isotropic(d, spec.prior_scale)?;
    let (init, _) = feasible_start_gaussian(&data, &prior, spec.model, 1e-8, &mut rng)?;
    let cfg = KernelConfig::new(spec.zeta, seed)?;
    let (trace, _) = match spec.model {
        Glm::Probit => run_chain(&ProbitDa::new(&data, &prior)?, init, &cfg, spec.iters, n, &mut rng)?,
        Glm::Logit => run_chain(&LogitDa::new(&data, &prior)?, init, &cfg, spec.iters, n, &mut rng)?,
    };
    let start = (spec.iters as f64 * spec.burn_in_frac).floor() as usize;
    let kept = (spec.iters - start) as f64;
    let iat = (0..d).map(|j| iat_series(&trace.column_from(j, start)).iat).fold(0.0, f64::max);
    Ok(SweepRow {
        model: spec.model.to_string(),
        n,
        d,
        replicate: r,
        seed,
        iat,
        ess: kept / iat,
        ns_per_iter: if spec.record_timing { trace.ns_per_iter } else { 0.0 },
        slope_context: (n * d) as f64,
    })
}

fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fits `log y = a + b·log x` by OLS; the interval is the 2.5%/97.5%
/// percentile of `bootstrap` pairs resamples.
pub fn fit_loglog_slope(x: &[f64], y: &[f64], bootstrap: usize, seed: u64) -> Result<SlopeFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::param("slope fit needs at least three (x, y) pairs of equal length"));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::param("log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = ols(&lx, &ly).ok_or_else(|| Error::param("all x values are equal"))?;
    let mut rng = seeded_rng(seed);
    let k = lx.len();
    let mut slopes = Vec::with_capacity(bootstrap);
    let (mut bx, mut by) = (vec![0.0; k], vec![0.0; k]);
    for _ in 0..bootstrap {
        for i in 0..k {
            let j = rand::Rng::random_range(&mut rng, 0..k);
            bx[i] = lx[j];
            by[i] = ly[j];
        }
        if let Some((s, _)) = ols(&bx, &by) {
            slopes.push(s);
        }
    }
    let (ci_lo, ci_hi) = if slopes.is_empty() {
        (slope, slope)
    } else {
        slopes.sort_by(f64::total_cmp);
        let q = |p: f64| slopes[((p * slopes.len() as f64).floor() as usize).min(slopes.len() - 1)];
        (q(0.025), q(0.975))
    };
    Ok(SlopeFit { slope, intercept, ci_lo, ci_hi, points: k })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::param("spearman needs two equal-length series of length >= 2"));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let k = x.len() as f64;
    let m = (k + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m).powi(2);
        syy += (b - m).powi(2);
    }
    Ok(sxy / (sxx * syy).sqrt())
}
