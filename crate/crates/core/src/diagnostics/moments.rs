use super::{iat_series, QuadratureOracle, Trace};
use crate::{Error, Result};

/// Fraction of iterations discarded as burn-in by default.
pub const DEFAULT_BURN_IN: f64 = 0.2;
/// Largest accepted |z| in a moment comparison.
pub const MOMENT_Z_MAX: f64 = 4.0;

/// Per-column z-scores of trace moments against a quadrature oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub pass: bool,
    pub labels: Vec<String>,
    pub z_mean: Vec<f64>,
    pub z_var: Vec<f64>,
    pub kept: usize,
}

fn z(est: f64, target: f64, se: f64) -> f64 {
    if se > 0.0 {
        (est - target) / se
    } else if est == target {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Compares post-burn-in means and variances with the oracle, using
/// IAT-corrected standard errors. Passes iff every |z| ≤ 4.
pub fn moment_check(trace: &Trace, oracle: &QuadratureOracle, burn_in_frac: f64) -> Result<MomentReport> {
    if trace.cols() != oracle.dim() {
        return Err(Error::param(format!("trace has {} columns, oracle {}", trace.cols(), oracle.dim())));
    }
    if !(0.0..1.0).contains(&burn_in_frac) {
        return Err(Error::param(format!("burn-in fraction {burn_in_frac} must lie in [0, 1)")));
    }
    let start = (trace.len() as f64 * burn_in_frac).floor() as usize;
    let kept = trace.len() - start;
    if kept < 2 {
        return Err(Error::param("too few samples after burn-in"));
    }
    let nk = kept as f64;
    let var = oracle.variances();
    let (mut z_mean, mut z_var) = (Vec::new(), Vec::new());
    for j in 0..trace.cols() {
        let x = trace.column_from(j, start);
        let mu = oracle.mean[j];
        let m = x.iter().sum::<f64>() / nk;
        let s2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (nk - 1.0);
        let tau = iat_series(&x).iat;
        z_mean.push(z(m, mu, (s2 * tau / nk).sqrt()));

        let w: Vec<f64> = x.iter().map(|v| (v - mu).powi(2)).collect();
        let wm = w.iter().sum::<f64>() / nk;
        let ws2 = w.iter().map(|v| (v - wm).powi(2)).sum::<f64>() / (nk - 1.0);
        let wtau = iat_series(&w).iat;
        z_var.push(z(wm, var[j], (ws2 * wtau / nk).sqrt()));
    }
    let pass = z_mean.iter().chain(&z_var).all(|v| v.abs() <= MOMENT_Z_MAX);
    Ok(MomentReport { pass, labels: oracle.labels.clone(), z_mean, z_var, kept })
}
