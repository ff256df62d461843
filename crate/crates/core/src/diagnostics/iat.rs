use super::Trace;

/// Integrated autocorrelation time of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IatEstimate {
    pub iat: f64,
    /// Set when the series has no variance; `iat` then equals its length.
    pub degenerate: bool,
}

/// Geyer's initial-positive-sequence estimate `τ = −1 + 2Σ_m Γ_m`, with
/// `Γ_m = ρ_{2m} + ρ_{2m+1}` summed while positive. Floored at ½.
pub fn iat_series(x: &[f64]) -> IatEstimate {
    let n = x.len();
    if n < 2 {
        return IatEstimate { iat: n.max(1) as f64, degenerate: true };
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let acov = |k: usize| c[..n - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let g0 = acov(0);
    let scale = mean.abs().max(1.0);
    if !(g0 > (f64::EPSILON * scale).powi(2)) {
        return IatEstimate { iat: n as f64, degenerate: true };
    }
    let mut sum = 0.0;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = (acov(2 * m) + acov(2 * m + 1)) / g0;
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        m += 1;
    }
    IatEstimate { iat: (2.0 * sum - 1.0).max(0.5), degenerate: false }
}

/// IAT of one trace column.
pub fn iat(trace: &Trace, column: usize) -> IatEstimate {
    iat_series(&trace.column(column))
}

/// Effective sample size: iterations over the worst column IAT.
pub fn ess(trace: &Trace) -> f64 {
    let worst = (0..trace.cols()).map(|j| iat(trace, j).iat).fold(0.0, f64::max);
    if worst == 0.0 {
        return 0.0;
    }
    trace.len() as f64 / worst
}
