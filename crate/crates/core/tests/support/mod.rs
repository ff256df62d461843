//! Independent numerical oracles shared by the integration tests. Nothing
//! here calls into the crate's numerics.
#![allow(dead_code)]

use statrs::function::erf::erfc;

pub fn phi_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Composite Simpson rule with `2m` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Normalised weights of a log-density on a tensor grid (trapezoid rule),
/// returned with the node coordinates.
pub struct Grid {
    pub nodes: Vec<Vec<f64>>,
    pub w: Vec<f64>,
}

pub fn grid_weights<F: Fn(&[f64]) -> f64>(axes: &[(f64, f64, usize)], log_f: F) -> Grid {
    let pts: Vec<Vec<f64>> =
        axes.iter().map(|&(lo, hi, k)| (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()).collect();
    let mut nodes = Vec::new();
    let mut lw = Vec::new();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let x: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| pts[a][i]).collect();
        let edge: f64 = idx.iter().enumerate().map(|(a, &i)| if i == 0 || i == axes[a].2 - 1 { 0.5f64.ln() } else { 0.0 }).sum();
        lw.push(log_f(&x) + edge);
        nodes.push(x);
        let mut a = axes.len();
        loop {
            if a == 0 {
                let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut w: Vec<f64> = lw.iter().map(|l| (l - top).exp()).collect();
                let z: f64 = w.iter().sum();
                w.iter_mut().for_each(|v| *v /= z);
                return Grid { nodes, w };
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < axes[a].2 {
                break;
            }
            idx[a] = 0;
        }
    }
}

impl Grid {
    /// Mean and variance of `g(node)` under the weights.
    pub fn moments<G: Fn(&[f64]) -> f64>(&self, g: G) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (x, &w) in self.nodes.iter().zip(&self.w) {
            let v = g(x);
            m1 += w * v;
            m2 += w * v * v;
        }
        (m1, m2 - m1 * m1)
    }

    /// Weighted empirical cdf of `g(node)`, as sorted (value, cumulative) pairs.
    pub fn cdf_table<G: Fn(&[f64]) -> f64>(&self, g: G) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self.nodes.iter().zip(&self.w).map(|(x, &w)| (g(x), w)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        for p in v.iter_mut() {
            acc += p.1;
            p.1 = acc;
        }
        v
    }
}

/// Piecewise-linear interpolation in a cdf table.
pub fn cdf_eval(table: &[(f64, f64)], x: f64) -> f64 {
    let j = table.partition_point(|p| p.0 < x);
    if j == 0 {
        return 0.0;
    }
    if j == table.len() {
        return 1.0;
    }
    let (x0, f0) = table[j - 1];
    let (x1, f1) = table[j];
    if x1 == x0 {
        f1
    } else {
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }
}

/// Kolmogorov–Smirnov distance between a sample and a cdf.
pub fn ks_stat<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Inverse-Gaussian density, from its textbook form.
pub fn ig_pdf(mu: f64, shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (shape / (2.0 * std::f64::consts::PI * x.powi(3))).sqrt() * (-shape * (x - mu).powi(2) / (2.0 * mu * mu * x)).exp()
}

/// Lévy density, the `μ → ∞` limit of `IG(μ, shape)`.
pub fn levy_pdf(shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (shape / (2.0 * std::f64::consts::PI * x.powi(3))).sqrt() * (-shape / (2.0 * x)).exp()
}

/// `½∫|p − q|` over `(0, ∞)` via `x = e^t`, `t ∈ [−60, 60]`.
pub fn tv_positive<P: Fn(f64) -> f64, Q: Fn(f64) -> f64>(p: P, q: Q) -> f64 {
    0.5 * simpson(|t| { let x = t.exp(); (p(x) - q(x)).abs() * x }, -60.0, 60.0, 120_000)
}

impl Grid {
    /// Marginal cdf along `axis` through the midpoint-cumulative weights:
    /// `F(x_i) = Σ_{j<i} w_j + w_i/2`, linear in between. Pass `map` to
    /// report a monotone function of the axis coordinate.
    pub fn marginal_cdf<M: Fn(f64) -> f64>(&self, axis: usize, map: M) -> Vec<(f64, f64)> {
        let mut acc: std::collections::BTreeMap<u64, (f64, f64)> = std::collections::BTreeMap::new();
        for (x, &w) in self.nodes.iter().zip(&self.w) {
            let key = x[axis].to_bits() ^ (1 << 63);
            let e = acc.entry(key).or_insert((x[axis], 0.0));
            e.1 += w;
        }
        let mut nodes: Vec<(f64, f64)> = acc.into_values().collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = 0.0;
        nodes
            .into_iter()
            .map(|(x, w)| {
                let f = cum + 0.5 * w;
                cum += w;
                (map(x), f)
            })
            .collect()
    }
}

/// `PG(1, c)` density: exponential tilt of the `PG(1, 0)` law, whose density
/// is `4·f_J(4x)` for the Jacobi-type law `J*` written as either of its two
/// alternating series.
pub fn pg_pdf(c: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = 4.0 * x;
    let pi = std::f64::consts::PI;
    let mut s = 0.0;
    if y < 1.0 {
        for n in 0..200 {
            let k = 2.0 * n as f64 + 1.0;
            let t = k * (2.0 / (pi * y.powi(3))).sqrt() * (-k * k / (2.0 * y)).exp();
            s += if n % 2 == 0 { t } else { -t };
        }
    } else {
        for n in 0..200 {
            let k = n as f64 + 0.5;
            let t = pi * k * (-k * k * pi * pi * y / 2.0).exp();
            s += if n % 2 == 0 { t } else { -t };
        }
    }
    (0.5 * c).cosh() * (-0.5 * c * c * x).exp() * 4.0 * s
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
