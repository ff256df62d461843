use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::models::{lasso_log_posterior, Dataset, GaussianPrior, Glm, GlmPosterior, LassoPrior, LogDensity, ModelKind};
use crate::{Error, Result};

/// One axis of a tensor-product grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDim {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl GridDim {
    fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.nodes).map(|i| self.lo + i as f64 * h).collect()
    }

    fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }

    /// Node index of `x` if it sits on a node with an even number of
    /// intervals on both sides.
    fn even_split(&self, x: f64) -> Option<usize> {
        let t = (x - self.lo) / self.step();
        let k = t.round();
        if (t - k).abs() > 1e-9 || k < 0.0 || k > (self.nodes - 1) as f64 {
            return None;
        }
        let k = k as usize;
        (k % 2 == 0 && (self.nodes - 1 - k) % 2 == 0).then_some(k)
    }

    /// Quadrature weights: trapezoid, or composite Simpson on both sides of
    /// `kink` when [`GridDim::even_split`] allows it.
    fn weights(&self, kink: Option<f64>) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.nodes];
        match kink.and_then(|x| self.even_split(x)) {
            Some(k) => {
                for (lo, hi) in [(0, k), (k, self.nodes - 1)] {
                    if lo == hi {
                        continue;
                    }
                    for (i, wi) in w.iter_mut().enumerate().take(hi + 1).skip(lo) {
                        let j = i - lo;
                        let interior = if j % 2 == 1 { 4.0 } else { 2.0 };
                        *wi = h / 3.0 * if i == lo || i == hi { 1.0 } else { interior };
                    }
                }
                // The split node collects one end weight from each side.
                if k != 0 && k != self.nodes - 1 {
                    w[k] = 2.0 * h / 3.0;
                }
            }
            None => {
                w[0] *= 0.5;
                w[self.nodes - 1] *= 0.5;
            }
        }
        w
    }

    /// Moves the axis so that `x` is a node with an even number of intervals
    /// on each side, keeping the spacing. Adds a node if needed.
    fn align_to(self, x: f64) -> GridDim {
        if !(self.lo < x && x < self.hi) {
            return self;
        }
        let nodes = if (self.nodes - 1) % 2 == 0 { self.nodes } else { self.nodes + 1 };
        let h = self.step();
        let k = (2.0 * ((x - self.lo) / h / 2.0).round()).clamp(0.0, (nodes - 1) as f64);
        let lo = x - k * h;
        GridDim { lo, hi: lo + (nodes - 1) as f64 * h, nodes }
    }
}

/// Tensor-product grid; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: Vec<GridDim>,
}

impl GridSpec {
    pub fn new(dims: Vec<GridDim>) -> Self {
        Self { dims }
    }

    /// Halves the spacing on every axis, keeping the old nodes.
    pub fn refined(&self) -> GridSpec {
        GridSpec { dims: self.dims.iter().map(|g| GridDim { nodes: 2 * g.nodes - 1, ..*g }).collect() }
    }

    fn total(&self) -> usize {
        self.dims.iter().map(|g| g.nodes).product()
    }
}

/// Prior matching a [`ModelKind`].
#[derive(Debug, Clone, Copy)]
pub enum ModelPrior<'a> {
    Gaussian(&'a GaussianPrior),
    Lasso(&'a LassoPrior),
}

/// How grid coordinates map to the reported variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mapping {
    Identity,
    /// The last coordinate is `log v`; report `v`.
    ExpLast,
}

/// Normalised posterior weights on a grid, with the first two moments of the
/// reported variables.
#[derive(Debug, Clone)]
pub struct QuadratureOracle {
    pub grid: GridSpec,
    pub labels: Vec<String>,
    /// Mean of the reported variables.
    pub mean: DVector<f64>,
    /// Covariance of the reported variables.
    pub cov: DMatrix<f64>,
    /// Mean and standard deviation of the raw grid coordinates.
    pub grid_mean: Vec<f64>,
    pub grid_sd: Vec<f64>,
    /// `log ∫ exp(log f)` over the grid coordinates.
    pub log_normalizer: f64,
    axes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    mapping: Mapping,
}

impl QuadratureOracle {
    /// Oracle for an arbitrary log-density on the grid coordinates.
    pub fn from_log_density<F: Fn(&[f64]) -> f64>(grid: GridSpec, labels: Vec<String>, log_f: F) -> Result<Self> {
        Self::build(grid, labels, Mapping::Identity, &[], log_f)
    }

    /// `kinks[a]` marks a point where the density on axis `a` is not smooth.
    fn build<F: Fn(&[f64]) -> f64>(
        grid: GridSpec,
        labels: Vec<String>,
        mapping: Mapping,
        kinks: &[Option<f64>],
        log_f: F,
    ) -> Result<Self> {
        let k = grid.dims.len();
        if k == 0 || labels.len() != k {
            return Err(Error::param(format!("grid has {k} axes but {} labels", labels.len())));
        }
        if grid.dims.iter().any(|g| g.nodes < 3 || !(g.hi > g.lo)) {
            return Err(Error::param("every grid axis needs lo < hi and at least 3 nodes"));
        }
        let axes: Vec<Vec<f64>> = grid.dims.iter().map(GridDim::points).collect();
        let axis_lw: Vec<Vec<f64>> = grid
            .dims
            .iter()
            .enumerate()
            .map(|(a, g)| g.weights(kinks.get(a).copied().flatten()).iter().map(|w| w.ln()).collect())
            .collect();
        let total = grid.total();
        let mut logw = Vec::with_capacity(total);
        let mut idx = vec![0usize; k];
        let mut point = vec![0.0; k];
        for _ in 0..total {
            let mut lw = 0.0;
            for a in 0..k {
                point[a] = axes[a][idx[a]];
                lw += axis_lw[a][idx[a]];
            }
            let lf = log_f(&point);
            logw.push(if lf.is_nan() { f64::NEG_INFINITY } else { lf + lw });
            advance(&mut idx, &grid);
        }
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Domain("log-density is -inf or NaN on the whole grid".into()));
        }
        let mut weights: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= z);

        let mut o = Self {
            grid,
            labels,
            mean: DVector::zeros(k),
            cov: DMatrix::zeros(k, k),
            grid_mean: vec![0.0; k],
            grid_sd: vec![0.0; k],
            log_normalizer: top + z.ln(),
            axes,
            weights,
            mapping,
        };
        o.compute_moments();
        Ok(o)
    }

    fn compute_moments(&mut self) {
        let k = self.axes.len();
        let mut s1 = DVector::zeros(k);
        let mut s2 = DMatrix::zeros(k, k);
        let mut g1 = vec![0.0; k];
        let mut g2 = vec![0.0; k];
        let mut idx = vec![0usize; k];
        let mut point = vec![0.0; k];
        for &w in &self.weights {
            for a in 0..k {
                point[a] = self.axes[a][idx[a]];
                g1[a] += w * point[a];
                g2[a] += w * point[a] * point[a];
            }
            let y = self.map(&point);
            s1 += &y * w;
            s2 += &y * y.transpose() * w;
            advance(&mut idx, &self.grid);
        }
        self.cov = s2 - &s1 * s1.transpose();
        self.mean = s1;
        for a in 0..k {
            self.grid_mean[a] = g1[a];
            self.grid_sd[a] = (g2[a] - g1[a] * g1[a]).max(0.0).sqrt();
        }
    }

    fn map(&self, point: &[f64]) -> DVector<f64> {
        let mut y = DVector::from_column_slice(point);
        if self.mapping == Mapping::ExpLast {
            let l = y.len() - 1;
            y[l] = y[l].exp();
        }
        y
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total weight; 1 up to rounding.
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Variances of the reported variables.
    pub fn variances(&self) -> DVector<f64> {
        self.cov.diagonal()
    }

    /// Marginal weights along grid axis `axis`.
    pub fn marginal(&self, axis: usize) -> (Vec<f64>, Vec<f64>) {
        let mut p = vec![0.0; self.grid.dims[axis].nodes];
        let mut idx = vec![0usize; self.axes.len()];
        for &w in &self.weights {
            p[idx[axis]] += w;
            advance(&mut idx, &self.grid);
        }
        (self.axes[axis].clone(), p)
    }

    /// Marginal cdf along grid axis `axis`, piecewise linear through the
    /// cumulative weights at cell midpoints.
    pub fn marginal_cdf(&self, axis: usize) -> impl Fn(f64) -> f64 {
        let (x, p) = self.marginal(axis);
        let mut knots = vec![(x[0], 0.0)];
        let mut acc = 0.0;
        for i in 0..x.len() - 1 {
            acc += p[i];
            knots.push((0.5 * (x[i] + x[i + 1]), acc));
        }
        knots.push((x[x.len() - 1], 1.0));
        move |t: f64| {
            if t <= knots[0].0 {
                return 0.0;
            }
            let j = knots.partition_point(|k| k.0 < t);
            if j >= knots.len() {
                return 1.0;
            }
            let (x0, f0) = knots[j - 1];
            let (x1, f1) = knots[j];
            f0 + (f1 - f0) * (t - x0) / (x1 - x0)
        }
    }

    /// Draws a grid node with probability equal to its weight, reported in
    /// the oracle's variables.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut flat = self.weights.len() - 1;
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                flat = i;
                break;
            }
        }
        let k = self.axes.len();
        let mut point = vec![0.0; k];
        let mut rem = flat;
        for a in (0..k).rev() {
            let m = self.grid.dims[a].nodes;
            point[a] = self.axes[a][rem % m];
            rem /= m;
        }
        self.map(&point).iter().copied().collect()
    }
}

fn advance(idx: &mut [usize], grid: &GridSpec) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < grid.dims[a].nodes {
            return;
        }
        idx[a] = 0;
    }
}

/// Reference posterior on a grid. Probit/logit grids cover `β`; lasso grids
/// cover `(β, log v)` and report `(β, v)`.
pub fn quadrature_posterior(model: ModelKind, data: &Dataset, prior: ModelPrior<'_>, grid: &GridSpec) -> Result<QuadratureOracle> {
    let d = data.d();
    let mut labels: Vec<String> = (1..=d).map(|j| format!("beta_{j}")).collect();
    match (model, prior) {
        (ModelKind::Probit | ModelKind::Logit, ModelPrior::Gaussian(p)) => {
            if grid.dims.len() != d {
                return Err(Error::param(format!("grid has {} axes, expected d = {d}", grid.dims.len())));
            }
            let glm = Glm::try_from(model)?;
            let post = GlmPosterior::new(glm, data, p)?;
            QuadratureOracle::build(grid.clone(), labels, Mapping::Identity, &[], |x| {
                post.log_density(&DVector::from_column_slice(x))
            })
        }
        (ModelKind::Lasso, ModelPrior::Lasso(p)) => {
            if grid.dims.len() != d + 1 {
                return Err(Error::param(format!("lasso grid has {} axes, expected d + 1 = {}", grid.dims.len(), d + 1)));
            }
            labels.push("v".into());
            let p = *p;
            // |β_j| makes the density kinked at β_j = 0.
            let mut kinks = vec![Some(0.0); d];
            kinks.push(None);
            QuadratureOracle::build(grid.clone(), labels, Mapping::ExpLast, &kinks, |x| {
                let beta = DVector::from_column_slice(&x[..d]);
                let u = x[d];
                lasso_log_posterior(&beta, u.exp(), data, &p).unwrap_or(f64::NEG_INFINITY) + u
            })
        }
        _ => Err(Error::param(format!("prior does not match model {model}"))),
    }
}

/// Picks grid bounds by successive pilot grids, ending at the grid mean
/// ± `width` standard deviations with `nodes` points per axis. Lasso `β`
/// axes are shifted to put a node at 0 (one node may be added).
pub fn auto_grid(model: ModelKind, data: &Dataset, prior: ModelPrior<'_>, nodes: usize, width: f64) -> Result<GridSpec> {
    let d = data.d();
    let mut dims = vec![GridDim { lo: -40.0, hi: 40.0, nodes: 161 }; d];
    if model == ModelKind::Lasso {
        dims.push(GridDim { lo: -25.0, hi: 25.0, nodes: 161 });
    }
    let mut grid = GridSpec::new(dims);
    for round in 0..4 {
        let o = quadrature_posterior(model, data, prior, &grid)?;
        let last = round == 3;
        grid = GridSpec::new(
            o.grid_mean
                .iter()
                .zip(&o.grid_sd)
                .map(|(&m, &s)| {
                    let s = s.max(1e-8);
                    GridDim { lo: m - width * s, hi: m + width * s, nodes: if last { nodes } else { 161 } }
                })
                .collect(),
        );
    }
    if model == ModelKind::Lasso {
        for g in grid.dims.iter_mut().take(d) {
            *g = g.align_to(0.0);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_log_density_recovers_moments() {
        let grid = GridSpec::new(vec![GridDim { lo: -19.0, hi: 21.0, nodes: 401 }]);
        let o = QuadratureOracle::from_log_density(grid, vec!["x".into()], |x| -0.5 * (x[0] - 1.0).powi(2) / 4.0).unwrap();
        assert!((o.mean[0] - 1.0).abs() < 1e-10);
        assert!((o.cov[(0, 0)] - 4.0).abs() < 1e-9);
        assert!((o.weight_sum() - 1.0).abs() < 1e-12);
        let cdf = o.marginal_cdf(0);
        assert!((cdf(1.0) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn kinked_axis_uses_split_simpson() {
        let g = GridDim { lo: -13.0, hi: 15.0, nodes: 5 }.align_to(0.0);
        assert_eq!(g.even_split(0.0), Some(2));
        let w: f64 = g.weights(Some(0.0)).iter().zip(g.points()).map(|(w, x)| w * x.abs()).sum();
        let exact = (g.lo * g.lo + g.hi * g.hi) / 2.0;
        assert!((w - exact).abs() < 1e-12);
        let dim = GridDim { lo: -20.0, hi: 20.0, nodes: 401 };
        let int = |k| dim.weights(k).iter().zip(dim.points()).map(|(w, x)| w * (-x.abs()).exp()).sum::<f64>();
        assert!((int(Some(0.0)) - 2.0).abs() < 1e-5);
        assert!((int(None) - 2.0).abs() > 1e-4);
    }
}
