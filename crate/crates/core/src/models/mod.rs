//! Datasets, priors, the three posteriors with their derivatives, the
//! log-concavity constants, and the lasso change of variables.

mod lasso;
mod logit;
mod probit;
mod smoothness;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky, lambda_max_sym, lambda_min_sym};
use crate::{Error, Result};

pub use lasso::{
    lasso_log_posterior, lasso_feasible_start_log_density, lasso_transform, lasso_transform_inv,
    lasso_transform_log_abs_det_inv, lasso_transformed_log_target, lasso_warmness_exponent,
    lasso_warmness_parts, TransformedState, WarmnessParts,
};
pub(crate) use lasso::lasso_ridge;
pub use logit::{logit_grad_hess, logit_log_posterior};
pub use probit::{probit_grad_hess, probit_log_posterior};
pub use smoothness::{smoothness_report, SmoothnessReport};

pub use crate::special::q_mills;

/// Tolerance for the centred-columns requirement of lasso designs.
pub const CENTERING_TOL: f64 = 1e-10;

/// Which posterior a component works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Probit,
    Logit,
    Lasso,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Probit => "probit",
            ModelKind::Logit => "logit",
            ModelKind::Lasso => "lasso",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probit" => Ok(ModelKind::Probit),
            "logit" => Ok(ModelKind::Logit),
            "lasso" => Ok(ModelKind::Lasso),
            other => Err(Error::param(format!("unknown model '{other}'"))),
        }
    }
}

/// Binary-response regression models with a Gaussian prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Glm {
    Probit,
    Logit,
}

impl From<Glm> for ModelKind {
    fn from(g: Glm) -> ModelKind {
        match g {
            Glm::Probit => ModelKind::Probit,
            Glm::Logit => ModelKind::Logit,
        }
    }
}

impl fmt::Display for Glm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ModelKind::from(*self).fmt(f)
    }
}

impl TryFrom<ModelKind> for Glm {
    type Error = Error;
    fn try_from(m: ModelKind) -> Result<Glm> {
        match m {
            ModelKind::Probit => Ok(Glm::Probit),
            ModelKind::Logit => Ok(Glm::Logit),
            ModelKind::Lasso => Err(Error::param("lasso is not a Gaussian-prior GLM")),
        }
    }
}

/// Design matrix `x` (n×d), response `y` and an optional declared entry bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Declared bound on `|x_ij|`; checked at construction.
    pub m: Option<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, m: Option<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::data(format!("{} design rows but {} responses", x.nrows(), y.len())));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::data("non-finite entry"));
        }
        if let Some(m) = m {
            if !(m >= 0.0) {
                return Err(Error::data(format!("entry bound M = {m} must be nonnegative")));
            }
            if let Some((k, v)) = x.iter().enumerate().find(|(_, v)| v.abs() > m) {
                let (i, j) = (k % x.nrows(), k / x.nrows());
                return Err(Error::data(format!("|x[{i}][{j}]| = {} exceeds M = {m}", v.abs())));
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Declared entry bound, or the observed maximum when none was declared.
    pub fn entry_bound(&self) -> f64 {
        self.m.unwrap_or_else(|| self.x.iter().fold(0.0, |a, v| a.max(v.abs())))
    }

    pub fn check_binary(&self) -> Result<()> {
        match self.y.iter().position(|&v| v != 0.0 && v != 1.0) {
            Some(i) => Err(Error::data(format!("y[{i}] = {} is not binary", self.y[i]))),
            None => Ok(()),
        }
    }

    pub fn check_centered(&self) -> Result<()> {
        let n = self.n().max(1) as f64;
        for (j, col) in self.x.column_iter().enumerate() {
            let mean = col.sum() / n;
            if mean.abs() > CENTERING_TOL {
                return Err(Error::data(format!("column {j} has mean {mean}, expected centred columns")));
            }
        }
        Ok(())
    }

    /// `ỹ = y − ȳ1`.
    pub fn centered_response(&self) -> DVector<f64> {
        if self.n() == 0 {
            return self.y.clone();
        }
        let mean = self.y.mean();
        self.y.map(|v| v - mean)
    }
}

/// Gaussian prior `N(b, B)` with spectral bounds `b0·I ⪯ B ⪯ b1·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPrior {
    pub b: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub b0: f64,
    pub b1: f64,
    precision: DMatrix<f64>,
}

impl GaussianPrior {
    /// Takes `b0`, `b1` as the extreme eigenvalues of `cov`.
    pub fn new(b: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let lo = lambda_min_sym(&cov);
        let hi = lambda_max_sym(&cov);
        Self::with_bounds(b, cov, lo, hi)
    }

    /// Validates that the eigenvalues of `cov` lie in `[b0, b1]`.
    pub fn with_bounds(b: DVector<f64>, cov: DMatrix<f64>, b0: f64, b1: f64) -> Result<Self> {
        let d = b.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::param(format!("prior mean has length {d} but covariance is {}x{}", cov.nrows(), cov.ncols())));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::NotSpd("prior covariance is not symmetric".into()));
        }
        if !(b0 > 0.0 && b0 <= b1) {
            return Err(Error::param(format!("need 0 < b0 <= b1, got b0 = {b0}, b1 = {b1}")));
        }
        let lo = lambda_min_sym(&cov);
        let hi = lambda_max_sym(&cov);
        let slack = 1e-10 * hi.abs().max(1.0);
        if d > 0 && (lo < b0 - slack || hi > b1 + slack) {
            return Err(Error::param(format!("prior eigenvalues [{lo}, {hi}] outside [{b0}, {b1}]")));
        }
        let precision = cholesky(cov.clone(), "prior covariance")?.inverse();
        let precision = 0.5 * (&precision + precision.transpose());
        Ok(Self { b, cov, b0, b1, precision })
    }

    /// `N(0, s·I)`.
    pub fn isotropic(d: usize, s: f64) -> Result<Self> {
        Self::with_bounds(DVector::zeros(d), DMatrix::identity(d, d) * s, s, s)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `B⁻¹`.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// `−½(β − b)ᵀB⁻¹(β − b)`.
    pub fn log_kernel(&self, beta: &DVector<f64>) -> f64 {
        let r = beta - &self.b;
        -0.5 * r.dot(&(&self.precision * &r))
    }
}

/// Lasso prior: Laplace slab scale `lambda`, inverse-gamma variance prior
/// with shape `alpha` and scale `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoPrior {
    pub lambda: f64,
    pub alpha: f64,
    pub xi: f64,
}

impl LassoPrior {
    pub fn new(lambda: f64, alpha: f64, xi: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(alpha > 0.0) || !(xi >= 0.0) {
            return Err(Error::param(format!("lasso prior lambda = {lambda}, alpha = {alpha}, xi = {xi}")));
        }
        Ok(Self { lambda, alpha, xi })
    }

    /// Proper variance prior and `n ≥ 2 − 2α`: the regime the lasso mixing
    /// bound covers.
    pub fn in_bound_regime(&self, n: usize) -> bool {
        self.xi > 0.0 && n as f64 >= 2.0 - 2.0 * self.alpha
    }
}

/// A differentiable log-density, as consumed by the Langevin baselines.
pub trait LogDensity {
    fn dim(&self) -> usize;
    fn log_density(&self, x: &DVector<f64>) -> f64;
    fn grad_log_density(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// Probit or logit posterior bundled as a [`LogDensity`].
#[derive(Debug, Clone, Copy)]
pub struct GlmPosterior<'a> {
    pub glm: Glm,
    pub data: &'a Dataset,
    pub prior: &'a GaussianPrior,
}

impl<'a> GlmPosterior<'a> {
    pub fn new(glm: Glm, data: &'a Dataset, prior: &'a GaussianPrior) -> Result<Self> {
        data.check_binary()?;
        if prior.dim() != data.d() {
            return Err(Error::param(format!("prior dimension {} but data has d = {}", prior.dim(), data.d())));
        }
        Ok(Self { glm, data, prior })
    }

    /// Gradient and Hessian of the potential `f = −log π`.
    pub fn grad_hess(&self, beta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        match self.glm {
            Glm::Probit => probit::grad_hess_unchecked(beta, self.data, self.prior),
            Glm::Logit => logit::grad_hess_unchecked(beta, self.data, self.prior),
        }
    }

    /// Gradient of the potential `f = −log π`.
    pub fn grad_potential(&self, beta: &DVector<f64>) -> DVector<f64> {
        match self.glm {
            Glm::Probit => probit::grad_unchecked(beta, self.data, self.prior),
            Glm::Logit => logit::grad_unchecked(beta, self.data, self.prior),
        }
    }
}

impl LogDensity for GlmPosterior<'_> {
    fn dim(&self) -> usize {
        self.data.d()
    }

    fn log_density(&self, beta: &DVector<f64>) -> f64 {
        match self.glm {
            Glm::Probit => probit::log_posterior_unchecked(beta, self.data, self.prior),
            Glm::Logit => logit::log_posterior_unchecked(beta, self.data, self.prior),
        }
    }

    fn grad_log_density(&self, beta: &DVector<f64>) -> DVector<f64> {
        -self.grad_potential(beta)
    }
}

/// `Xᵀ diag(w) X`.
pub(crate) fn weighted_gram(x: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut xs = x.clone();
    for (mut row, &wi) in xs.row_iter_mut().zip(w.iter()) {
        row *= wi.max(0.0).sqrt();
    }
    xs.tr_mul(&xs)
}
