//! Synthetic datasets under the bounded, sub-Gaussian, log-concave and
//! imbalanced regimes, and empirical matrix-concentration checks.

mod concentration;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky, lambda_max_sym};
use crate::models::{Dataset, ModelKind};
use crate::special::logistic;
use crate::{Error, Result};

pub use concentration::{
    calibrate_concentration_c, concentration_scale, matrix_concentration_check, ConcentrationRow,
};

/// Covariate law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataRegime {
    /// iid uniform entries on `[−M, M]`.
    Bounded,
    /// Gaussian rows `Σ^{1/2} g`.
    Subgaussian,
    /// Rows `Σ^{1/2} ℓ` with `ℓ` product Laplace of unit variance.
    Logconcave,
    /// `d = 1`, `X = 1`, `y ≡ 1`.
    Imbalanced,
}

/// Row covariance for the sub-Gaussian and log-concave regimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Covariance {
    Identity,
    Diagonal(Vec<f64>),
    /// Row-major full matrix.
    Full(Vec<Vec<f64>>),
}

/// Coefficients used to draw responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueBeta {
    Zero,
    Fixed(Vec<f64>),
    /// iid `N(0, scale²/d)` entries.
    Gaussian { scale: f64 },
    /// `max(1, ⌊fraction·d⌉)` entries of `±scale`, the rest zero.
    Sparse { fraction: f64, scale: f64 },
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub regime: DataRegime,
    pub n: usize,
    pub d: usize,
    /// Entry bound (bounded regime).
    #[serde(default = "one")]
    pub m: f64,
    /// Sub-Gaussian scale, echoed into bounds.
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "identity")]
    pub covariance: Covariance,
    /// Declared bound on `‖Σ‖`; defaults to the exact value.
    #[serde(default)]
    pub s: Option<f64>,
    /// Response model.
    pub response: ModelKind,
    pub beta: TrueBeta,
    /// Noise standard deviation of the lasso linear model.
    #[serde(default = "one")]
    pub noise_sd: f64,
}

fn one() -> f64 {
    1.0
}

fn identity() -> Covariance {
    Covariance::Identity
}

/// A dataset and the coefficients that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub data: Dataset,
    pub beta: DVector<f64>,
}

impl GeneratorSpec {
    /// Bounded iid design with Gaussian true coefficients of norm about `beta_scale`.
    pub fn bounded(n: usize, d: usize, m: f64, response: ModelKind, beta_scale: f64) -> Self {
        Self {
            regime: DataRegime::Bounded,
            n,
            d,
            m,
            k: 1.0,
            covariance: Covariance::Identity,
            s: None,
            response,
            beta: TrueBeta::Gaussian { scale: beta_scale },
            noise_sd: 1.0,
        }
    }

    /// The `d = 1`, `X = 1`, `y ≡ 1` design.
    pub fn imbalanced(n: usize) -> Self {
        Self { regime: DataRegime::Imbalanced, d: 1, beta: TrueBeta::Zero, ..Self::bounded(n, 1, 1.0, ModelKind::Probit, 0.0) }
    }

    /// Row covariance as a matrix (`M²/3·I` in the bounded regime).
    pub fn sigma(&self) -> Result<DMatrix<f64>> {
        let d = self.d;
        match self.regime {
            DataRegime::Bounded => Ok(DMatrix::identity(d, d) * (self.m * self.m / 3.0)),
            DataRegime::Imbalanced => Ok(DMatrix::from_element(1, 1, 1.0)),
            DataRegime::Subgaussian | DataRegime::Logconcave => match &self.covariance {
                Covariance::Identity => Ok(DMatrix::identity(d, d)),
                Covariance::Diagonal(v) => {
                    if v.len() != d {
                        return Err(Error::param(format!("diagonal covariance has {} entries for d = {d}", v.len())));
                    }
                    Ok(DMatrix::from_diagonal(&DVector::from_column_slice(v)))
                }
                Covariance::Full(rows) => {
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(Error::param(format!("full covariance must be {d}x{d}")));
                    }
                    let s = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
                    if (&s - s.transpose()).amax() > 1e-12 * s.amax().max(1.0) {
                        return Err(Error::param("covariance is not symmetric"));
                    }
                    Ok(s)
                }
            },
        }
    }

    /// `‖Σ‖`, or the declared bound `S` when given.
    pub fn sigma_norm_bound(&self) -> Result<f64> {
        let exact = lambda_max_sym(&self.sigma()?);
        match self.s {
            Some(s) if s + 1e-12 * s.abs().max(1.0) < exact => {
                Err(Error::param(format!("declared S = {s} is below ||Sigma|| = {exact}")))
            }
            Some(s) => Ok(s),
            None => Ok(exact),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::param("generator needs n >= 1 and d >= 1"));
        }
        match self.regime {
            DataRegime::Bounded if !(self.m > 0.0 && self.m.is_finite()) => {
                return Err(Error::param(format!("bounded regime needs finite M > 0, got {}", self.m)));
            }
            DataRegime::Subgaussian if !(self.k >= 1.0) => {
                return Err(Error::param(format!("sub-Gaussian scale K = {} must be >= 1", self.k)));
            }
            DataRegime::Imbalanced if self.d != 1 || self.response == ModelKind::Lasso => {
                return Err(Error::param("imbalanced regime is d = 1 with a binary response"));
            }
            _ => {}
        }
        if self.response == ModelKind::Lasso && self.n < 2 {
            return Err(Error::param("lasso data needs n >= 2 to centre columns"));
        }
        if !(self.noise_sd > 0.0) {
            return Err(Error::param(format!("noise_sd = {}", self.noise_sd)));
        }
        self.sigma_norm_bound()?;
        Ok(())
    }

    fn draw_beta<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        let d = self.d;
        Ok(match &self.beta {
            TrueBeta::Zero => DVector::zeros(d),
            TrueBeta::Fixed(v) => {
                if v.len() != d {
                    return Err(Error::param(format!("true beta has {} entries for d = {d}", v.len())));
                }
                DVector::from_column_slice(v)
            }
            TrueBeta::Gaussian { scale } => {
                let s = scale / (d as f64).sqrt();
                DVector::from_fn(d, |_, _| s * rng.sample::<f64, _>(StandardNormal))
            }
            TrueBeta::Sparse { fraction, scale } => {
                if !(0.0..=1.0).contains(fraction) {
                    return Err(Error::param(format!("sparse fraction {fraction}")));
                }
                let k = ((fraction * d as f64).round() as usize).clamp(1, d);
                let mut b = DVector::zeros(d);
                let idx = rand::seq::index::sample(rng, d, k);
                for j in idx {
                    b[j] = if rng.random::<bool>() { *scale } else { -scale };
                }
                b
            }
        })
    }
}

/// Draws a dataset; see [`generate_with_truth`].
pub fn generate<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<Dataset> {
    Ok(generate_with_truth(spec, rng)?.data)
}

/// Draws covariates for the regime, then responses from the probit, logit
/// or Gaussian linear model. Lasso designs get centred columns and declare
/// `2M` as their entry bound in the bounded regime.
pub fn generate_with_truth<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<Generated> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    if spec.regime == DataRegime::Imbalanced {
        let data = Dataset::new(DMatrix::from_element(n, 1, 1.0), DVector::from_element(n, 1.0), Some(1.0))?;
        return Ok(Generated { data, beta: DVector::zeros(1) });
    }
    let mut x = match spec.regime {
        DataRegime::Bounded => DMatrix::from_fn(n, d, |_, _| spec.m * (2.0 * rng.random::<f64>() - 1.0)),
        DataRegime::Subgaussian | DataRegime::Logconcave => {
            let sigma = spec.sigma()?;
            let l = cholesky(sigma, "row covariance Sigma")?.l();
            let laplace = spec.regime == DataRegime::Logconcave;
            let g = DMatrix::from_fn(n, d, |_, _| {
                if laplace {
                    let e: f64 = rng.sample(Exp1);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    sign * e / std::f64::consts::SQRT_2
                } else {
                    rng.sample(StandardNormal)
                }
            });
            g * l.transpose()
        }
        DataRegime::Imbalanced => unreachable!(),
    };
    let beta = spec.draw_beta(rng)?;
    let mut m_decl = match spec.regime {
        DataRegime::Bounded => Some(spec.m),
        _ => None,
    };
    let y = match spec.response {
        ModelKind::Probit => {
            let eta = &x * &beta;
            eta.map(|e| if e + rng.sample::<f64, _>(StandardNormal) > 0.0 { 1.0 } else { 0.0 })
        }
        ModelKind::Logit => {
            let eta = &x * &beta;
            eta.map(|e| if rng.random::<f64>() < logistic(e) { 1.0 } else { 0.0 })
        }
        ModelKind::Lasso => {
            for mut c in x.column_iter_mut() {
                let mean = c.mean();
                c.add_scalar_mut(-mean);
            }
            m_decl = m_decl.map(|m| 2.0 * m);
            let eta = &x * &beta;
            eta.map(|e| e + spec.noise_sd * rng.sample::<f64, _>(StandardNormal))
        }
    };
    Ok(Generated { data: Dataset::new(x, y, m_decl)?, beta })
}
