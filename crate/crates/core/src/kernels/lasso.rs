use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{check_dim, ChainState, DaKernel, V_FLOOR};
use crate::dists::{sample_inverse_gaussian, sample_inverse_gaussian_limit, InverseGaussianParams};
use crate::linalg::{cholesky, gram, sample_from_precision};
use crate::models::{Dataset, LassoPrior, ModelKind};
use crate::{Error, Result};

/// Two-block LassoDA: inverse-Gaussian latents, then `v` with `β`
/// integrated out, then `β | v`.
#[derive(Debug, Clone)]
pub struct LassoDa {
    x: DMatrix<f64>,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
    prior: LassoPrior,
    /// `(n + 2α − 1)/2`.
    shape: f64,
}

/// Parameters of the `v` and `β` conditionals given the latent block.
#[derive(Debug, Clone)]
pub struct LassoConditional {
    /// Inverse-gamma shape of `v | z`.
    pub shape: f64,
    /// Inverse-gamma scale of `v | z`.
    pub scale: f64,
    /// Mean of `β | v, z`.
    pub mean: DVector<f64>,
    /// Covariance of `β | v, z` divided by `v`.
    pub cov_over_v: DMatrix<f64>,
}

impl LassoDa {
    pub fn new(data: &Dataset, prior: &LassoPrior) -> Result<Self> {
        data.check_centered()?;
        if !prior.in_bound_regime(data.n()) {
            return Err(Error::param(format!(
                "LassoDA needs xi > 0 and n >= 2 - 2 alpha (xi = {}, n = {}, alpha = {})",
                prior.xi,
                data.n(),
                prior.alpha
            )));
        }
        let ytil = data.centered_response();
        Ok(Self {
            x: data.x.clone(),
            xtx: gram(&data.x),
            xty: data.x.tr_mul(&ytil),
            yty: ytil.norm_squared(),
            prior: *prior,
            shape: 0.5 * (data.n() as f64 + 2.0 * prior.alpha - 1.0),
        })
    }

    /// Inverse-gamma shape of the `v` update.
    pub fn v_shape(&self) -> f64 {
        self.shape
    }

    /// Draws `1/z_j ∼ IG(λ√v/|β_j|, λ²)` and stores `z_j`. A zero coefficient
    /// (or one so small the mean overflows) uses the `μ → ∞` limit law.
    pub fn draw_latent<R: Rng + ?Sized>(&self, beta: &DVector<f64>, v: f64, z: &mut DVector<f64>, rng: &mut R) {
        let lam = self.prior.lambda;
        let shape = lam * lam;
        for (zj, &b) in z.iter_mut().zip(beta.iter()) {
            let mu = lam * v.sqrt() / b.abs();
            let tau = if mu.is_finite() {
                sample_inverse_gaussian(InverseGaussianParams { mu, lambda: shape }, rng)
            } else {
                sample_inverse_gaussian_limit(shape, rng)
            };
            *zj = 1.0 / tau;
        }
    }

    /// Conditional laws of `v | z` and `β | v, z`.
    pub fn conditional(&self, z: &DVector<f64>) -> Result<LassoConditional> {
        let (chol, mean, q) = self.factor(z)?;
        Ok(LassoConditional {
            shape: self.shape,
            scale: self.prior.xi + 0.5 * q,
            mean,
            cov_over_v: chol.inverse(),
        })
    }

    fn factor(&self, z: &DVector<f64>) -> Result<(nalgebra::Cholesky<f64, nalgebra::Dyn>, DVector<f64>, f64)> {
        let mut a = self.xtx.clone();
        for j in 0..a.nrows() {
            a[(j, j)] += 1.0 / z[j];
        }
        let chol = cholesky(a, "LassoDA precision XᵀX + D_z⁻¹")?;
        let mean = chol.solve(&self.xty);
        let q = (self.yty - self.xty.dot(&mean)).max(0.0);
        Ok((chol, mean, q))
    }

    /// Draws `v | z` and then `β | v, z`.
    pub fn draw_params<R: Rng + ?Sized>(&self, z: &DVector<f64>, rng: &mut R) -> Result<(DVector<f64>, f64)> {
        let (chol, mean, q) = self.factor(z)?;
        let scale = self.prior.xi + 0.5 * q;
        let g: f64 = Gamma::new(self.shape, 1.0)
            .map_err(|e| Error::param(format!("inverse-gamma shape {}: {e}", self.shape)))?
            .sample(rng);
        let v = scale / g;
        if !(v >= V_FLOOR) || !v.is_finite() {
            return Err(Error::Breakdown(format!("LassoDA drew v = {v}")));
        }
        let beta = sample_from_precision(&chol, &mean, v.sqrt(), rng);
        Ok((beta, v))
    }
}

impl DaKernel for LassoDa {
    fn model(&self) -> ModelKind {
        ModelKind::Lasso
    }

    fn update<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()> {
        check_dim(&state.beta, self.x.ncols())?;
        let v = state.v.ok_or_else(|| Error::param("lasso state has no variance"))?;
        if state.z.len() != self.x.ncols() {
            state.z = DVector::from_element(self.x.ncols(), 1.0);
        }
        self.draw_latent(&state.beta, v, &mut state.z, rng);
        let (beta, v) = self.draw_params(&state.z, rng)?;
        state.beta = beta;
        state.v = Some(v);
        Ok(())
    }
}
