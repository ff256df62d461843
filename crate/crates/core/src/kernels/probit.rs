use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;

use super::{check_dim, ChainState, DaKernel};
use crate::dists::{sample_trunc_normal, Side, TruncNormalParams};
use crate::linalg::{cholesky, gram, sample_from_precision};
use crate::models::{Dataset, GaussianPrior, ModelKind};
use crate::{Error, Result};

/// ProbitDA: truncated-normal latents, then a Gaussian draw of `β` whose
/// precision `B⁻¹ + XᵀX` is factorised once at construction.
#[derive(Debug, Clone)]
pub struct ProbitDa {
    x: DMatrix<f64>,
    sides: Vec<Side>,
    prior_shift: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl ProbitDa {
    pub fn new(data: &Dataset, prior: &GaussianPrior) -> Result<Self> {
        data.check_binary()?;
        if prior.dim() != data.d() {
            return Err(Error::param(format!("prior dimension {} but data has d = {}", prior.dim(), data.d())));
        }
        let sides = data.y.iter().map(|&y| Side::from_response(y)).collect::<Result<_>>()?;
        let chol = cholesky(prior.precision() + gram(&data.x), "ProbitDA precision B⁻¹ + XᵀX")?;
        Ok(Self { x: data.x.clone(), sides, prior_shift: prior.precision() * &prior.b, chol })
    }

    /// Draws the latent block `z_i ∼ TN(x_iᵀβ, 1; y_i)`.
    pub fn draw_latent<R: Rng + ?Sized>(&self, beta: &DVector<f64>, z: &mut DVector<f64>, rng: &mut R) {
        let eta = &self.x * beta;
        for ((zi, &e), &side) in z.iter_mut().zip(eta.iter()).zip(&self.sides) {
            *zi = sample_trunc_normal(TruncNormalParams::new(e, side), rng);
        }
    }

    /// Mean and covariance of `β | z`.
    pub fn conditional(&self, z: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        (self.conditional_mean(z), self.chol.inverse())
    }

    fn conditional_mean(&self, z: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(&(&self.prior_shift + self.x.tr_mul(z)))
    }

    /// Draws `β | z`.
    pub fn draw_beta<R: Rng + ?Sized>(&self, z: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        sample_from_precision(&self.chol, &self.conditional_mean(z), 1.0, rng)
    }
}

impl DaKernel for ProbitDa {
    fn model(&self) -> ModelKind {
        ModelKind::Probit
    }

    fn update<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()> {
        check_dim(&state.beta, self.x.ncols())?;
        if state.z.len() != self.x.nrows() {
            state.z = DVector::zeros(self.x.nrows());
        }
        self.draw_latent(&state.beta, &mut state.z, rng);
        state.beta = self.draw_beta(&state.z, rng);
        Ok(())
    }
}
