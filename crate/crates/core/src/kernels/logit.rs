use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{check_dim, ChainState, DaKernel};
use crate::dists::{sample_polya_gamma, PolyaGammaParams};
use crate::linalg::{cholesky, sample_from_precision};
use crate::models::{Dataset, GaussianPrior, ModelKind};
use crate::{Error, Result};

/// LogitDA: Pólya-Gamma latents, then a Gaussian draw of `β` with precision
/// `B⁻¹ + XᵀΩX`, refactorised every iteration.
#[derive(Debug, Clone)]
pub struct LogitDa {
    x: DMatrix<f64>,
    prior_prec: DMatrix<f64>,
    /// `Xᵀκ + B⁻¹b` with `κ = y − ½`.
    shift: DVector<f64>,
}

impl LogitDa {
    pub fn new(data: &Dataset, prior: &GaussianPrior) -> Result<Self> {
        data.check_binary()?;
        if prior.dim() != data.d() {
            return Err(Error::param(format!("prior dimension {} but data has d = {}", prior.dim(), data.d())));
        }
        let kappa = data.y.map(|y| y - 0.5);
        let shift = data.x.tr_mul(&kappa) + prior.precision() * &prior.b;
        Ok(Self { x: data.x.clone(), prior_prec: prior.precision().clone(), shift })
    }

    /// Draws the latent block `z_i ∼ PG(1, x_iᵀβ)`.
    pub fn draw_latent<R: Rng + ?Sized>(&self, beta: &DVector<f64>, z: &mut DVector<f64>, rng: &mut R) -> Result<()> {
        let eta = &self.x * beta;
        for (zi, &e) in z.iter_mut().zip(eta.iter()) {
            *zi = sample_polya_gamma(PolyaGammaParams::unit(e), rng)?;
        }
        Ok(())
    }

    fn precision(&self, z: &DVector<f64>) -> DMatrix<f64> {
        crate::models::weighted_gram(&self.x, z) + &self.prior_prec
    }

    /// Mean and covariance of `β | z`.
    pub fn conditional(&self, z: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let chol = cholesky(self.precision(z), "LogitDA precision B⁻¹ + XᵀΩX")?;
        Ok((chol.solve(&self.shift), chol.inverse()))
    }

    /// Draws `β | z`.
    pub fn draw_beta<R: Rng + ?Sized>(&self, z: &DVector<f64>, rng: &mut R) -> Result<DVector<f64>> {
        let chol = cholesky(self.precision(z), "LogitDA precision B⁻¹ + XᵀΩX")?;
        let mean = chol.solve(&self.shift);
        Ok(sample_from_precision(&chol, &mean, 1.0, rng))
    }
}

impl DaKernel for LogitDa {
    fn model(&self) -> ModelKind {
        ModelKind::Logit
    }

    fn update<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()> {
        check_dim(&state.beta, self.x.ncols())?;
        if state.z.len() != self.x.nrows() {
            state.z = DVector::zeros(self.x.nrows());
        }
        self.draw_latent(&state.beta, &mut state.z, rng)?;
        state.beta = self.draw_beta(&state.z, rng)?;
        Ok(())
    }
}
