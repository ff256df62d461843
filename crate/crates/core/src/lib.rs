//! Data-augmentation Gibbs samplers for Bayesian probit, logit and lasso
//! regression, together with calculators for their mixing-time bounds and a
//! set of empirical diagnostics.
//!
//! The crate is organised bottom-up:
//!
//! - [`dists`]: exact samplers and closed-form divergences for the truncated
//!   normal, Pólya-Gamma and inverse-Gaussian laws.
//! - [`models`]: datasets, priors, posteriors, their derivatives and the
//!   log-concavity constants.
//! - [`kernels`]: the ProbitDA, LogitDA and two-block LassoDA transition
//!   kernels, feasible starts, and LMC/MALA baselines.
//! - [`theory`]: mixing-time bound evaluators and one-step overlap verifiers.
//! - [`diagnostics`]: traces, IAT/ESS, quadrature oracles, scaling sweeps.
//! - [`data`]: synthetic data generators and matrix-concentration checks.

pub mod data;
pub mod diagnostics;
pub mod dists;
mod error;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod quad;
pub mod seeds;
pub mod special;
pub mod theory;

pub use error::{Error, Result};
