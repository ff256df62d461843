//! Exact samplers, densities and closed-form divergences for the laws the
//! data-augmentation kernels draw from.
//!
//! Every sampler takes an explicit random stream, so output is a pure
//! function of the stream state.

mod inverse_gaussian;
mod kl;
mod polya_gamma;
mod trunc_normal;

pub use inverse_gaussian::{
    inverse_gaussian_cdf, inverse_gaussian_log_pdf, levy_cdf, sample_inverse_gaussian,
    sample_inverse_gaussian_limit, InverseGaussianParams,
};
pub use kl::{kl_inverse_gaussian_lasso, kl_polya_gamma, kl_trunc_normal, tv_inverse_gaussian_bound};
pub use polya_gamma::{polya_gamma_log_pdf, polya_gamma_mean, sample_polya_gamma, PolyaGammaParams};
pub use trunc_normal::{sample_trunc_normal, trunc_normal_log_pdf, trunc_normal_mean, Side, TruncNormalParams};
