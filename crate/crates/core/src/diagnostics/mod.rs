//! Traces, autocorrelation diagnostics, quadrature reference posteriors,
//! scaling sweeps, the one-step TV probe and the verification suite.

mod iat;
mod moments;
pub mod plot;
mod quadrature;
mod sweep;
mod trace;
mod tv_probe;
mod verify;

pub use iat::{ess, iat, iat_series, IatEstimate};
pub use moments::{moment_check, MomentReport, DEFAULT_BURN_IN, MOMENT_Z_MAX};
pub use quadrature::{auto_grid, quadrature_posterior, GridDim, GridSpec, ModelPrior, QuadratureOracle};
pub use sweep::{
    fit_loglog_slope, scaling_sweep, spearman, CellSummary, SlopeFit, SweepResult, SweepRow, SweepSpec,
};
pub use trace::Trace;
pub use tv_probe::{one_step_tv_probe, TvProbe, TV_PROBE_BINS, TV_PROBE_DELTA};
pub use verify::{verify_suite, CheckResult, VerifyReport, VerifySpec};
