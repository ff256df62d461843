//! Evaluators for the mixing-time bounds and numerical checks of the
//! one-step overlap inequalities behind them.
//!
//! Every bound carries a single user-visible constant `c_convention` in place
//! of the unspecified universal constants; reports echo it with the inputs.

mod bounds;
mod overlap;

pub use bounds::{
    bound_feasible, bound_independent_data, bound_lasso_warm, bound_logit_warm, bound_probit_warm, conductance_to_mixing,
    eta_star_log_bound, BoundReport, Flavor, FormulaId, IndependentData, MixingBoundInput, Regime,
};
pub use overlap::{
    lasso_extreme_threshold, verify_overlap_lasso, verify_overlap_logit, verify_overlap_probit, CoordOverlap,
    LassoOverlap, OverlapCheck, LASSO_C, OVERLAP_TOL,
};
