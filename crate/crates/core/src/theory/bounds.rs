use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::models::{Glm, ModelKind};
use crate::{Error, Result};

/// Inputs shared by all bound evaluators. `eta_log` is `log η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingBoundInput {
    pub n: usize,
    pub d: usize,
    /// Entry bound `M`.
    pub m: f64,
    /// Smallest prior-covariance eigenvalue (feasible-start bounds only).
    pub b0: f64,
    /// Largest prior-covariance eigenvalue.
    pub b1: f64,
    pub eta_log: f64,
    pub eps: f64,
    pub c_convention: f64,
    /// Lasso prior fields, echoed only.
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
}

impl MixingBoundInput {
    /// Inputs with `b0 = b1`, `c_convention = 1` and no lasso fields.
    pub fn new(n: usize, d: usize, m: f64, b1: f64, eta_log: f64, eps: f64) -> Self {
        Self { n, d, m, b0: b1, b1, eta_log, eps, c_convention: 1.0, xi: None, alpha: None, lambda: None }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c_convention = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::param(format!("bound input: {what}")));
        if self.n == 0 || self.d == 0 {
            return bad("n and d must be positive");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0, 1)");
        }
        if !(self.eta_log >= 0.0) || !self.eta_log.is_finite() {
            return bad("eta_log must be finite and >= 0");
        }
        if !(self.m > 0.0) || !(self.b1 > 0.0) || !(self.b0 > 0.0) || self.b0 > self.b1 {
            return bad("need M > 0 and 0 < b0 <= b1");
        }
        if !(self.c_convention > 0.0) || !self.c_convention.is_finite() {
            return bad("c_convention must be positive");
        }
        Ok(())
    }

    fn nd_m2(&self) -> f64 {
        self.n as f64 * self.d as f64 * self.m * self.m
    }

    /// `log(log η / ε)`, floored at `log 2`.
    fn loglog_term(&self) -> f64 {
        guarded_log(self.eta_log / self.eps)
    }
}

fn guarded_log(x: f64) -> f64 {
    if x > 2.0 {
        x.ln()
    } else {
        LN_2
    }
}

/// Which displayed formula a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    ProbitWarm,
    LogitWarm,
    LassoWarm,
    ProbitFeasible,
    LogitFeasible,
    LassoFeasible,
    IndependentBounded,
    IndependentSubgaussian,
    IndependentLogconcave,
}

/// Data law for the independent-covariate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Bounded,
    Subgaussian,
    Logconcave,
}

/// Extra inputs of the independent-covariate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependentData {
    pub regime: Regime,
    /// Operator-norm bound `S` on the covariate covariance.
    pub s: f64,
    /// Sub-Gaussian scale `K`.
    pub k: f64,
    /// Failure probability.
    pub delta: f64,
}

/// One evaluated bound: a predicted iteration count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub algorithm: String,
    pub formula_id: FormulaId,
    pub bound_value: f64,
    pub inputs: MixingBoundInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent: Option<IndependentData>,
}

fn report(algorithm: &str, formula_id: FormulaId, value: f64, inp: &MixingBoundInput) -> Result<BoundReport> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!("{formula_id:?} evaluated to {value}")));
    }
    Ok(BoundReport { algorithm: algorithm.into(), formula_id, bound_value: value, inputs: *inp, independent: None })
}

fn glm_warm(inp: &MixingBoundInput) -> Result<f64> {
    inp.validate()?;
    Ok(inp.c_convention * inp.b1 * inp.nd_m2() * inp.loglog_term())
}

/// `c·M²·b₁·n·d·log(log η / ε)` for lazy ProbitDA.
pub fn bound_probit_warm(inp: &MixingBoundInput) -> Result<BoundReport> {
    report("probit-da", FormulaId::ProbitWarm, glm_warm(inp)?, inp)
}

/// Same shape as [`bound_probit_warm`], for lazy LogitDA.
pub fn bound_logit_warm(inp: &MixingBoundInput) -> Result<BoundReport> {
    report("logit-da", FormulaId::LogitWarm, glm_warm(inp)?, inp)
}

/// `d log d + n log n`.
fn lasso_a(inp: &MixingBoundInput) -> Result<f64> {
    let (n, d) = (inp.n as f64, inp.d as f64);
    let a = d * d.ln() + n * n.ln();
    if !(a > 0.0) {
        return Err(Error::param("lasso bounds need n > 1 or d > 1"));
    }
    Ok(a)
}

/// `c·d²·(d log d + n log n)²·log(η/ε)` for lazy LassoDA.
pub fn bound_lasso_warm(inp: &MixingBoundInput) -> Result<BoundReport> {
    inp.validate()?;
    let a = lasso_a(inp)?;
    let d = inp.d as f64;
    let v = inp.c_convention * d * d * a * a * (inp.eta_log - inp.eps.ln());
    report("lasso-da", FormulaId::LassoWarm, v, inp)
}

/// Feasible-start bounds: Gaussian around the mode for probit/logit, the
/// product start for lasso.
pub fn bound_feasible(inp: &MixingBoundInput, model: ModelKind) -> Result<BoundReport> {
    inp.validate()?;
    match model {
        ModelKind::Probit | ModelKind::Logit => {
            let inner = inp.b1 * inp.d as f64 * (inp.nd_m2() + 1.0 / inp.b0).ln() / inp.eps;
            let v = inp.c_convention * inp.b1 * inp.nd_m2() * guarded_log(inner);
            let (alg, id) = if model == ModelKind::Probit {
                ("probit-da", FormulaId::ProbitFeasible)
            } else {
                ("logit-da", FormulaId::LogitFeasible)
            };
            report(alg, id, v, inp)
        }
        ModelKind::Lasso => {
            let a = lasso_a(inp)?;
            let d = inp.d as f64;
            let v = inp.c_convention * d * d * a * a * (a - inp.eps.ln());
            report("lasso-da", FormulaId::LassoFeasible, v, inp)
        }
    }
}

/// High-probability bounds for independently drawn covariates.
pub fn bound_independent_data(inp: &MixingBoundInput, glm: Glm, data: IndependentData) -> Result<BoundReport> {
    inp.validate()?;
    let IndependentData { regime, s, k, delta } = data;
    if !(s > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("need S > 0 and delta in (0, 1); got S = {s}, delta = {delta}")));
    }
    let (n, d, m2) = (inp.n as f64, inp.d as f64, inp.m * inp.m);
    let (spectral, id) = match regime {
        Regime::Bounded => {
            let l = (2.0 * d / delta).ln();
            (n * s + l * d * m2 / 3.0 + (2.0 * l * n * d * m2 * s).sqrt(), FormulaId::IndependentBounded)
        }
        Regime::Subgaussian => {
            if !(k >= 1.0) {
                return Err(Error::param(format!("sub-Gaussian scale K = {k} must be >= 1")));
            }
            let r = (d + (2.0 / delta).ln()) / n;
            (n * s + n * k * k * (r.sqrt() + r) * s, FormulaId::IndependentSubgaussian)
        }
        Regime::Logconcave => ((n + d) * s, FormulaId::IndependentLogconcave),
    };
    let v = inp.c_convention * m2 * inp.b1 * spectral * inp.loglog_term();
    let alg = match glm {
        Glm::Probit => "probit-da",
        Glm::Logit => "logit-da",
    };
    let mut r = report(alg, id, v, inp)?;
    r.independent = Some(data);
    Ok(r)
}

/// Conductance argument flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `c·Ch²/(Δ²h²)·log(η/ε²)`.
    Standard,
    /// `c·Ch²/(ζΔ²h²)·log(log η / ε)`, the log term floored at `log 2`.
    Improved,
}

/// Mixing-time bound from an isoperimetric constant `ch`, overlap radius
/// `delta` and overlap mass `h`.
#[allow(clippy::too_many_arguments)]
pub fn conductance_to_mixing(
    ch: f64,
    delta: f64,
    h: f64,
    zeta: f64,
    eta_log: f64,
    eps: f64,
    flavor: Flavor,
    c_convention: f64,
) -> Result<f64> {
    if !(ch > 0.0 && delta > 0.0 && h > 0.0 && eps > 0.0 && eps < 1.0 && eta_log >= 0.0 && c_convention > 0.0) {
        return Err(Error::param("conductance inputs out of range"));
    }
    let base = c_convention * ch * ch / (delta * delta * h * h);
    Ok(match flavor {
        Flavor::Standard => base * (eta_log - 2.0 * eps.ln()),
        Flavor::Improved => {
            if !(zeta > 0.0 && zeta < 1.0) {
                return Err(Error::param(format!("laziness zeta = {zeta} must lie in (0, 1)")));
            }
            base / zeta * guarded_log(eta_log / eps)
        }
    })
}

/// `log η⋆ = (d/2)·log(b₁(s·ndM² + 1/b₀))`, an upper bound on the log
/// warmness of the Gaussian feasible start (`s = 1` probit, `¼` logit).
pub fn eta_star_log_bound(inp: &MixingBoundInput, glm: Glm) -> Result<f64> {
    inp.validate()?;
    let s = match glm {
        Glm::Probit => 1.0,
        Glm::Logit => 0.25,
    };
    Ok(0.5 * inp.d as f64 * (inp.b1 * (s * inp.nd_m2() + 1.0 / inp.b0)).ln().max(0.0))
}
