//! Data-augmentation transition kernels, laziness, feasible starts and the
//! Langevin baselines.
//!
//! A DA kernel alternates a latent block `z` and a parameter block. Each
//! kernel struct caches whatever is constant across iterations (the probit
//! precision factor, the lasso Gram matrix) so [`DaKernel::update`] only
//! does per-iteration work.

mod langevin;
mod lasso;
mod logit;
mod probit;
mod start;

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::Trace;
use crate::models::ModelKind;
use crate::{Error, Result};

pub use langevin::{lmc_step, mala_step, run_langevin, LangevinKind};
pub use lasso::{LassoConditional, LassoDa};
pub use logit::LogitDa;
pub use probit::ProbitDa;
pub use start::{feasible_start_gaussian, feasible_start_lasso, find_mode, ModeCertificate};

/// Smallest variance the lasso chain accepts before declaring breakdown.
pub const V_FLOOR: f64 = 1e-300;

/// Current state of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: DVector<f64>,
    /// Noise variance (lasso only).
    pub v: Option<f64>,
    /// Last latent draw: length n for probit/logit, d for lasso.
    pub z: DVector<f64>,
    /// Number of transitions taken, held ones included.
    pub iter: u64,
    /// Whether the last transition was a lazy hold.
    pub held: bool,
}

impl ChainState {
    /// Probit/logit state; the latent block is filled by the first update.
    pub fn glm(beta: DVector<f64>, n: usize) -> Self {
        Self { beta, v: None, z: DVector::zeros(n), iter: 0, held: false }
    }

    /// Lasso state; the latent block is filled by the first update.
    pub fn lasso(beta: DVector<f64>, v: f64) -> Self {
        let d = beta.len();
        Self { beta, v: Some(v), z: DVector::from_element(d, 1.0), iter: 0, held: false }
    }

    /// Parameter vector as recorded in a trace: `β` followed by `v` if present.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.beta.iter().copied().chain(self.v)
    }
}

/// Laziness and seed of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Hold probability, in `[0, 1)`.
    pub zeta: f64,
    pub seed: u64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { zeta: 0.5, seed: 0 }
    }
}

impl KernelConfig {
    pub fn new(zeta: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::param(format!("laziness zeta = {zeta} must lie in [0, 1)")));
        }
        Ok(Self { zeta, seed })
    }
}

/// A two-block data-augmentation kernel.
pub trait DaKernel {
    fn model(&self) -> ModelKind;

    /// One full (non-lazy) latent-then-parameter update.
    fn update<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()>;

    /// One lazy transition: hold with probability `cfg.zeta`, else update.
    fn step<R: Rng + ?Sized>(&self, state: &mut ChainState, cfg: &KernelConfig, rng: &mut R) -> Result<()> {
        let hold = cfg.zeta > 0.0 && rng.random::<f64>() < cfg.zeta;
        if !hold {
            self.update(state, rng)?;
        }
        state.held = hold;
        state.iter += 1;
        Ok(())
    }
}

/// Any of the three DA kernels, for callers that pick the model at runtime.
#[derive(Debug, Clone)]
pub enum AnyDa {
    Probit(ProbitDa),
    Logit(LogitDa),
    Lasso(LassoDa),
}

impl DaKernel for AnyDa {
    fn model(&self) -> ModelKind {
        match self {
            AnyDa::Probit(k) => k.model(),
            AnyDa::Logit(k) => k.model(),
            AnyDa::Lasso(k) => k.model(),
        }
    }

    fn update<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) -> Result<()> {
        match self {
            AnyDa::Probit(k) => k.update(state, rng),
            AnyDa::Logit(k) => k.update(state, rng),
            AnyDa::Lasso(k) => k.update(state, rng),
        }
    }
}

/// Runs `iters` lazy transitions from `init`, recording every state.
pub fn run_chain<K: DaKernel, R: Rng + ?Sized>(
    kernel: &K,
    init: ChainState,
    cfg: &KernelConfig,
    iters: usize,
    n: usize,
    rng: &mut R,
) -> Result<(Trace, ChainState)> {
    let mut state = init;
    let mut trace = Trace::new(kernel.model().as_str(), cfg.seed, cfg.zeta, n, state.beta.len(), state.v.is_some());
    trace.reserve(iters);
    let start = Instant::now();
    for _ in 0..iters {
        kernel.step(&mut state, cfg, rng)?;
        trace.push(state.params(), state.held);
    }
    trace.set_runtime(start.elapsed(), iters);
    Ok((trace, state))
}

pub(crate) fn check_dim(beta: &DVector<f64>, d: usize) -> Result<()> {
    if beta.len() != d {
        return Err(Error::param(format!("state has dimension {} but the kernel expects {d}", beta.len())));
    }
    Ok(())
}
