use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::Trace;
use crate::models::LogDensity;

/// Unadjusted or Metropolis-adjusted Langevin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LangevinKind {
    Lmc,
    Mala,
}

fn noise<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// `β′ = β + h∇log π(β) + √(2h)·ξ`.
pub fn lmc_step<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    beta: &DVector<f64>,
    step: f64,
    target: &T,
    rng: &mut R,
) -> DVector<f64> {
    let xi = noise(beta.len(), rng);
    beta + target.grad_log_density(beta) * step + xi * (2.0 * step).sqrt()
}

// log q(to | from) up to a constant, for the Langevin proposal.
fn log_q(to: &DVector<f64>, from: &DVector<f64>, grad_from: &DVector<f64>, step: f64) -> f64 {
    let r = to - from - grad_from * step;
    -r.norm_squared() / (4.0 * step)
}

/// One MALA transition; returns the new state and whether it was accepted.
pub fn mala_step<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    beta: &DVector<f64>,
    step: f64,
    target: &T,
    rng: &mut R,
) -> (DVector<f64>, bool) {
    if step == 0.0 {
        return (beta.clone(), true);
    }
    let g = target.grad_log_density(beta);
    let prop = beta + &g * step + noise(beta.len(), rng) * (2.0 * step).sqrt();
    let gp = target.grad_log_density(&prop);
    let log_alpha = target.log_density(&prop) - target.log_density(beta) + log_q(beta, &prop, &gp, step)
        - log_q(&prop, beta, &g, step);
    let u: f64 = rng.random();
    if log_alpha >= 0.0 || u.ln() < log_alpha {
        (prop, true)
    } else {
        (beta.clone(), false)
    }
}

/// Runs a Langevin chain, recording every iterate. The acceptance rate is
/// stored on the trace for MALA.
pub fn run_langevin<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    kind: LangevinKind,
    target: &T,
    init: DVector<f64>,
    step: f64,
    iters: usize,
    tag: &str,
    seed: u64,
    n: usize,
    rng: &mut R,
) -> Trace {
    let mut trace = Trace::new(tag, seed, 0.0, n, init.len(), false);
    trace.reserve(iters);
    let mut x = init;
    let mut accepted = 0usize;
    let start = Instant::now();
    for _ in 0..iters {
        match kind {
            LangevinKind::Lmc => {
                x = lmc_step(&x, step, target, rng);
                accepted += 1;
            }
            LangevinKind::Mala => {
                let (next, acc) = mala_step(&x, step, target, rng);
                x = next;
                accepted += acc as usize;
            }
        }
        trace.push(x.iter().copied(), false);
    }
    trace.set_runtime(start.elapsed(), iters);
    if kind == LangevinKind::Mala && iters > 0 {
        trace.accept_rate = Some(accepted as f64 / iters as f64);
    }
    trace
}
