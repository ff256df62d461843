//! The oracle and inequality suite behind `damix verify`: short posterior
//! agreement runs against quadrature, closed-form divergences against
//! numerical integration, the overlap inequalities on random instances, the
//! lasso change of variables, mode certificates, bound fixtures and the
//! one-step TV sandwich.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{auto_grid, moment_check, one_step_tv_probe, quadrature_posterior, ModelPrior, DEFAULT_BURN_IN};
use crate::data::{generate, GeneratorSpec};
use crate::dists::{
    inverse_gaussian_log_pdf, kl_inverse_gaussian_lasso, kl_polya_gamma, kl_trunc_normal, polya_gamma_log_pdf,
    trunc_normal_log_pdf, Side, TruncNormalParams,
};
use crate::kernels::{
    feasible_start_gaussian, feasible_start_lasso, find_mode, run_chain, KernelConfig, LassoDa, LogitDa, ProbitDa,
};
use crate::linalg::{gram, lambda_max_sym};
use crate::models::{
    lasso_log_posterior, lasso_transform, lasso_transform_inv, lasso_transform_log_abs_det_inv,
    lasso_transformed_log_target, Dataset, GaussianPrior, Glm, LassoPrior, ModelKind,
};
use crate::quad::integrate;
use crate::seeds::{derive_seed, seeded_rng};
use crate::theory::{
    bound_probit_warm, conductance_to_mixing, verify_overlap_lasso, verify_overlap_logit, verify_overlap_probit,
    Flavor, MixingBoundInput,
};
use crate::{Error, Result};

/// Size knobs of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub seed: u64,
    /// Chain length of each posterior agreement run.
    #[serde(default = "default_iters")]
    pub iters: usize,
    /// Random instances per overlap verifier.
    #[serde(default = "default_instances")]
    pub overlap_instances: usize,
    /// Random pairs for the one-step TV sandwich.
    #[serde(default = "default_tv_pairs")]
    pub tv_pairs: usize,
}

fn default_iters() -> usize {
    60_000
}

fn default_instances() -> usize {
    300
}

fn default_tv_pairs() -> usize {
    20
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { seed: 0, iters: default_iters(), overlap_instances: default_instances(), tv_pairs: default_tv_pairs() }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// All checks of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    /// One `PASS`/`FAIL` line per check.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s.push_str(&format!("overall: {}\n", if self.pass { "PASS" } else { "FAIL" }));
        s
    }
}

fn check(name: &str, pass: bool, detail: String) -> CheckResult {
    CheckResult { name: name.into(), pass, detail }
}

/// Runs every check. Numeric errors inside a check are propagated, failed
/// comparisons are reported.
pub fn verify_suite(spec: &VerifySpec) -> Result<VerifyReport> {
    if spec.iters < 1000 || spec.overlap_instances == 0 || spec.tv_pairs == 0 {
        return Err(Error::param("verify needs iters >= 1000 and positive instance counts"));
    }
    let mut checks = Vec::new();
    for model in [ModelKind::Probit, ModelKind::Logit, ModelKind::Lasso] {
        checks.push(posterior_agreement(model, spec)?);
    }
    checks.push(divergence_closed_forms()?);
    checks.push(glm_overlap(spec)?);
    checks.push(lasso_overlap()?);
    checks.push(deterministic_lambda_max(spec)?);
    checks.push(lasso_transform_identity(spec)?);
    checks.push(mode_certificates(spec)?);
    checks.push(bound_fixtures()?);
    checks.push(tv_sandwich(spec)?);
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { pass, checks })
}

fn col(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn posterior_agreement(model: ModelKind, spec: &VerifySpec) -> Result<CheckResult> {
    let cfg = KernelConfig::new(0.5, derive_seed(spec.seed, &[1, model as u64]))?;
    let mut rng = seeded_rng(cfg.seed);
    let (trace, oracle) = match model {
        ModelKind::Probit | ModelKind::Logit => {
            let (x, y, b, var) = if model == ModelKind::Probit {
                ([1.0, -0.5, 2.0, 0.8], [1.0, 0.0, 1.0, 0.0], 0.3, 2.0)
            } else {
                ([1.0, -1.5, 0.5, 2.0], [1.0, 1.0, 0.0, 1.0], 0.0, 4.0)
            };
            let data = Dataset::new(DMatrix::from_column_slice(4, 1, &x), col(&y), None)?;
            let prior = GaussianPrior::new(col(&[b]), DMatrix::from_element(1, 1, var))?;
            let glm = Glm::try_from(model)?;
            let mp = ModelPrior::Gaussian(&prior);
            let oracle = quadrature_posterior(model, &data, mp, &auto_grid(model, &data, mp, 4001, 12.0)?)?;
            let (init, _) = feasible_start_gaussian(&data, &prior, glm, 1e-10, &mut rng)?;
            let trace = match glm {
                Glm::Probit => run_chain(&ProbitDa::new(&data, &prior)?, init, &cfg, spec.iters, 4, &mut rng)?.0,
                Glm::Logit => run_chain(&LogitDa::new(&data, &prior)?, init, &cfg, spec.iters, 4, &mut rng)?.0,
            };
            (trace, oracle)
        }
        ModelKind::Lasso => {
            let x = [-1.5, -0.5, 0.5, 1.5];
            let data = Dataset::new(DMatrix::from_column_slice(4, 1, &x), col(&[-1.0, 0.2, 0.4, 1.3]), None)?;
            let prior = LassoPrior::new(1.0, 5.0, 1.0)?;
            let mp = ModelPrior::Lasso(&prior);
            let oracle = quadrature_posterior(model, &data, mp, &auto_grid(model, &data, mp, 601, 12.0)?)?;
            let init = feasible_start_lasso(&data, &prior, &mut rng)?;
            (run_chain(&LassoDa::new(&data, &prior)?, init, &cfg, spec.iters, 4, &mut rng)?.0, oracle)
        }
    };
    let r = moment_check(&trace, &oracle, DEFAULT_BURN_IN)?;
    let zmax = r.z_mean.iter().chain(&r.z_var).fold(0.0f64, |a, z| a.max(z.abs()));
    Ok(check(
        &format!("posterior-agreement-{model}"),
        r.pass,
        format!("max |z| = {zmax:.2} over {} kept draws", r.kept),
    ))
}

fn kl_by_integration<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(log_p: F, log_q: G, lo: f64, hi: f64) -> f64 {
    integrate(
        |x| {
            let lp = log_p(x);
            if lp == f64::NEG_INFINITY {
                0.0
            } else {
                lp.exp() * (lp - log_q(x))
            }
        },
        lo,
        hi,
        1e-12,
        1e-14,
    )
}

fn divergence_closed_forms() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut tn, mut pg, mut ig): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..10 {
        let (m1, m2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let (p, q) = (TruncNormalParams::new(m1, Side::Positive), TruncNormalParams::new(m2, Side::Positive));
        let num = kl_by_integration(|x| trunc_normal_log_pdf(p, x), |x| trunc_normal_log_pdf(q, x), 0.0, m1.max(0.0) + 40.0);
        tn = tn.max((kl_trunc_normal(p, q)? - num).abs());

        let (c1, c2) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let num = kl_by_integration(|x| polya_gamma_log_pdf(c1, x), |x| polya_gamma_log_pdf(c2, x), 1e-3, 40.0);
        pg = pg.max((kl_polya_gamma(c1, c2) - num).abs());

        let (f1, f2, lam) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0), rng.random_range(0.5..2.0));
        let (mu1, mu2, shape) = (lam / f1, lam / f2, lam * lam);
        let num = kl_by_integration(
            |t: f64| inverse_gaussian_log_pdf(mu1, shape, t.exp()) + t,
            |t: f64| inverse_gaussian_log_pdf(mu2, shape, t.exp()) + t,
            -30.0,
            10.0,
        );
        ig = ig.max((kl_inverse_gaussian_lasso(f1, f2, lam)? - num).abs());
    }
    let tol = 1e-6;
    Ok(check(
        "closed-form-divergences",
        tn <= tol && pg <= tol && ig <= tol,
        format!("max abs error vs integration: TN {tn:.1e}, PG {pg:.1e}, IG {ig:.1e}"),
    ))
}

fn random_binary_instance(rng: &mut ChaCha8Rng) -> Result<(Dataset, DVector<f64>, DVector<f64>)> {
    let n = rng.random_range(1..=50);
    let d = rng.random_range(1..=8);
    let m: f64 = rng.random_range(0.1..3.0);
    let x = DMatrix::from_fn(n, d, |_, _| m * rng.random_range(-1.0..1.0));
    let y = DVector::from_fn(n, |_, _| f64::from(u8::from(rng.random::<bool>())));
    let s: f64 = rng.random_range(0.01..3.0);
    let b1 = DVector::from_fn(d, |_, _| s * rng.sample::<f64, _>(StandardNormal));
    let b2 = DVector::from_fn(d, |_, _| s * rng.sample::<f64, _>(StandardNormal));
    Ok((Dataset::new(x, y, Some(m))?, b1, b2))
}

fn glm_overlap(spec: &VerifySpec) -> Result<CheckResult> {
    let mut rng = seeded_rng(derive_seed(spec.seed, &[2]));
    let (mut bad_p, mut bad_l) = (0, 0);
    for _ in 0..spec.overlap_instances {
        let (data, b1, b2) = random_binary_instance(&mut rng)?;
        let cap = data.n() as f64 * data.d() as f64 * data.entry_bound().powi(2) * (&b1 - &b2).norm_squared();
        let p = verify_overlap_probit(&b1, &b2, &data)?;
        bad_p += usize::from(!p.ok || p.rhs > 0.5 * cap * (1.0 + 1e-12));
        let l = verify_overlap_logit(&b1, &b2, &data)?;
        bad_l += usize::from(!l.ok || l.rhs > 0.125 * cap * (1.0 + 1e-12));
    }
    Ok(check(
        "overlap-probit-logit",
        bad_p + bad_l == 0,
        format!("violations: probit {bad_p}, logit {bad_l} of {} instances", spec.overlap_instances),
    ))
}

fn lasso_overlap() -> Result<CheckResult> {
    let levels = [0.0, 1e-4, 1e-3, 0.01, 0.1, 1.0, 3.0];
    let mut bad = 0;
    let mut total = 0;
    for &a in &levels {
        for &b in &levels {
            for &d in &[1usize, 2, 8, 32] {
                let mut p1 = DVector::zeros(d);
                let mut p2 = DVector::zeros(d);
                p1[0] = a;
                p2[0] = -b;
                if d > 1 {
                    p1[d - 1] = 0.5 * b;
                }
                bad += usize::from(!verify_overlap_lasso(&p1, &p2, 1.0, d)?.ok);
                total += 1;
            }
        }
    }
    Ok(check("overlap-lasso", bad == 0, format!("{bad} of {total} coordinate splits violate their caps")))
}

fn deterministic_lambda_max(spec: &VerifySpec) -> Result<CheckResult> {
    let mut rng = seeded_rng(derive_seed(spec.seed, &[3]));
    let mut bad = 0;
    for _ in 0..50 {
        let n = rng.random_range(1..=200);
        let d = rng.random_range(1..=20);
        let data = generate(&GeneratorSpec::bounded(n, d, rng.random_range(0.1..5.0), ModelKind::Probit, 1.0), &mut rng)?;
        let m = data.entry_bound();
        bad += usize::from(lambda_max_sym(&gram(&data.x)) > (n * d) as f64 * m * m);
    }
    Ok(check("lambda-max-deterministic", bad == 0, format!("{bad} of 50 designs exceed ndM^2")))
}

fn lasso_transform_identity(spec: &VerifySpec) -> Result<CheckResult> {
    let mut rng = seeded_rng(derive_seed(spec.seed, &[4]));
    let x = DMatrix::from_row_slice(4, 2, &[-1.0, 0.5, -0.5, -0.5, 0.5, 1.0, 1.0, -1.0]);
    let data = Dataset::new(x, col(&[0.3, -1.2, 0.8, 2.0]), None)?;
    let prior = LassoPrior::new(0.7, 2.0, 0.5)?;
    let (mut rt, mut lo, mut hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..50 {
        let beta = DVector::from_fn(2, |_, _| 2.0 * rng.sample::<f64, _>(StandardNormal));
        let v = 10f64.powf(rng.random_range(-2.0..2.0));
        let s = lasso_transform(&beta, v)?;
        let (b2, v2) = lasso_transform_inv(&s);
        rt = rt.max((&b2 - &beta).amax() / beta.amax().max(1.0)).max((v2 - v).abs() / v);
        let c = lasso_transformed_log_target(&s.phi, s.rho, &data, &prior)?
            - lasso_log_posterior(&beta, v, &data, &prior)?
            - lasso_transform_log_abs_det_inv(s.rho, 2);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok(check(
        "lasso-transform",
        rt <= 1e-12 && hi - lo <= 1e-10,
        format!("round trip {rt:.1e}, push-forward constant spread {:.1e}", hi - lo),
    ))
}

fn mode_certificates(spec: &VerifySpec) -> Result<CheckResult> {
    let mut rng = seeded_rng(derive_seed(spec.seed, &[5]));
    let mut worst = 0.0f64;
    for glm in [Glm::Probit, Glm::Logit] {
        for _ in 0..3 {
            let data = generate(&GeneratorSpec::bounded(60, 4, 1.0, glm.into(), 2.0), &mut rng)?;
            let prior = GaussianPrior::isotropic(4, 2.0)?;
            worst = worst.max(find_mode(&data, &prior, glm, 1e-9)?.grad_norm);
        }
    }
    Ok(check("mode-certificate", worst <= 1e-8, format!("largest gradient norm at the mode {worst:.1e}")))
}

fn bound_fixtures() -> Result<CheckResult> {
    let p = bound_probit_warm(&MixingBoundInput::new(100, 10, 1.0, 1.0, 1.0, 0.01))?.bound_value;
    let delta = 1.0 / (4.0 * 1000f64.sqrt());
    let cond = conductance_to_mixing(1.0, delta, 0.25, 0.5, 1.0, 0.01, Flavor::Improved, 1.0)?;
    let std = conductance_to_mixing(1.0, 1.0, 1.0, 0.5, 1.0, (-1.0f64).exp(), Flavor::Standard, 1.0)?;
    let pass = (p - 4605.17).abs() < 0.005 && (cond / p - 512.0).abs() < 1e-9 && (std - 3.0).abs() < 1e-12;
    Ok(check("bound-fixtures", pass, format!("warm probit {p:.2}, conductance ratio {:.3}, standard {std:.3}", cond / p)))
}

fn tv_sandwich(spec: &VerifySpec) -> Result<CheckResult> {
    let mut rng = seeded_rng(derive_seed(spec.seed, &[6]));
    let mut bad = 0;
    let mut worst_gap = f64::INFINITY;
    for i in 0..spec.tv_pairs {
        let glm = if i % 2 == 0 { Glm::Probit } else { Glm::Logit };
        let data = generate(&GeneratorSpec::bounded(20, 3, 1.0, glm.into(), 1.0), &mut rng)?;
        let prior = GaussianPrior::isotropic(3, 1.0)?;
        let b1 = DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let scale = rng.random_range(0.01..1.0);
        let b2 = &b1 + DVector::from_fn(3, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        let probe = one_step_tv_probe(glm, &b1, &b2, &data, &prior, 4000, &mut rng)?;
        bad += usize::from(probe.upper < probe.lower);
        worst_gap = worst_gap.min(probe.upper - probe.lower);
    }
    Ok(check(
        "tv-sandwich",
        bad == 0,
        format!("{bad} of {} pairs with lower > upper (smallest gap {worst_gap:.3})", spec.tv_pairs),
    ))
}
