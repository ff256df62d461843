use damix::data::{generate, GeneratorSpec};
use damix::diagnostics::plot::{plot_data_csv, svg_loglog};
use damix::diagnostics::{iat_series, scaling_sweep, verify_suite, SweepSpec, Trace};
use damix::io::{read_dataset_csv, write_dataset_csv, write_sweep_csv};
use damix::kernels::{
    feasible_start_gaussian, feasible_start_lasso, run_chain, run_langevin, KernelConfig, LangevinKind, LassoDa,
    LogitDa, ProbitDa,
};
use damix::models::{smoothness_report, Dataset, GaussianPrior, Glm, GlmPosterior, LassoPrior, ModelKind};
use damix::seeds::{derive_seed, seeded_rng};
use damix::theory::{
    bound_feasible, bound_independent_data, bound_lasso_warm, bound_logit_warm, bound_probit_warm, BoundReport,
    IndependentData, MixingBoundInput, Regime,
};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{BoundsConfig, CompareConfig, DataConfig, ExperimentConfig, SampleConfig, SweepConfig};
use crate::error::CliError;
use crate::output::Outputs;

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::Config(format!("the config has no [{name}] section")))
}

fn load_data(cfg: &DataConfig, rng: &mut ChaCha8Rng) -> Result<Dataset, CliError> {
    match (&cfg.csv, &cfg.generator) {
        (Some(path), None) => Ok(read_dataset_csv(path, cfg.entry_bound)?),
        (None, Some(spec)) => Ok(generate(spec, rng)?),
        _ => Err(CliError::Config("a data section needs exactly one of `csv` or `generator`".into())),
    }
}

pub fn sample(cfg: &ExperimentConfig, s: &SampleConfig, out: &mut Outputs) -> Result<(), CliError> {
    let mut rng = seeded_rng(cfg.seed);
    let data = load_data(&s.data, &mut rng)?;
    let kcfg = KernelConfig::new(s.zeta, cfg.seed)?;
    let n = data.n();
    let trace = match s.model {
        ModelKind::Probit | ModelKind::Logit => {
            let glm = Glm::try_from(s.model)?;
            let prior = GaussianPrior::isotropic(data.d(), s.prior.scale)?;
            let (init, _) = feasible_start_gaussian(&data, &prior, glm, 1e-8, &mut rng)?;
            match glm {
                Glm::Probit => run_chain(&ProbitDa::new(&data, &prior)?, init, &kcfg, s.iters, n, &mut rng)?.0,
                Glm::Logit => run_chain(&LogitDa::new(&data, &prior)?, init, &kcfg, s.iters, n, &mut rng)?.0,
            }
        }
        ModelKind::Lasso => {
            let prior = LassoPrior::new(s.prior.lambda, s.prior.alpha, s.prior.xi)?;
            let init = feasible_start_lasso(&data, &prior, &mut rng)?;
            run_chain(&LassoDa::new(&data, &prior)?, init, &kcfg, s.iters, n, &mut rng)?.0
        }
    };
    check_finite(&trace)?;
    out.write_trace("trace.csv", &trace)?;
    Ok(())
}

fn check_finite(trace: &Trace) -> Result<(), CliError> {
    for i in 0..trace.len() {
        if trace.row(i).iter().any(|v| !v.is_finite()) {
            return Err(CliError::Numeric(format!("non-finite state at iteration {}", i + 1)));
        }
    }
    Ok(())
}

/// Every applicable bound for the configured inputs.
pub fn bound_reports(b: &BoundsConfig, c: f64) -> Result<Vec<BoundReport>, CliError> {
    let mut inp = MixingBoundInput::new(b.n, b.d, b.m, b.b1, b.eta_log, b.eps).with_c(c);
    inp.b0 = b.b0.unwrap_or(b.b1);
    let mut out = vec![bound_probit_warm(&inp)?, bound_logit_warm(&inp)?, bound_lasso_warm(&inp)?];
    for m in [ModelKind::Probit, ModelKind::Logit, ModelKind::Lasso] {
        out.push(bound_feasible(&inp, m)?);
    }
    for glm in [Glm::Probit, Glm::Logit] {
        for regime in [Regime::Bounded, Regime::Subgaussian, Regime::Logconcave] {
            let extra = IndependentData { regime, s: b.s, k: b.k, delta: b.delta };
            out.push(bound_independent_data(&inp, glm, extra)?);
        }
    }
    Ok(out)
}

pub fn bounds(cfg: &ExperimentConfig, b: &BoundsConfig, out: &mut Outputs) -> Result<(), CliError> {
    let reports = bound_reports(b, cfg.c_convention)?;
    out.write_json("bounds.json", &reports)?;
    Ok(())
}

/// Returns whether every check passed.
pub fn verify(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<bool, CliError> {
    let spec = section(&cfg.verify, "verify")?.spec(cfg.seed);
    let report = verify_suite(&spec)?;
    out.write_text("verify_report.txt", &report.to_text())?;
    out.write_json("verify_report.json", &report)?;
    print!("{}", report.to_text());
    Ok(report.pass)
}

pub fn sweep(cfg: &ExperimentConfig, s: &SweepConfig, out: &mut Outputs) -> Result<(), CliError> {
    let spec = SweepSpec {
        model: s.model,
        n_grid: s.n_grid.clone(),
        d_grid: s.d_grid.clone(),
        replicates: s.replicates,
        iters: s.iters,
        burn_in_frac: s.burn_in_frac,
        zeta: s.zeta,
        prior_scale: s.prior_scale,
        seed: cfg.seed,
        record_timing: s.record_timing,
        bootstrap: s.bootstrap,
    };
    let (m, beta_scale, response) = (s.m, s.beta_scale, ModelKind::from(s.model));
    let result = scaling_sweep(&spec, &|n, d, rng: &mut ChaCha8Rng| {
        generate(&GeneratorSpec::bounded(n, d, m, response, beta_scale), rng)
    })?;
    out.write_with("sweep.csv", |w| Ok(write_sweep_csv(w, &result.rows)?))?;
    let points: Vec<(f64, f64)> = result.cells().iter().map(|c| (c.nd, c.iat_median)).collect();
    let title = format!("{} DA: IAT against n*d", s.model);
    out.write_text("sweep_plot.svg", &svg_loglog(&points, result.fit.as_ref(), &title, "n*d", "median IAT"))?;
    out.write_text("sweep_plot.csv", &plot_data_csv(&points, "nd", "iat_median"))?;
    out.write_json("sweep_fit.json", &result.fit)?;
    if let Some(f) = &result.fit {
        println!("slope {:.3} (95% CI {:.3} to {:.3}) over {} cells", f.slope, f.ci_lo, f.ci_hi, f.points);
    }
    Ok(())
}

pub fn gen_data(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<(), CliError> {
    let spec = &section(&cfg.gen_data, "gen-data")?.generator;
    let mut rng = seeded_rng(cfg.seed);
    let data = generate(spec, &mut rng)?;
    out.write_with("data.csv", |w| Ok(write_dataset_csv(w, &data)?))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CompareRow {
    method: &'static str,
    step: f64,
    iters: usize,
    accept_rate: f64,
    iat: f64,
    ess: f64,
    seconds: f64,
}

fn summarize(method: &'static str, step: f64, trace: &Trace, burn_in_frac: f64) -> CompareRow {
    let start = (trace.len() as f64 * burn_in_frac).floor() as usize;
    let kept = trace.len() - start;
    let iat = (0..trace.cols()).map(|j| iat_series(&trace.column_from(j, start)).iat).fold(0.5, f64::max);
    CompareRow {
        method,
        step,
        iters: trace.len(),
        accept_rate: trace.accept_rate.unwrap_or(1.0),
        iat,
        ess: kept as f64 / iat,
        seconds: trace.ns_per_iter * trace.len() as f64 * 1e-9,
    }
}

pub fn compare(cfg: &ExperimentConfig, c: &CompareConfig, out: &mut Outputs) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&c.burn_in_frac) {
        return Err(CliError::Config(format!("burn_in_frac = {} must lie in [0, 1)", c.burn_in_frac)));
    }
    let mut rng = seeded_rng(cfg.seed);
    let data = load_data(&c.data, &mut rng)?;
    let prior = GaussianPrior::isotropic(data.d(), c.prior_scale)?;
    let sm = smoothness_report(&data, &prior, c.model)?;
    let lmc_step = c.lmc_step.unwrap_or(0.1 / sm.l_prime);
    let mala_step = c.mala_step.unwrap_or(1.0 / sm.l_prime);
    for (name, h) in [("lmc_step", lmc_step), ("mala_step", mala_step)] {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Config(format!("{name} = {h} must be positive")));
        }
    }
    let (init, _) = feasible_start_gaussian(&data, &prior, c.model, 1e-8, &mut rng)?;
    let start = init.beta.clone();
    let n = data.n();

    let da_seed = derive_seed(cfg.seed, &[1]);
    let kcfg = KernelConfig::new(0.0, da_seed)?;
    let mut r = seeded_rng(da_seed);
    let da = match c.model {
        Glm::Probit => run_chain(&ProbitDa::new(&data, &prior)?, init, &kcfg, c.iters, n, &mut r)?.0,
        Glm::Logit => run_chain(&LogitDa::new(&data, &prior)?, init, &kcfg, c.iters, n, &mut r)?.0,
    };
    let target = GlmPosterior::new(c.model, &data, &prior)?;
    let langevin = |kind, step, tag: &str, k: u64| {
        let seed = derive_seed(cfg.seed, &[k]);
        run_langevin(kind, &target, start.clone(), step, c.iters, tag, seed, n, &mut seeded_rng(seed))
    };
    let lmc = langevin(LangevinKind::Lmc, lmc_step, "lmc", 2);
    let mala = langevin(LangevinKind::Mala, mala_step, "mala", 3);
    for t in [&da, &lmc, &mala] {
        check_finite(t)?;
    }
    let rows = [
        summarize("da", 0.0, &da, c.burn_in_frac),
        summarize("lmc", lmc_step, &lmc, c.burn_in_frac),
        summarize("mala", mala_step, &mala, c.burn_in_frac),
    ];
    out.write_with("compare.csv", |w| {
        writeln!(w, "method,step,iters,accept_rate,iat,ess")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{},{}", r.method, r.step, r.iters, r.accept_rate, r.iat, r.ess)?;
        }
        Ok(())
    })?;
    out.write_with("compare_timing.csv", |w| {
        writeln!(w, "method,seconds,ess_per_second")?;
        for r in &rows {
            writeln!(w, "{},{},{}", r.method, r.seconds, r.ess / r.seconds.max(1e-12))?;
        }
        Ok(())
    })?;
    for r in &rows {
        println!(
            "{:<5} iat {:>9.2}  ess {:>9.1}  ess/s {:>10.1}  accept {:.3}",
            r.method,
            r.iat,
            r.ess,
            r.ess / r.seconds.max(1e-12),
            r.accept_rate
        );
    }
    Ok(())
}
