mod support;

use damix::diagnostics::{
    auto_grid, ess, fit_loglog_slope, iat_series, moment_check, one_step_tv_probe, quadrature_posterior, scaling_sweep,
    spearman, ModelPrior, SweepSpec, Trace,
};
use damix::kernels::{run_chain, ChainState, KernelConfig, ProbitDa};
use damix::models::{Dataset, GaussianPrior, Glm, LassoPrior, ModelKind};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use support::*;

fn col(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn moment_change(a: &damix::diagnostics::QuadratureOracle, b: &damix::diagnostics::QuadratureOracle) -> f64 {
    let dm = (&a.mean - &b.mean).amax();
    let dc = (&a.cov - &b.cov).amax();
    dm.max(dc)
}

#[test]
fn oracle_reduces_to_prior_without_data() {
    let prior = GaussianPrior::new(col(&[0.5, -1.0]), DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.6])).unwrap();
    let data = Dataset::new(DMatrix::zeros(0, 2), DVector::zeros(0), None).unwrap();
    let grid = auto_grid(ModelKind::Probit, &data, ModelPrior::Gaussian(&prior), 201, 12.0).unwrap();
    let o = quadrature_posterior(ModelKind::Probit, &data, ModelPrior::Gaussian(&prior), &grid).unwrap();
    assert!((o.weight_sum() - 1.0).abs() < 1e-10);
    assert!((&o.mean - &prior.b).amax() < 1e-8, "{}", o.mean);
    assert!((&o.cov - &prior.cov).amax() < 1e-8, "{}", o.cov);
}

#[test]
fn oracle_symmetric_data_has_zero_mean() {
    let data = Dataset::new(DMatrix::from_element(2, 1, 1.0), col(&[1.0, 0.0]), None).unwrap();
    let prior = GaussianPrior::isotropic(1, 1.0).unwrap();
    for model in [ModelKind::Probit, ModelKind::Logit] {
        let grid = auto_grid(model, &data, ModelPrior::Gaussian(&prior), 401, 12.0).unwrap();
        let o = quadrature_posterior(model, &data, ModelPrior::Gaussian(&prior), &grid).unwrap();
        assert!(o.mean[0].abs() < 1e-8, "{model}: {}", o.mean[0]);
    }
}

#[test]
fn oracle_self_converges_and_matches_independent_grid() {
    let mut r = rng(61);
    let x = DMatrix::from_fn(6, 2, |_, _| r.random_range(-1.0..1.0));
    let y = col(&[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
    let data = Dataset::new(x.clone(), y.clone(), None).unwrap();
    let prior = GaussianPrior::isotropic(2, 2.0).unwrap();
    for model in [ModelKind::Probit, ModelKind::Logit] {
        let gp = ModelPrior::Gaussian(&prior);
        let grid = auto_grid(model, &data, gp, 121, 10.0).unwrap();
        let a = quadrature_posterior(model, &data, gp, &grid).unwrap();
        let b = quadrature_posterior(model, &data, gp, &grid.refined()).unwrap();
        assert!(moment_change(&a, &b) < 1e-6, "{model}: {}", moment_change(&a, &b));

        let lp = |p: &[f64]| {
            let ll: f64 = (0..6)
                .map(|i| {
                    let eta = x[(i, 0)] * p[0] + x[(i, 1)] * p[1];
                    match model {
                        ModelKind::Probit => phi_cdf((2.0 * y[i] - 1.0) * eta).ln(),
                        _ => y[i] * eta - eta.exp().ln_1p(),
                    }
                })
                .sum();
            ll - (p[0] * p[0] + p[1] * p[1]) / 4.0
        };
        let g = grid_weights(&[(-12.0, 12.0, 481), (-12.0, 12.0, 481)], lp);
        for j in 0..2 {
            let (m, v) = g.moments(|p| p[j]);
            assert!((a.mean[j] - m).abs() < 1e-6 && (a.cov[(j, j)] - v).abs() < 1e-6, "{model} axis {j}");
        }
    }

    let data = Dataset::new(DMatrix::from_column_slice(2, 1, &[-0.8, 0.8]), col(&[-0.4, 1.1]), None).unwrap();
    let prior = LassoPrior::new(1.2, 3.0, 0.8).unwrap();
    let lp = ModelPrior::Lasso(&prior);
    let grid = auto_grid(ModelKind::Lasso, &data, lp, 321, 14.0).unwrap();
    let a = quadrature_posterior(ModelKind::Lasso, &data, lp, &grid).unwrap();
    let b = quadrature_posterior(ModelKind::Lasso, &data, lp, &grid.refined()).unwrap();
    assert!(moment_change(&a, &b) < 1e-6, "lasso: {}", moment_change(&a, &b));
    assert_eq!(a.labels, vec!["beta_1".to_string(), "v".to_string()]);
}

#[test]
fn iat_calibration() {
    let mut r = rng(62);
    let n = 200_000;
    let iid: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
    let e = iat_series(&iid);
    assert!(!e.degenerate && (e.iat - 1.0).abs() < 0.1, "iid IAT {}", e.iat);

    let rho = 0.9;
    let mut x = 0.0;
    let ar: Vec<f64> = (0..n)
        .map(|_| {
            x = rho * x + (1.0 - rho * rho as f64).sqrt() * r.sample::<f64, _>(StandardNormal);
            x
        })
        .collect();
    let e = iat_series(&ar);
    assert!((e.iat / 19.0 - 1.0).abs() < 0.15, "AR(1) IAT {}", e.iat);

    let flat = vec![3.25; 500];
    let e = iat_series(&flat);
    assert!(e.degenerate && e.iat == 500.0);

    let anti: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    assert!(iat_series(&anti).iat >= 0.5);

    let t = Trace::from_rows("iid", 1, false, iid[..10_000].iter().map(|&v| vec![v]));
    let iat = iat_series(&iid[..10_000]).iat;
    assert!((ess(&t) - 10_000.0 / iat).abs() < 1e-9);
}

fn tiny_probit() -> (Dataset, GaussianPrior) {
    let data = Dataset::new(DMatrix::from_column_slice(4, 1, &[0.8, -0.5, 1.3, 0.2]), col(&[1.0, 0.0, 1.0, 0.0]), None).unwrap();
    (data, GaussianPrior::isotropic(1, 2.0).unwrap())
}

#[test]
fn moment_check_decisions() {
    let (data, prior) = tiny_probit();
    let gp = ModelPrior::Gaussian(&prior);
    let grid = auto_grid(ModelKind::Probit, &data, gp, 801, 12.0).unwrap();
    let oracle = quadrature_posterior(ModelKind::Probit, &data, gp, &grid).unwrap();

    let mut r = rng(63);
    let iid: Vec<Vec<f64>> = (0..20_000).map(|_| oracle.sample(&mut r)).collect();
    let t = Trace::from_rows("grid", 1, false, iid.clone());
    assert!(moment_check(&t, &oracle, 0.0).unwrap().pass);
    let shifted = Trace::from_rows("grid", 1, false, iid.iter().map(|v| vec![v[0] + 0.5]));
    let rep = moment_check(&shifted, &oracle, 0.0).unwrap();
    assert!(!rep.pass && rep.z_mean[0] > 4.0);

    let decide = |seed: u64| {
        let k = ProbitDa::new(&data, &prior).unwrap();
        let cfg = KernelConfig::new(0.5, seed).unwrap();
        let (t, _) = run_chain(&k, ChainState::glm(col(&[0.0]), 4), &cfg, 40_000, 4, &mut rng(seed)).unwrap();
        moment_check(&t, &oracle, 0.2).unwrap()
    };
    let a = decide(64);
    assert!(a.pass, "{a:?}");
    assert_eq!(a, decide(64));
    assert!(moment_check(&t, &oracle, 1.0).is_err());
}

#[test]
fn sweep_on_zero_design_has_unit_iat() {
    let spec = SweepSpec {
        model: Glm::Probit,
        n_grid: vec![10, 40],
        d_grid: vec![1, 3, 5],
        replicates: 2,
        iters: 4000,
        burn_in_frac: 0.2,
        zeta: 0.0,
        prior_scale: 1.0,
        seed: 65,
        record_timing: false,
        bootstrap: 200,
    };
    let res = scaling_sweep(&spec, &|n, d, r: &mut ChaCha8Rng| {
        let y = DVector::from_fn(n, |_, _| f64::from(u8::from(r.random::<bool>())));
        Dataset::new(DMatrix::zeros(n, d), y, None)
    })
    .unwrap();
    assert_eq!(res.rows.len(), 2 * 3 * 2);
    let order: Vec<(usize, usize, usize)> = res.rows.iter().map(|r| (r.n, r.d, r.replicate)).collect();
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(order, sorted);
    for row in &res.rows {
        assert!(row.iat > 0.75 && row.iat < 1.35, "{row:?}");
        assert_eq!(row.ns_per_iter, 0.0);
        assert_eq!(row.slope_context, (row.n * row.d) as f64);
    }
    assert_eq!(res.cells().len(), 6);
    assert!(res.fit.unwrap().slope.abs() < 0.1);
}

#[test]
fn slope_fit_and_rank_correlation() {
    let x: Vec<f64> = (1..=12).map(|i| (i * 50) as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.8)).collect();
    let f = fit_loglog_slope(&x, &y, 500, 1).unwrap();
    assert!((f.slope - 0.8).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-10);
    assert!(f.ci_lo <= f.slope + 1e-12 && f.ci_hi >= f.slope - 1e-12);
    assert!(fit_loglog_slope(&x[..2], &y[..2], 10, 1).is_err());

    assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-15);
    let rev: Vec<f64> = y.iter().rev().copied().collect();
    assert!((spearman(&x, &rev).unwrap() + 1.0).abs() < 1e-15);
}

fn probe_problem(r: &mut ChaCha8Rng, n: usize, d: usize) -> (Dataset, GaussianPrior) {
    let x = DMatrix::from_fn(n, d, |_, _| r.random_range(-1.0..=1.0));
    let y = DVector::from_fn(n, |_, _| f64::from(u8::from(r.random::<bool>())));
    (Dataset::new(x, y, Some(1.0)).unwrap(), GaussianPrior::isotropic(d, 1.0).unwrap())
}

#[test]
fn tv_probe_sandwich() {
    let mut r = rng(66);
    let (n, d) = (20, 3);
    let (data, prior) = probe_problem(&mut r, n, d);
    let b = col(&[0.2, -0.4, 0.1]);
    for glm in [Glm::Probit, Glm::Logit] {
        let p = one_step_tv_probe(glm, &b, &b, &data, &prior, 4000, &mut r).unwrap();
        assert!(p.upper == 0.0 && p.lower == 0.0, "{p:?}");

        let u = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal)).normalize();
        let close = &b + u / (4.0 * ((n * d) as f64).sqrt());
        let p = one_step_tv_probe(glm, &b, &close, &data, &prior, 4000, &mut r).unwrap();
        assert!(p.upper <= 0.5, "{glm}: {p:?}");
    }

    let mut nonzero_lower = 0;
    for i in 0..100 {
        let glm = if i % 2 == 0 { Glm::Probit } else { Glm::Logit };
        let b1 = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal));
        let b2 = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal));
        let p = one_step_tv_probe(glm, &b1, &b2, &data, &prior, 2000, &mut r).unwrap();
        assert!(p.upper >= p.lower, "pair {i}: {p:?}");
        nonzero_lower += usize::from(p.lower > 0.0);
    }
    assert!(nonzero_lower > 0);
    assert!(one_step_tv_probe(Glm::Probit, &b, &b, &data, &prior, 4, &mut r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iat_is_at_least_half(xs in prop::collection::vec(-1e3f64..1e3, 2..400)) {
        let e = iat_series(&xs);
        prop_assert!(e.iat >= 0.5 && e.iat.is_finite());
    }
}
