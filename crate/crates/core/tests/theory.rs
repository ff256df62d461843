mod support;

use std::f64::consts::E;

use damix::models::{Dataset, Glm, ModelKind};
use damix::theory::{
    bound_feasible, bound_independent_data, bound_lasso_warm, bound_logit_warm, bound_probit_warm, conductance_to_mixing,
    eta_star_log_bound, lasso_extreme_threshold, verify_overlap_lasso, verify_overlap_logit, verify_overlap_probit,
    BoundReport, Flavor, IndependentData, MixingBoundInput, Regime,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use support::*;

type Eval = Box<dyn Fn(&MixingBoundInput) -> BoundReport>;

fn independent(regime: Regime) -> IndependentData {
    IndependentData { regime, s: 1.0, k: 1.0, delta: 0.01 }
}

fn evaluators() -> Vec<(&'static str, Eval)> {
    let mut v: Vec<(&'static str, Eval)> = vec![
        ("probit-warm", Box::new(|i| bound_probit_warm(i).unwrap())),
        ("logit-warm", Box::new(|i| bound_logit_warm(i).unwrap())),
        ("lasso-warm", Box::new(|i| bound_lasso_warm(i).unwrap())),
        ("probit-feasible", Box::new(|i| bound_feasible(i, ModelKind::Probit).unwrap())),
        ("logit-feasible", Box::new(|i| bound_feasible(i, ModelKind::Logit).unwrap())),
        ("lasso-feasible", Box::new(|i| bound_feasible(i, ModelKind::Lasso).unwrap())),
    ];
    for (name, regime) in [("bounded", Regime::Bounded), ("subgaussian", Regime::Subgaussian), ("logconcave", Regime::Logconcave)] {
        v.push((name, Box::new(move |i| bound_independent_data(i, Glm::Probit, independent(regime)).unwrap())));
    }
    v
}

#[test]
fn warm_start_fixtures() {
    let inp = MixingBoundInput::new(100, 10, 1.0, 1.0, 1.0, 0.01);
    let p = bound_probit_warm(&inp).unwrap().bound_value;
    assert!((p - 4605.17).abs() < 5e-3);
    assert_eq!(bound_logit_warm(&inp).unwrap().bound_value, p);
    let doubled = MixingBoundInput { n: 200, ..inp };
    assert!((bound_probit_warm(&doubled).unwrap().bound_value / p - 2.0).abs() < 1e-14);
    assert_eq!(bound_probit_warm(&inp.with_c(3.0)).unwrap().inputs.c_convention, 3.0);

    let lasso = MixingBoundInput::new(4, 2, 1.0, 1.0, 1.0, 1.0 / E);
    let want = 4.0 * (2.0 * 2f64.ln() + 4.0 * 4f64.ln()).powi(2) * 2.0;
    assert!((bound_lasso_warm(&lasso).unwrap().bound_value - want).abs() < 1e-10 * want);

    for bad in [
        MixingBoundInput::new(0, 1, 1.0, 1.0, 1.0, 0.1),
        MixingBoundInput::new(1, 1, 1.0, 1.0, 1.0, 1.0),
        MixingBoundInput::new(1, 1, 1.0, 1.0, -1.0, 0.1),
        MixingBoundInput::new(1, 1, 1.0, 1.0, 1.0, 0.1).with_c(0.0),
    ] {
        assert!(bound_probit_warm(&bad).is_err());
    }
}

#[test]
fn lasso_bound_dominates_glm_bound() {
    for n in [2, 10, 100, 1000] {
        for d in [2, 3, 10, 50] {
            for eta_log in [0.5, 5.0] {
                let inp = MixingBoundInput::new(n, d, 1.0, 1.0, eta_log, 0.01);
                let lasso = bound_lasso_warm(&inp).unwrap().bound_value;
                assert!(lasso >= bound_probit_warm(&inp).unwrap().bound_value, "n {n} d {d}");
            }
        }
        let prev = MixingBoundInput::new(n, 4, 1.0, 1.0, 1.0, 0.01);
        let next = MixingBoundInput { d: 5, ..prev };
        assert!(bound_lasso_warm(&next).unwrap().bound_value > bound_lasso_warm(&prev).unwrap().bound_value);
    }
}

#[test]
fn feasible_start_fixtures_and_consistency() {
    let inp = MixingBoundInput::new(100, 10, 1.0, 1.0, 0.0, 0.01);
    let nd = 1000.0f64;
    let probit = bound_feasible(&inp, ModelKind::Probit).unwrap().bound_value;
    assert!((probit - nd * (10.0 * (nd + 1.0).ln() / 0.01).ln()).abs() < 1e-9 * probit);
    assert_eq!(bound_feasible(&inp, ModelKind::Logit).unwrap().bound_value, probit);
    let a = 10.0 * 10f64.ln() + 100.0 * 100f64.ln();
    let lasso = bound_feasible(&inp, ModelKind::Lasso).unwrap().bound_value;
    assert!((lasso - 100.0 * a * a * (a + 100f64.ln())).abs() < 1e-9 * lasso);

    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..200 {
        let mut inp = MixingBoundInput::new(
            rng.random_range(2..5000),
            rng.random_range(1..200),
            rng.random_range(0.1..3.0),
            1.0,
            0.0,
            rng.random_range(1e-6..0.5),
        );
        inp.b0 = rng.random_range(0.05..1.0);
        for (glm, model) in [(Glm::Probit, ModelKind::Probit), (Glm::Logit, ModelKind::Logit)] {
            let warm = bound_probit_warm(&MixingBoundInput { eta_log: eta_star_log_bound(&inp, glm).unwrap(), ..inp });
            assert!(bound_feasible(&inp, model).unwrap().bound_value >= warm.unwrap().bound_value * (1.0 - 1e-12));
        }
        let (n, d) = (inp.n as f64, inp.d as f64);
        let warm = bound_lasso_warm(&MixingBoundInput { eta_log: d * d.ln() + n * n.ln(), ..inp }).unwrap();
        assert!(bound_feasible(&inp, ModelKind::Lasso).unwrap().bound_value >= warm.bound_value * (1.0 - 1e-12));
    }
}

#[test]
fn independent_data_fixtures() {
    let inp = MixingBoundInput::new(500, 20, 1.3, 1.7, 2.0, 0.05);
    let (n, d, m2, b1) = (500.0, 20.0, 1.69, 1.7);
    let l = (2.0 * d / 0.01f64).ln();
    let want = m2 * b1 * (n + l * d * m2 / 3.0 + (2.0 * l * n * d * m2).sqrt()) * (2.0f64 / 0.05).ln();
    let got = bound_independent_data(&inp, Glm::Logit, independent(Regime::Bounded)).unwrap();
    assert!((got.bound_value - want).abs() < 1e-10 * want);
    assert_eq!(got.independent.unwrap().regime, Regime::Bounded);

    // Sub-Gaussian with d ≪ n: the leading term is n·S.
    let big = MixingBoundInput::new(100_000_000, 2, 1.0, 1.0, 2.0, 0.05);
    let lead = 1e8 * (2.0f64 / 0.05).ln();
    let sg = bound_independent_data(&big, Glm::Probit, independent(Regime::Subgaussian)).unwrap().bound_value;
    assert!(sg / lead - 1.0 < 1e-3 && sg >= lead);

    let bad = IndependentData { k: 0.5, ..independent(Regime::Subgaussian) };
    assert!(bound_independent_data(&inp, Glm::Probit, bad).is_err());
    let bad = IndependentData { delta: 1.0, ..independent(Regime::Bounded) };
    assert!(bound_independent_data(&inp, Glm::Probit, bad).is_err());
}

#[test]
fn independent_data_bounds_grow_linearly_in_n_plus_d() {
    for regime in [Regime::Bounded, Regime::Subgaussian, Regime::Logconcave] {
        let ratio = |k: usize| {
            let b = |n| {
                let inp = MixingBoundInput::new(n, n, 1.0, 1.0, 2.0, 0.05);
                bound_independent_data(&inp, Glm::Probit, independent(regime)).unwrap().bound_value
            };
            b(2 * k) / b(k)
        };
        let rs: Vec<f64> = [10usize, 1000, 100_000, 10_000_000].iter().map(|&k| ratio(k)).collect();
        for w in rs.windows(2) {
            assert!((w[1] - 2.0).abs() <= (w[0] - 2.0).abs() + 1e-12, "{regime:?}: {rs:?}");
        }
        assert!((rs[3] - 2.0).abs() < 0.06, "{regime:?}: {rs:?}");
    }
}

#[test]
fn bounds_are_strictly_monotone() {
    let ns = [5usize, 10, 40, 200, 1000];
    let ds = [2usize, 3, 8, 20, 64];
    let epss = [0.4, 0.1, 0.01, 1e-3, 1e-6];
    for (name, f) in evaluators() {
        let v = |i: usize, j: usize, k: usize| f(&MixingBoundInput::new(ns[i], ds[j], 1.0, 1.0, 3.0, epss[k])).bound_value;
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let here = v(i, j, k);
                    assert!(here > 0.0);
                    if i < 4 {
                        assert!(v(i + 1, j, k) > here, "{name}: n");
                    }
                    if j < 4 {
                        assert!(v(i, j + 1, k) > here, "{name}: d");
                    }
                    if k < 4 {
                        assert!(v(i, j, k + 1) > here, "{name}: 1/eps");
                    }
                }
            }
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Dataset, DVector<f64>, DVector<f64>) {
    let (n, d) = (rng.random_range(1..=50), rng.random_range(1..=8));
    let m: f64 = rng.random_range(0.2..2.0);
    let x = DMatrix::from_fn(n, d, |_, _| m * rng.random_range(-1.0..=1.0));
    let y = DVector::from_fn(n, |_, _| f64::from(u8::from(rng.random::<bool>())));
    let scale: f64 = rng.random_range(0.01..3.0);
    let mut b = || DVector::from_fn(d, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let (b1, b2) = (b(), b());
    (Dataset::new(x, y, Some(m)).unwrap(), b1, b2)
}

#[test]
fn overlap_inequalities_hold_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..1000 {
        let (data, b1, b2) = random_instance(&mut rng);
        let nd_m2 = (data.n() * data.d()) as f64 * data.m.unwrap().powi(2);
        let gap = (&b1 - &b2).norm_squared();
        let p = verify_overlap_probit(&b1, &b2, &data).unwrap();
        assert!(p.ok && p.kl_exact >= -1e-12, "{p:?}");
        assert!(p.rhs <= 0.5 * nd_m2 * gap * (1.0 + 1e-12));
        let l = verify_overlap_logit(&b1, &b2, &data).unwrap();
        assert!(l.ok && l.kl_exact >= -1e-12, "{l:?}");
        assert!(l.rhs <= 0.125 * nd_m2 * gap * (1.0 + 1e-12));
    }
    let (data, b1, _) = random_instance(&mut rng);
    let p = verify_overlap_probit(&b1, &b1, &data).unwrap();
    assert!(p.kl_exact.abs() < 1e-15 && p.rhs == 0.0 && p.ok);
    let l = verify_overlap_logit(&b1, &b1, &data).unwrap();
    assert!(l.kl_exact.abs() < 1e-15 && l.rhs == 0.0 && l.ok);
}

fn latent_pdf(lambda: f64, phi: f64) -> impl Fn(f64) -> f64 {
    move |x| if phi == 0.0 { levy_pdf(lambda * lambda, x) } else { ig_pdf(lambda / phi.abs(), lambda * lambda, x) }
}

#[test]
fn lasso_overlap_split() {
    let phi = DVector::from_column_slice(&[0.3, -0.001, 2.0]);
    let same = verify_overlap_lasso(&phi, &phi, 1.0, 3).unwrap();
    assert!(same.coords.iter().all(|c| c.tv_bound.abs() < 1e-12 && c.kl.abs() < 1e-12), "{same:?}");

    for d in [2usize, 8, 32] {
        let lambda = 1.0;
        let thr = lasso_extreme_threshold(lambda, d);
        let mut rng = ChaCha8Rng::seed_from_u64(53 + d as u64);
        let a = DVector::from_fn(d, |_, _| rng.random_range(-thr..=thr));
        let b = DVector::from_fn(d, |_, _| rng.random_range(-thr..=thr));
        let all = verify_overlap_lasso(&a, &b, lambda, d).unwrap();
        assert!(all.ok && all.coords.iter().all(|c| c.extreme && c.tv_bound <= 1.0 / (4.0 * d as f64) + 1e-12));

        for _ in 0..3 {
            let pick = |rng: &mut ChaCha8Rng| {
                if rng.random::<bool>() {
                    rng.random_range(-thr..=thr)
                } else {
                    rng.random_range(-3.0..3.0)
                }
            };
            let a = DVector::from_fn(d, |_, _| pick(&mut rng));
            let b = DVector::from_fn(d, |_, _| pick(&mut rng));
            let r = verify_overlap_lasso(&a, &b, lambda, d).unwrap();
            assert!(r.ok);
            for (j, c) in r.coords.iter().enumerate().take(8) {
                let tv = tv_positive(latent_pdf(lambda, a[j]), latent_pdf(lambda, b[j]));
                assert!(tv <= c.tv_bound + 1e-6, "d {d} coord {j}: quadrature TV {tv} > {}", c.tv_bound);
            }
        }
    }
}

#[test]
fn conductance_fixtures() {
    let e = E;
    let std = conductance_to_mixing(1.0, 1.0, 1.0, 0.5, 1.0, 1.0 / e, Flavor::Standard, 2.0).unwrap();
    assert!((std - 6.0).abs() < 1e-12);

    let imp = |eta_log: f64| conductance_to_mixing(1.0, 1.0, 1.0, 0.5, eta_log, 0.01, Flavor::Improved, 1.0).unwrap();
    let r = imp(100.0) / imp(10.0);
    assert!((r - (100.0f64 / 0.01).ln() / (10.0f64 / 0.01).ln()).abs() < 1e-12 && r < 2.0);

    // η = e^d: the improved flavour grows like log d, the standard like d.
    let stdf = |eta_log: f64| conductance_to_mixing(1.0, 1.0, 1.0, 0.5, eta_log, 0.01, Flavor::Standard, 1.0).unwrap();
    assert!(imp(1000.0) / imp(10.0) < 2.0 && stdf(1000.0) / stdf(10.0) > 50.0);

    for flavor in [Flavor::Standard, Flavor::Improved] {
        let f = |ch: f64, delta: f64| conductance_to_mixing(ch, delta, 0.25, 0.5, 3.0, 0.01, flavor, 1.0).unwrap();
        assert!(f(2.0, 0.1) > f(1.0, 0.1) && f(1.0, 0.05) > f(1.0, 0.1));
    }
}

#[test]
fn conductance_reproduces_glm_bound_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for _ in 0..50 {
        let inp = MixingBoundInput::new(
            rng.random_range(1..10_000),
            rng.random_range(1..100),
            rng.random_range(0.1..3.0),
            rng.random_range(0.1..5.0),
            rng.random_range(0.0..50.0),
            rng.random_range(1e-6..0.5),
        );
        let nd_m2 = (inp.n * inp.d) as f64 * inp.m * inp.m;
        let delta = 1.0 / (4.0 * nd_m2.sqrt());
        let t = conductance_to_mixing(inp.b1.sqrt(), delta, 0.25, 0.5, inp.eta_log, inp.eps, Flavor::Improved, 1.0).unwrap();
        let ratio = t / bound_probit_warm(&inp).unwrap().bound_value;
        assert!((ratio - 512.0).abs() < 1e-9, "ratio {ratio}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bounds_positive_and_linear_in_c(
        n in 1usize..100_000,
        d in 1usize..500,
        eta_log in 0.0f64..1e4,
        eps in 1e-9f64..0.99,
        c in 0.01f64..100.0,
    ) {
        prop_assume!(n > 1 || d > 1);
        let inp = MixingBoundInput::new(n, d, 1.0, 1.0, eta_log, eps);
        for (_, f) in evaluators() {
            let base = f(&inp).bound_value;
            let scaled = f(&inp.with_c(c)).bound_value;
            prop_assert!(base > 0.0 && base.is_finite());
            prop_assert!((scaled / base - c).abs() < 1e-10 * c);
        }
    }
}
