//! Normal-distribution special functions that stay accurate deep in the tails.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Only meaningful for `x ≥ 0`; negative arguments overflow like the
/// unscaled product would.
pub fn erfcx(x: f64) -> f64 {
    if x < 2.0 {
        (x * x).exp() * erfc(x)
    } else {
        // Continued fraction; 60 terms reach full precision from x = 2 on.
        let mut t = x;
        for k in (1..=60).rev() {
            t = x + 0.5 * k as f64 / t;
        }
        FRAC_1_SQRT_PI / t
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal cdf.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `log Φ(x)`, accurate from the far left tail (x ≈ −40 and beyond) up to
/// large positive x where it is tiny and negative.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x > -5.0 {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        (0.5 * erfcx(-x * FRAC_1_SQRT_2)).ln() - 0.5 * x * x
    }
}

/// Inverse standard normal cdf.
pub fn norm_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Inverse Mills ratio `φ(x)/Φ(x)`.
pub fn inv_mills(x: f64) -> f64 {
    if x >= 0.0 {
        norm_pdf(x) / norm_cdf(x)
    } else {
        (2.0 / PI).sqrt() / erfcx(-x * FRAC_1_SQRT_2)
    }
}

/// `q(x) = φ(x)²/Φ(x)² + x·φ(x)/Φ(x)`, the negative derivative of the inverse
/// Mills ratio. Lies in (0, 1).
///
/// For x beyond roughly 38.5 the true value is below the smallest subnormal;
/// the result is then floored at that subnormal so it stays strictly positive.
pub fn q_mills(x: f64) -> f64 {
    let r = inv_mills(x);
    let q = r * (r + x);
    if q > 0.0 {
        q
    } else {
        f64::from_bits(1)
    }
}

/// `log cosh(x)` without overflow.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `tanh(c/2)/c`, with the removable singularity at 0 filled in (value ½).
pub fn tanh_half_over(c: f64) -> f64 {
    if c.abs() < 1e-4 {
        let c2 = c * c;
        0.5 - c2 / 24.0 + c2 * c2 / 240.0
    } else {
        (0.5 * c).tanh() / c
    }
}

/// Logistic function `e^x/(1+e^x)`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow.
pub fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_norm_cdf_matches_direct_evaluation_where_safe() {
        for &x in &[-4.9, -2.0, -0.3, 0.0, 0.7, 3.0, 6.0] {
            let direct = norm_cdf(x).ln();
            assert!((log_norm_cdf(x) - direct).abs() < 1e-12 * direct.abs().max(1e-3));
        }
    }

    #[test]
    fn log_norm_cdf_is_continuous_across_branches() {
        for &b in &[-5.0, 0.0] {
            let lo = log_norm_cdf(b - 1e-9);
            let hi = log_norm_cdf(b + 1e-9);
            assert!((lo - hi).abs() < 1e-7 * lo.abs().max(1e-7));
        }
    }

    #[test]
    fn log_norm_cdf_far_tail_matches_asymptotic_series() {
        // log Φ(x) ≈ −x²/2 − log(−x√(2π)) + log(1 − 1/x² + 3/x⁴ − 15/x⁶)
        for &x in &[-30.0, -40.0, -100.0] {
            let x2: f64 = x * x;
            let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
            let approx = -0.5 * x2 - (-x * (2.0 * PI).sqrt()).ln() + series.ln();
            assert!((log_norm_cdf(x) - approx).abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn erfcx_branches_agree_at_switch() {
        let a = (4.0f64).exp() * erfc(2.0);
        let b = erfcx(2.0);
        assert!((a - b).abs() < 1e-15 * b);
        // Reference value of erfcx(10).
        assert!((erfcx(10.0) - 0.056_140_992_743_822_59).abs() < 1e-16);
    }

    #[test]
    fn q_at_zero() {
        assert!((q_mills(0.0) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn q_is_open_unit_interval_on_dense_grid() {
        let mut x = -40.0;
        while x <= 40.0 {
            let q = q_mills(x);
            assert!(q > 0.0 && q < 1.0, "q({x}) = {q}");
            x += 0.01;
        }
    }

    #[test]
    fn q_is_negative_derivative_of_inverse_mills() {
        let h = 1e-5;
        let mut x = -8.0;
        while x <= 8.0 {
            let fd = -(inv_mills(x + h) - inv_mills(x - h)) / (2.0 * h);
            assert!((fd - q_mills(x)).abs() < 1e-6, "x = {x}");
            x += 0.05;
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-300, 1e-20, 1e-5, 0.3, 0.5, 0.9, 1.0 - 1e-12] {
            let x = norm_quantile(p);
            let back = if p < 0.5 { log_norm_cdf(x) - p.ln() } else { norm_cdf(x) - p };
            assert!(back.abs() < 1e-9, "p = {p}, x = {x}, back = {back}");
        }
    }

    #[test]
    fn tanh_half_over_is_smooth_at_zero() {
        assert_eq!(tanh_half_over(0.0), 0.5);
        for &c in &[0.99e-4, 1.01e-4] {
            assert!((tanh_half_over(c) - (0.5 * c).tanh() / c).abs() < 1e-13);
        }
    }

    #[test]
    fn log_cosh_large_argument() {
        assert!((log_cosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        assert!((log_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
    }
}
