use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::special::{log_cosh, log_norm_cdf, tanh_half_over};
use crate::{Error, Result};

/// Truncation point of the alternating-series sampler.
const TRUNC: f64 = 0.64;
const TRUNC_RECIP: f64 = 1.0 / TRUNC;

/// Pólya-Gamma `PG(a, c)`. Only `a = 1` can be sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaGammaParams {
    pub a: f64,
    pub c: f64,
}

impl PolyaGammaParams {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !c.is_finite() {
            return Err(Error::param(format!("PG(a = {a}, c = {c})")));
        }
        Ok(Self { a, c })
    }

    /// `PG(1, c)`.
    pub fn unit(c: f64) -> Self {
        Self { a: 1.0, c }
    }
}

/// `E[ω] = a·tanh(c/2)/(2c)`, equal to `a/4` at `c = 0`.
pub fn polya_gamma_mean(p: PolyaGammaParams) -> f64 {
    0.5 * p.a * tanh_half_over(p.c)
}

/// n-th term of the alternating series for the `J*(1, 0)` density, using the
/// representation that converges fastest on each side of the truncation point.
fn series_term(n: usize, x: f64) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    if x > TRUNC {
        k * (-0.5 * k * k * x).exp()
    } else if x > 0.0 {
        let h = n as f64 + 0.5;
        (-1.5 * ((0.5 * PI).ln() + x.ln()) + k.ln() - 2.0 * h * h / x).exp()
    } else {
        0.0
    }
}

fn jstar_pdf(x: f64) -> f64 {
    let mut s = 0.0;
    for n in 0..10_000 {
        let t = series_term(n, x);
        s += if n % 2 == 0 { t } else { -t };
        if t <= 1e-17 * s.abs() || t == 0.0 {
            break;
        }
    }
    s.max(0.0)
}

/// Log-density of `PG(1, c)` through its alternating-series representation.
pub fn polya_gamma_log_pdf(c: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    // PG(1, 0) = J*(1, 0)/4, then exponential tilting.
    log_cosh(0.5 * c) - 0.5 * c * c * x + 4f64.ln() + jstar_pdf(4.0 * x).ln()
}

/// Exact draw from `PG(1, c)` by the alternating-series rejection method.
///
/// Shapes other than `a = 1` are rejected with [`Error::UnsupportedShape`].
pub fn sample_polya_gamma<R: Rng + ?Sized>(p: PolyaGammaParams, rng: &mut R) -> Result<f64> {
    if p.a != 1.0 {
        return Err(Error::UnsupportedShape(p.a));
    }
    Ok(0.25 * sample_jstar(0.5 * p.c.abs(), rng))
}

/// Draws `J*(1, z)`, z ≥ 0.
fn sample_jstar<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let p_exp = mass_texpon(z, fz);
    loop {
        let x = if rng.random::<f64>() < p_exp {
            TRUNC + rng.sample::<f64, _>(Exp1) / fz
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = series_term(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_term(n, x);
                if y <= s {
                    return x;
                }
            } else {
                s += series_term(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// Probability that the proposal comes from the exponential piece.
fn mass_texpon(z: f64, fz: f64) -> f64 {
    let t = TRUNC;
    let rt = (1.0 / t).sqrt();
    let b = rt * (t * z - 1.0);
    let a = -rt * (t * z + 1.0);
    let x0 = fz.ln() + fz * t;
    let xb = x0 - z + log_norm_cdf(b);
    let xa = x0 + z + log_norm_cdf(a);
    let qdivp = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + qdivp)
}

/// Inverse-Gaussian `IG(1/z, 1)` restricted to `(0, TRUNC]`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let t = TRUNC;
    if z < TRUNC_RECIP {
        // Mean beyond the truncation point: draw from the z = 0 law on (0, t]
        // and accept by the tilt.
        loop {
            let x = loop {
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                if e1 * e1 <= 2.0 * e2 / t {
                    let d = 1.0 + e1 * t;
                    break t / (d * d);
                }
            };
            if rng.random::<f64>() <= (-0.5 * z * z * x).exp() {
                return x;
            }
        }
    } else {
        let mu = 1.0 / z;
        loop {
            let nu: f64 = rng.sample(StandardNormal);
            let muy = mu * nu * nu;
            let mut x = mu + 0.5 * mu * muy - 0.5 * mu * (4.0 * muy + muy * muy).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x <= t {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_other_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = PolyaGammaParams::new(2.0, 1.0).unwrap();
        assert!(matches!(sample_polya_gamma(p, &mut rng), Err(Error::UnsupportedShape(a)) if a == 2.0));
    }

    #[test]
    fn density_normalises_and_has_the_tanh_mean() {
        for &c in &[0.0, 1.0, 3.0, 8.0] {
            let z = integrate(|x| polya_gamma_log_pdf(c, x).exp(), 0.0, f64::INFINITY, 1e-11, 0.0);
            let m = integrate(|x| x * polya_gamma_log_pdf(c, x).exp(), 0.0, f64::INFINITY, 1e-11, 0.0);
            assert!((z - 1.0).abs() < 1e-8, "c = {c}: mass {z}");
            assert!((m - polya_gamma_mean(PolyaGammaParams::unit(c))).abs() < 1e-8, "c = {c}: mean {m}");
        }
    }

    #[test]
    fn series_representations_agree_at_the_switch() {
        // Both expansions describe the same density; compare just either side.
        let lo = jstar_pdf(TRUNC - 1e-9);
        let hi = jstar_pdf(TRUNC + 1e-9);
        assert!((lo - hi).abs() < 1e-7);
    }

    #[test]
    fn large_tilt_draws_are_positive_and_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &c in &[50.0, 300.0, 2000.0] {
            for _ in 0..1000 {
                let w = sample_polya_gamma(PolyaGammaParams::unit(c), &mut rng).unwrap();
                assert!(w > 0.0 && w.is_finite());
            }
        }
    }
}
