use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::special::{inv_mills, log_norm_cdf};
use crate::{Error, Result};

/// Which half-line a unit-variance truncated normal lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(−∞, 0]`, the latent law for a zero response.
    Negative,
    /// `[0, ∞)`, the latent law for a unit response.
    Positive,
}

impl Side {
    /// Maps a binary response to its side.
    pub fn from_response(y: f64) -> Result<Side> {
        if y == 1.0 {
            Ok(Side::Positive)
        } else if y == 0.0 {
            Ok(Side::Negative)
        } else {
            Err(Error::data(format!("response {y} is not binary")))
        }
    }
}

/// `N(mu, 1)` restricted to one half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncNormalParams {
    pub mu: f64,
    pub side: Side,
}

impl TruncNormalParams {
    pub fn new(mu: f64, side: Side) -> Self {
        Self { mu, side }
    }

    /// Location as seen from the positive side: the law is `s·TN(s·mu, 1; [0,∞))`
    /// with `s = ±1`.
    fn signed(&self) -> (f64, f64) {
        match self.side {
            Side::Positive => (1.0, self.mu),
            Side::Negative => (-1.0, -self.mu),
        }
    }
}

/// Log-density of the truncated normal; `−∞` off the support.
pub fn trunc_normal_log_pdf(p: TruncNormalParams, x: f64) -> f64 {
    let (s, m) = p.signed();
    let u = s * x;
    if u < 0.0 {
        return f64::NEG_INFINITY;
    }
    -0.5 * (u - m).powi(2) - 0.5 * (2.0 * std::f64::consts::PI).ln() - log_norm_cdf(m)
}

/// Mean `mu ± φ(mu)/Φ(±mu)`.
pub fn trunc_normal_mean(p: TruncNormalParams) -> f64 {
    let (s, m) = p.signed();
    s * (m + inv_mills(m))
}

/// Draws from `TN(mu, 1; side)`.
///
/// Never returns a value on the wrong side of zero, for any finite `mu`.
pub fn sample_trunc_normal<R: Rng + ?Sized>(p: TruncNormalParams, rng: &mut R) -> f64 {
    let (s, m) = p.signed();
    let a = -m;
    let z = std_normal_above(a, rng).max(a);
    s * (m + z)
}

/// Standard normal conditioned on `Z ≥ a`.
fn std_normal_above<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a <= 0.0 {
        // Plain rejection; acceptance Φ(−a) ≥ ½.
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z >= a {
                return z;
            }
        }
    } else {
        // Exponential proposal with the optimal rate.
        let alpha = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let e: f64 = rng.sample(Exp1);
            let z = a + e / alpha;
            let u: f64 = rng.sample(rand::distr::Open01);
            if u.ln() <= -0.5 * (z - alpha).powi(2) {
                return z;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn far_tail_never_wrong_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &mu in &[-40.0, -30.0, -5.0001, -4.999, 0.0, 4.999, 5.0001, 30.0, 40.0] {
            for _ in 0..10_000 {
                assert!(sample_trunc_normal(TruncNormalParams::new(mu, Side::Positive), &mut rng) >= 0.0);
                assert!(sample_trunc_normal(TruncNormalParams::new(mu, Side::Negative), &mut rng) <= 0.0);
            }
        }
    }

    #[test]
    fn far_tail_mean_matches_mills_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = TruncNormalParams::new(-40.0, Side::Positive);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_trunc_normal(p, &mut rng)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        let want = trunc_normal_mean(p);
        assert!((m - want).abs() < 4.0 * (var / n as f64).sqrt(), "{m} vs {want}");
    }

    #[test]
    fn mean_side_symmetry() {
        let a = trunc_normal_mean(TruncNormalParams::new(1.3, Side::Positive));
        let b = trunc_normal_mean(TruncNormalParams::new(-1.3, Side::Negative));
        assert_eq!(a, -b);
    }
}
