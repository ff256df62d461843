//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Dimension up to which the largest eigenvalue is taken from a full
/// symmetric eigendecomposition; power iteration is used above it.
pub const EIGEN_DIRECT_MAX_DIM: usize = 512;
const POWER_TOL: f64 = 1e-10;

/// Cholesky factorisation with an error instead of `None`.
pub fn cholesky(a: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a).ok_or_else(|| Error::NotSpd(what.to_string()))
}

/// Draws `N(mean, P⁻¹)` given the Cholesky factor `P = LLᵀ` of the precision,
/// scaling the noise by `scale`: `mean + scale·L⁻ᵀε`.
pub fn sample_from_precision<R: Rng + ?Sized>(
    chol: &Cholesky<f64, Dyn>,
    mean: &DVector<f64>,
    scale: f64,
    rng: &mut R,
) -> DVector<f64> {
    let d = mean.len();
    let eps = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let l = chol.l();
    let w = l
        .transpose()
        .solve_upper_triangular(&eps)
        .expect("Cholesky factor has a positive diagonal");
    mean + w * scale
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
pub fn lambda_max_sym(a: &DMatrix<f64>) -> f64 {
    let d = a.nrows();
    if d == 0 {
        return 0.0;
    }
    if d <= EIGEN_DIRECT_MAX_DIM {
        SymmetricEigen::new(a.clone()).eigenvalues.max()
    } else {
        power_iteration(a, POWER_TOL, 10_000)
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min_sym(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}

/// Power iteration for the dominant eigenvalue of a PSD matrix, stopping when
/// the Rayleigh quotient changes by less than `tol` relative.
pub fn power_iteration(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> f64 {
    let d = a.nrows();
    // Deterministic, generic start vector.
    let mut x = DVector::from_fn(d, |i, _| 1.0 + (i as f64 * 0.618_033_988_75).fract());
    x /= x.norm();
    let mut lam = 0.0;
    for _ in 0..max_iter {
        let y = a * &x;
        let next = x.dot(&y);
        let ny = y.norm();
        if ny == 0.0 {
            return 0.0;
        }
        x = y / ny;
        if (next - lam).abs() <= tol * next.abs().max(f64::MIN_POSITIVE) {
            return next.max(lam);
        }
        lam = next;
    }
    lam
}

/// `XᵀX` for a row-major design.
pub fn gram(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.tr_mul(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_iteration_agrees_with_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DMatrix::from_fn(40, 12, |_, _| rng.random::<f64>() - 0.5);
        let g = gram(&x);
        let direct = SymmetricEigen::new(g.clone()).eigenvalues.max();
        let pi = power_iteration(&g, 1e-13, 100_000);
        assert!((direct - pi).abs() < 1e-8 * direct);
    }

    #[test]
    fn precision_sampler_has_right_covariance() {
        let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
        let cov = p.clone().try_inverse().unwrap();
        let chol = cholesky(p, "test").unwrap();
        let mean = DVector::from_vec(vec![1.0, -1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200_000;
        let mut s = DMatrix::zeros(2, 2);
        let mut m = DVector::zeros(2);
        for _ in 0..n {
            let x = sample_from_precision(&chol, &mean, 1.0, &mut rng);
            m += &x;
            let c = &x - &mean;
            s += &c * c.transpose();
        }
        m /= n as f64;
        s /= n as f64;
        assert!((m - mean).norm() < 0.01);
        assert!((s - cov).norm() < 0.02);
    }
}
