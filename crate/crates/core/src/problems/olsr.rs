use nalgebra::DMatrix;

use super::{check_dims, LocalObjective};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local orthogonal least squares regression `f_i(X) = ‖C_iᵀX − D_iᵀ‖²_F`.
///
/// `C_i` is n×m_i (samples as columns), `D_i` is p×m_i (class indicators).
#[derive(Debug, Clone)]
pub struct OlsrLocal<T: Real> {
    c: DMatrix<T>,
    d_t: DMatrix<T>,
}

impl<T: Real> OlsrLocal<T> {
    pub fn new(c: DMatrix<T>, d: DMatrix<T>) -> Result<Self> {
        if c.ncols() != d.ncols() || c.ncols() == 0 || d.nrows() == 0 || d.nrows() > c.nrows() {
            return Err(Error::InvalidParameter {
                name: "olsr data",
                detail: format!(
                    "C {:?} and D {:?} must share m_i >= 1 with 1 <= p <= n",
                    c.shape(),
                    d.shape()
                ),
            });
        }
        Ok(Self { c, d_t: d.transpose() })
    }

    fn residual(&self, x: &DMatrix<T>) -> DMatrix<T> {
        self.c.tr_mul(x) - &self.d_t
    }
}

impl<T: Real> LocalObjective<T> for OlsrLocal<T> {
    fn dims(&self) -> (usize, usize) {
        (self.c.nrows(), self.d_t.ncols())
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        check_dims("olsr_value", self.dims(), x)?;
        Ok(self.residual(x).norm_squared())
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_dims("olsr_grad", self.dims(), x)?;
        Ok((&self.c * self.residual(x)) * T::lit(2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{fd_gradient, gaussian_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_fit_and_zero_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c: DMatrix<f64> = gaussian_matrix(4, 6, &mut rng);
        let x: DMatrix<f64> = gaussian_matrix(4, 2, &mut rng);
        let fit = OlsrLocal::new(c.clone(), (c.tr_mul(&x)).transpose()).unwrap();
        assert!(fit.value(&x).unwrap() <= 1e-24);
        assert!(fit.euclidean_grad(&x).unwrap().amax() <= 1e-12);

        let zero = OlsrLocal::new(c.clone(), DMatrix::zeros(2, 6)).unwrap();
        let expect = c.tr_mul(&x).norm_squared();
        assert!((zero.value(&x).unwrap() - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c: DMatrix<f64> = gaussian_matrix(5, 7, &mut rng);
        let d: DMatrix<f64> = gaussian_matrix(3, 7, &mut rng);
        let f = OlsrLocal::new(c, d).unwrap();
        let x = gaussian_matrix(5, 3, &mut rng);
        let g = f.euclidean_grad(&x).unwrap();
        let fd = fd_gradient(&f, &x).unwrap();
        assert!((&g - &fd).norm() / g.norm() <= 1e-5);
    }

    #[test]
    fn mismatched_sample_counts_rejected() {
        assert!(OlsrLocal::new(DMatrix::<f64>::zeros(4, 3), DMatrix::zeros(2, 4)).is_err());
    }
}
