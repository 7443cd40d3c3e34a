use nalgebra::DMatrix;

use super::{check_dims, LocalObjective};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local PCA objective `f_i(X) = −½·tr(XᵀA_iA_iᵀX)` on a sample block `A_i` (n×m_i).
#[derive(Debug, Clone)]
pub struct PcaLocal<T: Real> {
    a: DMatrix<T>,
    p: usize,
}

impl<T: Real> PcaLocal<T> {
    pub fn new(a: DMatrix<T>, p: usize) -> Result<Self> {
        if a.ncols() == 0 || p == 0 || p > a.nrows() {
            return Err(Error::InvalidParameter {
                name: "pca data",
                detail: format!("need m_i >= 1 and 1 <= p <= n, got A {:?}, p = {p}", a.shape()),
            });
        }
        Ok(Self { a, p })
    }

    pub fn data(&self) -> &DMatrix<T> {
        &self.a
    }
}

impl<T: Real> LocalObjective<T> for PcaLocal<T> {
    fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.p)
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        check_dims("pca_value", self.dims(), x)?;
        Ok(-T::lit(0.5) * self.a.tr_mul(x).norm_squared())
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_dims("pca_grad", self.dims(), x)?;
        Ok(-(&self.a * self.a.tr_mul(x)))
    }
}
