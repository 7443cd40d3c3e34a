use nalgebra::DMatrix;

use super::{check_dims, LocalObjective};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local ℓ₄-maximization dictionary learning `f_i(X) = −¼‖XᵀB_i‖₄⁴`.
#[derive(Debug, Clone)]
pub struct SdlLocal<T: Real> {
    b: DMatrix<T>,
    p: usize,
}

impl<T: Real> SdlLocal<T> {
    pub fn new(b: DMatrix<T>, p: usize) -> Result<Self> {
        if b.ncols() == 0 || p == 0 || p > b.nrows() {
            return Err(Error::InvalidParameter {
                name: "sdl data",
                detail: format!("need m_i >= 1 and 1 <= p <= n, got B {:?}, p = {p}", b.shape()),
            });
        }
        Ok(Self { b, p })
    }
}

impl<T: Real> LocalObjective<T> for SdlLocal<T> {
    fn dims(&self) -> (usize, usize) {
        (self.b.nrows(), self.p)
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        check_dims("sdl_value", self.dims(), x)?;
        let y = x.tr_mul(&self.b);
        let sum = y.iter().fold(T::zero(), |acc, &v| {
            let sq = v * v;
            acc + sq * sq
        });
        Ok(-T::lit(0.25) * sum)
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_dims("sdl_grad", self.dims(), x)?;
        let cubed = self.b.tr_mul(x).map(|v| v * v * v);
        Ok(-(&self.b * cubed))
    }
}
