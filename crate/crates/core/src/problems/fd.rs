use nalgebra::DMatrix;

use super::{check_dims, LocalObjective};
use crate::error::Result;
use crate::scalar::Real;

/// Central finite-difference gradient, entry by entry, with step
/// `T::fd_step()·(1 + max|X_ij|)`.
pub fn fd_gradient<T: Real, O: LocalObjective<T> + ?Sized>(f: &O, x: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_dims("fd_gradient", f.dims(), x)?;
    let step = T::fd_step() * (T::one() + x.amax());
    let two_step = step + step;
    let mut probe = x.clone();
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for idx in 0..x.len() {
        let orig = probe[idx];
        probe[idx] = orig + step;
        let up = f.value(&probe)?;
        probe[idx] = orig - step;
        let down = f.value(&probe)?;
        probe[idx] = orig;
        out[idx] = (up - down) / two_step;
    }
    Ok(out)
}

/// Wraps a closure as a [`LocalObjective`] whose gradient is [`fd_gradient`].
pub struct FnObjective<F> {
    dims: (usize, usize),
    f: F,
}

impl<F> FnObjective<F> {
    pub fn new(dims: (usize, usize), f: F) -> Self {
        Self { dims, f }
    }
}

impl<T: Real, F: Fn(&DMatrix<T>) -> T> LocalObjective<T> for FnObjective<F> {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        check_dims("fn_objective", self.dims, x)?;
        Ok((self.f)(x))
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        fd_gradient(self, x)
    }
}
