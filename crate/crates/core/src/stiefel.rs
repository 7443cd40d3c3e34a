use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::penalty::orth_residual;
use crate::scalar::Real;

/// An `n×p` matrix with orthonormal columns, `‖XᵀX − I‖_F ≤ T::construction_tol()`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint<T: Real>(DMatrix<T>);

impl<T: Real> StiefelPoint<T> {
    pub fn new(x: DMatrix<T>) -> Result<Self> {
        let residual = orth_residual(&x)?.norm();
        if residual > T::construction_tol() {
            return Err(Error::Infeasible {
                residual: residual.to_f64_lossy(),
                tol: T::construction_tol().to_f64_lossy(),
            });
        }
        Ok(Self(x))
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn p(&self) -> usize {
        self.0.ncols()
    }
}

impl<T: Real> AsRef<DMatrix<T>> for StiefelPoint<T> {
    fn as_ref(&self) -> &DMatrix<T> {
        &self.0
    }
}

/// Thin QR orthonormalization with a nonnegative diagonal in the triangular
/// factor, so the result is a deterministic function of `m`.
pub fn orthonormalize<T: Real>(m: &DMatrix<T>) -> Result<StiefelPoint<T>> {
    let (n, p) = m.shape();
    if n < p || p == 0 {
        return Err(crate::error::shape(
            "orthonormalize",
            format!("expected n >= p >= 1, got {n}x{p}"),
        ));
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let mut q = qr.q();

    let diag_max = (0..p).map(|i| r[(i, i)].abs()).fold(T::zero(), |a, b| a.max(b));
    let floor = diag_max * T::default_epsilon() * T::lit(n.max(p) as f64);
    for i in 0..p {
        let rii = r[(i, i)];
        if !(rii.abs() > floor) {
            return Err(Error::Degenerate {
                op: "orthonormalize",
                detail: format!("numerical rank below {p} (pivot {i} is {rii})"),
            });
        }
        if rii < T::zero() {
            q.column_mut(i).neg_mut();
        }
    }
    StiefelPoint::new(q)
}

/// Nearest Stiefel point in Frobenius norm, `UVᵀ` from the thin SVD.
pub fn polar_projection<T: Real>(x: &DMatrix<T>) -> Result<StiefelPoint<T>> {
    let (n, p) = x.shape();
    if n < p || p == 0 {
        return Err(crate::error::shape(
            "polar_projection",
            format!("expected n >= p >= 1, got {n}x{p}"),
        ));
    }
    let svd = x.clone().svd(true, true);
    let smin = svd.singular_values.iter().fold(T::max_value().unwrap(), |a, &b| a.min(b));
    if !(smin > T::zero()) {
        return Err(Error::Degenerate {
            op: "polar_projection",
            detail: "matrix is rank deficient".into(),
        });
    }
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    StiefelPoint::new(u * vt)
}
