//! Approximate augmented Lagrangian `h = g + β·b` and its descent directions.
//!
//! With `f` the smooth objective and `X ∈ ℝ^{n×p}` (not necessarily feasible):
//!
//! ```text
//! b(X) = ¼‖XᵀX − I‖²_F
//! g(X) = (3/2) f(X) − (1/2) f(XXᵀX)
//! G(X) = (3/2)∇f(XXᵀX) − (1/2)∇f(XXᵀX)XᵀX − X·sym(Xᵀ∇f(XXᵀX))
//! H(X) = G(X) + β·X(XᵀX − I)
//! ```
//!
//! `G` replaces `∇g` so that only one gradient evaluation, at the "cube"
//! point `XXᵀX`, is needed per direction. On the manifold `G` coincides with
//! the Riemannian gradient.

use nalgebra::DMatrix;

use crate::error::{shape, Error, Result};
use crate::problems::LocalObjective;
use crate::scalar::Real;

/// Penalty weight `β > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParam<T>(T);

impl<T: Real> PenaltyParam<T> {
    pub fn new(beta: T) -> Result<Self> {
        if beta > T::zero() && beta.is_finite() {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidParameter {
                name: "beta",
                detail: format!("must be positive and finite, got {beta}"),
            })
        }
    }

    pub fn get(self) -> T {
        self.0
    }
}

fn check_tall<T: Real>(op: &'static str, x: &DMatrix<T>) -> Result<()> {
    if x.nrows() < x.ncols() || x.ncols() == 0 {
        return Err(shape(
            op,
            format!("expected n >= p >= 1, got {}x{}", x.nrows(), x.ncols()),
        ));
    }
    Ok(())
}

fn check_same<T: Real>(op: &'static str, x: &DMatrix<T>, y: &DMatrix<T>) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(shape(
            op,
            format!("{:?} vs {:?}", x.shape(), y.shape()),
        ));
    }
    Ok(())
}

/// Symmetric part `(B + Bᵀ)/2`, exactly symmetric.
pub fn sym<T: Real>(b: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !b.is_square() {
        return Err(shape("sym", format!("non-square {}x{}", b.nrows(), b.ncols())));
    }
    Ok(sym_unchecked(b))
}

pub(crate) fn sym_unchecked<T: Real>(b: &DMatrix<T>) -> DMatrix<T> {
    let k = b.nrows();
    let half = T::lit(0.5);
    let mut out = DMatrix::zeros(k, k);
    for j in 0..k {
        out[(j, j)] = b[(j, j)];
        for i in (j + 1)..k {
            let v = (b[(i, j)] + b[(j, i)]) * half;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Gram matrix `XᵀX`, exactly symmetric.
pub(crate) fn gram<T: Real>(x: &DMatrix<T>) -> DMatrix<T> {
    sym_unchecked(&x.tr_mul(x))
}

/// `XᵀX − I_p`.
pub fn orth_residual<T: Real>(x: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_tall("orth_residual", x)?;
    Ok(residual_from_gram(gram(x)))
}

fn residual_from_gram<T: Real>(mut g: DMatrix<T>) -> DMatrix<T> {
    for i in 0..g.nrows() {
        g[(i, i)] -= T::one();
    }
    g
}

/// The cube point `XXᵀX` where `G` and `H` evaluate `∇f`.
pub fn cube_point<T: Real>(x: &DMatrix<T>) -> DMatrix<T> {
    x * gram(x)
}

/// `b(X) = ¼‖XᵀX − I‖²_F`.
pub fn b_value<T: Real>(x: &DMatrix<T>) -> Result<T> {
    Ok(orth_residual(x)?.norm_squared() * T::lit(0.25))
}

/// `∇b(X) = X(XᵀX − I)`.
pub fn b_gradient<T: Real>(x: &DMatrix<T>) -> Result<DMatrix<T>> {
    Ok(x * orth_residual(x)?)
}

/// `g(X) = (3/2)f(X) − (1/2)f(XXᵀX)`.
pub fn g_value<T: Real, O: LocalObjective<T> + ?Sized>(x: &DMatrix<T>, f: &O) -> Result<T> {
    check_tall("g_value", x)?;
    let at_x = f.value(x)?;
    let at_cube = f.value(&cube_point(x))?;
    Ok(T::lit(1.5) * at_x - T::lit(0.5) * at_cube)
}

/// `h(X) = g(X) + β·b(X)`.
pub fn h_value<T: Real, O: LocalObjective<T> + ?Sized>(x: &DMatrix<T>, f: &O, beta: T) -> Result<T> {
    Ok(g_value(x, f)? + beta * b_value(x)?)
}

/// Exact gradient of `g`, which needs `∇f` at both `X` and `XXᵀX`.
pub fn grad_g<T: Real>(
    x: &DMatrix<T>,
    grad_f_at_x: &DMatrix<T>,
    grad_f_at_cube: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    check_tall("grad_g", x)?;
    check_same("grad_g", x, grad_f_at_x)?;
    check_same("grad_g", x, grad_f_at_cube)?;
    let xtx = gram(x);
    let s = sym_unchecked(&x.tr_mul(grad_f_at_cube));
    Ok(grad_f_at_x * T::lit(1.5) - (grad_f_at_cube * xtx) * T::lit(0.5) - x * s)
}

/// Exact gradient of `h`.
pub fn grad_h<T: Real>(
    x: &DMatrix<T>,
    grad_f_at_x: &DMatrix<T>,
    grad_f_at_cube: &DMatrix<T>,
    beta: T,
) -> Result<DMatrix<T>> {
    Ok(grad_g(x, grad_f_at_x, grad_f_at_cube)? + b_gradient(x)? * beta)
}

/// The approximate direction `G(X)`; `grad_f_at_cube` must be `∇f(XXᵀX)`.
pub fn direction_g<T: Real>(x: &DMatrix<T>, grad_f_at_cube: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_tall("direction_g", x)?;
    check_same("direction_g", x, grad_f_at_cube)?;
    Ok(direction_g_with_gram(x, &gram(x), grad_f_at_cube))
}

fn direction_g_with_gram<T: Real>(x: &DMatrix<T>, xtx: &DMatrix<T>, gfc: &DMatrix<T>) -> DMatrix<T> {
    let s = sym_unchecked(&x.tr_mul(gfc));
    gfc * T::lit(1.5) - (gfc * xtx) * T::lit(0.5) - x * s
}

/// `H(X) = G(X) + β·X(XᵀX − I)`.
pub fn direction_h<T: Real>(x: &DMatrix<T>, grad_f_at_cube: &DMatrix<T>, beta: T) -> Result<DMatrix<T>> {
    check_tall("direction_h", x)?;
    check_same("direction_h", x, grad_f_at_cube)?;
    let xtx = gram(x);
    let g = direction_g_with_gram(x, &xtx, grad_f_at_cube);
    let penalty = x * residual_from_gram(xtx);
    Ok(g + penalty * beta)
}

/// Evaluates `∇f` once at the cube point and returns `H(X)` for that objective.
pub fn local_direction<T: Real, O: LocalObjective<T> + ?Sized>(
    x: &DMatrix<T>,
    f: &O,
    beta: T,
) -> Result<DMatrix<T>> {
    check_tall("local_direction", x)?;
    let xtx = gram(x);
    let gfc = f.euclidean_grad(&(x * &xtx))?;
    check_same("local_direction", x, &gfc)?;
    let g = direction_g_with_gram(x, &xtx, &gfc);
    let penalty = x * residual_from_gram(xtx);
    Ok(g + penalty * beta)
}

/// `∇f(X) − X·sym(Xᵀ∇f(X))` applied to any `X`, feasible or not.
pub fn tangent_projection<T: Real>(x: &DMatrix<T>, grad_f_at_x: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_tall("tangent_projection", x)?;
    check_same("tangent_projection", x, grad_f_at_x)?;
    let s = sym_unchecked(&x.tr_mul(grad_f_at_x));
    Ok(grad_f_at_x - x * s)
}

/// Riemannian gradient on the Stiefel manifold (embedded metric).
///
/// Rejects points whose orthogonality residual exceeds [`Real::domain_tol`].
pub fn riemannian_gradient<T: Real>(x: &DMatrix<T>, grad_f_at_x: &DMatrix<T>) -> Result<DMatrix<T>> {
    let residual = orth_residual(x)?.norm();
    if residual > T::domain_tol() {
        return Err(Error::Infeasible {
            residual: residual.to_f64_lossy(),
            tol: T::domain_tol().to_f64_lossy(),
        });
    }
    tangent_projection(x, grad_f_at_x)
}

/// Membership in `{X : ‖XᵀX − I‖_F ≤ 1/6}`, where `H` dominates `G` for large `β`.
///
/// The bound carries a few ulps of slack so that points built to sit on the
/// boundary (e.g. `[[√(7/6)]]`) are not rejected by rounding in `XᵀX`.
pub fn in_region_r<T: Real>(x: &DMatrix<T>) -> Result<bool> {
    let bound = T::lit(1.0 / 6.0) * (T::one() + T::lit(8.0) * T::default_epsilon());
    Ok(orth_residual(x)?.norm() <= bound)
}
