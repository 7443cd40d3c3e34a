use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the solver is generic over (`f32` or `f64`).
///
/// The tolerance hooks exist because the thresholds that make sense for
/// `f64` (e.g. `1e-12` feasibility at construction) are below `f32`
/// resolution.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Max `‖XᵀX − I‖_F` for a freshly constructed Stiefel point.
    fn construction_tol() -> Self;
    /// Max `‖XᵀX − I‖_F` accepted where a feasible point is required.
    fn domain_tol() -> Self;
    /// Base step of the central finite-difference oracle.
    fn fd_step() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must be representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn construction_tol() -> Self {
        1e-12
    }
    fn domain_tol() -> Self {
        1e-6
    }
    fn fd_step() -> Self {
        1e-6
    }
}

impl Real for f32 {
    fn construction_tol() -> Self {
        1e-5
    }
    fn domain_tol() -> Self {
        1e-3
    }
    fn fd_step() -> Self {
        1e-2
    }
}
