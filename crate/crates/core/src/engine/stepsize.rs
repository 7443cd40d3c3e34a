use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Below this `‖J‖²_F` the BB quotient is meaningless and `eta_max` is used.
pub const BB_STAGNATION: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeRule<T> {
    /// Common constant stepsize.
    Fixed { eta: T },
    /// Per-agent Barzilai–Borwein stepsizes `|⟨S,J⟩/⟨J,J⟩|`, clamped, with
    /// `eta0` used in the first round.
    Bb { eta0: T, eta_min: T, eta_max: T },
}

impl<T: Real> StepsizeRule<T> {
    pub fn fixed(eta: T) -> Result<Self> {
        let rule = StepsizeRule::Fixed { eta };
        rule.validate()?;
        Ok(rule)
    }

    pub fn bb(eta0: T, eta_min: T, eta_max: T) -> Result<Self> {
        let rule = StepsizeRule::Bb { eta0, eta_min, eta_max };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    detail: format!("must be positive and finite, got {v}"),
                })
            }
        };
        match *self {
            StepsizeRule::Fixed { eta } => positive("eta", eta),
            StepsizeRule::Bb { eta0, eta_min, eta_max } => {
                positive("eta0", eta0)?;
                positive("eta_min", eta_min)?;
                positive("eta_max", eta_max)?;
                if eta_min <= eta0 && eta0 <= eta_max {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "eta0",
                        detail: format!("need eta_min <= eta0 <= eta_max, got {eta_min} <= {eta0} <= {eta_max}"),
                    })
                }
            }
        }
    }
}

impl<T: Real> Default for StepsizeRule<T> {
    fn default() -> Self {
        StepsizeRule::Bb {
            eta0: T::lit(1e-3),
            eta_min: T::lit(1e-10),
            eta_max: T::one(),
        }
    }
}

/// `|⟨S,J⟩/⟨J,J⟩|` clamped to `[eta_min, eta_max]`, with `S` the iterate
/// difference and `J` the tracker difference.
pub fn bb_stepsize<T: Real>(s: &DMatrix<T>, j: &DMatrix<T>, eta_min: T, eta_max: T) -> T {
    let jj = j.norm_squared();
    if !(jj >= T::lit(BB_STAGNATION)) {
        return eta_max;
    }
    let eta = (s.dot(j) / jj).abs();
    eta.max(eta_min).min(eta_max)
}
