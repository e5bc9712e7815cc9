//! Special functions and scalar search shared by the bound computations.

mod optimize;
mod special;

pub use optimize::{floor_guarded, floor_guarded_f64, minimize_scalar, minimize_scalar_grid, Minimum, GRID_CELLS};
pub use special::{
    chi_square_cdf, chi_square_median, erfc, ln_gamma, ln_normal_two_sided_tail, normal_two_sided_mass, reg_gamma_lower, reg_gamma_upper,
    std_normal_cdf,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the guarded floor.
pub const FLOOR_TOL: f64 = 1e-9;

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::param("probability", value, "must lie in [0, 1]"))
        }
    }

    /// Clamps a computed value into `[0, 1]`; NaN maps to 1 (no information).
    pub(crate) fn clamped(value: f64) -> Self {
        if value.is_nan() {
            Probability(1.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Closed search interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param("interval", if lo.is_finite() { hi } else { lo }, "endpoints must be finite"));
        }
        if lo >= hi {
            return Err(Error::param("interval", hi, format!("upper end must exceed lower end {lo}")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_range() {
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0).is_ok());
        assert!(Probability::new(-1e-18).is_err());
        assert!(Probability::new(1.0 + 1e-15).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::clamped(1.2).value(), 1.0);
    }

    #[test]
    fn interval_rejects_inverted() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert_eq!(Interval::new(0.0, 5.0).unwrap().width(), 5.0);
    }
}
