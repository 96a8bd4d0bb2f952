use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Scalar field used by the exact chain solver.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Floating types compare
/// against tolerances; the rational type is exact and every tolerance check
/// degenerates to equality.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive {
    /// `num / den` in this field.
    fn ratio(num: usize, den: usize) -> Self;

    fn is_exact() -> bool;

    /// Entrywise residual accepted when verifying a matrix inverse.
    fn residual_tol() -> f64 {
        1e-10
    }

    /// `|self| <= tol`, evaluated in the field's own arithmetic.
    fn within(&self, tol: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.abs().to_f64().is_some_and(|v| v <= tol)
        }
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite value")
    }
}

impl Scalar for f64 {
    fn ratio(num: usize, den: usize) -> Self {
        num as f64 / den as f64
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn ratio(num: usize, den: usize) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn is_exact() -> bool {
        false
    }

    fn residual_tol() -> f64 {
        1e-4
    }
}

impl Scalar for BigRational {
    fn ratio(num: usize, den: usize) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_exact() -> bool {
        true
    }
}
