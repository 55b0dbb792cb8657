//! Dense real-matrix kernel: products, symmetric eigendecomposition,
//! simultaneous diagonalization and span dimensions.

mod eigen;
mod matrix;
mod span;

pub use eigen::{cluster_values, common_eigen, same_cluster, sym_eigen, EigenDecomposition, Eigenspace};
pub use matrix::Matrix;
pub use span::{span_dimension, ExactSpan, OrthoSpan};

use crate::error::{Error, Result};

/// Relative tolerance for eigenvalue clustering and residual checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-8;

    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Tolerance { eps })
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    pub fn eps(self) -> f64 {
        self.eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: Self::DEFAULT_EPS }
    }
}

/// Rounds to `digits` significant decimal digits; zero, NaN and infinities
/// pass through, and negative zero becomes zero.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let exponent = x.abs().log10().floor() as i32;
    let shift = digits - 1 - exponent;
    let rounded = if shift >= 0 {
        let f = 10f64.powi(shift);
        (x * f).round() / f
    } else {
        let f = 10f64.powi(-shift);
        (x / f).round() * f
    };
    rounded + 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_significant_digits() {
        assert_eq!(round_sig(2.0_f64.sqrt(), 12), 1.41421356237);
        assert_eq!(round_sig(-0.0, 12), 0.0);
        assert_eq!(round_sig(1e-20 * 3.0, 3), 3e-20);
        assert_eq!(round_sig(123456.0, 2), 120000.0);
        assert!(Tolerance::new(0.0).is_err());
    }
}
