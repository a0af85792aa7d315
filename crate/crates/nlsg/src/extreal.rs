//! Extended non-negative reals.
//!
//! Poincaré constants can be genuinely infinite (bipartite graphs, identity
//! matrices, disconnected instances). [`ExtReal`] represents ∞ explicitly as
//! a variant rather than as a sentinel float, and carries the ratio
//! conventions used throughout the crate:
//!
//! * `0/0` is *skipped* — [`ExtReal::from_ratio`] returns `None`;
//! * `x/0` with `x > 0` is ∞;
//! * products with an infinite factor are infinite (`∞·x = ∞`).

use std::fmt;

/// A non-negative real number or ∞.
///
/// The derived ordering places every `Finite` value below `Infinite`, and
/// compares finite values numerically.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    /// Wraps a finite value. Panics (debug) on NaN or infinite floats —
    /// infinity must be produced through the ratio conventions instead.
    pub fn finite(x: f64) -> Self {
        debug_assert!(x.is_finite(), "ExtReal::finite got {x}");
        ExtReal::Finite(x)
    }

    /// Evaluates `num/den` under the crate's ratio conventions.
    ///
    /// Returns `None` for the skipped `0/0` case, `Some(Infinite)` for
    /// `x/0` with `x > 0`, and the finite quotient otherwise.
    pub fn from_ratio(num: f64, den: f64) -> Option<Self> {
        debug_assert!(num >= 0.0 && den >= 0.0);
        if den == 0.0 {
            if num == 0.0 {
                None
            } else {
                Some(ExtReal::Infinite)
            }
        } else {
            Some(ExtReal::Finite(num / den))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    /// The value as an `f64`, with ∞ mapped to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    /// Product with the convention `∞·x = ∞`.
    pub fn mul(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            _ => ExtReal::Infinite,
        }
    }

    /// Product with a finite non-negative scalar (`∞·c = ∞`).
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c.is_finite() && c >= 0.0);
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a * c),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    /// Pointwise maximum.
    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        assert!(ExtReal::finite(3.0) < ExtReal::Infinite);
        assert!(ExtReal::finite(2.0) < ExtReal::finite(3.0));
        assert!(ExtReal::Infinite == ExtReal::Infinite);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ExtReal::from_ratio(0.0, 0.0), None);
        assert_eq!(ExtReal::from_ratio(1.0, 0.0), Some(ExtReal::Infinite));
        assert_eq!(ExtReal::from_ratio(1.0, 2.0), Some(ExtReal::finite(0.5)));
    }

    #[test]
    fn products_absorb_infinity() {
        assert_eq!(ExtReal::Infinite.mul(ExtReal::finite(0.5)), ExtReal::Infinite);
        assert_eq!(
            ExtReal::finite(2.0).mul(ExtReal::finite(3.0)),
            ExtReal::finite(6.0)
        );
    }
}
