//! Numerical thresholds used across the crate.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Tolerances. The defaults are tuned for `f64`; `f32` callers should
/// loosen them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances<T> {
    /// `|tr² − 4|` below this declares a transform parabolic.
    pub parabolic: T,
    /// Entrywise distance to `±I` below this declares the identity.
    pub identity: T,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: T,
    /// Absolute residual accepted by Newton solves.
    pub newton: T,
    /// Vanishing threshold for the real part of a meridian length.
    pub rational: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            parabolic: T::lit(1e-9),
            identity: T::lit(1e-9),
            rank: T::lit(1e-8),
            newton: T::lit(1e-12),
            rational: T::lit(1e-9),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            ("parabolic", self.parabolic),
            ("identity", self.identity),
            ("rank", self.rank),
            ("newton", self.newton),
            ("rational", self.rational),
        ];
        for (name, v) in all {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(crate::Error::InvalidArgument(format!(
                    "tolerance `{name}` must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}
