//! Relative tolerance policy.
//!
//! Every comparison is made against `tau * scale` where `scale` is at least
//! one and otherwise tracks the magnitude of the quantities compared, so that
//! margins built from products of dispersions are judged on their own scale.

use serde::{Deserialize, Serialize};

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `max(1, |x|)` over the given magnitudes.
pub fn scale_of<I: IntoIterator<Item = f64>>(magnitudes: I) -> f64 {
    magnitudes.into_iter().fold(1.0_f64, |acc, x| acc.max(x.abs()))
}

/// Satisfaction and saturation tolerances, both relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub satisfy: f64,
    pub saturate: f64,
}

impl Tolerance {
    pub fn new(tau: f64) -> Self {
        Self {
            satisfy: tau,
            saturate: tau,
        }
    }

    pub fn with_saturation(mut self, tau: f64) -> Self {
        self.saturate = tau;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(DEFAULT_TOL)
    }
}
