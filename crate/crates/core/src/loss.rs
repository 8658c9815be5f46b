//! Margin-based convex losses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A convex loss `L(m)` of the margin `m = y * f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// `(1 - m)^2`
    #[default]
    Squared,
}

impl Loss {
    pub fn value(self, margin: f64) -> f64 {
        match self {
            Loss::Squared => {
                let r = 1.0 - margin;
                r * r
            }
        }
    }

    pub fn derivative(self, margin: f64) -> f64 {
        match self {
            Loss::Squared => -2.0 * (1.0 - margin),
        }
    }

    /// Supremum of `|L'(m)|` over feasible margins `m` in `[-1, 1]`.
    pub fn lipschitz_bound(self) -> f64 {
        match self {
            Loss::Squared => 4.0,
        }
    }

    /// Estimate of `P[y = +1 | score z]` implied by the loss.
    pub fn prob_from_score(self, z: f64) -> f64 {
        match self {
            Loss::Squared => ((1.0 + z) / 2.0).clamp(0.0, 1.0),
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::Squared => f.write_str("squared"),
        }
    }
}

impl FromStr for Loss {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared" => Ok(Loss::Squared),
            other => Err(format!("unknown loss '{other}' (expected: squared)")),
        }
    }
}
