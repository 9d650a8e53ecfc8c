//! Checks of the entropy power inequalities, the body identities and the
//! convexity of star bodies, each reported as a [`CheckReport`].

mod convexity;
mod epi;
mod identities;
mod reverse;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::densities::{DensitySpec, Family};

pub use convexity::convexity_certificate;
pub use epi::{balancing_lambda, check_epi, check_linearized, dct_lower_check, Balance};
pub use identities::{check_cminus1, check_identity_c1, check_identity_rp};
pub use reverse::{check_entropy_convexity, check_reverse_epi, JointDensity2D};

/// Tolerance of checks whose every quantity comes from closed forms or adaptive quadrature.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
/// Relative tolerance of checks that go through a grid.
pub const GRID_REL_TOL: f64 = 1e-3;
/// Relative tolerance of the body identities.
pub const IDENTITY_REL_TOL: f64 = 1e-3;
/// Relative tolerance of the analytic `C_{-1}` paths.
pub const CMINUS1_TOL: f64 = 1e-9;
/// Convexity slack, relative to the squared largest radius.
pub const CONVEXITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `holds` when `margin ≥ -tolerance` and `violated` otherwise, unless the
    /// error bar reaches across `-tolerance`, which makes the point inconclusive.
    /// A NaN margin or error bar is inconclusive.
    pub fn classify(margin: f64, tolerance: f64, error_estimate: f64) -> Self {
        if margin.is_nan() || error_estimate.is_nan() {
            return Self::Inconclusive;
        }
        let holds = margin >= -tolerance;
        let could_flip = error_estimate > (margin + tolerance).abs();
        if could_flip && error_estimate > margin.abs() {
            Self::Inconclusive
        } else if holds {
            Self::Holds
        } else {
            Self::Violated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Holds => "holds",
            Self::Violated => "violated",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// SHA-256 of the canonical JSON of the inputs.
    pub inputs_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub error_estimate: f64,
    /// Check-specific data: per-direction values, sweeps, the worst triple.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl CheckReport {
    pub fn new(name: &str, inputs: &Value, lhs: f64, rhs: f64, margin: f64, tolerance: f64, error: f64) -> Self {
        Self {
            name: name.to_string(),
            inputs_digest: digest(inputs),
            lhs,
            rhs,
            margin,
            tolerance,
            verdict: Verdict::classify(margin, tolerance, error),
            error_estimate: error,
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// Replaces the tolerance and reclassifies.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.verdict = Verdict::classify(self.margin, tolerance, self.error_estimate);
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Hex SHA-256 of a JSON value; `serde_json` keeps object keys sorted.
pub fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

pub(crate) fn is_grid(f: &DensitySpec) -> bool {
    matches!(f.family(), Family::Grid(_))
}

/// `1e-6` on closed-form paths, `1e-3·scale` once any density is a grid.
pub(crate) fn default_tolerance(densities: &[&DensitySpec], scale: f64) -> f64 {
    if densities.iter().any(|f| is_grid(f)) {
        GRID_REL_TOL * scale.abs().max(f64::MIN_POSITIVE)
    } else {
        CLOSED_FORM_TOL
    }
}

/// Largest pairwise relative gap among the given values.
pub(crate) fn spread(values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(Verdict::classify(0.0, 1e-6, 0.0), Verdict::Holds);
        assert_eq!(Verdict::classify(-2e-6, 1e-6, 0.0), Verdict::Violated);
        assert_eq!(Verdict::classify(-2e-6, 1e-6, 5e-6), Verdict::Inconclusive);
        // An error bar that cannot move the margin across the tolerance leaves the verdict alone.
        assert_eq!(Verdict::classify(0.0, 1e-6, 1e-9), Verdict::Holds);
        assert_eq!(Verdict::classify(f64::NAN, 1e-6, 0.0), Verdict::Inconclusive);
    }

    #[test]
    fn digest_is_stable() {
        let v = serde_json::json!({"b": 1, "a": [1.5, 2]});
        assert_eq!(digest(&v), digest(&serde_json::json!({"a": [1.5, 2], "b": 1})));
        assert_eq!(digest(&v).len(), 64);
    }

    #[test]
    fn spread_of_values() {
        assert_eq!(spread(&[1.0, 1.0, 1.0]), 0.0);
        assert!((spread(&[1.0, 2.0, 1.5]) - 0.5).abs() < 1e-15);
    }
}
