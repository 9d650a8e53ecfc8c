//! Reverse entropy power inequalities for dependent coordinates `(X, Y)` of a
//! symmetric planar density.

use serde_json::json;

use super::{CheckReport, CLOSED_FORM_TOL, GRID_REL_TOL};
use crate::densities::{DensitySpec, Family};
use crate::error::{invalid, Error, Result};
use crate::renyi::{directional_entropy, EntropyResult};

/// Joint law of `(X, Y)` on R², symmetric under `(x, y) ↦ (-x, -y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity2D {
    density: DensitySpec,
}

impl JointDensity2D {
    /// Rejects densities that are not planar or not centrally symmetric
    /// (grids are compared node by node to 1e-9).
    pub fn new(density: DensitySpec) -> Result<Self> {
        if density.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: density.dim() });
        }
        if !density.is_symmetric() {
            return Err(Error::Asymmetric("joint density is not symmetric under (x, y) ↦ (-x, -y)".into()));
        }
        Ok(Self { density })
    }

    pub fn density(&self) -> &DensitySpec {
        &self.density
    }

    /// `h_p(aX + bY)`: the sum of dependent coordinates is the projection on `(a, b)`.
    pub fn combination_entropy(&self, a: f64, b: f64, p: f64) -> Result<EntropyResult> {
        directional_entropy(&self.density, &[a, b], p)
    }

    fn tolerance(&self, scale: f64) -> f64 {
        if matches!(self.density.family(), Family::Grid(_)) {
            GRID_REL_TOL * scale.abs()
        } else {
            CLOSED_FORM_TOL
        }
    }
}

/// `N_p^{1/2}(X+Y) ≤ N_p^{1/2}(X) + N_p^{1/2}(Y)`; margin `rhs - lhs`.
pub fn check_reverse_epi(joint: &JointDensity2D, p: f64) -> Result<CheckReport> {
    if p.is_nan() || p < 0.0 {
        return Err(invalid("p", format!("need p in [0, ∞], got {p}")));
    }
    let hs = joint.combination_entropy(1.0, 1.0, p)?;
    let hx = joint.combination_entropy(1.0, 0.0, p)?;
    let hy = joint.combination_entropy(0.0, 1.0, p)?;
    // N^{1/2} = exp(h) on the line.
    let (lhs, rhs) = (hs.h_p.exp(), hx.h_p.exp() + hy.h_p.exp());
    let mut err = lhs * hs.error_estimate + hx.h_p.exp() * hx.error_estimate + hy.h_p.exp() * hy.error_estimate;
    // Unbounded supports at p = 0 give ∞ ≤ ∞ + ∞, which holds in the extended reals.
    let margin = if lhs == f64::INFINITY && rhs == f64::INFINITY {
        err = 0.0;
        0.0
    } else {
        rhs - lhs
    };
    let inputs = json!({ "check": "reverse-epi", "joint": joint.density.to_json_value(), "params": { "p": p } });
    Ok(CheckReport::new("reverse-epi", &inputs, lhs, rhs, margin, joint.tolerance(rhs), err)
        .with_details(json!({ "h_sum": hs, "h_x": hx, "h_y": hy })))
}

/// Convexity of `λ ↦ h_p(λX + (1-λ)Y)` on an increasing grid in `[0, 1]`,
/// and the bound `h_p(λX + (1-λ)Y) ≤ h_p(X)`, for marginals of equal entropy.
///
/// The margin is the smallest slack over both families of inequalities.
pub fn check_entropy_convexity(joint: &JointDensity2D, p: f64, lambdas: &[f64]) -> Result<CheckReport> {
    if lambdas.len() < 3 {
        return Err(invalid("lambdas", "need at least three grid points"));
    }
    if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("lambdas", "grid must increase within [0, 1]"));
    }
    let hx = joint.combination_entropy(1.0, 0.0, p)?;
    let hy = joint.combination_entropy(0.0, 1.0, p)?;
    if (hx.h_p - hy.h_p).abs() > 1e-4 {
        return Err(Error::Precondition(format!(
            "marginal entropies differ: h_p(X) = {}, h_p(Y) = {}",
            hx.h_p, hy.h_p
        )));
    }
    let hs = lambdas.iter().map(|l| joint.combination_entropy(*l, 1.0 - l, p)).collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = hs.iter().map(|r| r.h_p).collect();
    let err = hs.iter().map(|r| r.error_estimate).fold(hx.error_estimate, f64::max);

    // Chord slack h(λ_{i-1}, λ_{i+1} interpolated at λ_i) - h(λ_i) ≥ 0.
    let mut convexity = Vec::new();
    for i in 1..lambdas.len() - 1 {
        let (a, b, c) = (lambdas[i - 1], lambdas[i], lambdas[i + 1]);
        let t = (b - a) / (c - a);
        convexity.push((1.0 - t) * h[i - 1] + t * h[i + 1] - h[i]);
    }
    let endpoint: Vec<f64> = h.iter().map(|v| hx.h_p - v).collect();
    let (ci, cmin) = argmin(&convexity);
    let (ei, emin) = argmin(&endpoint);
    let violations: Vec<f64> =
        convexity.iter().enumerate().filter(|(_, s)| **s < -CLOSED_FORM_TOL).map(|(i, _)| lambdas[i + 1]).collect();
    // lhs/rhs describe whichever inequality is tightest.
    let (lhs, rhs, margin) = if cmin <= emin {
        let i = ci + 1;
        let t = (lambdas[i] - lambdas[i - 1]) / (lambdas[i + 1] - lambdas[i - 1]);
        (h[i], (1.0 - t) * h[i - 1] + t * h[i + 1], cmin)
    } else {
        (h[ei], hx.h_p, emin)
    };
    let inputs = json!({
        "check": "entropy-convexity",
        "joint": joint.density.to_json_value(),
        "params": { "p": p, "lambdas": lambdas },
    });
    Ok(CheckReport::new("entropy-convexity", &inputs, lhs, rhs, margin, joint.tolerance(1.0), err).with_details(
        json!({
            "lambdas": lambdas,
            "h": h,
            "h_x": hx.h_p,
            "h_y": hy.h_p,
            "convexity_slack": convexity,
            "endpoint_slack": endpoint,
            "midpoint_violations": violations,
        }),
    ))
}

fn argmin(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
}
