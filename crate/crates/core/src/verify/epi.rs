//! Entropy power inequality of order `p` with exponent `α` for independent summands.

use serde::Serialize;
use serde_json::{json, Value};

use super::{default_tolerance, CheckReport};
use crate::densities::DensitySpec;
use crate::error::{invalid, Error, Result};
use crate::renyi::{renyi_entropy, EntropyResult};

fn inputs(name: &str, fx: &DensitySpec, fy: &DensitySpec, extra: Value) -> Value {
    json!({ "check": name, "x": fx.to_json_value(), "y": fy.to_json_value(), "params": extra })
}

fn check_pair(fx: &DensitySpec, fy: &DensitySpec) -> Result<()> {
    if fx.dim() != fy.dim() {
        return Err(Error::DimensionMismatch { expected: fx.dim(), got: fy.dim() });
    }
    if fx.dim() > 2 {
        return Err(Error::Unsupported(format!("EPI checks in dimension {}", fx.dim())));
    }
    Ok(())
}

fn check_exponent(p: f64, alpha: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(invalid("p", format!("EPI checks need p > 1, got {p}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha", format!("need a positive exponent, got {alpha}")));
    }
    Ok(())
}

/// `N_p^α` and its error bar from the entropy error.
fn powered(r: &EntropyResult, alpha: f64) -> Result<(f64, f64)> {
    if !r.n_p.is_finite() || r.n_p <= 0.0 {
        return Err(Error::InfiniteEntropyPower);
    }
    let value = r.n_p.powf(alpha);
    Ok((value, value * alpha * 2.0 / r.dim as f64 * r.error_estimate))
}

/// `N_p^α(X+Y) ≥ N_p^α(X) + N_p^α(Y)`; margin `lhs - rhs`.
pub fn check_epi(fx: &DensitySpec, fy: &DensitySpec, p: f64, alpha: f64) -> Result<CheckReport> {
    check_pair(fx, fy)?;
    check_exponent(p, alpha)?;
    let sum = fx.convolve(fy)?;
    let hs = renyi_entropy(&sum, p)?;
    let hx = renyi_entropy(fx, p)?;
    let hy = renyi_entropy(fy, p)?;
    let (lhs, es) = powered(&hs, alpha)?;
    let (nx, ex) = powered(&hx, alpha)?;
    let (ny, ey) = powered(&hy, alpha)?;
    let rhs = nx + ny;
    let tol = default_tolerance(&[fx, fy, &sum], rhs);
    let details = json!({ "h_sum": hs, "h_x": hx, "h_y": hy, "alpha": alpha });
    Ok(CheckReport::new(
        "epi",
        &inputs("epi", fx, fy, json!({ "p": p, "alpha": alpha })),
        lhs,
        rhs,
        lhs - rhs,
        tol,
        es + ex + ey,
    )
    .with_details(details))
}

/// `h_p(λ^{1/(2α)}X + (1-λ)^{1/(2α)}Y) ≥ λ h_p(X) + (1-λ) h_p(Y)`; margin `lhs - rhs`.
pub fn check_linearized(fx: &DensitySpec, fy: &DensitySpec, p: f64, alpha: f64, lambda: f64) -> Result<CheckReport> {
    check_pair(fx, fy)?;
    check_exponent(p, alpha)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("need λ in [0, 1], got {lambda}")));
    }
    let hx = renyi_entropy(fx, p)?;
    let hy = renyi_entropy(fy, p)?;
    let (sum, hs) = if lambda == 0.0 {
        (fy.clone(), hy)
    } else if lambda == 1.0 {
        (fx.clone(), hx)
    } else {
        let e = 0.5 / alpha;
        let sum = fx.scaled(lambda.powf(e))?.convolve(&fy.scaled((1.0 - lambda).powf(e))?)?;
        let hs = renyi_entropy(&sum, p)?;
        (sum, hs)
    };
    let lhs = hs.h_p;
    let rhs = lambda * hx.h_p + (1.0 - lambda) * hy.h_p;
    let err = hs.error_estimate + lambda * hx.error_estimate + (1.0 - lambda) * hy.error_estimate;
    let tol = default_tolerance(&[fx, fy, &sum], 1.0);
    let params = json!({ "p": p, "alpha": alpha, "lambda": lambda });
    Ok(CheckReport::new("linearized", &inputs("linearized", fx, fy, params), lhs, rhs, lhs - rhs, tol, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Balance {
    pub lambda: f64,
    /// `h_p(λ^{-1/(2α)}X) - h_p((1-λ)^{-1/(2α)}Y)`, from the rescaled densities.
    pub residual: f64,
}

/// `λ* = N_p^α(X) / (N_p^α(X) + N_p^α(Y))`, which equalises the rescaled entropies.
pub fn balancing_lambda(fx: &DensitySpec, fy: &DensitySpec, p: f64, alpha: f64) -> Result<Balance> {
    check_pair(fx, fy)?;
    check_exponent(p, alpha)?;
    let (nx, _) = powered(&renyi_entropy(fx, p)?, alpha)?;
    let (ny, _) = powered(&renyi_entropy(fy, p)?, alpha)?;
    let lambda = nx / (nx + ny);
    let e = -0.5 / alpha;
    let hx = renyi_entropy(&fx.scaled(lambda.powf(e))?, p)?;
    let hy = renyi_entropy(&fy.scaled((1.0 - lambda).powf(e))?, p)?;
    Ok(Balance { lambda, residual: hx.h_p - hy.h_p })
}

/// `h_0(λX + (1-λ)Y) ≥ λ h_0(X) + (1-λ) h_0(Y)` for compactly supported independent summands.
pub fn dct_lower_check(fx: &DensitySpec, fy: &DensitySpec, lambda: f64) -> Result<CheckReport> {
    check_pair(fx, fy)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("need λ in [0, 1], got {lambda}")));
    }
    for f in [fx, fy] {
        if !f.is_compact() {
            return Err(Error::Divergent(format!("support of the {} density is unbounded", f.family_name())));
        }
    }
    let hx = fx.support_volume().ln();
    let hy = fy.support_volume().ln();
    let (lhs, grid) = if lambda == 0.0 {
        (hy, false)
    } else if lambda == 1.0 {
        (hx, false)
    } else {
        let sum = fx.scaled(lambda)?.convolve(&fy.scaled(1.0 - lambda)?)?;
        (sum.support_volume().ln(), super::is_grid(&sum))
    };
    let rhs = lambda * hx + (1.0 - lambda) * hy;
    let tol = if grid { super::GRID_REL_TOL } else { super::CLOSED_FORM_TOL };
    let params = json!({ "lambda": lambda });
    Ok(CheckReport::new("dct-lower", &inputs("dct-lower", fx, fy, params), lhs, rhs, lhs - rhs, tol, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::alpha;
    use crate::verify::Verdict;
    use approx::assert_relative_eq;

    fn unif() -> DensitySpec {
        DensitySpec::uniform_interval(-0.5, 0.5).unwrap()
    }

    #[test]
    fn uniform_pair_spot_values() {
        let a = alpha(2.0).unwrap();
        let r = check_epi(&unif(), &unif(), 2.0, a).unwrap();
        assert_relative_eq!(r.lhs, 2.25f64.powf(a), max_relative = 1e-9);
        assert_relative_eq!(r.rhs, 2.0, epsilon = 1e-12);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn gaussian_pair_ratio() {
        let g = DensitySpec::standard_gaussian(1);
        let a = alpha(2.0).unwrap();
        let r = check_epi(&g, &g, 2.0, a).unwrap();
        assert_relative_eq!(r.lhs / r.rhs, 2f64.powf(a) / 2.0, max_relative = 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn linearized_endpoints_and_midpoint() {
        let g = DensitySpec::standard_gaussian(1);
        let h = DensitySpec::isotropic_gaussian(1, 2.0).unwrap();
        let a = alpha(2.0).unwrap();
        let r0 = check_linearized(&g, &h, 2.0, a, 0.0).unwrap();
        assert_eq!(r0.margin, 0.0);
        assert!(check_linearized(&g, &g, 2.0, a, 0.5).unwrap().holds());
        for k in 0..=10 {
            assert!(check_linearized(&unif(), &unif(), 2.0, a, k as f64 / 10.0).unwrap().holds());
        }
    }

    #[test]
    fn balancing() {
        let g = DensitySpec::standard_gaussian(1);
        let b = balancing_lambda(&g, &g, 2.0, 1.3).unwrap();
        assert_relative_eq!(b.lambda, 0.5, epsilon = 1e-15);
        let h = DensitySpec::isotropic_gaussian(1, 3.0).unwrap();
        let b = balancing_lambda(&g, &h, 2.0, 1.3).unwrap();
        assert!(b.residual.abs() <= 1e-6);
        // N^α(X) = 3 N^α(Y) for Y = X scaled by 3^{-1/(2α)}.
        let a = 1.3;
        let y = g.scaled(3f64.powf(-0.5 / a)).unwrap();
        assert_relative_eq!(balancing_lambda(&g, &y, 2.0, a).unwrap().lambda, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn dct_values() {
        let u1 = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        let u2 = DensitySpec::uniform_interval(0.0, 2.0).unwrap();
        let same = dct_lower_check(&u1, &u1, 0.5).unwrap();
        assert!(same.lhs.abs() < 1e-12 && same.rhs == 0.0);
        let r = dct_lower_check(&u1, &u2, 0.5).unwrap();
        assert_relative_eq!(r.lhs, 1.5f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(r.rhs, 0.5 * 2f64.ln(), epsilon = 1e-15);
        assert!(r.margin > 0.0);
        assert_eq!(dct_lower_check(&u1, &u2, 1.0).unwrap().margin, 0.0);
        assert!(dct_lower_check(&u1, &DensitySpec::standard_gaussian(1), 0.5).is_err());
    }
}
