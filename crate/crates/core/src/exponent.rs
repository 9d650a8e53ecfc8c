//! The exponent `α(p)` of the Rényi entropy power inequality
//! `N_p(X+Y)^α ≥ N_p(X)^α + N_p(Y)^α`, its variational form
//! `α = (1 - sup_λ A(λ)/H(λ))^{-1}` and the functions behind it.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::grid_then_golden_max;

/// Below this distance from 1 the closed form is evaluated by its series.
pub const SERIES_WINDOW: f64 = 1e-4;
/// Minimum scan size for [`ratio_sup`].
pub const MIN_RATIO_GRID: usize = 128;

/// `s'` with `1/s + 1/s' = 1`.
pub fn holder_conjugate(s: f64) -> Result<f64> {
    if s.is_nan() || s < 1.0 {
        return Err(invalid("s", format!("conjugates need s >= 1, got {s}")));
    }
    Ok(if s == 1.0 {
        f64::INFINITY
    } else if s.is_infinite() {
        1.0
    } else {
        s / (s - 1.0)
    })
}

/// Sharp Young constant `c_s = s^{1/s} (s')^{-1/s'}`.
pub fn young_constant(s: f64) -> Result<f64> {
    let sc = holder_conjugate(s)?;
    if s == 1.0 || s.is_infinite() {
        return Ok(1.0);
    }
    Ok((s.ln() / s - sc.ln() / sc).exp())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || p.is_infinite() {
        return Err(invalid("p", format!("must be finite and > 1, got {p}")));
    }
    Ok(())
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy of a Bernoulli(λ) variable in nats.
pub fn bernoulli_entropy(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(-xlogx(lambda) - xlogx(1.0 - lambda))
}

/// `A(λ) = p'[(1-1/p')log(1-1/p') - (1-λ/p')log(1-λ/p') - (1-(1-λ)/p')log(1-(1-λ)/p')]`.
pub fn a_function(lambda: f64, p: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_p(p)?;
    let pc = holder_conjugate(p)?;
    Ok(pc * (xlogx(1.0 - 1.0 / pc) - xlogx(1.0 - lambda / pc) - xlogx(1.0 - (1.0 - lambda) / pc)))
}

/// The same function through the Young exponents: `p'(log q/q + log r/r - log p/p)`.
pub fn a_function_qr(lambda: f64, p: f64) -> Result<f64> {
    let ctx = ExponentContext::new(p, lambda)?;
    Ok(ctx.p_conj * (ctx.q.ln() / ctx.q + ctx.r.ln() / ctx.r - p.ln() / p))
}

/// The quantities attached to a split `λ = p'/q'`, `1 - λ = p'/r'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentContext {
    pub p: f64,
    pub p_conj: f64,
    pub lambda: f64,
    pub q: f64,
    pub r: f64,
    pub c_p: f64,
    pub c_q: f64,
    pub c_r: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl ExponentContext {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        check_p(p)?;
        check_lambda(lambda)?;
        let p_conj = holder_conjugate(p)?;
        let q = 1.0 / (1.0 - lambda / p_conj);
        let r = 1.0 / (1.0 - (1.0 - lambda) / p_conj);
        Ok(Self {
            p,
            p_conj,
            lambda,
            q,
            r,
            c_p: young_constant(p)?,
            c_q: young_constant(q)?,
            c_r: young_constant(r)?,
            h: bernoulli_entropy(lambda)?,
            a: a_function(lambda, p)?,
        })
    }
}

/// `(A', H', A'', H'')` at `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivatives {
    pub a1: f64,
    pub h1: f64,
    pub a2: f64,
    pub h2: f64,
}

pub fn proof_derivatives(lambda: f64, p: f64) -> Result<Derivatives> {
    check_p(p)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda", format!("derivatives need 0 < λ < 1, got {lambda}")));
    }
    let pc = holder_conjugate(p)?;
    let (u, w) = (pc - lambda, pc - (1.0 - lambda));
    Ok(Derivatives {
        a1: (u / w).ln(),
        h1: ((1.0 - lambda) / lambda).ln(),
        a2: (1.0 - 2.0 * pc) / (u * w),
        h2: -1.0 / (lambda * (1.0 - lambda)),
    })
}

/// `A(λ)/H(λ)`, extended by its limit 0 at the endpoints.
pub fn ratio(lambda: f64, p: f64) -> Result<f64> {
    let h = bernoulli_entropy(lambda)?;
    if h == 0.0 {
        check_p(p)?;
        return Ok(0.0);
    }
    Ok(a_function(lambda, p)? / h)
}

/// `sup_{λ ∈ (0,1)} A(λ)/H(λ)` and its maximiser, by a uniform scan with
/// `grid` nodes refined by golden sections.
pub fn ratio_sup(p: f64, grid: usize) -> Result<(f64, f64)> {
    check_p(p)?;
    if grid < MIN_RATIO_GRID {
        return Err(invalid("grid", format!("need at least {MIN_RATIO_GRID} nodes, got {grid}")));
    }
    let f = |l: f64| ratio(l, p).unwrap_or(f64::NEG_INFINITY);
    let (x, fx) = grid_then_golden_max(f, 0.0, 1.0, grid, 1e-12);
    Ok((fx, x))
}

/// `(p+1)/(p-1)·log((p+1)/(2p)) + log(p)/(p-1)`, by series near `p = 1`.
fn bracket(p: f64) -> f64 {
    let d = p - 1.0;
    if d.abs() >= SERIES_WINDOW {
        return (p + 1.0) / d * ((p + 1.0) / (2.0 * p)).ln() + p.ln() / d;
    }
    // log((p+1)/(2p)) / d = Σ c_k d^{k-1} with c_k = (-1)^{k+1}(2^{-k} - 1)/k,
    // log(p) / d = Σ (-1)^{k+1} d^{k-1}/k.
    let terms = 8;
    let mut ratio_series = vec![0.0; terms];
    let mut log_series = vec![0.0; terms];
    for k in 1..=terms {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        ratio_series[k - 1] = sign * (0.5f64.powi(k as i32) - 1.0) / k as f64;
        log_series[k - 1] = sign / k as f64;
    }
    let eval = |c: &[f64]| c.iter().rev().fold(0.0, |acc, ck| acc * d + ck);
    (2.0 + d) * eval(&ratio_series) + eval(&log_series)
}

/// The closed-form exponent for `p > 1`.
pub fn alpha(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(1.0 / (1.0 + bracket(p) / LN_2))
}

/// The same formula for any `p > 0`, `p ≠ 1`, with no claim that the
/// inequality holds with this exponent when `p < 1`.
pub fn alpha_exploratory(p: f64) -> Result<f64> {
    if !(p > 0.0) || p.is_infinite() {
        return Err(invalid("p", format!("must be finite and positive, got {p}")));
    }
    Ok(1.0 / (1.0 + bracket(p) / LN_2))
}

/// `α` from the variational form.
pub fn alpha_optimized(p: f64, grid: usize) -> Result<(f64, f64)> {
    let (sup, arg) = ratio_sup(p, grid)?;
    Ok((1.0 / (1.0 - sup), arg))
}

/// `(p + 1)/2`.
pub fn bm16(p: f64) -> f64 {
    0.5 * (p + 1.0)
}

/// `(p - 1)/(2 log₂((p + 1)/2))`.
pub fn lower_bound(p: f64) -> f64 {
    (p - 1.0) / (2.0 * (0.5 * (p + 1.0)).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub p: f64,
    pub alpha_closed: f64,
    pub alpha_opt: f64,
    pub bm16: f64,
    pub lower_bound: f64,
    pub argmax_lambda: f64,
}

/// Both evaluations of `α(p)` with the two comparison exponents; fails if
/// `lower_bound ≤ α < (p+1)/2` does not hold.
pub fn comparison_bounds(p: f64) -> Result<ExponentReport> {
    let alpha_closed = alpha(p)?;
    let (alpha_opt, argmax_lambda) = alpha_optimized(p, 1024)?;
    let report =
        ExponentReport { p, alpha_closed, alpha_opt, bm16: bm16(p), lower_bound: lower_bound(p), argmax_lambda };
    if !(report.lower_bound <= alpha_closed && alpha_closed < report.bm16) {
        return Err(Error::Precondition(format!(
            "ordering lower_bound <= alpha < (p+1)/2 fails at p = {p}: {} , {alpha_closed}, {}",
            report.lower_bound, report.bm16
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conjugates_and_constants() {
        assert_eq!(holder_conjugate(2.0).unwrap(), 2.0);
        assert_relative_eq!(holder_conjugate(4.0).unwrap(), 4.0 / 3.0);
        assert_eq!(holder_conjugate(1.0).unwrap(), f64::INFINITY);
        assert_eq!(holder_conjugate(f64::INFINITY).unwrap(), 1.0);
        assert!(holder_conjugate(0.5).is_err());
        assert_relative_eq!(young_constant(2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(young_constant(1.0).unwrap(), 1.0);
        assert_relative_eq!(young_constant(4.0 / 3.0).unwrap(), 0.8773826753016616, epsilon = 1e-14);
    }

    #[test]
    fn bernoulli_values() {
        assert_relative_eq!(bernoulli_entropy(0.5).unwrap(), LN_2);
        assert_eq!(bernoulli_entropy(0.0).unwrap(), 0.0);
        assert_relative_eq!(bernoulli_entropy(0.25).unwrap(), 0.5623351446188084, epsilon = 1e-15);
        assert!(bernoulli_entropy(1.5).is_err());
    }

    #[test]
    fn a_function_values() {
        assert_eq!(a_function(0.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(a_function(0.5, 2.0).unwrap(), 0.16989903679539747, epsilon = 1e-15);
        assert_relative_eq!(a_function(0.3, 5.0).unwrap(), a_function(0.7, 5.0).unwrap(), epsilon = 1e-15);
        assert_relative_eq!(a_function_qr(0.3, 5.0).unwrap(), a_function(0.3, 5.0).unwrap(), epsilon = 1e-12);
        assert!(a_function(0.5, 1.0).is_err());
    }

    #[test]
    fn young_exponents_balance() {
        let c = ExponentContext::new(3.0, 0.3).unwrap();
        assert_relative_eq!(1.0 / c.q + 1.0 / c.r, 1.0 + 1.0 / 3.0, epsilon = 1e-12);
        assert!(c.q >= 1.0 && c.q <= 3.0 && c.r >= 1.0 && c.r <= 3.0);
        // H - A = p' log(c_p / (c_q c_r)).
        assert_relative_eq!(c.h - c.a, c.p_conj * (c.c_p / (c.c_q * c.c_r)).ln(), epsilon = 1e-12);
    }

    #[test]
    fn derivatives_at_half() {
        let d = proof_derivatives(0.5, 2.0).unwrap();
        assert_eq!(d.a1, 0.0);
        assert_eq!(d.h1, 0.0);
        assert_relative_eq!(d.a2 / d.h2, 1.0 / 3.0, epsilon = 1e-15);
        assert!(proof_derivatives(0.0, 2.0).is_err());
    }

    #[test]
    fn alpha_values() {
        assert_relative_eq!(alpha(2.0).unwrap(), 1.3247006966389717, epsilon = 1e-14);
        assert_relative_eq!(alpha(1.0001).unwrap(), 1.000_036_066_873_531, epsilon = 1e-14);
        assert!(alpha(2.0).unwrap() < 1.5);
        assert!(alpha(1.0).is_err());
        let (sup, arg) = ratio_sup(2.0, 128).unwrap();
        assert_relative_eq!(sup, 0.24511249783653146, epsilon = 1e-14);
        assert!((arg - 0.5).abs() < 1e-6);
        assert!(ratio(0.2, 2.0).unwrap() <= ratio(0.4, 2.0).unwrap());
    }

    #[test]
    fn series_matches_direct_form_across_the_switch() {
        for d in [0.9e-4f64, 1.1e-4] {
            let p = 1.0 + d;
            let direct = (p + 1.0) / d * ((p + 1.0) / (2.0 * p)).ln() + p.ln() / d;
            let series = bracket(p);
            assert!((direct - series).abs() < 1e-11, "{direct} {series}");
        }
    }

    #[test]
    fn report_orders_bounds() {
        let r = comparison_bounds(2.0).unwrap();
        assert_eq!(r.bm16, 1.5);
        assert_relative_eq!(r.lower_bound, 0.8547556456757274, epsilon = 1e-14);
        assert!(comparison_bounds(1.1).is_ok());
    }
}
