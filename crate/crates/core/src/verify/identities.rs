//! The identities `C_1(f) = I(f̂) = (n-1) I(R_{n-1}(f))`, `R_p(f) = B_p(f̂)` and
//! `C_{-1}(f) = (2K)° = (R_∞ f)°`, checked direction by direction.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::{spread, CheckReport, CMINUS1_TOL, IDENTITY_REL_TOL};
use crate::bodies::{ball_mean_radius, cross_section_radius, intersection_radius, radial_mean_radius, SupportBody};
use crate::densities::{DensitySpec, Family};
use crate::directions::{Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::quad::grid_then_golden_max;

fn check_set(f: &DensitySpec, dirs: &DirectionSet) -> Result<()> {
    if dirs.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: dirs.dim() });
    }
    Ok(())
}

/// Builds the report from per-direction tuples of values that should agree.
fn gap_report(
    name: &str,
    f: &DensitySpec,
    dirs: DirectionSet,
    extra: serde_json::Value,
    rows: Vec<Vec<f64>>,
    tol: f64,
) -> CheckReport {
    let gaps: Vec<f64> = rows.iter().map(|r| spread(r)).collect();
    let (worst, gap) = gaps.iter().copied().enumerate().fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let inputs = json!({ "check": name, "density": f.to_json_value(), "directions": dirs, "params": extra });
    CheckReport::new(name, &inputs, gap, 0.0, -gap, tol, 0.0).with_details(json!({
        "max_relative_gap": gap,
        "worst_direction": worst,
        "values": rows,
    }))
}

/// `ρ_{C_1 f}`, `ρ_{I f̂}` and `(n-1) ρ_{I(R_{n-1} f)}` for planar `f`.
///
/// `|R_1 f ∩ v⊥|` is `ρ_{R_1 f}(u) + ρ_{R_1 f}(-u)` with `u ⊥ v`, evaluated
/// directly rather than interpolated from a sampled body.
pub fn check_identity_c1(f: &DensitySpec, dirs: DirectionSet) -> Result<CheckReport> {
    check_set(f, &dirs)?;
    if f.dim() != 2 {
        return Err(Error::Unsupported(format!("the C_1 identity is checked in the plane, got dimension {}", f.dim())));
    }
    let fhat = f.self_convolve()?;
    let rows = dirs
        .directions()
        .par_iter()
        .map(|v| {
            let u = v.perp();
            let c1 = cross_section_radius(f, v, 1.0)?;
            let ifh = intersection_radius(&fhat, v)?;
            let ir = radial_mean_radius(f, &u, 1.0)? + radial_mean_radius(f, &u.neg(), 1.0)?;
            Ok(vec![c1, ifh, ir])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gap_report("identity-c1", f, dirs, json!({}), rows, IDENTITY_REL_TOL))
}

/// `ρ_{R_p f}` against `ρ_{B_p f̂}`.
pub fn check_identity_rp(f: &DensitySpec, p: f64, dirs: DirectionSet) -> Result<CheckReport> {
    check_set(f, &dirs)?;
    let fhat = f.self_convolve()?;
    let rows = dirs
        .directions()
        .par_iter()
        .map(|v| Ok(vec![radial_mean_radius(f, v, p)?, ball_mean_radius(&fhat, v, p)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(gap_report("identity-rp", f, dirs, json!({ "p": p }), rows, IDENTITY_REL_TOL))
}

/// The support of `f` as a convex body centred at the origin, where the family determines it.
fn support_body(f: &DensitySpec) -> Option<SupportBody> {
    match f.family() {
        Family::Uniform { body, center } if center.iter().all(|c| *c == 0.0) => Some(body.clone()),
        Family::Covariogram { body } => Some(body.difference_body()),
        Family::GeneralizedGaussian(g) => g.radius().and_then(|r| SupportBody::ball(f.dim(), r).ok()),
        Family::Product(_) | Family::PiecewiseLinear(_) if f.is_compact() => {
            let half = (0..f.dim())
                .map(|i| {
                    let mut e = vec![0.0; f.dim()];
                    e[i] = 1.0;
                    let (lo, hi) = f.support_range(&e);
                    (lo == -hi).then_some(hi)
                })
                .collect::<Option<Vec<_>>>()?;
            SupportBody::boxed(half).ok()
        }
        _ => None,
    }
}

/// `h_{R_∞ f}(v) = max_u ρ_{R_∞ f}(u)(u·v)` in the plane; the maximum over the
/// boundary of a convex body is unimodal in the angle.
fn support_of_r_infinity(f: &DensitySpec, v: &Direction) -> Result<f64> {
    let phi = v.angle();
    // Surface any error once before the maximisation.
    radial_mean_radius(f, v, f64::INFINITY)?;
    let h = |theta: f64| {
        let u = Direction::from_angle(theta);
        radial_mean_radius(f, &u, f64::INFINITY).map_or(f64::NEG_INFINITY, |r| r * (theta - phi).cos())
    };
    let (_, best) = grid_then_golden_max(h, phi - 0.5 * PI, phi + 0.5 * PI, 181, 1e-13);
    Ok(best)
}

/// `1/|Range(v·X)|`, `1/h_{2K}(v)` and `1/h_{R_∞ f}(v)` for `f` supported on a
/// symmetric convex body `K`.
pub fn check_cminus1(f: &DensitySpec, dirs: DirectionSet) -> Result<CheckReport> {
    check_set(f, &dirs)?;
    let k =
        support_body(f).ok_or_else(|| Error::Unsupported(format!("support body of {} densities", f.family_name())))?;
    if !f.is_symmetric() {
        return Err(Error::Asymmetric("the support must be origin-symmetric".into()));
    }
    let rows = dirs
        .directions()
        .par_iter()
        .map(|v| {
            let (lo, hi) = f.support_range(v.as_slice());
            let range = 1.0 / (hi - lo);
            let polar = 1.0 / (2.0 * k.support(v.as_slice()));
            let r_inf = match f.dim() {
                1 => 1.0 / radial_mean_radius(f, v, f64::INFINITY)?,
                2 => 1.0 / support_of_r_infinity(f, v)?,
                n => return Err(Error::Unsupported(format!("support functions of R_∞ in dimension {n}"))),
            };
            Ok(vec![range, polar, r_inf])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gap_report("identity-cminus1", f, dirs, json!({}), rows, CMINUS1_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn disk() -> DensitySpec {
        DensitySpec::uniform(SupportBody::ball(2, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn c1_on_disk() {
        let r = check_identity_c1(&disk(), DirectionSet::circle(8).unwrap()).unwrap();
        assert!(r.holds(), "{}", r.lhs);
        let first = r.details["values"][0][0].as_f64().unwrap();
        assert_relative_eq!(first, 16.0 / (3.0 * PI * PI), epsilon = 1e-9);
    }

    #[test]
    fn rp_values() {
        let u = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        let r = check_identity_rp(&u, 1.0, DirectionSet::Line).unwrap();
        assert!(r.holds());
        assert_relative_eq!(r.details["values"][0][0].as_f64().unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.details["values"][0][1].as_f64().unwrap(), 0.5, epsilon = 1e-9);
        let g = DensitySpec::standard_gaussian(1);
        assert!(check_identity_rp(&g, 1.0, DirectionSet::Line).unwrap().lhs <= 1e-4);
    }

    #[test]
    fn cminus1_square_and_disk() {
        let sq = DensitySpec::uniform(SupportBody::cube(2, 0.5).unwrap()).unwrap();
        let r = check_cminus1(&sq, DirectionSet::circle(8).unwrap()).unwrap();
        assert!(r.holds(), "{}", r.lhs);
        assert_relative_eq!(r.details["values"][0][0].as_f64().unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.details["values"][1][1].as_f64().unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        let d = check_cminus1(&disk(), DirectionSet::circle(8).unwrap()).unwrap();
        assert!(d.holds(), "{}", d.lhs);
        assert!(check_cminus1(&DensitySpec::standard_gaussian(2), DirectionSet::circle(8).unwrap()).is_err());
    }
}
