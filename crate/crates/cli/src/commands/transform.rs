use anyhow::{bail, Result};
use epigeom::bodies::cross_section_body;
use epigeom::transforms::{
    cn1_radon_check, tr_limit_check, zi_limit_check, zr_identity_check, IdentityGap, SphericalFunction,
};
use epigeom::{DensitySpec, DirectionSet};
use serde::Serialize;

use super::Outcome;
use crate::args::{TransformArgs, TransformWhich};
use crate::output::{to_json, Session};

/// Directions the tested function is sampled on.
const FUNCTION_DIRECTIONS: usize = 720;

type GapCheck = fn(&DensitySpec, f64, DirectionSet) -> epigeom::Result<IdentityGap>;

#[derive(Debug, Serialize)]
struct GapEntry {
    which: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(flatten)]
    gap: IdentityGap,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tolerance: Option<bool>,
}

fn tr_limit(f: Option<&DensitySpec>, eps: f64, dirs: DirectionSet) -> Result<IdentityGap> {
    let fine = DirectionSet::circle(FUNCTION_DIRECTIONS)?;
    let g = match f {
        Some(f) => SphericalFunction::radial_power(&cross_section_body(f, 1.0, fine)?, 1.0)?,
        None => SphericalFunction::constant(fine, 1.0)?,
    };
    let points = dirs.directions().iter().map(|v| tr_limit_check(&g, v, eps)).collect::<Result<Vec<_>, _>>()?;
    Ok(IdentityGap::from_sides(points.iter().map(|p| p.lhs).collect(), points.iter().map(|p| p.rhs).collect()))
}

pub fn run(session: &mut Session, a: &TransformArgs) -> Result<Outcome> {
    let f = match &a.density {
        Some(path) => Some(session.load_density(path)?),
        None => None,
    };
    let dirs = DirectionSet::circle(a.directions)?;
    session.set_directions(dirs.len());
    let need = |f: &Option<DensitySpec>| -> Result<DensitySpec> {
        match f {
            Some(f) => Ok(f.clone()),
            None => bail!("--density is required for this check"),
        }
    };
    let mut entries = Vec::new();
    match a.which {
        TransformWhich::TrLimit => {
            for &eps in &a.eps {
                let gap = session.time("tr-limit", || tr_limit(f.as_ref(), eps, dirs))?;
                entries.push(GapEntry { which: "tr-limit", eps: Some(eps), p: None, gap, within_tolerance: None });
            }
        }
        TransformWhich::Zr => {
            let f = need(&f)?;
            for &p in &a.p {
                let gap = session.time("zr", || zr_identity_check(&f, p, dirs))?;
                entries.push(GapEntry { which: "zr", eps: None, p: Some(p), gap, within_tolerance: None });
            }
        }
        TransformWhich::Zi | TransformWhich::Cn1 => {
            let f = need(&f)?;
            let (which, check): (&'static str, GapCheck) =
                if a.which == TransformWhich::Zi { ("zi", zi_limit_check) } else { ("cn1", cn1_radon_check) };
            for &eps in &a.eps {
                let gap = session.time(which, || check(&f, eps, dirs))?;
                entries.push(GapEntry { which, eps: Some(eps), p: None, gap, within_tolerance: None });
            }
        }
    }
    let mut outcome = Outcome::Pass;
    if let Some(tol) = a.tolerance {
        for e in &mut entries {
            let ok = e.gap.max_gap <= tol;
            e.within_tolerance = Some(ok);
            if !ok {
                outcome = Outcome::Violated;
            }
        }
    }
    session.emit(a.out.as_deref(), &to_json(&entries)?)?;
    Ok(outcome)
}
