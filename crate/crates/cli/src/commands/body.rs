use anyhow::{Context, Result};
use epigeom::bodies::{
    ball_mean_body, cross_section_body, intersection_body_of_density, polar_centroid_body, radial_mean_body, z_body,
};

use super::{direction_set, Outcome};
use crate::args::{BodyArgs, BodyKind};
use crate::output::{to_json, Session};

pub fn run(session: &mut Session, a: &BodyArgs) -> Result<Outcome> {
    let f = session.load_density(&a.density)?;
    let set = direction_set(f.dim(), a.directions)?;
    session.set_directions(set.len());
    let p = || a.p.context("--p is required for this body");
    let body = session.time("body", || -> Result<_> {
        Ok(match a.kind {
            BodyKind::CrossSection => cross_section_body(&f, p()?, set)?,
            BodyKind::Intersection => intersection_body_of_density(&f, set)?,
            BodyKind::RadialMean => radial_mean_body(&f, p()?, set)?,
            BodyKind::Ball => ball_mean_body(&f, p()?, set)?,
            BodyKind::PolarCentroid => polar_centroid_body(&f, p()?, set)?,
            BodyKind::Z => z_body(&f, p()?, set)?,
        })
    })?;
    session.emit(a.out.as_deref(), &to_json(&body)?)?;
    Ok(Outcome::Pass)
}
