//! Convexity of planar star bodies from the turn of their boundary polygon.

use serde_json::json;

use super::{CheckReport, CONVEXITY_TOL};
use crate::bodies::StarBody;
use crate::directions::DirectionSet;
use crate::error::{Error, Result};

/// Checks that every consecutive triple of boundary points `ρ(θ_i)·(cos θ_i, sin θ_i)`
/// turns left, which for a symmetric body is the triangle inequality of
/// `‖x‖ = |x| / ρ(x/|x|)`.
///
/// The margin is the most negative cross product over `max ρ²`; a violated
/// report names the worst triple.
pub fn convexity_certificate(body: &StarBody) -> Result<CheckReport> {
    let DirectionSet::Circle { count } = body.directions else {
        return Err(Error::Unsupported("convexity certificates outside the plane".into()));
    };
    if !body.symmetric {
        return Err(Error::Asymmetric("convexity certificates need a symmetric body".into()));
    }
    let points = body.boundary();
    let scale = body.radii.iter().fold(0.0f64, |m, r| m.max(r * r));
    let (worst, cross) = (0..count)
        .map(|i| {
            let a = &points[(i + count - 1) % count];
            let b = &points[i];
            let c = &points[(i + 1) % count];
            let turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            (i, turn / scale)
        })
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let triple = [(worst + count - 1) % count, worst, (worst + 1) % count];
    let inputs = json!({ "check": "convexity", "body": body });
    Ok(CheckReport::new("convexity", &inputs, cross, 0.0, cross, CONVEXITY_TOL, 0.0).with_details(json!({
        "worst_triple": triple,
        "worst_points": triple.iter().map(|i| &points[*i]).collect::<Vec<_>>(),
        "angles": triple.iter().map(|i| body.directions.angle(*i)).collect::<Vec<_>>(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{cross_section_body, SupportBody};
    use crate::densities::DensitySpec;
    use crate::verify::Verdict;

    #[test]
    fn disks_hold() {
        for r in [0.01, 1.0, 250.0] {
            let disk =
                StarBody::from_support_body(&SupportBody::ball(2, r).unwrap(), DirectionSet::circle(360).unwrap())
                    .unwrap();
            assert_eq!(convexity_certificate(&disk).unwrap().verdict, Verdict::Holds);
        }
    }

    #[test]
    fn four_petals_fail() {
        let b = StarBody::harmonic(360, 1.0, &[(4, 0.5)]).unwrap();
        let r = convexity_certificate(&b).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.details["worst_triple"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn square_and_c1_hold() {
        let sq = StarBody::from_support_body(&SupportBody::cube(2, 1.0).unwrap(), DirectionSet::circle(64).unwrap())
            .unwrap();
        assert!(convexity_certificate(&sq).unwrap().holds());
        let disk = DensitySpec::uniform(SupportBody::ball(2, 1.0).unwrap()).unwrap();
        let c1 = cross_section_body(&disk, 1.0, DirectionSet::circle(64).unwrap()).unwrap();
        assert!(convexity_certificate(&c1).unwrap().holds());
    }
}
