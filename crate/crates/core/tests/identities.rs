use std::f64::consts::PI;

use approx::assert_relative_eq;
use epigeom::bodies::{cross_section_body, intersection_body_of_density, radial_mean_radius};
use epigeom::verify::{check_cminus1, check_identity_c1, check_reverse_epi, convexity_certificate};
use epigeom::{DensitySpec, Direction, DirectionSet, JointDensity2D, SupportBody, Verdict};

fn disk() -> DensitySpec {
    DensitySpec::uniform(SupportBody::ball(2, 1.0).unwrap()).unwrap()
}

#[test]
fn disk_section_radius() {
    let body = cross_section_body(&disk(), 1.0, DirectionSet::circle(16).unwrap()).unwrap();
    for r in &body.radii {
        assert_relative_eq!(*r, 16.0 / (3.0 * PI * PI), epsilon = 1e-9);
    }
}

#[test]
fn covariogram_sections_match_section_body() {
    let f = disk();
    let dirs = DirectionSet::circle(16).unwrap();
    let c1 = cross_section_body(&f, 1.0, dirs).unwrap();
    let i = intersection_body_of_density(&f.self_convolve().unwrap(), dirs).unwrap();
    assert!(c1.max_relative_gap(&i).unwrap() <= 1e-6);
}

#[test]
fn reverse_epi_is_tight_for_the_square_at_zero() {
    let sq = DensitySpec::uniform(SupportBody::cube(2, 0.5).unwrap()).unwrap();
    let r = check_reverse_epi(&JointDensity2D::new(sq).unwrap(), 0.0).unwrap();
    assert!(r.margin.abs() <= 1e-9);
}

#[test]
fn r_infinity_of_square_is_difference_body() {
    let sq = DensitySpec::uniform(SupportBody::cube(2, 0.5).unwrap()).unwrap();
    let r = radial_mean_radius(&sq, &Direction::from_angle(0.0), f64::INFINITY).unwrap();
    assert_relative_eq!(r, 1.0, epsilon = 1e-12);
    assert!(check_cminus1(&sq, DirectionSet::circle(32).unwrap()).unwrap().holds());
}

#[test]
fn reports_are_deterministic() {
    let a = check_identity_c1(&disk(), DirectionSet::circle(16).unwrap()).unwrap();
    let b = check_identity_c1(&disk(), DirectionSet::circle(16).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.verdict, Verdict::Holds);
}

#[test]
fn section_bodies_are_convex() {
    let g = DensitySpec::gaussian(vec![0.0, 0.0], vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
    let body = cross_section_body(&g, 1.0, DirectionSet::circle(180).unwrap()).unwrap();
    assert!(convexity_certificate(&body).unwrap().holds());
}
