//! Convex and star bodies attached to densities.

pub mod construct;
pub mod star;
pub mod support;

pub use construct::{
    abs_moment, ball_mean_body, ball_mean_radius, cross_section_body, cross_section_radius,
    cross_section_radius_entropy, intersection_body_of_density, intersection_body_of_starbody, intersection_radius,
    polar_centroid_body, polar_centroid_radius, radial_mean_body, radial_mean_radius, ray_moment, z_body, z_radius,
    z_radius_power,
};
pub use star::{BodyLabel, StarBody, SYMMETRY_TOL};
pub use support::SupportBody;
