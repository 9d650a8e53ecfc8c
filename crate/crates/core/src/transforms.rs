//! The `p`-cosine and spherical Radon transforms and the limit identities
//! that connect them with the body constructions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{
    cross_section_body, intersection_body_of_starbody, intersection_radius, radial_mean_body, z_radius_power, StarBody,
    SYMMETRY_TOL,
};
use crate::densities::DensitySpec;
use crate::directions::{Direction, DirectionSet};
use crate::error::{invalid, Error, Result};
use crate::quad::{Estimate, Quadrature};

/// The fixed `eps` schedule of the `p → -1⁺` limit checks.
pub const EPS_SCHEDULE: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Directions used for the cosine transform of a radial function.
const TRANSFORM_DIRECTIONS: usize = 720;

/// A continuous function on the sphere sampled on a direction set.
///
/// Between samples the function is read piecewise linearly: in the angle on
/// S¹, bilinearly in (polar angle, azimuth) on S².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalFunction {
    pub directions: DirectionSet,
    pub values: Vec<f64>,
    pub even: bool,
}

impl SphericalFunction {
    pub fn new(directions: DirectionSet, values: Vec<f64>, even: bool) -> Result<Self> {
        if directions.dim() < 2 {
            return Err(Error::Unsupported("spherical functions on S^0".into()));
        }
        if values.len() != directions.len() {
            return Err(Error::DimensionMismatch { expected: directions.len(), got: values.len() });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(invalid("values", "samples must be finite"));
        }
        if even {
            for i in 0..values.len() {
                let (a, b) = (values[i], values[directions.antipode(i)]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Asymmetric(format!("g(u) and g(-u) differ by {:.3e} at direction {i}", a - b)));
                }
            }
        }
        Ok(Self { directions, values, even })
    }

    pub fn constant(directions: DirectionSet, c: f64) -> Result<Self> {
        Self::new(directions, vec![c; directions.len()], true)
    }

    pub fn from_fn<F: Fn(&Direction) -> f64>(directions: DirectionSet, even: bool, g: F) -> Result<Self> {
        Self::new(directions, directions.directions().iter().map(g).collect(), even)
    }

    /// `ρ_K^k` for a star body `K`.
    pub fn radial_power(body: &StarBody, k: f64) -> Result<Self> {
        Self::new(body.directions, body.radii.iter().map(|r| r.powf(k)).collect(), body.symmetric)
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    /// `a·self + other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        if self.directions != other.directions {
            return Err(invalid("directions", "functions are sampled on different direction sets"));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + y).collect();
        Self::new(self.directions, values, self.even && other.even)
    }

    /// Value at angle `theta` on S¹.
    fn at_angle(&self, theta: f64) -> f64 {
        let n = self.values.len();
        let x = theta.rem_euclid(2.0 * PI) * n as f64 / (2.0 * PI);
        let i = (x.floor() as usize).min(n - 1);
        let frac = x - i as f64;
        (1.0 - frac) * self.values[i] + frac * self.values[(i + 1) % n]
    }

    /// Value at a unit vector on S².
    fn at_point(&self, u: &[f64]) -> f64 {
        let DirectionSet::Sphere { polar, azimuth } = self.directions else { unreachable!() };
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]);
        let row_at = |r: isize, phi: f64| {
            // Rows beyond a pole continue on the opposite meridian.
            let (r, phi) = if r < 0 {
                (0, phi + PI)
            } else if r >= polar as isize {
                (polar - 1, phi + PI)
            } else {
                (r as usize, phi)
            };
            let x = phi.rem_euclid(2.0 * PI) * azimuth as f64 / (2.0 * PI);
            let j = (x.floor() as usize).min(azimuth - 1);
            let frac = x - j as f64;
            (1.0 - frac) * self.values[r * azimuth + j] + frac * self.values[r * azimuth + (j + 1) % azimuth]
        };
        let y = theta * polar as f64 / PI - 0.5;
        let r = y.floor();
        let frac = y - r;
        (1.0 - frac) * row_at(r as isize, phi) + frac * row_at(r as isize + 1, phi)
    }

    /// Value at any direction.
    pub fn value(&self, u: &Direction) -> Result<f64> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        Ok(match self.directions {
            DirectionSet::Circle { .. } => self.at_angle(u.angle()),
            _ => self.at_point(u.as_slice()),
        })
    }
}

fn check_order(p: f64) -> Result<()> {
    if !(p > -1.0) || !p.is_finite() {
        return Err(invalid("p", format!("the cosine transform needs finite p > -1, got {p}")));
    }
    Ok(())
}

/// Weights `w_i` with `T_p g(v) = Σ w_i g_i` for every `g` sampled on `count`
/// equally spaced angles and read piecewise linearly, `v` at angle `phi`.
///
/// Each hat function is integrated against `|cos(θ - φ)|^p` with the zeros of
/// the cosine removed by the power substitution, so the weights stay exact
/// for `p` close to `-1`.
pub fn cosine_weights(count: usize, p: f64, phi: f64) -> Result<Vec<f64>> {
    check_order(p)?;
    let h = 2.0 * PI / count as f64;
    let quad = Quadrature::with_rel_tol(1e-12);
    let pieces: Vec<(f64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let a = i as f64 * h;
            let b = a + h;
            // Nearest zero of cos(θ - φ): φ + π/2 + kπ.
            let base = phi + 0.5 * PI;
            let k = ((0.5 * (a + b) - base) / PI).round();
            let mut c = base + k * PI;
            // A zero within rounding of a node is the node itself.
            for end in [a, b] {
                if (c - end).abs() < 1e-9 * h {
                    c = end;
                }
            }
            let ratio = |t: f64| {
                let y = t - c;
                if y == 0.0 {
                    1.0
                } else {
                    (y.sin().abs() / y.abs()).powf(p)
                }
            };
            let i0 = quad.integrate_abs_power(ratio, a, b, c, p, &[]);
            let i1 = quad.integrate_abs_power(|t| ratio(t) * (t - a) / h, a, b, c, p, &[]);
            (i0.value, i1.value)
        })
        .collect();
    let mut w = vec![0.0; count];
    for (i, (i0, i1)) in pieces.into_iter().enumerate() {
        w[i] += i0 - i1;
        w[(i + 1) % count] += i1;
    }
    Ok(w)
}

/// `T_p g(v) = ∫_{S^{n-1}} |u·v|^p g(u) du`.
pub fn cosine_transform(g: &SphericalFunction, p: f64, v: &Direction) -> Result<f64> {
    check_order(p)?;
    if v.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: v.dim() });
    }
    match g.directions {
        DirectionSet::Circle { count } => {
            let w = cosine_weights(count, p, v.angle())?;
            Ok(w.iter().zip(&g.values).map(|(w, x)| w * x).sum())
        }
        DirectionSet::Sphere { azimuth, .. } => {
            // u = t v + √(1 - t²) w(ψ): du = dt dψ on S².
            let (a, b) = great_circle_frame(v.as_slice());
            let m = 2 * azimuth;
            let ring = |t: f64| {
                let s = (1.0 - t * t).max(0.0).sqrt();
                let sum: f64 = (0..m)
                    .map(|k| {
                        let psi = 2.0 * PI * k as f64 / m as f64;
                        let u: Vec<f64> =
                            (0..3).map(|i| t * v.as_slice()[i] + s * (psi.cos() * a[i] + psi.sin() * b[i])).collect();
                        g.at_point(&u)
                    })
                    .sum();
                sum * 2.0 * PI / m as f64
            };
            Ok(Quadrature::with_rel_tol(1e-10).integrate_abs_power(ring, -1.0, 1.0, 0.0, p, &[]).value)
        }
        DirectionSet::Line => unreachable!(),
    }
}

/// An orthonormal basis of `v⊥` in R³.
fn great_circle_frame(v: &[f64]) -> ([f64; 3], [f64; 3]) {
    let seed = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d: f64 = (0..3).map(|i| seed[i] * v[i]).sum();
    let mut a = [seed[0] - d * v[0], seed[1] - d * v[1], seed[2] - d * v[2]];
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.iter_mut().for_each(|x| *x /= na);
    let b = [v[1] * a[2] - v[2] * a[1], v[2] * a[0] - v[0] * a[2], v[0] * a[1] - v[1] * a[0]];
    (a, b)
}

/// `Rg(v) = ∫_{S^{n-1} ∩ v⊥} g`; on S¹ the two points `±u` with counting measure.
pub fn radon_transform(g: &SphericalFunction, v: &Direction) -> Result<f64> {
    if v.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: v.dim() });
    }
    match g.directions {
        DirectionSet::Circle { .. } => {
            let u = v.perp();
            Ok(g.at_angle(u.angle()) + g.at_angle(u.neg().angle()))
        }
        DirectionSet::Sphere { azimuth, .. } => {
            let (a, b) = great_circle_frame(v.as_slice());
            let m = 2 * azimuth;
            let sum: f64 = (0..m)
                .map(|k| {
                    let psi = 2.0 * PI * k as f64 / m as f64;
                    let u: Vec<f64> = (0..3).map(|i| psi.cos() * a[i] + psi.sin() * b[i]).collect();
                    g.at_point(&u)
                })
                .sum();
            Ok(sum * 2.0 * PI / m as f64)
        }
        DirectionSet::Line => Err(Error::Unsupported("Radon transform on S^0".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint {
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(invalid("eps", format!("need 0 < eps <= 0.1, got {eps}")));
    }
    Ok(())
}

/// `((p+1)/2)·T_p g(v)` at `p = -1 + eps` against `Rg(v)`.
pub fn tr_limit_check(g: &SphericalFunction, v: &Direction, eps: f64) -> Result<LimitPoint> {
    check_eps(eps)?;
    let lhs = 0.5 * eps * cosine_transform(g, eps - 1.0, v)?;
    let rhs = radon_transform(g, v)?;
    Ok(LimitPoint { eps, lhs, rhs, gap: (lhs - rhs).abs() })
}

/// Both sides of an identity over a direction set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityGap {
    pub directions: usize,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `max |lhs - rhs| / |rhs|`.
    pub max_gap: f64,
    pub worst_index: usize,
}

impl IdentityGap {
    pub fn from_sides(lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let (worst_index, max_gap) = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs() / b.abs())
            .enumerate()
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        Self { directions: lhs.len(), lhs, rhs, max_gap, worst_index }
    }
}

fn check_planar(f: &DensitySpec, dirs: &DirectionSet) -> Result<()> {
    if f.dim() != 2 {
        return Err(Error::Unsupported(format!("identity checks need a planar density, got dimension {}", f.dim())));
    }
    if dirs.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: dirs.dim() });
    }
    Ok(())
}

fn fine_set(dirs: &DirectionSet) -> Result<DirectionSet> {
    DirectionSet::circle(dirs.len().max(TRANSFORM_DIRECTIONS))
}

/// `ρ_{Z_p(R_{n+p} f)}` against `((1/(n+p)) ∫ f(x) ρ_{Z_p(f_x)}^{-p} dx)^{-1/p}`, compared as radii.
///
/// The left side is `((p+1)/(2(n+p)))·T_p[ρ_{R_{n+p} f}^{n+p}]`; the right side
/// reduces to `((p+1)/(2(n+p))) ∫∫ m(a) m(b) |b - a|^p` with `m` the marginal
/// of `v·X`.
pub fn zr_identity_check(f: &DensitySpec, p: f64, dirs: DirectionSet) -> Result<IdentityGap> {
    check_planar(f, &dirs)?;
    let n = 2.0;
    if !(p > -1.0) || p == 0.0 || !p.is_finite() {
        return Err(invalid("p", format!("need finite p > -1, p != 0, got {p}")));
    }
    let k = n + p;
    let c = (p + 1.0) / (2.0 * k);
    let r = radial_mean_body(f, k, fine_set(&dirs)?)?;
    let g = SphericalFunction::radial_power(&r, k)?;
    let directions = dirs.directions();
    let lhs =
        directions.iter().map(|v| Ok((c * cosine_transform(&g, p, v)?).powf(-1.0 / p))).collect::<Result<Vec<_>>>()?;
    let quad = Quadrature::default();
    let rhs = directions
        .par_iter()
        .map(|v| {
            let m = f.profile(v)?;
            let pair: Estimate =
                m.integrate(&quad, |a, ma| if ma > 0.0 { ma * m.abs_moment(&quad, a, p).value } else { 0.0 });
            if !(pair.value.is_finite() && pair.value > 0.0) {
                return Err(Error::Divergent(format!("pair moment of order {p} evaluates to {}", pair.value)));
            }
            Ok((c * pair.value).powf(-1.0 / p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityGap::from_sides(lhs, rhs))
}

/// `ρ_{Z_p f}^{-p}` at `p = -1 + eps` against `ρ_{I f}`.
pub fn zi_limit_check(f: &DensitySpec, eps: f64, dirs: DirectionSet) -> Result<IdentityGap> {
    check_eps(eps)?;
    if dirs.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: dirs.dim() });
    }
    let directions = dirs.directions();
    let pairs = directions
        .par_iter()
        .map(|v| Ok((z_radius_power(f, v, eps - 1.0)?, intersection_radius(f, v)?)))
        .collect::<Result<Vec<_>>>()?;
    let (lhs, rhs) = pairs.into_iter().unzip();
    Ok(IdentityGap::from_sides(lhs, rhs))
}

/// `((p+1)/2)·T_p ρ_{C_1 f}` at `p = -1 + eps` against `|C_1 f ∩ v⊥|`, in the plane.
pub fn cn1_radon_check(f: &DensitySpec, eps: f64, dirs: DirectionSet) -> Result<IdentityGap> {
    check_eps(eps)?;
    check_planar(f, &dirs)?;
    let c1 = cross_section_body(f, 1.0, fine_set(&dirs)?)?;
    let g = SphericalFunction::radial_power(&c1, 1.0)?;
    let directions = dirs.directions();
    let lhs =
        directions.iter().map(|v| Ok(0.5 * eps * cosine_transform(&g, eps - 1.0, v)?)).collect::<Result<Vec<_>>>()?;
    let rhs = directions.iter().map(|v| intersection_body_of_starbody(&c1, v)).collect::<Result<Vec<_>>>()?;
    Ok(IdentityGap::from_sides(lhs, rhs))
}
