//! Star bodies sampled by their radial function on a direction set.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SupportBody;
use crate::directions::{Direction, DirectionSet};
use crate::error::{invalid, Error, Result};

/// The construction a star body came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BodyLabel {
    CrossSection { p: f64 },
    Intersection,
    RadialMean { p: f64 },
    Ball { p: f64 },
    PolarCentroid { p: f64 },
    Z { p: f64 },
    Support,
    Polar,
    Sampled,
}

impl BodyLabel {
    /// Constructions whose radial function is even whatever the density.
    pub fn is_symmetric_construction(&self) -> bool {
        matches!(
            self,
            Self::CrossSection { .. }
                | Self::Intersection
                | Self::RadialMean { .. }
                | Self::PolarCentroid { .. }
                | Self::Z { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarBody {
    pub directions: DirectionSet,
    pub radii: Vec<f64>,
    pub label: BodyLabel,
    /// Whether `ρ(v) = ρ(-v)` is expected; checked to 1e-9 on construction.
    pub symmetric: bool,
}

/// Relative tolerance of the symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-9;

impl StarBody {
    pub fn new(directions: DirectionSet, radii: Vec<f64>, label: BodyLabel, symmetric: bool) -> Result<Self> {
        if radii.len() != directions.len() {
            return Err(Error::DimensionMismatch { expected: directions.len(), got: radii.len() });
        }
        if let Some((i, r)) = radii.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
            return Err(invalid("radii", format!("radius {r} at direction {i} is not positive and finite")));
        }
        let body = Self { directions, radii, label, symmetric };
        if symmetric {
            let (i, gap) = body.asymmetry();
            if gap > SYMMETRY_TOL {
                return Err(Error::Asymmetric(format!(
                    "ρ(v) and ρ(-v) differ by {gap:.3e} (relative) at direction {i}"
                )));
            }
        }
        Ok(body)
    }

    /// Evaluates a radial function on every direction in parallel.
    pub fn from_fn<F>(directions: DirectionSet, label: BodyLabel, symmetric: bool, rho: F) -> Result<Self>
    where
        F: Fn(&Direction) -> Result<f64> + Sync,
    {
        let radii = directions.directions().par_iter().map(&rho).collect::<Result<Vec<_>>>()?;
        Self::new(directions, radii, label, symmetric)
    }

    /// Radial function of a convex body.
    pub fn from_support_body(k: &SupportBody, directions: DirectionSet) -> Result<Self> {
        check_set(k.dim(), &directions)?;
        Self::from_fn(directions, BodyLabel::Support, true, |v| Ok(k.radial(v.as_slice())))
    }

    /// Radial function of the polar body `K°`, `ρ = 1/h_K`.
    pub fn polar_of(k: &SupportBody, directions: DirectionSet) -> Result<Self> {
        check_set(k.dim(), &directions)?;
        Self::from_fn(directions, BodyLabel::Polar, true, |v| Ok(k.polar_radial(v.as_slice())))
    }

    /// Star body in the plane with `ρ(θ) = c + Σ a_k cos(kθ)`.
    pub fn harmonic(count: usize, constant: f64, terms: &[(u32, f64)]) -> Result<Self> {
        let set = DirectionSet::circle(count)?;
        let symmetric = terms.iter().all(|(k, _)| k % 2 == 0);
        let radii = (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                constant + terms.iter().map(|(k, a)| a * (*k as f64 * t).cos()).sum::<f64>()
            })
            .collect();
        Self::new(set, radii, BodyLabel::Sampled, symmetric)
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Largest relative gap `|ρ(v) - ρ(-v)| / max` and where it occurs.
    pub fn asymmetry(&self) -> (usize, f64) {
        (0..self.len())
            .map(|i| {
                let (a, b) = (self.radii[i], self.radii[self.directions.antipode(i)]);
                (i, (a - b).abs() / a.max(b))
            })
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    /// Boundary points `ρ(v)·v` in the stored order.
    pub fn boundary(&self) -> Vec<Vec<f64>> {
        self.directions
            .directions()
            .iter()
            .zip(&self.radii)
            .map(|(v, r)| v.as_slice().iter().map(|x| x * r).collect())
            .collect()
    }

    /// `ρ(u)` for any unit `u`.
    ///
    /// Stored directions are returned exactly. In the plane, other directions
    /// are read off the boundary polygon through the stored points, the same
    /// polygon the convexity certificate inspects.
    pub fn radial(&self, u: &Direction) -> Result<f64> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        match self.directions {
            DirectionSet::Line => Ok(if u.as_slice()[0] > 0.0 { self.radii[0] } else { self.radii[1] }),
            DirectionSet::Circle { count } => {
                let step = 2.0 * PI / count as f64;
                let theta = u.angle().rem_euclid(2.0 * PI);
                let x = theta / step;
                let i = (x.floor() as usize) % count;
                let frac = x - x.floor();
                if frac < 1e-12 {
                    return Ok(self.radii[i]);
                }
                if 1.0 - frac < 1e-12 {
                    return Ok(self.radii[(i + 1) % count]);
                }
                let j = (i + 1) % count;
                let a = Direction::from_angle(i as f64 * step);
                let b = Direction::from_angle(j as f64 * step);
                let p = [a.as_slice()[0] * self.radii[i], a.as_slice()[1] * self.radii[i]];
                let q = [b.as_slice()[0] * self.radii[j], b.as_slice()[1] * self.radii[j]];
                // Ray t·u meets the segment p + s(q - p): solve t·u = p + s(q - p).
                let d = [q[0] - p[0], q[1] - p[1]];
                let (ux, uy) = (u.as_slice()[0], u.as_slice()[1]);
                let den = ux * d[1] - uy * d[0];
                Ok((p[0] * d[1] - p[1] * d[0]) / den)
            }
            DirectionSet::Sphere { .. } => self
                .directions
                .directions()
                .iter()
                .position(|d| d.as_slice().iter().zip(u.as_slice()).all(|(a, b)| (a - b).abs() < 1e-12))
                .map(|i| self.radii[i])
                .ok_or_else(|| Error::Unsupported("radial interpolation on S^2".into())),
        }
    }

    /// `|K ∩ v⊥|` in the plane: `ρ(u) + ρ(-u)` with `u ⊥ v`.
    pub fn central_section(&self, v: &Direction) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::Unsupported(format!("central sections of star bodies in dimension {}", self.dim())));
        }
        let u = v.perp();
        Ok(self.radial(&u)? + self.radial(&u.neg())?)
    }

    /// Intersection body `I(K)` on the same direction set (plane only).
    pub fn intersection_body(&self) -> Result<Self> {
        let radii = self.directions.directions().iter().map(|v| self.central_section(v)).collect::<Result<Vec<_>>>()?;
        Self::new(self.directions, radii, BodyLabel::Intersection, true)
    }

    /// `c·K`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("c", "dilation factor must be positive and finite"));
        }
        Self::new(self.directions, self.radii.iter().map(|r| r * c).collect(), self.label, self.symmetric)
    }

    /// Area (plane) of the star body: `½ ∫ ρ² dθ` by the trapezoidal rule.
    pub fn area(&self) -> Result<f64> {
        match self.directions {
            DirectionSet::Circle { count } => {
                Ok(0.5 * self.radii.iter().map(|r| r * r).sum::<f64>() * 2.0 * PI / count as f64)
            }
            _ => Err(Error::Unsupported("areas outside the plane".into())),
        }
    }

    /// Largest relative difference of radii against another body on the same set.
    pub fn max_relative_gap(&self, other: &Self) -> Result<f64> {
        if self.directions != other.directions {
            return Err(invalid("directions", "bodies are sampled on different direction sets"));
        }
        Ok(self.radii.iter().zip(&other.radii).map(|(a, b)| (a - b).abs() / a.abs().max(b.abs())).fold(0.0, f64::max))
    }
}

pub(crate) fn check_set(dim: usize, set: &DirectionSet) -> Result<()> {
    if set.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: set.dim() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_central_section() {
        let disk = StarBody::from_support_body(&SupportBody::ball(2, 1.5).unwrap(), DirectionSet::circle(64).unwrap())
            .unwrap();
        let v = Direction::from_angle(PI / 2.0);
        assert_relative_eq!(disk.central_section(&v).unwrap(), 3.0, epsilon = 1e-12);
        // Off the grid the inscribed polygon undershoots by at most 1 - cos(π/64).
        let off = disk.central_section(&Direction::from_angle(0.3)).unwrap();
        assert!(off <= 3.0 && off >= 3.0 * (PI / 64.0).cos());
    }

    #[test]
    fn square_interpolation_is_exact() {
        let sq = SupportBody::cube(2, 0.5).unwrap();
        let body = StarBody::from_support_body(&sq, DirectionSet::circle(8).unwrap()).unwrap();
        // The polygon through the 8 stored points is the square itself.
        for t in [0.1, 0.5, 1.0, 2.0] {
            let u = Direction::from_angle(t);
            assert_relative_eq!(body.radial(&u).unwrap(), sq.radial(u.as_slice()), epsilon = 1e-12);
        }
        let v = Direction::new(vec![1.0, 0.0]).unwrap();
        assert_relative_eq!(body.central_section(&v).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(body.central_section(&v.neg()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_radii() {
        let set = DirectionSet::circle(4).unwrap();
        assert!(StarBody::new(set, vec![1.0, 0.0, 1.0, 1.0], BodyLabel::Sampled, false).is_err());
        assert!(matches!(
            StarBody::new(set, vec![1.0, 2.0, 3.0, 2.0], BodyLabel::Sampled, true),
            Err(Error::Asymmetric(_))
        ));
    }

    #[test]
    fn harmonic_body() {
        let b = StarBody::harmonic(360, 1.0, &[(4, 0.5)]).unwrap();
        assert!(b.symmetric);
        assert_relative_eq!(b.radii[0], 1.5);
        assert_relative_eq!(b.area().unwrap(), PI * (1.0 + 0.125), epsilon = 1e-12);
    }
}
