//! Unit directions and the sampled direction sets shared by bodies and transforms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A unit vector in R^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `components`, rejecting vectors whose norm differs from 1 by more than 1e-12.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self(components))
    }

    /// Normalises a nonzero vector.
    pub fn normalize(v: &[f64]) -> Result<Self> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v.iter().map(|x| x / n).collect()))
    }

    pub fn from_angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Counter-clockwise perpendicular in the plane.
    pub fn perp(&self) -> Self {
        debug_assert_eq!(self.dim(), 2);
        Self(vec![-self.0[1], self.0[0]])
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A sampled set of directions on S^{n-1}, antipodally closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DirectionSet {
    /// S^0 = {+1, -1}.
    Line,
    /// `count` equally spaced angles `2πi/count` on S^1; `count` is even.
    Circle { count: usize },
    /// Latitude–longitude nodes on S^2: polar angles `(i + 1/2)π/polar`,
    /// azimuths `2πj/azimuth` with `azimuth` even.
    Sphere { polar: usize, azimuth: usize },
}

impl DirectionSet {
    pub fn circle(count: usize) -> Result<Self> {
        if count < 4 || count % 2 != 0 {
            return Err(crate::error::invalid("directions", "circle sets need an even count >= 4"));
        }
        Ok(Self::Circle { count })
    }

    pub fn sphere(polar: usize, azimuth: usize) -> Result<Self> {
        if polar < 2 || azimuth < 4 || azimuth % 2 != 0 {
            return Err(crate::error::invalid(
                "directions",
                "sphere sets need polar >= 2 and an even azimuth count >= 4",
            ));
        }
        Ok(Self::Sphere { polar, azimuth })
    }

    /// The default set for a dimension: S^0, 360 angles on S^1, or a 32×64 S^2 grid.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self::Line),
            2 => Ok(Self::Circle { count: 360 }),
            3 => Ok(Self::Sphere { polar: 32, azimuth: 64 }),
            _ => Err(Error::Unsupported(format!("direction sets in dimension {dim}"))),
        }
    }

    /// Uses `count` directions in the natural set for `dim`.
    pub fn with_count(dim: usize, count: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self::Line),
            2 => Self::circle(count),
            3 => Self::sphere((count / 2).max(2), count + count % 2),
            _ => Err(Error::Unsupported(format!("direction sets in dimension {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Line => 1,
            Self::Circle { .. } => 2,
            Self::Sphere { .. } => 3,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Line => 2,
            Self::Circle { count } => count,
            Self::Sphere { polar, azimuth } => polar * azimuth,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn directions(&self) -> Vec<Direction> {
        match *self {
            Self::Line => vec![Direction(vec![1.0]), Direction(vec![-1.0])],
            Self::Circle { count } => {
                (0..count).map(|i| Direction::from_angle(2.0 * PI * i as f64 / count as f64)).collect()
            }
            Self::Sphere { polar, azimuth } => {
                let mut out = Vec::with_capacity(polar * azimuth);
                for i in 0..polar {
                    let theta = (i as f64 + 0.5) * PI / polar as f64;
                    for j in 0..azimuth {
                        let phi = 2.0 * PI * j as f64 / azimuth as f64;
                        out.push(Direction(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]));
                    }
                }
                out
            }
        }
    }

    /// Index of the antipode of direction `i`.
    pub fn antipode(&self, i: usize) -> usize {
        match *self {
            Self::Line => 1 - i,
            Self::Circle { count } => (i + count / 2) % count,
            Self::Sphere { polar, azimuth } => {
                let (row, col) = (i / azimuth, i % azimuth);
                (polar - 1 - row) * azimuth + (col + azimuth / 2) % azimuth
            }
        }
    }

    /// Angle of direction `i` on S^1.
    pub fn angle(&self, i: usize) -> Option<f64> {
        match *self {
            Self::Circle { count } => Some(2.0 * PI * i as f64 / count as f64),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit() {
        assert!(matches!(Direction::new(vec![1.0, 1.0]), Err(Error::NotUnit(_))));
        assert!(Direction::new(vec![0.6, 0.8]).is_ok());
        assert_eq!(Direction::normalize(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn antipodes_are_negations() {
        for set in [DirectionSet::Line, DirectionSet::circle(12).unwrap(), DirectionSet::sphere(4, 8).unwrap()] {
            let dirs = set.directions();
            for (i, d) in dirs.iter().enumerate() {
                let a = &dirs[set.antipode(i)];
                for (x, y) in d.as_slice().iter().zip(a.as_slice()) {
                    assert!((x + y).abs() < 1e-12);
                }
                assert!((norm(d.as_slice()) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_circle_rejected() {
        assert!(DirectionSet::circle(7).is_err());
    }
}
