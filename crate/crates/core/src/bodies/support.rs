//! Symmetric convex bodies with an exact support function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::directions::{dot, norm};
use crate::error::{invalid, Error, Result};

/// A convex body containing the origin in its interior, described exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportBody {
    /// Euclidean ball of the given radius centred at the origin.
    Ball { dim: usize, radius: f64 },
    /// Axis-aligned box `Π [-h_i, h_i]`.
    Box { half_widths: Vec<f64> },
    /// Planar polygon stored as its counter-clockwise convex hull.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl SupportBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", "must be positive and finite"));
        }
        Ok(Self::Ball { dim, radius })
    }

    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::boxed(vec![half_width; dim])
    }

    pub fn boxed(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(invalid("half_widths", "must be non-empty"));
        }
        if half_widths.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(invalid("half_widths", "must be positive and finite"));
        }
        Ok(Self::Box { half_widths })
    }

    /// Convex hull of `points`, which must be centrally symmetric about the origin.
    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        let hull = convex_hull(points);
        if hull.len() < 3 || shoelace(&hull) <= 0.0 {
            return Err(invalid("vertices", "polygon is degenerate"));
        }
        let scale = hull.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        for p in &hull {
            let found =
                hull.iter().any(|q| (p[0] + q[0]).abs() <= 1e-12 * scale && (p[1] + q[1]).abs() <= 1e-12 * scale);
            if !found {
                return Err(Error::Asymmetric("polygon vertices are not symmetric about the origin".into()));
            }
        }
        Ok(Self::Polygon { vertices: hull })
    }

    /// Regular polygon with `sides` vertices on the circle of radius `circumradius`.
    pub fn regular_polygon(sides: usize, circumradius: f64) -> Result<Self> {
        if sides < 4 || sides % 2 != 0 {
            return Err(invalid("sides", "symmetric regular polygons need an even count >= 4"));
        }
        let pts: Vec<[f64; 2]> = (0..sides)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / sides as f64;
                [circumradius * a.cos(), circumradius * a.sin()]
            })
            .collect();
        Self::polygon(&pts)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { dim, .. } => *dim,
            Self::Box { half_widths } => half_widths.len(),
            Self::Polygon { .. } => 2,
        }
    }

    /// `h_K(v) = sup_{x in K} v·x`.
    pub fn support(&self, v: &[f64]) -> f64 {
        match self {
            Self::Ball { radius, .. } => radius * norm(v),
            Self::Box { half_widths } => half_widths.iter().zip(v).map(|(h, x)| h * x.abs()).sum(),
            Self::Polygon { vertices } => {
                vertices.iter().map(|p| p[0] * v[0] + p[1] * v[1]).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// `ρ_K(u) = sup{r >= 0 : r u in K}` for a unit vector `u`.
    pub fn radial(&self, u: &[f64]) -> f64 {
        match self {
            Self::Ball { radius, .. } => radius / norm(u),
            Self::Box { half_widths } => half_widths
                .iter()
                .zip(u)
                .filter(|(_, x)| **x != 0.0)
                .map(|(h, x)| h / x.abs())
                .fold(f64::INFINITY, f64::min),
            Self::Polygon { vertices } => {
                let gauge = edges(vertices)
                    .map(|(a, b)| {
                        let n = [b[1] - a[1], a[0] - b[0]];
                        let offset = n[0] * a[0] + n[1] * a[1];
                        (n[0] * u[0] + n[1] * u[1]) / offset
                    })
                    .fold(0.0, f64::max);
                1.0 / gauge
            }
        }
    }

    /// Radial function of the polar body, `1 / h_K(u)`.
    pub fn polar_radial(&self, u: &[f64]) -> f64 {
        1.0 / self.support(u)
    }

    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("factor", "must be positive and finite"));
        }
        Ok(match self {
            Self::Ball { dim, radius } => Self::Ball { dim: *dim, radius: radius * c },
            Self::Box { half_widths } => Self::Box { half_widths: half_widths.iter().map(|h| h * c).collect() },
            Self::Polygon { vertices } => {
                Self::Polygon { vertices: vertices.iter().map(|p| [p[0] * c, p[1] * c]).collect() }
            }
        })
    }

    /// `K - K`; for the symmetric bodies stored here this is `2K`.
    pub fn difference_body(&self) -> Self {
        match self {
            Self::Ball { dim, radius } => Self::Ball { dim: *dim, radius: 2.0 * radius },
            Self::Box { half_widths } => Self::Box { half_widths: half_widths.iter().map(|h| 2.0 * h).collect() },
            Self::Polygon { vertices } => {
                let mut diffs = Vec::with_capacity(vertices.len() * vertices.len());
                for a in vertices {
                    for b in vertices {
                        diffs.push([a[0] - b[0], a[1] - b[1]]);
                    }
                }
                Self::Polygon { vertices: convex_hull(&diffs) }
            }
        }
    }

    /// Minkowski sum `K + L` where it is representable.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        match (self, other) {
            (Self::Ball { dim, radius: a }, Self::Ball { radius: b, .. }) => {
                Ok(Self::Ball { dim: *dim, radius: a + b })
            }
            (Self::Box { half_widths: a }, Self::Box { half_widths: b }) => {
                Ok(Self::Box { half_widths: a.iter().zip(b).map(|(x, y)| x + y).collect() })
            }
            _ if self.dim() == 1 => Ok(Self::Box { half_widths: vec![self.support(&[1.0]) + other.support(&[1.0])] }),
            _ => match (self.polygon_vertices(), other.polygon_vertices()) {
                (Some(a), Some(b)) => {
                    let sums: Vec<[f64; 2]> =
                        a.iter().flat_map(|p| b.iter().map(move |q| [p[0] + q[0], p[1] + q[1]])).collect();
                    Ok(Self::Polygon { vertices: convex_hull(&sums) })
                }
                _ => Err(Error::Unsupported("Minkowski sum of a ball and a polytope".into())),
            },
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::Ball { dim, radius } => {
                let n = *dim as f64;
                PI.powf(n / 2.0) * radius.powf(n) / gamma(n / 2.0 + 1.0)
            }
            Self::Box { half_widths } => half_widths.iter().map(|h| 2.0 * h).product(),
            Self::Polygon { vertices } => shoelace(vertices),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Ball { radius, .. } => norm(x) <= *radius,
            Self::Box { half_widths } => half_widths.iter().zip(x).all(|(h, y)| y.abs() <= *h),
            Self::Polygon { vertices } => {
                edges(vertices).all(|(a, b)| (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0)
            }
        }
    }

    /// Parameter interval `[t0, t1]` of the line `point + t·dir` inside the body.
    pub fn chord(&self, point: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        match self {
            Self::Ball { radius, .. } => {
                let a = dot(dir, dir);
                let b = dot(point, dir);
                let c = dot(point, point) - radius * radius;
                let disc = b * b - a * c;
                if disc <= 0.0 {
                    return None;
                }
                let root = disc.sqrt();
                Some(((-b - root) / a, (-b + root) / a))
            }
            Self::Box { half_widths } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for ((h, p), d) in half_widths.iter().zip(point).zip(dir) {
                    if *d == 0.0 {
                        if p.abs() > *h {
                            return None;
                        }
                        continue;
                    }
                    let (t0, t1) = ((-h - p) / d, (h - p) / d);
                    lo = lo.max(t0.min(t1));
                    hi = hi.min(t0.max(t1));
                }
                (hi > lo).then_some((lo, hi))
            }
            Self::Polygon { vertices } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for (a, b) in edges(vertices) {
                    let n = [b[1] - a[1], a[0] - b[0]];
                    let offset = n[0] * a[0] + n[1] * a[1];
                    let np = n[0] * point[0] + n[1] * point[1];
                    let nd = n[0] * dir[0] + n[1] * dir[1];
                    if nd == 0.0 {
                        if np > offset {
                            return None;
                        }
                    } else if nd > 0.0 {
                        hi = hi.min((offset - np) / nd);
                    } else {
                        lo = lo.max((offset - np) / nd);
                    }
                }
                (hi > lo).then_some((lo, hi))
            }
        }
    }

    /// Vertices of a planar polytope (polygons and 2-D boxes).
    pub fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            Self::Polygon { vertices } => Some(vertices.clone()),
            Self::Box { half_widths } if half_widths.len() == 2 => {
                let (a, b) = (half_widths[0], half_widths[1]);
                Some(vec![[a, -b], [a, b], [-a, b], [-a, -b]])
            }
            _ => None,
        }
    }

    /// Projections `v·x` of the vertices, where the projection marginal is not smooth.
    pub fn vertex_projections(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Self::Box { half_widths } if half_widths.len() == 1 => vec![-half_widths[0] * v[0], half_widths[0] * v[0]],
            _ => self
                .polygon_vertices()
                .map(|vs| vs.iter().map(|p| p[0] * v[0] + p[1] * v[1]).collect())
                .unwrap_or_default(),
        }
    }

    /// Covariogram `g_K(x) = |K ∩ (K + x)|`.
    pub fn covariogram(&self, x: &[f64]) -> f64 {
        match self {
            Self::Ball { dim, radius } => {
                let d = norm(x);
                let r = *radius;
                if d >= 2.0 * r {
                    return 0.0;
                }
                match dim {
                    1 => 2.0 * r - d,
                    2 => 2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt(),
                    3 => PI * (4.0 * r + d) * (2.0 * r - d).powi(2) / 12.0,
                    _ => f64::NAN,
                }
            }
            Self::Box { half_widths } => half_widths.iter().zip(x).map(|(h, y)| (2.0 * h - y.abs()).max(0.0)).product(),
            Self::Polygon { vertices } => {
                let shifted: Vec<[f64; 2]> = vertices.iter().map(|p| [p[0] + x[0], p[1] + x[1]]).collect();
                let clipped = clip_polygon(vertices, &shifted);
                if clipped.len() < 3 {
                    0.0
                } else {
                    shoelace(&clipped).max(0.0)
                }
            }
        }
    }
}

fn edges(vertices: &[[f64; 2]]) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
    (0..vertices.len()).map(move |i| (vertices[i], vertices[(i + 1) % vertices.len()]))
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (Andrew's monotone chain), collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let eps = 1e-14 * scale * scale;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn shoelace(vertices: &[[f64; 2]]) -> f64 {
    0.5 * edges(vertices).map(|(a, b)| a[0] * b[1] - a[1] * b[0]).sum::<f64>()
}

/// Sutherland–Hodgman clipping of `subject` by the convex counter-clockwise `clip`.
fn clip_polygon(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut output = subject.to_vec();
    for (a, b) in edges(clip) {
        if output.is_empty() {
            break;
        }
        let input = std::mem::take(&mut output);
        let side = |p: [f64; 2]| cross(a, b, p);
        for i in 0..input.len() {
            let cur = input[i];
            let prev = input[(i + input.len() - 1) % input.len()];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(intersect(prev, cur, sp, sc));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    output
}

fn intersect(p: [f64; 2], q: [f64; 2], sp: f64, sq: f64) -> [f64; 2] {
    let t = sp / (sp - sq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_support_and_polar() {
        let sq = SupportBody::cube(2, 0.5).unwrap();
        assert_eq!(sq.support(&[1.0, 0.0]), 0.5);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(sq.support(&[d, d]), d, epsilon = 1e-15);
        let ball = SupportBody::ball(2, 2.0).unwrap();
        assert_eq!(ball.polar_radial(&[0.0, 1.0]), 0.5);
    }

    #[test]
    fn polygon_matches_box() {
        let sq = SupportBody::cube(2, 0.5).unwrap();
        let poly = SupportBody::polygon(&sq.polygon_vertices().unwrap()).unwrap();
        for k in 0..17 {
            let a = 0.37 * k as f64;
            let u = [a.cos(), a.sin()];
            assert_relative_eq!(poly.support(&u), sq.support(&u), epsilon = 1e-15);
            assert_relative_eq!(poly.radial(&u), sq.radial(&u), max_relative = 1e-13);
            let x = [0.3 * a.sin(), 0.2 * a.cos()];
            assert_relative_eq!(poly.covariogram(&x), sq.covariogram(&x), epsilon = 1e-14);
            assert!(poly.chord(&x, &u).is_some());
        }
        assert_relative_eq!(poly.volume(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn difference_body_is_double() {
        let hex = SupportBody::regular_polygon(6, 1.0).unwrap();
        let diff = hex.difference_body();
        for k in 0..12 {
            let a = 0.5 * k as f64;
            let u = [a.cos(), a.sin()];
            assert_relative_eq!(diff.support(&u), 2.0 * hex.support(&u), max_relative = 1e-14);
        }
    }

    #[test]
    fn asymmetric_polygon_rejected() {
        let tri = [[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]];
        assert!(matches!(SupportBody::polygon(&tri), Err(Error::Asymmetric(_))));
    }

    #[test]
    fn disk_covariogram_integrates_to_area_squared() {
        let disk = SupportBody::ball(2, 1.0).unwrap();
        // ∫ g_K = |K|^2; radial integral of the lens area.
        let est = crate::quad::integrate(|r| 2.0 * PI * r * disk.covariogram(&[r, 0.0]), 0.0, 2.0);
        assert_relative_eq!(est.value, PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn ball_chord() {
        let disk = SupportBody::ball(2, 1.0).unwrap();
        let (a, b) = disk.chord(&[0.0, 0.6], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(b - a, 1.6, epsilon = 1e-14);
        assert!(disk.chord(&[0.0, 1.5], &[1.0, 0.0]).is_none());
    }
}
