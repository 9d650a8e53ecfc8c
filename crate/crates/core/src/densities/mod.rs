//! Probability densities on R^n and the operations the other modules build on.

mod convolve;
pub mod gaussian;
pub mod generalized;
pub mod grid;
pub mod json;
pub mod piecewise;
pub(crate) mod project;
mod sample;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

pub use gaussian::Gaussian;
pub use generalized::GeneralizedGaussian;
pub use grid::GridDensity;
pub use piecewise::PiecewiseLinear;
pub use project::Profile;

use crate::bodies::SupportBody;
use crate::directions::{dot, norm};
use crate::error::{invalid, Error, Result};
use crate::quad::Span;

/// Excluded tail mass allowed by truncation.
pub const TAIL_BOUND: f64 = 1e-10;
/// Default grid resolution per axis.
pub const DEFAULT_RESOLUTION_1D: usize = 4096;
pub const DEFAULT_RESOLUTION_2D: usize = 512;
/// Knots used when a marginal or convolution is tabulated.
pub const TABLE_KNOTS: usize = 4097;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "s", rename_all = "kebab-case")]
pub enum Concavity {
    LogConcave,
    /// `f^s` concave on the support (`s > 0`) or convex (`s < 0`).
    SConcave(f64),
    Unknown,
}

impl Concavity {
    pub fn is_log_concave(&self) -> bool {
        matches!(self, Self::LogConcave) || matches!(self, Self::SConcave(s) if *s > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gaussian(Gaussian),
    /// Uniform on `center + body`.
    Uniform {
        body: SupportBody,
        center: Vec<f64>,
    },
    /// `rate·exp(-rate·x)` on `x >= 0`, or on `x <= 0` when reflected.
    Exponential {
        rate: f64,
        reflected: bool,
    },
    /// `exp(-|x/scale|^shape / shape) / (scale·Z)`, symmetric about 0.
    ExponentialPower {
        shape: f64,
        scale: f64,
    },
    GeneralizedGaussian(GeneralizedGaussian),
    /// Independent coordinates, one 1-D factor per axis.
    Product(Vec<DensitySpec>),
    PiecewiseLinear(PiecewiseLinear),
    Grid(GridDensity),
    /// `|K ∩ (K + x)| / |K|²`, the law of `X' - X` for `X` uniform on `K`.
    Covariogram {
        body: SupportBody,
    },
}

/// A probability density with its concavity class.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    family: Family,
    dim: usize,
    concavity: Concavity,
    radius: f64,
}

fn ln_ep_norm(shape: f64, scale: f64) -> f64 {
    scale.ln() + std::f64::consts::LN_2 + shape.ln() / shape + ln_gamma(1.0 + 1.0 / shape)
}

impl DensitySpec {
    fn build(family: Family, dim: usize, concavity: Concavity) -> Result<Self> {
        let mut spec = Self { family, dim, concavity, radius: 0.0 };
        spec.radius = spec.compute_truncation_radius()?;
        Ok(spec)
    }

    pub fn gaussian(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let g = Gaussian::new(mean, covariance)?;
        let dim = g.dim();
        Self::build(Family::Gaussian(g), dim, Concavity::LogConcave)
    }

    pub fn standard_gaussian(dim: usize) -> Self {
        Self::build(Family::Gaussian(Gaussian::standard(dim)), dim, Concavity::LogConcave).expect("standard normal")
    }

    /// Centred normal with variance `sigma²` on every axis.
    pub fn isotropic_gaussian(dim: usize, sigma: f64) -> Result<Self> {
        let cov = (0..dim).map(|i| (0..dim).map(|j| if i == j { sigma * sigma } else { 0.0 }).collect()).collect();
        Self::gaussian(vec![0.0; dim], cov)
    }

    pub fn uniform(body: SupportBody) -> Result<Self> {
        let dim = body.dim();
        Self::uniform_at(body, vec![0.0; dim])
    }

    pub fn uniform_at(body: SupportBody, center: Vec<f64>) -> Result<Self> {
        if center.len() != body.dim() {
            return Err(Error::DimensionMismatch { expected: body.dim(), got: center.len() });
        }
        let dim = body.dim();
        Self::build(Family::Uniform { body, center }, dim, Concavity::LogConcave)
    }

    /// Uniform on `[a, b]`.
    pub fn uniform_interval(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(invalid("interval", "need a < b"));
        }
        Self::uniform_at(SupportBody::boxed(vec![0.5 * (b - a)])?, vec![0.5 * (a + b)])
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid("rate", "must be positive and finite"));
        }
        Self::build(Family::Exponential { rate, reflected: false }, 1, Concavity::LogConcave)
    }

    pub fn exponential_power(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(invalid("shape", "must be positive and finite"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive and finite"));
        }
        let concavity = if shape >= 1.0 { Concavity::LogConcave } else { Concavity::Unknown };
        Self::build(Family::ExponentialPower { shape, scale }, 1, concavity)
    }

    /// Symmetric Laplace law `exp(-|x|/scale) / (2 scale)`.
    pub fn laplace(scale: f64) -> Result<Self> {
        Self::exponential_power(1.0, scale)
    }

    pub fn generalized_gaussian(beta: f64, dim: usize, scale: f64) -> Result<Self> {
        let gg = GeneralizedGaussian::new(beta, dim, scale)?;
        let e = gg.exponent();
        let concavity = if beta == 0.0 || (beta > 0.0 && e == 0.0) {
            Concavity::LogConcave
        } else if (beta > 0.0 && e > 0.0) || beta < 0.0 {
            Concavity::SConcave(1.0 / e)
        } else {
            Concavity::Unknown
        };
        Self::build(Family::GeneralizedGaussian(gg), dim, concavity)
    }

    pub fn product(factors: Vec<DensitySpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("factors", "need at least one factor"));
        }
        if let Some(f) = factors.iter().find(|f| f.dim != 1) {
            return Err(Error::DimensionMismatch { expected: 1, got: f.dim });
        }
        let concavity = if factors.iter().all(|f| f.concavity.is_log_concave()) {
            Concavity::LogConcave
        } else {
            Concavity::Unknown
        };
        let dim = factors.len();
        Self::build(Family::Product(factors), dim, concavity)
    }

    /// Piecewise-linear density through the given points, renormalised to unit mass.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let (pl, _) = PiecewiseLinear::normalized(knots, values)?;
        Ok(Self::from_piecewise(pl))
    }

    pub(crate) fn from_piecewise(pl: PiecewiseLinear) -> Self {
        let concavity = if pl.is_log_concave() { Concavity::LogConcave } else { Concavity::Unknown };
        let radius = pl.lo().abs().max(pl.hi().abs()) * (1.0 + 1.0 / 32.0);
        Self { family: Family::PiecewiseLinear(pl), dim: 1, concavity, radius }
    }

    /// Triangle density `(1 - |x - c|/w)_+ / w`.
    pub fn triangle(center: f64, half_width: f64) -> Result<Self> {
        Self::piecewise_linear(vec![center - half_width, center, center + half_width], vec![0.0, 1.0 / half_width, 0.0])
    }

    /// Wraps a grid whose mass is 1 within 1e-6 and whose boundary nodes vanish.
    pub fn grid(grid: GridDensity) -> Result<Self> {
        Self::grid_with_concavity(grid, Concavity::Unknown)
    }

    pub fn grid_with_concavity(grid: GridDensity, concavity: Concavity) -> Result<Self> {
        let mass = grid.mass();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(invalid("values", format!("grid mass {mass} differs from 1 by more than 1e-6")));
        }
        if !grid.boundary_is_zero() {
            return Err(invalid("values", "boundary nodes must be zero"));
        }
        let dim = grid.dim();
        let upper = grid.upper();
        let radius = (0..dim).map(|a| grid.origin[a].abs().max(upper[a].abs())).fold(0.0, f64::max);
        Ok(Self { family: Family::Grid(grid), dim, concavity, radius })
    }

    pub fn covariogram(body: SupportBody) -> Result<Self> {
        let dim = body.dim();
        Self::build(Family::Covariogram { body }, dim, Concavity::LogConcave)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn concavity(&self) -> Concavity {
        self.concavity
    }

    pub fn with_concavity(mut self, concavity: Concavity) -> Self {
        self.concavity = concavity;
        self
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Gaussian(_) => "gaussian",
            Family::Uniform { .. } => "uniform",
            Family::Exponential { .. } => "exponential",
            Family::ExponentialPower { .. } => "exponential-power",
            Family::GeneralizedGaussian(_) => "generalized-gaussian",
            Family::Product(_) => "product",
            Family::PiecewiseLinear(_) => "piecewise-linear",
            Family::Grid(_) => "grid",
            Family::Covariogram { .. } => "covariogram",
        }
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got });
        }
        Ok(())
    }

    /// `f(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Gaussian(g) => g.pdf(x),
            Family::Uniform { body, center } => {
                let y: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                if body.contains(&y) {
                    1.0 / body.volume()
                } else {
                    0.0
                }
            }
            Family::Exponential { rate, reflected } => {
                let y = if *reflected { -x[0] } else { x[0] };
                if y >= 0.0 {
                    rate * (-rate * y).exp()
                } else {
                    0.0
                }
            }
            Family::ExponentialPower { shape, scale } => {
                ((-(x[0] / scale).abs().powf(*shape) / shape) - ln_ep_norm(*shape, *scale)).exp()
            }
            Family::GeneralizedGaussian(g) => g.pdf(x),
            Family::Product(fs) => fs.iter().zip(x).map(|(f, xi)| f.value(&[*xi])).product(),
            Family::PiecewiseLinear(pl) => pl.evaluate(x[0]),
            Family::Grid(g) => g.evaluate(x),
            Family::Covariogram { body } => {
                let v = body.volume();
                body.covariogram(x) / (v * v)
            }
        }
    }

    /// `‖f‖_∞`, or `+∞` for unbounded densities.
    pub fn sup(&self) -> f64 {
        match &self.family {
            Family::Gaussian(g) => g.peak(),
            Family::Uniform { body, .. } => 1.0 / body.volume(),
            Family::Exponential { rate, .. } => *rate,
            Family::ExponentialPower { shape, scale } => (-ln_ep_norm(*shape, *scale)).exp(),
            Family::GeneralizedGaussian(g) => g.sup(),
            Family::Product(fs) => fs.iter().map(|f| f.sup()).product(),
            Family::PiecewiseLinear(pl) => pl.sup(),
            Family::Grid(g) => g.sup(),
            Family::Covariogram { body } => 1.0 / body.volume(),
        }
    }

    /// Lebesgue measure of the support; `+∞` when unbounded.
    pub fn support_volume(&self) -> f64 {
        match &self.family {
            Family::Uniform { body, .. } => body.volume(),
            Family::GeneralizedGaussian(g) => match g.radius() {
                Some(r) => SupportBody::Ball { dim: g.dim(), radius: r }.volume(),
                None => f64::INFINITY,
            },
            Family::Product(fs) => fs.iter().map(|f| f.support_volume()).product(),
            Family::PiecewiseLinear(pl) => pl.support_length(),
            Family::Grid(g) => {
                let threshold = g.mass() * 1e-12;
                g.values.iter().filter(|v| **v > threshold).count() as f64 * g.cell_volume()
            }
            Family::Covariogram { body } => body.difference_body().volume(),
            Family::Gaussian(_) | Family::Exponential { .. } | Family::ExponentialPower { .. } => f64::INFINITY,
        }
    }

    pub fn is_compact(&self) -> bool {
        self.support_volume().is_finite()
    }

    /// True when `f(x) = f(-x)` by construction or, for grids, within 1e-9 at every node.
    pub fn is_symmetric(&self) -> bool {
        match &self.family {
            Family::Gaussian(g) => g.mean().iter().all(|m| *m == 0.0),
            Family::Uniform { center, .. } => center.iter().all(|c| *c == 0.0),
            Family::Exponential { .. } => false,
            Family::ExponentialPower { .. } | Family::GeneralizedGaussian(_) | Family::Covariogram { .. } => true,
            Family::Product(fs) => fs.iter().all(|f| f.is_symmetric()),
            Family::PiecewiseLinear(pl) => {
                let n = pl.knots().len();
                (0..n).all(|i| {
                    (pl.knots()[i] + pl.knots()[n - 1 - i]).abs() <= 1e-12 * (1.0 + pl.knots()[i].abs())
                        && (pl.values()[i] - pl.values()[n - 1 - i]).abs() <= 1e-12 * (1.0 + pl.values()[i])
                })
            }
            Family::Grid(g) => g.asymmetry().is_some_and(|a| a <= 1e-9),
        }
    }

    /// Range of `v·X` (endpoints may be infinite).
    pub fn support_range(&self, v: &[f64]) -> (f64, f64) {
        match &self.family {
            Family::Gaussian(_) | Family::ExponentialPower { .. } => {
                if v.iter().all(|x| *x == 0.0) {
                    (0.0, 0.0)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            Family::Uniform { body, center } => {
                let c = dot(v, center);
                let h = body.support(v);
                (c - h, c + h)
            }
            Family::Exponential { reflected, .. } => {
                let base = if *reflected { (f64::NEG_INFINITY, 0.0) } else { (0.0, f64::INFINITY) };
                scale_interval(base, v[0])
            }
            Family::GeneralizedGaussian(g) => match g.radius() {
                Some(r) => (-r * norm(v), r * norm(v)),
                None => (f64::NEG_INFINITY, f64::INFINITY),
            },
            Family::Product(fs) => fs.iter().zip(v).fold((0.0, 0.0), |acc, (f, vi)| {
                if *vi == 0.0 {
                    return acc;
                }
                let r = scale_interval(f.support_range(&[1.0]), *vi);
                (acc.0 + r.0, acc.1 + r.1)
            }),
            Family::PiecewiseLinear(pl) => scale_interval(pl.support_bounds(), v[0]),
            Family::Grid(g) => g.support_range(v),
            Family::Covariogram { body } => {
                let h = 2.0 * body.support(v);
                (-h, h)
            }
        }
    }

    /// Mass outside the box `[-r, r]^n` (a rigorous upper bound for unbounded families).
    pub fn tail_mass_outside_box(&self, r: f64) -> f64 {
        let inside_box = |lo: &[f64], hi: &[f64]| lo.iter().chain(hi).all(|x| x.abs() <= r);
        match &self.family {
            Family::Gaussian(g) => {
                let mut tail = 0.0;
                for (i, m) in g.mean().iter().enumerate() {
                    let s = (2.0 * g.covariance()[i][i]).sqrt();
                    tail += 0.5 * erfc((r - m) / s) + 0.5 * erfc((r + m) / s);
                }
                tail.min(1.0)
            }
            Family::Exponential { rate, .. } => (-rate * r).exp(),
            Family::ExponentialPower { shape, scale } => gamma_ur(1.0 / shape, (r / scale).powf(*shape) / shape),
            Family::GeneralizedGaussian(g) => g.radial_tail(r),
            Family::Product(fs) => fs.iter().map(|f| f.tail_mass_outside_box(r)).sum::<f64>().min(1.0),
            Family::Grid(g) => {
                let mut outside = 0.0;
                let vol = g.cell_volume();
                match g.dim() {
                    1 => {
                        for i in 0..g.shape[0] {
                            if g.node(&[i])[0].abs() > r {
                                outside += g.values[i] * vol;
                            }
                        }
                    }
                    _ => {
                        for i in 0..g.shape[0] {
                            for j in 0..g.shape[1] {
                                let x = g.node(&[i, j]);
                                if x[0].abs() > r || x[1].abs() > r {
                                    outside += g.value_at(&[i, j]) * vol;
                                }
                            }
                        }
                    }
                }
                outside
            }
            _ => {
                let lo: Vec<f64> = (0..self.dim).map(|a| self.support_range(&unit(self.dim, a)).0).collect();
                let hi: Vec<f64> = (0..self.dim).map(|a| self.support_range(&unit(self.dim, a)).1).collect();
                if inside_box(&lo, &hi) {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Half-width `R` of the origin-centred box outside which the excluded mass is below 1e-11,
    /// with the support strictly inside for compact families.
    pub fn truncation_radius(&self) -> f64 {
        self.radius
    }

    fn compute_truncation_radius(&self) -> Result<f64> {
        if let Family::Grid(g) = &self.family {
            let upper = g.upper();
            return Ok((0..g.dim()).map(|a| g.origin[a].abs().max(upper[a].abs())).fold(0.0, f64::max));
        }
        if self.is_compact() {
            let extent = (0..self.dim)
                .map(|a| {
                    let (lo, hi) = self.support_range(&unit(self.dim, a));
                    lo.abs().max(hi.abs())
                })
                .fold(0.0, f64::max);
            return Ok(extent * (1.0 + 1.0 / 32.0));
        }
        let target = 0.1 * TAIL_BOUND;
        let mut hi = 1.0;
        while self.tail_mass_outside_box(hi) > target {
            hi *= 2.0;
            if hi > 1e8 {
                return Err(Error::TailMass { radius: hi, tail: self.tail_mass_outside_box(hi) });
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_mass_outside_box(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((hi * 4.0).ceil() / 4.0)
    }

    /// Line `point + t·dir` restricted to the support, as a span in `t`.
    ///
    /// Unbounded families report their truncation box as an open core.
    pub fn line_support(&self, point: &[f64], dir: &[f64]) -> Option<Span> {
        let r = self.radius;
        let box_chord = |open: bool| {
            let chord = SupportBody::Box { half_widths: vec![r; self.dim] }.chord(point, dir)?;
            Some(if open { Span::open(chord.0, chord.1) } else { Span::closed(chord.0, chord.1) })
        };
        match &self.family {
            Family::Gaussian(_) | Family::ExponentialPower { .. } => box_chord(true),
            Family::Uniform { body, center } => {
                let p: Vec<f64> = point.iter().zip(center).map(|(a, c)| a - c).collect();
                body.chord(&p, dir).map(|(a, b)| Span::closed(a, b))
            }
            Family::Exponential { reflected, .. } => {
                let base = if *reflected {
                    Span { lo: -r, hi: 0.0, open_lo: true, open_hi: false }
                } else {
                    Span { lo: 0.0, hi: r, open_lo: false, open_hi: true }
                };
                Some(base.affine(1.0 / dir[0], -point[0] / dir[0]))
            }
            Family::GeneralizedGaussian(g) => match g.radius() {
                Some(rad) => {
                    SupportBody::Ball { dim: self.dim, radius: rad }.chord(point, dir).map(|(a, b)| Span::closed(a, b))
                }
                None => box_chord(true),
            },
            Family::Product(fs) => {
                let mut span = Span::open(f64::NEG_INFINITY, f64::INFINITY);
                for ((f, p), d) in fs.iter().zip(point).zip(dir) {
                    let fspan = f.line_support(&[0.0], &[1.0])?;
                    if *d == 0.0 {
                        let inside = (fspan.open_lo || *p >= fspan.lo) && (fspan.open_hi || *p <= fspan.hi);
                        if !inside {
                            return None;
                        }
                        continue;
                    }
                    let s = fspan.affine(1.0 / d, -p / d);
                    if s.lo > span.lo || (s.lo == span.lo && !s.open_lo) {
                        span.lo = s.lo;
                        span.open_lo = s.open_lo;
                    }
                    if s.hi < span.hi || (s.hi == span.hi && !s.open_hi) {
                        span.hi = s.hi;
                        span.open_hi = s.open_hi;
                    }
                }
                (span.hi > span.lo).then_some(span)
            }
            Family::PiecewiseLinear(pl) => {
                Some(Span::closed(pl.lo(), pl.hi()).affine(1.0 / dir[0], -point[0] / dir[0]))
            }
            Family::Grid(g) => g.chord(point, dir).map(|(a, b)| Span::closed(a, b)),
            Family::Covariogram { body } => body.difference_body().chord(point, dir).map(|(a, b)| Span::closed(a, b)),
        }
    }

    /// Parameters `t` where `t ↦ f(point + t·dir)` is not smooth inside its span.
    pub fn line_kinks(&self, point: &[f64], dir: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Exponential { .. } | Family::ExponentialPower { .. } => vec![-point[0] / dir[0]],
            Family::Product(fs) => {
                let mut out = Vec::new();
                for ((f, p), d) in fs.iter().zip(point).zip(dir) {
                    if *d != 0.0 {
                        out.extend(f.line_kinks(&[0.0], &[1.0]).into_iter().map(|c| (c - p) / d));
                    }
                }
                out
            }
            Family::PiecewiseLinear(pl) => pl.knots().iter().map(|k| (k - point[0]) / dir[0]).collect(),
            Family::Covariogram { body } => {
                // Cusp at the origin and, for boxes, along the coordinate axes.
                let mut out = vec![-dot(point, dir) / dot(dir, dir)];
                if let SupportBody::Box { .. } = body {
                    for (p, d) in point.iter().zip(dir) {
                        if *d != 0.0 {
                            out.push(-p / d);
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Values `v·x` where the density of `v·X` is not smooth.
    pub fn projection_kinks(&self, v: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Uniform { body, center } => {
                let c = dot(v, center);
                body.vertex_projections(v).into_iter().map(|x| x + c).collect()
            }
            Family::Exponential { .. } | Family::ExponentialPower { .. } => vec![0.0],
            Family::PiecewiseLinear(pl) => pl.knots().iter().map(|k| k * v[0]).collect(),
            Family::Product(fs) => {
                let mut sums = vec![0.0];
                for (f, vi) in fs.iter().zip(v) {
                    let mut pts = f.line_kinks(&[0.0], &[1.0]);
                    let (lo, hi) = f.support_range(&[1.0]);
                    pts.extend([lo, hi].into_iter().filter(|x| x.is_finite()));
                    if pts.is_empty() || *vi == 0.0 {
                        continue;
                    }
                    sums = sums.iter().flat_map(|s| pts.iter().map(move |c| s + vi * c)).collect();
                }
                sums
            }
            Family::Covariogram { body } => {
                let mut out = vec![0.0];
                out.extend(body.difference_body().vertex_projections(v));
                if let SupportBody::Box { half_widths } = body {
                    if half_widths.len() == 2 {
                        for a in [-2.0, 0.0, 2.0] {
                            for b in [-2.0, 0.0, 2.0] {
                                out.push(a * half_widths[0] * v[0] + b * half_widths[1] * v[1]);
                            }
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Density of `aX` for `a != 0`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a != 0.0 && a.is_finite()) {
            return Err(invalid("scale", "must be nonzero and finite"));
        }
        let out = match &self.family {
            Family::Gaussian(g) => {
                Self::build(Family::Gaussian(g.affine(a, &vec![0.0; self.dim])?), self.dim, self.concavity)?
            }
            Family::Uniform { body, center } => {
                Self::uniform_at(body.dilate(a.abs())?, center.iter().map(|c| a * c).collect())?
            }
            Family::Exponential { rate, reflected } => Self::build(
                Family::Exponential { rate: rate / a.abs(), reflected: *reflected ^ (a < 0.0) },
                1,
                self.concavity,
            )?,
            Family::ExponentialPower { shape, scale } => Self::exponential_power(*shape, scale * a.abs())?,
            Family::GeneralizedGaussian(g) => {
                Self::build(Family::GeneralizedGaussian(g.scaled(a)?), self.dim, self.concavity)?
            }
            Family::Product(fs) => Self::product(fs.iter().map(|f| f.scaled(a)).collect::<Result<_>>()?)?,
            Family::PiecewiseLinear(pl) => Self::from_piecewise(pl.map_affine(a, 0.0)),
            Family::Grid(g) => Self::grid_with_concavity(g.scaled(a), self.concavity)?,
            Family::Covariogram { body } => Self::covariogram(body.dilate(a.abs())?)?,
        };
        Ok(out.with_concavity(self.concavity))
    }

    /// Density of `-X`.
    pub fn reflect(&self) -> Result<Self> {
        if self.is_symmetric() {
            return Ok(self.clone());
        }
        self.scaled(-1.0)
    }
}

pub(crate) fn unit(dim: usize, axis: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[axis] = 1.0;
    v
}

fn scale_interval((lo, hi): (f64, f64), a: f64) -> (f64, f64) {
    let (x, y) = (lo * a, hi * a);
    if a >= 0.0 {
        (x, y)
    } else {
        (y, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spot_values() {
        let g = DensitySpec::standard_gaussian(1);
        assert_relative_eq!(g.evaluate(&[0.0]).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        let u = DensitySpec::uniform_interval(-0.5, 0.5).unwrap();
        assert_eq!(u.evaluate(&[0.7]).unwrap(), 0.0);
        let e = DensitySpec::exponential(1.0).unwrap();
        assert_relative_eq!(e.evaluate(&[1.0]).unwrap(), (-1.0f64).exp(), epsilon = 1e-16);
        assert!(matches!(g.evaluate(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn exponential_power_normalised() {
        for (k, s) in [(1.0, 1.0), (1.5, 0.7), (3.0, 2.0), (0.5, 1.0)] {
            let f = DensitySpec::exponential_power(k, s).unwrap();
            let span = f.line_support(&[0.0], &[1.0]).unwrap();
            let m = crate::quad::Quadrature::default().integrate_span(|x| f.value(&[x]), &span, &[0.0]);
            assert_relative_eq!(m.value, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn gaussian_truncation_radius() {
        let g = DensitySpec::standard_gaussian(1);
        let r = g.truncation_radius();
        assert!(g.tail_mass_outside_box(r) < 1e-10);
        assert!(r <= 8.0);
        assert!(g.tail_mass_outside_box(1.0) > 1e-10);
    }

    #[test]
    fn product_line_support_intersects_factors() {
        let f = DensitySpec::product(vec![
            DensitySpec::uniform_interval(-1.0, 1.0).unwrap(),
            DensitySpec::laplace(1.0).unwrap(),
        ])
        .unwrap();
        let s = f.line_support(&[0.0, 0.0], &[0.6, 0.8]).unwrap();
        assert!(!s.open_lo && !s.open_hi);
        assert_relative_eq!(s.hi, 1.0 / 0.6, max_relative = 1e-14);
    }

    #[test]
    fn scaling_exponential_flips_support() {
        let e = DensitySpec::exponential(2.0).unwrap().scaled(-0.5).unwrap();
        assert_relative_eq!(e.evaluate(&[-1.0]).unwrap(), 4.0 * (-4.0f64).exp(), max_relative = 1e-14);
        assert_eq!(e.evaluate(&[1.0]).unwrap(), 0.0);
    }
}
