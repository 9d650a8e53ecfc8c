//! Hyperplane sections, projection profiles and marginals.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{DensitySpec, Family, PiecewiseLinear, TABLE_KNOTS};
use crate::bodies::SupportBody;
use crate::directions::{dot, Direction};
use crate::error::{Error, Result};
use crate::quad::{chebyshev_lobatto, Estimate, Quadrature, Span};

/// Section quadrature; sections are usually nested inside another integral.
pub(crate) fn section_quad() -> Quadrature {
    Quadrature { abs_tol: 1e-15, rel_tol: 1e-10, max_intervals: 200 }
}

/// The density `t ↦ m(t)` of `v·X` for a unit `v`, with its integration span and kinks.
pub struct Profile<'a> {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    pub span: Span,
    pub kinks: Vec<f64>,
    /// Exact piecewise-linear form, present for tabulated marginals.
    pub table: Option<PiecewiseLinear>,
}

impl<'a> Profile<'a> {
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// `∫ g(t, m(t)) dt`.
    pub fn integrate<G: Fn(f64, f64) -> f64>(&self, quad: &Quadrature, g: G) -> Estimate {
        quad.integrate_span(|t| g(t, self.eval(t)), &self.span, &self.kinks)
    }

    /// `∫ m^q` for `q > 0`.
    pub fn power_integral(&self, quad: &Quadrature, q: f64) -> Estimate {
        if let Some(pl) = &self.table {
            return Estimate::new(pl.power_integral(q), 0.0);
        }
        self.integrate(quad, |_, m| if m > 0.0 { m.powf(q) } else { 0.0 })
    }

    /// `∫ |t - c|^p m(t) dt` for `p > -1`.
    pub fn abs_moment(&self, quad: &Quadrature, c: f64, p: f64) -> Estimate {
        if let Some(pl) = &self.table {
            return Estimate::new(pl.abs_moment(c, p), 0.0);
        }
        if c < self.span.lo || c > self.span.hi {
            return self.integrate(quad, |t, m| (t - c).abs().powf(p) * m);
        }
        quad.integrate_abs_power_span(|t| self.eval(t), &self.span, c, p, &self.kinks)
    }
}

impl DensitySpec {
    /// `∫_{x·v = t} f`, the (n-1)-dimensional mass of the section, for unit `v`.
    pub fn section_integral(&self, v: &Direction, t: f64) -> Result<f64> {
        self.check_dim(v.dim())?;
        Ok(self.section_estimate(v.as_slice(), t)?.value)
    }

    pub(crate) fn section_estimate(&self, v: &[f64], t: f64) -> Result<Estimate> {
        match (&self.family, self.dim) {
            (_, 1) => Ok(Estimate::new(self.value(&[t * v[0]]), 0.0)),
            (Family::Gaussian(g), _) => {
                let (m, var) = g.projection(v);
                Ok(Estimate::new((-(t - m) * (t - m) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt(), 0.0))
            }
            (Family::Uniform { body, center }, 2) => {
                let p: Vec<f64> = v.iter().zip(center).map(|(a, c)| t * a - c).collect();
                let len = body.chord(&p, &[-v[1], v[0]]).map_or(0.0, |(a, b)| b - a);
                Ok(Estimate::new(len / body.volume(), 0.0))
            }
            (Family::Uniform { body: SupportBody::Ball { radius, .. }, center }, 3) => {
                let d = t - dot(v, center);
                let area = PI * (radius * radius - d * d).max(0.0);
                Ok(Estimate::new(area / SupportBody::Ball { dim: 3, radius: *radius }.volume(), 0.0))
            }
            (Family::Grid(g), 2) => Ok(Estimate::new(g.line_integral(&[t * v[0], t * v[1]], &[-v[1], v[0]]), 0.0)),
            (_, 2) => {
                let point = [t * v[0], t * v[1]];
                let dir = [-v[1], v[0]];
                let Some(span) = self.line_support(&point, &dir) else {
                    return Ok(Estimate::ZERO);
                };
                let kinks = self.line_kinks(&point, &dir);
                Ok(section_quad().integrate_span(
                    |s| self.value(&[point[0] + s * dir[0], point[1] + s * dir[1]]),
                    &span,
                    &kinks,
                ))
            }
            _ => Err(Error::Unsupported(format!(
                "sections of {} densities in dimension {}",
                self.family_name(),
                self.dim
            ))),
        }
    }

    /// Span of `v·X` used for integration: the exact range where finite,
    /// otherwise the truncation box projected, marked open.
    pub(crate) fn projection_span(&self, v: &[f64]) -> Span {
        let (lo, hi) = self.support_range(v);
        let reach = self.radius * v.iter().map(|x| x.abs()).sum::<f64>();
        Span {
            lo: if lo.is_finite() { lo } else { -reach },
            hi: if hi.is_finite() { hi } else { reach },
            open_lo: !lo.is_finite(),
            open_hi: !hi.is_finite(),
        }
    }

    /// The density of `v·X` as a function of `t`, for unit `v`.
    pub fn profile(&self, v: &Direction) -> Result<Profile<'_>> {
        self.check_dim(v.dim())?;
        self.profile_of(v.as_slice())
    }

    pub(crate) fn profile_of(&self, v: &[f64]) -> Result<Profile<'_>> {
        if self.dim == 1 {
            let s = v[0];
            let span = self.line_support(&[0.0], &[s]).unwrap_or(Span::closed(0.0, 0.0));
            let kinks = self.line_kinks(&[0.0], &[s]);
            let table = match &self.family {
                Family::PiecewiseLinear(pl) => Some(pl.map_affine(1.0 / s, 0.0)),
                Family::Grid(g) => Some(g.marginal(&[s])?),
                _ => None,
            };
            return Ok(Profile { eval: Box::new(move |t| self.value(&[s * t])), span, kinks, table });
        }
        match &self.family {
            Family::Gaussian(g) => {
                let (m, var) = g.projection(v);
                let sd = var.sqrt();
                Ok(Profile {
                    eval: Box::new(move |t| (-(t - m) * (t - m) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()),
                    span: Span::open(m - 9.0 * sd, m + 9.0 * sd),
                    kinks: Vec::new(),
                    table: None,
                })
            }
            Family::Grid(g) => {
                let pl = g.marginal(v)?;
                let span = Span::closed(pl.lo(), pl.hi());
                let table = pl.clone();
                Ok(Profile { eval: Box::new(move |t| pl.evaluate(t)), span, kinks: Vec::new(), table: Some(table) })
            }
            _ if self.dim == 2 || self.dim == 3 => {
                let span = self.projection_span(v);
                let kinks: Vec<f64> =
                    self.projection_kinks(v).into_iter().filter(|k| *k > span.lo && *k < span.hi).collect();
                let dir = v.to_vec();
                // Probe once so unsupported families fail here rather than inside a quadrature.
                self.section_estimate(&dir, 0.5 * (span.lo + span.hi))?;
                Ok(Profile {
                    eval: Box::new(move |t| self.section_estimate(&dir, t).map_or(0.0, |e| e.value)),
                    span,
                    kinks,
                    table: None,
                })
            }
            _ => Err(Error::Unsupported(format!("projections in dimension {}", self.dim))),
        }
    }

    /// One-dimensional density of `v·X` (mass 1 within 1e-6).
    ///
    /// Closed forms are returned where the family admits them; otherwise the
    /// section integrals are tabulated on Chebyshev–Lobatto knots (uniform
    /// knots for unbounded support) merged with the marginal's kinks.
    pub fn marginal_along(&self, v: &Direction) -> Result<DensitySpec> {
        self.check_dim(v.dim())?;
        let v = v.as_slice();
        if let Some(m) = self.exact_marginal(v) {
            return m;
        }
        let profile = self.profile_of(v)?;
        let knots = table_knots(&profile.span, &profile.kinks, TABLE_KNOTS);
        let values: Vec<f64> = knots.par_iter().map(|t| profile.eval(*t)).collect();
        let (pl, _) = PiecewiseLinear::normalized(knots, values)?;
        Ok(DensitySpec::from_piecewise(pl).with_concavity(self.concavity))
    }

    /// The marginal along unit `v` when it needs no tabulation: closed forms,
    /// 1-D reflections and grid marginals (which are exact piecewise-linear).
    pub(crate) fn exact_marginal(&self, v: &[f64]) -> Option<Result<DensitySpec>> {
        if self.dim == 1 {
            return Some(if v[0] > 0.0 { Ok(self.clone()) } else { self.reflect() });
        }
        let axis = v.iter().position(|x| x.abs() == 1.0);
        match (&self.family, axis) {
            (Family::Gaussian(g), _) => {
                let (m, var) = g.projection(v);
                Some(DensitySpec::gaussian(vec![m], vec![vec![var]]))
            }
            (Family::Uniform { body: SupportBody::Box { half_widths }, center }, Some(a)) => {
                let c = center[a] * v[a];
                Some(DensitySpec::uniform_interval(c - half_widths[a], c + half_widths[a]))
            }
            (Family::Product(fs), Some(a)) => Some(if v[a] > 0.0 { Ok(fs[a].clone()) } else { fs[a].reflect() }),
            (Family::Grid(g), _) => {
                Some(g.marginal(v).map(|pl| DensitySpec::from_piecewise(pl).with_concavity(self.concavity)))
            }
            _ => None,
        }
    }
}

/// Knots on a span: Chebyshev–Lobatto when bounded, uniform otherwise, merged with `kinks`.
pub(crate) fn table_knots(span: &Span, kinks: &[f64], count: usize) -> Vec<f64> {
    let mut knots = if span.is_bounded() {
        chebyshev_lobatto(span.lo, span.hi, count)
    } else {
        let n = count - 1;
        (0..=n).map(|k| span.lo + span.width() * k as f64 / n as f64).collect()
    };
    knots.extend(kinks.iter().copied().filter(|k| *k > span.lo && *k < span.hi));
    knots.sort_by(f64::total_cmp);
    let tol = 1e-12 * span.width().max(f64::MIN_POSITIVE);
    knots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    knots
}
