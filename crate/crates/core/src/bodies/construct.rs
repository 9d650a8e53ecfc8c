//! Star bodies built from densities: cross-section, intersection, radial
//! mean, Ball, polar centroid and `Z_p` bodies.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::star::{check_set, BodyLabel, StarBody};
use super::SupportBody;
use crate::densities::grid::fft_convolve;
use crate::densities::project::section_quad;
use crate::densities::{DensitySpec, Family, GridDensity};
use crate::directions::{Direction, DirectionSet};
use crate::error::{invalid, Error, Result};
use crate::quad::{Estimate, Quadrature, Span};
use crate::renyi::directional_entropy;

/// Samples per line when a smooth analytic density is discretised along lines.
const LINE_SAMPLES: usize = 4097;

fn check_dir(f: &DensitySpec, v: &Direction) -> Result<()> {
    if v.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: v.dim() });
    }
    Ok(())
}

fn positive_radius(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Divergent(format!("{name} radius evaluates to {value}")))
    }
}

fn check_nonzero_order(p: f64, min: f64, inclusive: bool) -> Result<()> {
    let ok = if inclusive { p >= min } else { p > min };
    if !ok || p == 0.0 || p.is_nan() {
        let bound = if inclusive { ">=" } else { ">" };
        return Err(invalid("p", format!("need p {bound} {min} and p != 0, got {p}")));
    }
    Ok(())
}

/// `ρ_{C_p f}(v) = (∫ m_v(t)^{p+1} dt)^{1/p}` from the marginal `m_v` of `v·X`;
/// at `p = -1` the reciprocal of the length of the range of `v·X`.
pub fn cross_section_radius(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_dir(f, v)?;
    check_nonzero_order(p, -1.0, true)?;
    if p == -1.0 {
        let (lo, hi) = f.support_range(v.as_slice());
        return positive_radius("cross-section", 1.0 / (hi - lo));
    }
    let profile = f.profile(v)?;
    let integral = profile.power_integral(&Quadrature::default(), p + 1.0).value;
    positive_radius("cross-section", integral.powf(1.0 / p))
}

/// The same radius through entropy powers, `N_{p+1}(v·X)^{-1/2}`.
pub fn cross_section_radius_entropy(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_dir(f, v)?;
    check_nonzero_order(p, -1.0, true)?;
    let h = directional_entropy(f, v.as_slice(), p + 1.0)?;
    positive_radius("cross-section", (-h.h_p).exp())
}

pub fn cross_section_body(f: &DensitySpec, p: f64, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    check_nonzero_order(p, -1.0, true)?;
    StarBody::from_fn(set, BodyLabel::CrossSection { p }, true, |v| cross_section_radius(f, v, p))
}

/// `ρ_{I(f)}(v) = ∫_{v⊥} f`.
pub fn intersection_radius(f: &DensitySpec, v: &Direction) -> Result<f64> {
    positive_radius("intersection", f.section_integral(v, 0.0)?)
}

pub fn intersection_body_of_density(f: &DensitySpec, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    StarBody::from_fn(set, BodyLabel::Intersection, true, |v| intersection_radius(f, v))
}

/// `ρ_{I(K)}(v) = |K ∩ v⊥|` for a planar star body.
pub fn intersection_body_of_starbody(k: &StarBody, v: &Direction) -> Result<f64> {
    k.central_section(v)
}

/// `E|D|^q` for `D ~ N(0, τ²)`.
fn normal_abs_moment(tau2: f64, q: f64) -> f64 {
    (0.5 * q * (2.0 * tau2).ln() + ln_gamma(0.5 * (q + 1.0)) - 0.5 * PI.ln()).exp()
}

/// `ρ_{R_p f}(v)^p = ∫ f(x) ∫_0^∞ r^{p-1} f(x + r v) dr dx`.
fn radial_mean_power(f: &DensitySpec, v: &[f64], p: f64) -> Result<f64> {
    let quad = Quadrature::default();
    match (f.family(), f.dim()) {
        (Family::Uniform { body, .. }, _) => uniform_radial_mean_power(body, v, p),
        (Family::Gaussian(g), 1) => {
            let (_, var) = g.projection(v);
            Ok(0.5 * normal_abs_moment(2.0 * var, p - 1.0))
        }
        (Family::Gaussian(g), 2) => {
            // f = A(s)·N(t; c(s), σ²) along every line s·u + t·v.
            let u = [-v[1], v[0]];
            let (mu, var_u) = g.projection(&u);
            let sd = var_u.sqrt();
            let (_, _, var) = g.line_restriction(&u, v);
            let amp = |s: f64| {
                let (scale, _, var) = g.line_restriction(&[s * u[0], s * u[1]], v);
                scale * (2.0 * PI * var).sqrt()
            };
            let lines = quad.integrate_span(|s| amp(s).powi(2), &Span::open(mu - 9.0 * sd, mu + 9.0 * sd), &[]);
            Ok(0.5 * normal_abs_moment(2.0 * var, p - 1.0) * lines.value)
        }
        (Family::Grid(g), _) => Ok(grid_radial_mean_power(g, v, p)),
        (_, 1) => Ok(nested_radial_mean_power(f, v[0], p)),
        (_, 2) => Ok(sampled_radial_mean_power(f, v, p)),
        (_, n) => {
            Err(Error::Unsupported(format!("radial mean bodies of {} densities in dimension {n}", f.family_name())))
        }
    }
}

/// Chord formula `|K|^{-2} ∫_{v⊥} L(s)^{p+1} ds / (p(p+1))` with `L` the chord length along `v`.
fn uniform_radial_mean_power(body: &SupportBody, v: &[f64], p: f64) -> Result<f64> {
    let vol = body.volume();
    let norm = p * (p + 1.0) * vol * vol;
    match body.dim() {
        1 => Ok((2.0 * body.support(&[1.0])).powf(p + 1.0) / norm),
        2 => {
            let u = [-v[1], v[0]];
            let h = body.support(&u);
            let kinks = body.vertex_projections(&u);
            let chord = |s: f64| body.chord(&[s * u[0], s * u[1]], v).map_or(0.0, |(a, b)| (b - a).powf(p + 1.0));
            Ok(Quadrature::default().integrate_with_breaks(chord, -h, h, &kinks).value / norm)
        }
        3 => match body {
            SupportBody::Ball { radius, .. } => {
                // ∫_0^R 2πs (2√(R² - s²))^{p+1} ds
                Ok(2.0 * PI * 2f64.powf(p + 1.0) * radius.powf(p + 3.0) / (p + 3.0) / norm)
            }
            _ => Err(Error::Unsupported("radial mean bodies of non-ball uniform densities in dimension 3".into())),
        },
        n => Err(Error::Unsupported(format!("radial mean bodies in dimension {n}"))),
    }
}

/// Nested quadrature for one-dimensional densities along `sign = ±1`.
fn nested_radial_mean_power(f: &DensitySpec, sign: f64, p: f64) -> f64 {
    let outer = Quadrature::default();
    let inner = section_quad();
    let Some(span) = f.line_support(&[0.0], &[sign]) else { return 0.0 };
    let kinks = f.line_kinks(&[0.0], &[sign]);
    let g = |t: f64| f.value(&[sign * t]);
    let tail = |x: f64| {
        if x >= span.hi && !span.open_hi {
            return 0.0;
        }
        let lo = if x >= span.lo || span.open_lo { x } else { span.lo };
        let inner_span = Span { lo, hi: span.hi.max(lo), open_lo: false, open_hi: span.open_hi };
        inner.integrate_abs_power_span(g, &inner_span, x, p - 1.0, &kinks).value
    };
    outer.integrate_span(|x| g(x) * tail(x), &span, &kinks).value
}

/// `∫∫_{t < t'} (t' - t)^{p-1} g(t) g(t') dt dt'` for samples `g` at step `h`.
///
/// Odd integer orders expand into moments; other orders integrate the
/// sampled autocorrelation, read as piecewise linear in the lag, against
/// `r^{p-1}` with exact weights.
pub(crate) fn line_pair_integral(h: f64, g: &[f64], p: f64) -> f64 {
    let n = g.len();
    if n == 0 {
        return 0.0;
    }
    if p.fract() == 0.0 && p >= 1.0 && (p as i64) % 2 == 1 && p <= 15.0 {
        let order = (p as usize) - 1;
        let m0: f64 = g.iter().sum::<f64>() * h;
        if m0 == 0.0 {
            return 0.0;
        }
        let mean = g.iter().enumerate().map(|(i, v)| i as f64 * h * v).sum::<f64>() * h / m0;
        let moments: Vec<f64> = (0..=order)
            .map(|j| g.iter().enumerate().map(|(i, v)| (i as f64 * h - mean).powi(j as i32) * v).sum::<f64>() * h)
            .collect();
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=order {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * binom * moments[j] * moments[order - j];
            binom = binom * (order - j) as f64 / (j + 1) as f64;
        }
        return 0.5 * total;
    }
    let reversed: Vec<f64> = g.iter().rev().copied().collect();
    let (conv, _) = fft_convolve(g, &[n], &reversed, &[n]);
    let acf: Vec<f64> = (0..n).map(|k| (conv[n - 1 + k] * h).max(0.0)).collect();
    let mut total = 0.0;
    for k in 0..n - 1 {
        let (r0, r1) = (k as f64 * h, (k + 1) as f64 * h);
        let i0 = (r1.powf(p) - r0.powf(p)) / p;
        let i1 = (r1.powf(p + 1.0) - r0.powf(p + 1.0)) / (p + 1.0);
        total += acf[k] * i0 + (acf[k + 1] - acf[k]) * (i1 - r0 * i0) / h;
    }
    total
}

/// Sum over grid lines parallel to `v`, half a cell apart.
fn grid_radial_mean_power(g: &GridDensity, v: &[f64], p: f64) -> f64 {
    if g.dim() == 1 {
        let (h, samples) = g.line_samples(&[0.0], v);
        return line_pair_integral(h, &samples, p);
    }
    let u = [-v[1], v[0]];
    let (lo, hi) = g.box_range(&u);
    let step = 0.5 * g.spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let count = ((hi - lo) / step).ceil() as usize;
    let hs = (hi - lo) / count as f64;
    let total: f64 = (1..count)
        .into_par_iter()
        .map(|k| {
            let s = lo + k as f64 * hs;
            let (h, samples) = g.line_samples(&[s * u[0], s * u[1]], v);
            line_pair_integral(h, &samples, p)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total * hs
}

/// Analytic planar densities: quadrature over lines, samples along each line.
fn sampled_radial_mean_power(f: &DensitySpec, v: &[f64], p: f64) -> f64 {
    let u = [-v[1], v[0]];
    let span = f.projection_span(&u);
    let kinks = f.projection_kinks(&u);
    let line = |s: f64| {
        let point = [s * u[0], s * u[1]];
        let Some(ls) = f.line_support(&point, v) else { return 0.0 };
        let h = ls.width() / (LINE_SAMPLES - 1) as f64;
        if !(h > 0.0) {
            return 0.0;
        }
        let samples: Vec<f64> = (0..LINE_SAMPLES)
            .map(|k| {
                let t = ls.lo + k as f64 * h;
                f.value(&[point[0] + t * v[0], point[1] + t * v[1]])
            })
            .collect();
        line_pair_integral(h, &samples, p)
    };
    Quadrature::with_rel_tol(1e-9).integrate_span(line, &span, &kinks).value
}

/// `ρ_{R_∞ f}(v)`: the radial function of the difference body of the support.
fn radial_mean_infinity(f: &DensitySpec, v: &[f64]) -> Result<f64> {
    match f.family() {
        Family::Uniform { body, .. } => Ok(body.difference_body().radial(v)),
        Family::Covariogram { body } => Ok(body.difference_body().difference_body().radial(v)),
        _ if f.dim() == 1 && f.is_compact() => {
            let (lo, hi) = f.support_range(&[1.0]);
            Ok(hi - lo)
        }
        Family::GeneralizedGaussian(g) => match g.radius() {
            Some(r) => Ok(2.0 * r),
            None => Err(Error::Divergent("R_∞ of a density with unbounded support".into())),
        },
        Family::Product(fs) if f.is_compact() => {
            let widths = fs
                .iter()
                .map(|g| {
                    let (lo, hi) = g.support_range(&[1.0]);
                    hi - lo
                })
                .collect();
            Ok(SupportBody::boxed(widths)?.radial(v))
        }
        Family::Grid(_) => Err(Error::Unsupported("R_∞ of grid densities".into())),
        _ => Err(Error::Divergent("R_∞ of a density with unbounded support".into())),
    }
}

/// `ρ_{R_p f}(v)` for `p > 0` or `p = ∞`.
pub fn radial_mean_radius(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_dir(f, v)?;
    if !(p > 0.0) {
        return Err(invalid("p", format!("radial mean bodies need p > 0, got {p}")));
    }
    if p.is_infinite() {
        return positive_radius("radial mean", radial_mean_infinity(f, v.as_slice())?);
    }
    positive_radius("radial mean", radial_mean_power(f, v.as_slice(), p)?.powf(1.0 / p))
}

pub fn radial_mean_body(f: &DensitySpec, p: f64, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    if !(p > 0.0) {
        return Err(invalid("p", format!("radial mean bodies need p > 0, got {p}")));
    }
    StarBody::from_fn(set, BodyLabel::RadialMean { p }, true, |v| radial_mean_radius(f, v, p))
}

/// `∫_0^∞ r^{p-1} f(r v) dr`.
pub fn ray_moment(f: &DensitySpec, v: &[f64], p: f64) -> Estimate {
    let origin = vec![0.0; v.len()];
    let Some(span) = f.line_support(&origin, v) else { return Estimate::ZERO };
    if span.hi <= 0.0 && !span.open_hi {
        return Estimate::ZERO;
    }
    let lo = span.lo.max(0.0);
    let ray = Span { lo, hi: span.hi.max(lo), open_lo: false, open_hi: span.open_hi };
    let kinks = f.line_kinks(&origin, v);
    let g = |r: f64| {
        let x: Vec<f64> = v.iter().map(|c| r * c).collect();
        f.value(&x)
    };
    Quadrature::default().integrate_abs_power_span(g, &ray, 0.0, p - 1.0, &kinks)
}

/// `ρ_{B_p f}(v) = (∫_0^∞ r^{p-1} f(r v) dr)^{1/p}`.
pub fn ball_mean_radius(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_dir(f, v)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p", format!("Ball bodies need finite p > 0, got {p}")));
    }
    positive_radius("Ball", ray_moment(f, v.as_slice(), p).value.powf(1.0 / p))
}

pub fn ball_mean_body(f: &DensitySpec, p: f64, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    let symmetric = f.is_symmetric();
    StarBody::from_fn(set, BodyLabel::Ball { p }, symmetric, |v| ball_mean_radius(f, v, p))
}

/// `∫ |v·x|^p f(x) dx` for `p > -1`.
pub fn abs_moment(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_dir(f, v)?;
    if !(p > -1.0) || p.is_infinite() {
        return Err(invalid("p", format!("absolute moments need -1 < p < ∞, got {p}")));
    }
    if let Family::GeneralizedGaussian(g) = f.family() {
        if g.beta() < 0.0 {
            // |X|² has a Beta-prime tail with index b = -e - n/2.
            let b = -g.exponent() - g.dim() as f64 / 2.0;
            if p >= 2.0 * b {
                return Err(Error::Divergent(format!("moment of order {p} of a tail with index {}", 2.0 * b)));
            }
        }
    }
    let m = f.profile(v)?.abs_moment(&Quadrature::default(), 0.0, p).value;
    if !m.is_finite() || m <= 0.0 {
        return Err(Error::Divergent(format!("absolute moment of order {p} evaluates to {m}")));
    }
    Ok(m)
}

/// `ρ_{Γ_p° f}(v) = (∫ |v·x|^p f)^{-1/p}`.
pub fn polar_centroid_radius(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid("p", format!("polar centroid bodies need p > 0, got {p}")));
    }
    positive_radius("polar centroid", abs_moment(f, v, p)?.powf(-1.0 / p))
}

pub fn polar_centroid_body(f: &DensitySpec, p: f64, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    StarBody::from_fn(set, BodyLabel::PolarCentroid { p }, true, |v| polar_centroid_radius(f, v, p))
}

/// `ρ_{Z_p f}(v)` from `ρ^{-p} = ((p+1)/2) ∫ |v·x|^p f`, for `p > -1`, `p ≠ 0`.
pub fn z_radius(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_nonzero_order(p, -1.0, false)?;
    positive_radius("Z", (0.5 * (p + 1.0) * abs_moment(f, v, p)?).powf(-1.0 / p))
}

/// `ρ_{Z_p f}(v)^{-p}`, the quantity that tends to `ρ_{I f}(v)` as `p → -1`.
pub fn z_radius_power(f: &DensitySpec, v: &Direction, p: f64) -> Result<f64> {
    check_nonzero_order(p, -1.0, false)?;
    Ok(0.5 * (p + 1.0) * abs_moment(f, v, p)?)
}

pub fn z_body(f: &DensitySpec, p: f64, set: DirectionSet) -> Result<StarBody> {
    check_set(f.dim(), &set)?;
    check_nonzero_order(p, -1.0, false)?;
    StarBody::from_fn(set, BodyLabel::Z { p }, true, |v| z_radius(f, v, p))
}
