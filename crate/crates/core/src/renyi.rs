//! Rényi entropies `h_p` and entropy powers `N_p = exp(2 h_p / n)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::densities::{project::section_quad, DensitySpec, Family, Profile};
use crate::directions::{norm, Direction};
use crate::error::{invalid, Error, Result};
use crate::quad::{golden_section_max, Estimate, Quadrature, Span};

/// Orders with `|p - 1|` below this use the Shannon formula.
pub const SHANNON_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    fn join(self, other: Method) -> Method {
        if self == other {
            self
        } else if self == Method::MonteCarlo || other == Method::MonteCarlo {
            Method::MonteCarlo
        } else {
            Method::Quadrature
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyResult {
    pub p: f64,
    /// Dimension the entropy power is normalised by.
    pub dim: usize,
    pub h_p: f64,
    #[serde(rename = "N_p")]
    pub n_p: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl EntropyResult {
    fn new(p: f64, dim: usize, h_p: f64, method: Method, error_estimate: f64) -> Self {
        let n_p = power_from_entropy(h_p, dim);
        let error_estimate = if h_p.is_finite() { error_estimate.abs() } else { 0.0 };
        Self { p, dim, h_p, n_p, method, error_estimate }
    }

    /// `h_p(aX)` from `h_p(X)`.
    pub fn scaled(&self, a: f64) -> Self {
        Self::new(self.p, self.dim, self.h_p + self.dim as f64 * a.abs().ln(), self.method, self.error_estimate)
    }
}

/// `exp(2h/n)`, with `h = ±∞` mapped to `∞` and `0`.
pub fn power_from_entropy(h: f64, dim: usize) -> f64 {
    (2.0 * h / dim as f64).exp()
}

fn check_order(p: f64) -> Result<()> {
    if p.is_nan() || p < 0.0 {
        return Err(invalid("p", format!("order must lie in [0, ∞], got {p}")));
    }
    Ok(())
}

fn is_shannon(p: f64) -> bool {
    (p - 1.0).abs() < SHANNON_WINDOW
}

/// `log(I)/(1-p)` with the error propagated from `I`.
fn from_power_integral(integral: Estimate, p: f64) -> (f64, f64) {
    if integral.value.is_infinite() {
        return (if p < 1.0 { f64::INFINITY } else { f64::NEG_INFINITY }, 0.0);
    }
    let h = integral.value.ln() / (1.0 - p);
    (h, integral.error / (integral.value * (1.0 - p).abs()))
}

/// `ln p / (p - 1)`, continuous at `p = 1`.
fn log_ratio(p: f64) -> f64 {
    let d = p - 1.0;
    if d.abs() < 1e-8 {
        1.0 - 0.5 * d
    } else {
        d.ln_1p() / d
    }
}

/// Rényi entropy of order `p ∈ [0, ∞]` in nats.
///
/// Divergent power integrals give `h_p = +∞` for `p < 1` and `h_p = -∞` for
/// `p > 1`; both are returned as values, not errors.
pub fn renyi_entropy(f: &DensitySpec, p: f64) -> Result<EntropyResult> {
    check_order(p)?;
    let n = f.dim();
    if p == 0.0 {
        let method = if matches!(f.family(), Family::Grid(_)) { Method::Quadrature } else { Method::ClosedForm };
        return Ok(EntropyResult::new(p, n, f.support_volume().ln(), method, 0.0));
    }
    if p.is_infinite() {
        let method = if matches!(f.family(), Family::Grid(_)) { Method::Quadrature } else { Method::ClosedForm };
        return Ok(EntropyResult::new(p, n, -f.sup().ln(), method, 0.0));
    }
    let (h, method, err) = match f.family() {
        Family::Gaussian(g) => {
            let base = 0.5 * n as f64 * (2.0 * PI).ln() + 0.5 * g.log_det();
            (base + 0.5 * n as f64 * log_ratio(p), Method::ClosedForm, 0.0)
        }
        Family::Uniform { body, .. } => (body.volume().ln(), Method::ClosedForm, 0.0),
        Family::Exponential { rate, .. } => (-rate.ln() + log_ratio(p), Method::ClosedForm, 0.0),
        Family::ExponentialPower { shape, .. } => (-f.sup().ln() + log_ratio(p) / shape, Method::ClosedForm, 0.0),
        Family::Product(fs) => {
            let parts = fs.iter().map(|g| renyi_entropy(g, p)).collect::<Result<Vec<_>>>()?;
            let h = parts.iter().map(|r| r.h_p).sum();
            let method = parts.iter().map(|r| r.method).reduce(Method::join).unwrap_or(Method::ClosedForm);
            (h, method, parts.iter().map(|r| r.error_estimate).sum())
        }
        Family::PiecewiseLinear(pl) => {
            if is_shannon(p) {
                (pl.shannon(), Method::ClosedForm, 0.0)
            } else {
                let (h, e) = from_power_integral(Estimate::new(pl.power_integral(p), 0.0), p);
                (h, Method::ClosedForm, e)
            }
        }
        Family::GeneralizedGaussian(g) => {
            if is_shannon(p) {
                (g.shannon(), Method::Quadrature, 1e-12 * g.shannon().abs().max(1.0))
            } else {
                let (h, e) = from_power_integral(g.radial_power_integral(p)?, p);
                (h, Method::Quadrature, e)
            }
        }
        Family::Grid(g) => {
            let phi = |v: f64| {
                if v <= 0.0 {
                    0.0
                } else if is_shannon(p) {
                    -v * v.ln()
                } else {
                    v.powf(p)
                }
            };
            let fine = g.integrate_nodes(phi);
            let coarse = g.integrate_nodes_coarse(phi);
            if is_shannon(p) {
                (fine, Method::Quadrature, (fine - coarse).abs())
            } else {
                let (h, e) = from_power_integral(Estimate::new(fine, (fine - coarse).abs()), p);
                (h, Method::Quadrature, e)
            }
        }
        Family::Covariogram { .. } => {
            if is_shannon(p) {
                let est = integrate_density(f, |v| if v > 0.0 { -v * v.ln() } else { 0.0 })?;
                (est.value, Method::Quadrature, est.error)
            } else {
                let (h, e) = from_power_integral(integrate_density(f, |v| if v > 0.0 { v.powf(p) } else { 0.0 })?, p);
                (h, Method::Quadrature, e)
            }
        }
    };
    let h = if is_shannon(p) { shannon_closed(f).unwrap_or(h) } else { h };
    Ok(EntropyResult::new(p, n, h, method, err))
}

/// Shannon entropies of the closed families, used on the `|p - 1| < 1e-6` branch.
fn shannon_closed(f: &DensitySpec) -> Option<f64> {
    let n = f.dim() as f64;
    match f.family() {
        Family::Gaussian(g) => Some(0.5 * n * (2.0 * PI * std::f64::consts::E).ln() + 0.5 * g.log_det()),
        Family::Exponential { rate, .. } => Some(1.0 - rate.ln()),
        Family::ExponentialPower { shape, .. } => Some(-f.sup().ln() + 1.0 / shape),
        _ => None,
    }
}

/// `∫ φ(f(x)) dx` by nested adaptive quadrature over lines parallel to the last axis.
pub(crate) fn integrate_density<P: Fn(f64) -> f64 + Sync>(f: &DensitySpec, phi: P) -> Result<Estimate> {
    let quad = Quadrature::default();
    match f.dim() {
        1 => {
            let Some(span) = f.line_support(&[0.0], &[1.0]) else {
                return Ok(Estimate::ZERO);
            };
            let kinks = f.line_kinks(&[0.0], &[1.0]);
            Ok(quad.integrate_span(|x| phi(f.value(&[x])), &span, &kinks))
        }
        2 => {
            let e1 = [1.0, 0.0];
            let outer = f.projection_span(&e1);
            let kinks = f.projection_kinks(&e1);
            let inner = section_quad();
            let est = quad.integrate_span(
                |t| {
                    let point = [t, 0.0];
                    let dir = [0.0, 1.0];
                    match f.line_support(&point, &dir) {
                        Some(span) => {
                            let lk = f.line_kinks(&point, &dir);
                            inner.integrate_span(|s| phi(f.value(&[t, s])), &span, &lk).value
                        }
                        None => 0.0,
                    }
                },
                &outer,
                &kinks,
            );
            Ok(Estimate::new(est.value, est.error.max(inner.rel_tol * est.value.abs())))
        }
        n => Err(Error::Unsupported(format!("quadrature entropies in dimension {n}"))),
    }
}

/// Entropy powers for a list of orders, evaluated in parallel.
pub fn renyi_entropies(f: &DensitySpec, ps: &[f64]) -> Result<Vec<EntropyResult>> {
    ps.par_iter().map(|p| renyi_entropy(f, *p)).collect()
}

pub fn entropy_power(f: &DensitySpec, p: f64) -> Result<f64> {
    Ok(renyi_entropy(f, p)?.n_p)
}

/// `h_p` estimated as `log E[f(X)^{p-1}] / (1 - p)` from seeded samples,
/// with the delta-method standard error as `error_estimate`.
pub fn renyi_monte_carlo(f: &DensitySpec, p: f64, count: usize, seed: u64) -> Result<EntropyResult> {
    check_order(p)?;
    if p == 0.0 || p.is_infinite() {
        return Err(invalid("p", "Monte Carlo estimates need a finite positive order"));
    }
    if count < 2 {
        return Err(invalid("count", "need at least two samples"));
    }
    let xs = f.sample(seed, count)?;
    let shannon = is_shannon(p);
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| {
            let v = f.value(x);
            if shannon {
                -v.ln()
            } else {
                v.powf(p - 1.0)
            }
        })
        .collect();
    let m = ys.iter().sum::<f64>() / count as f64;
    let var = ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (count - 1) as f64;
    let se = (var / count as f64).sqrt();
    let (h, err) = if shannon { (m, se) } else { (m.ln() / (1.0 - p), se / (m * (1.0 - p).abs())) };
    Ok(EntropyResult::new(p, f.dim(), h, Method::MonteCarlo, err))
}

/// `h_p(v·X)` for any nonzero `v`, from the marginal along `v/|v|` and the
/// scaling law `h_p(aY) = h_p(Y) + log|a|`.
pub fn directional_entropy(f: &DensitySpec, v: &[f64], p: f64) -> Result<EntropyResult> {
    check_order(p)?;
    f.check_dim(v.len())?;
    let len = norm(v);
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::ZeroVector);
    }
    let unit = Direction::normalize(v)?;
    let base = match f.exact_marginal(unit.as_slice()) {
        Some(m) => renyi_entropy(&m?, p)?,
        None => profile_entropy(&f.profile(&unit)?, p)?,
    };
    Ok(base.scaled(len))
}

/// `N_p(v·X) = |v|² N_p(v̂·X)`.
pub fn directional_entropy_power(f: &DensitySpec, v: &[f64], p: f64) -> Result<f64> {
    Ok(directional_entropy(f, v, p)?.n_p)
}

/// Entropy of a one-dimensional profile.
pub fn profile_entropy(m: &Profile<'_>, p: f64) -> Result<EntropyResult> {
    check_order(p)?;
    if let Some(pl) = &m.table {
        return renyi_entropy(&DensitySpec::piecewise_linear(pl.knots().to_vec(), pl.values().to_vec())?, p)
            .map(|r| EntropyResult { method: Method::Quadrature, ..r });
    }
    let quad = Quadrature::default();
    let r = if p == 0.0 {
        let w = if m.span.is_bounded() { m.span.width() } else { f64::INFINITY };
        EntropyResult::new(p, 1, w.ln(), Method::Quadrature, 0.0)
    } else if p.is_infinite() {
        let (peak, err) = profile_peak(m);
        EntropyResult::new(p, 1, -peak.ln(), Method::Quadrature, err / peak)
    } else if is_shannon(p) {
        let est = m.integrate(&quad, |_, v| if v > 0.0 { -v * v.ln() } else { 0.0 });
        EntropyResult::new(p, 1, est.value, Method::Quadrature, est.error)
    } else {
        let (h, e) = from_power_integral(m.power_integral(&quad, p), p);
        EntropyResult::new(p, 1, h, Method::Quadrature, e)
    };
    Ok(r)
}

/// Maximum of a profile by a scan over the core span refined with golden sections.
fn profile_peak(m: &Profile<'_>) -> (f64, f64) {
    let Span { lo, hi, .. } = m.span;
    let nodes = 1024;
    let mut xs: Vec<f64> = (0..=nodes).map(|k| lo + (hi - lo) * k as f64 / nodes as f64).collect();
    xs.extend(m.kinks.iter().copied());
    xs.sort_by(f64::total_cmp);
    let (i, best) = xs.iter().enumerate().map(|(i, x)| (i, m.eval(*x))).fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
        if v > acc.1 {
            (i, v)
        } else {
            acc
        }
    });
    let a = xs[i.saturating_sub(1)];
    let b = xs[(i + 1).min(xs.len() - 1)];
    let (_, refined) = golden_section_max(|x| m.eval(x), a, b, 1e-12 * (hi - lo).max(1.0));
    let peak = refined.max(best);
    (peak, 1e-10 * peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::SupportBody;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_unit_interval_has_zero_entropy() {
        let u = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        for p in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert_eq!(renyi_entropy(&u, p).unwrap().h_p, 0.0);
            assert_eq!(entropy_power(&u, p).unwrap(), 1.0);
        }
    }

    #[test]
    fn gaussian_values() {
        let g = DensitySpec::standard_gaussian(1);
        assert_relative_eq!(renyi_entropy(&g, 2.0).unwrap().h_p, 1.2655121234846454, epsilon = 1e-14);
        assert_relative_eq!(renyi_entropy(&g, 1.0).unwrap().h_p, 1.4189385332046727, epsilon = 1e-14);
        assert_relative_eq!(entropy_power(&g, 2.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        let near = renyi_entropy(&g, 1.0 + 1e-7).unwrap().h_p;
        assert_relative_eq!(near, 1.4189385332046727, epsilon = 1e-14);
    }

    #[test]
    fn triangle_peak_and_support() {
        let t = DensitySpec::triangle(0.0, 1.0).unwrap();
        assert_eq!(renyi_entropy(&t, f64::INFINITY).unwrap().h_p, 0.0);
        assert_relative_eq!(entropy_power(&DensitySpec::uniform_interval(-1.0, 1.0).unwrap(), 0.0).unwrap(), 4.0);
    }

    #[test]
    fn rejects_negative_order() {
        assert!(renyi_entropy(&DensitySpec::standard_gaussian(1), -0.5).is_err());
    }

    #[test]
    fn exponential_closed_form_matches_quadrature() {
        let e = DensitySpec::exponential(1.5).unwrap();
        let table = DensitySpec::piecewise_linear(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        for p in [0.5, 2.0, 3.0] {
            let closed = renyi_entropy(&e, p).unwrap().h_p;
            let est = integrate_density(&e, |v| v.powf(p)).unwrap();
            assert_relative_eq!(closed, est.value.ln() / (1.0 - p), epsilon = 1e-9);
            assert_eq!(renyi_entropy(&table, p).unwrap().h_p, 0.0);
        }
    }

    #[test]
    fn disk_covariogram_quadrature() {
        // The covariogram density has sup 1/π and the same entropy as a generic
        // quadrature of its values.
        let c = DensitySpec::covariogram(SupportBody::ball(2, 1.0).unwrap()).unwrap();
        let mass = integrate_density(&c, |v| v).unwrap();
        assert_relative_eq!(mass.value, 1.0, epsilon = 1e-8);
        let h2 = renyi_entropy(&c, 2.0).unwrap();
        let h3 = renyi_entropy(&c, 3.0).unwrap();
        assert!(h2.h_p >= h3.h_p);
        assert_relative_eq!(renyi_entropy(&c, f64::INFINITY).unwrap().h_p, PI.ln(), epsilon = 1e-14);
    }

    #[test]
    fn directional_scaling() {
        let g = DensitySpec::standard_gaussian(2);
        let n = directional_entropy_power(&g, &[3.0, 4.0], 1.0).unwrap();
        assert_relative_eq!(n, 25.0 * 2.0 * PI * std::f64::consts::E, max_relative = 1e-13);
        let sq = DensitySpec::uniform(SupportBody::cube(2, 0.5).unwrap()).unwrap();
        assert_relative_eq!(directional_entropy_power(&sq, &[1.0, 0.0], 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(directional_entropy(&sq, &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn diagonal_of_square_is_triangle() {
        let sq = DensitySpec::uniform(SupportBody::cube(2, 0.5).unwrap()).unwrap();
        let v = [1.0, 1.0];
        // v·X is the sum of two uniforms: the unit triangle on [-1, 1].
        for p in [0.5, 2.0, f64::INFINITY] {
            let tri = renyi_entropy(&DensitySpec::triangle(0.0, 1.0).unwrap(), p).unwrap().h_p;
            assert_relative_eq!(directional_entropy(&sq, &v, p).unwrap().h_p, tri, epsilon = 1e-8);
        }
        assert_relative_eq!(directional_entropy(&sq, &v, 1.0).unwrap().h_p, 0.5, epsilon = 1e-8);
    }
}
