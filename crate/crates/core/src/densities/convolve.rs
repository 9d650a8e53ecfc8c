//! Self-convolutions `f̂`, independent sums and discretisation onto grids.

use rayon::prelude::*;

use super::project::table_knots;
use super::{
    DensitySpec, Family, GridDensity, PiecewiseLinear, DEFAULT_RESOLUTION_1D, DEFAULT_RESOLUTION_2D, TABLE_KNOTS,
    TAIL_BOUND,
};
use crate::bodies::SupportBody;
use crate::error::{Error, Result};
use crate::quad::{Quadrature, Span};

fn conv_quad() -> Quadrature {
    Quadrature { abs_tol: 1e-15, rel_tol: 1e-10, max_intervals: 200 }
}

impl DensitySpec {
    /// Density `f̂(x) = ∫ f(y) f(x + y) dy` of `X' - X` for i.i.d. copies.
    ///
    /// The result is symmetric by construction and keeps the log-concave flag.
    pub fn self_convolve(&self) -> Result<DensitySpec> {
        let out = match &self.family {
            Family::Gaussian(g) => {
                let cov = g.covariance().iter().map(|r| r.iter().map(|c| 2.0 * c).collect()).collect();
                DensitySpec::gaussian(vec![0.0; self.dim], cov)?
            }
            Family::Uniform { body, .. } => match body {
                SupportBody::Box { half_widths } if half_widths.len() == 1 => {
                    DensitySpec::triangle(0.0, 2.0 * half_widths[0])?
                }
                SupportBody::Box { half_widths } => DensitySpec::product(
                    half_widths.iter().map(|h| DensitySpec::triangle(0.0, 2.0 * h)).collect::<Result<_>>()?,
                )?,
                _ => DensitySpec::covariogram(body.clone())?,
            },
            Family::Exponential { rate, .. } => DensitySpec::laplace(1.0 / rate)?,
            Family::Product(fs) => DensitySpec::product(fs.iter().map(|f| f.self_convolve()).collect::<Result<_>>()?)?,
            Family::Grid(g) => DensitySpec::grid(g.autocorrelation()?)?,
            _ if self.dim == 1 => self.autocorrelate_1d()?,
            _ if self.dim == 2 => {
                let grid = self.discretize(self.radius, DEFAULT_RESOLUTION_2D)?;
                DensitySpec::grid(grid.autocorrelation()?)?
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "self-convolution of {} densities in dimension {}",
                    self.family_name(),
                    self.dim
                )))
            }
        };
        let concavity = if self.concavity.is_log_concave() { super::Concavity::LogConcave } else { out.concavity };
        Ok(out.with_concavity(concavity))
    }

    /// Tabulates `f̂` on `x >= 0` and mirrors it.
    fn autocorrelate_1d(&self) -> Result<DensitySpec> {
        let span = self.line_support(&[0.0], &[1.0]).ok_or_else(|| Error::Precondition("empty support".into()))?;
        let kinks: Vec<f64> = self.line_kinks(&[0.0], &[1.0]);
        let mut ends = kinks.clone();
        ends.extend([span.lo, span.hi]);
        let reach = span.width();
        let mut diffs: Vec<f64> = ends
            .iter()
            .flat_map(|a| ends.iter().map(move |b| (a - b).abs()))
            .filter(|d| *d > 0.0 && *d < reach)
            .collect();
        diffs.sort_by(f64::total_cmp);
        diffs.dedup();
        let half = Span { lo: 0.0, hi: reach, open_lo: false, open_hi: !span.is_bounded() };
        let knots = table_knots(&half, &diffs, TABLE_KNOTS / 2 + 1);
        let quad = conv_quad();
        let values: Vec<f64> = knots
            .par_iter()
            .map(|x| {
                let mut breaks = kinks.clone();
                breaks.extend(kinks.iter().map(|k| k - x));
                let inner = Span { hi: span.hi - x, open_lo: span.open_lo, open_hi: span.open_hi, lo: span.lo };
                if inner.hi <= inner.lo {
                    return 0.0;
                }
                quad.integrate_span(|y| self.value(&[y]) * self.value(&[x + y]), &inner, &breaks).value.max(0.0)
            })
            .collect();
        let mut full_knots: Vec<f64> = knots.iter().skip(1).rev().map(|x| -x).collect();
        let mut full_values: Vec<f64> = values.iter().skip(1).rev().copied().collect();
        full_knots.extend(&knots);
        full_values.extend(&values);
        let (pl, _) = PiecewiseLinear::normalized(full_knots, full_values)?;
        Ok(DensitySpec::from_piecewise(pl))
    }

    /// Density of `X + Y` for independent `X ~ self`, `Y ~ other`.
    pub fn convolve(&self, other: &DensitySpec) -> Result<DensitySpec> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        match (&self.family, &other.family) {
            (Family::Gaussian(a), Family::Gaussian(b)) => {
                let s = a.sum(b)?;
                return DensitySpec::gaussian(s.mean().to_vec(), s.covariance().to_vec());
            }
            (Family::Grid(a), Family::Grid(b)) => return DensitySpec::grid(a.convolve(b)?),
            _ => {}
        }
        let concavity = if self.concavity.is_log_concave() && other.concavity.is_log_concave() {
            super::Concavity::LogConcave
        } else {
            super::Concavity::Unknown
        };
        match self.dim {
            1 => Ok(self.convolve_1d(other)?.with_concavity(concavity)),
            2 => {
                let r = self.radius.max(other.radius);
                let a = match &self.family {
                    Family::Grid(g) => g.clone(),
                    _ => self.discretize(r, DEFAULT_RESOLUTION_2D)?,
                };
                let b = match &other.family {
                    Family::Grid(g) => g.clone(),
                    _ => other.discretize(r, DEFAULT_RESOLUTION_2D)?,
                };
                Ok(DensitySpec::grid(a.convolve(&b)?)?.with_concavity(concavity))
            }
            n => Err(Error::Unsupported(format!("numeric convolution in dimension {n}"))),
        }
    }

    fn convolve_1d(&self, other: &DensitySpec) -> Result<DensitySpec> {
        let sa = self.line_support(&[0.0], &[1.0]).ok_or_else(|| Error::Precondition("empty support".into()))?;
        let sb = other.line_support(&[0.0], &[1.0]).ok_or_else(|| Error::Precondition("empty support".into()))?;
        let ka = self.line_kinks(&[0.0], &[1.0]);
        let kb = other.line_kinks(&[0.0], &[1.0]);
        let mut ea = ka.clone();
        ea.extend([sa.lo, sa.hi]);
        let mut eb = kb.clone();
        eb.extend([sb.lo, sb.hi]);
        let sums: Vec<f64> = ea.iter().flat_map(|a| eb.iter().map(move |b| a + b)).collect();
        let span = Span {
            lo: sa.lo + sb.lo,
            hi: sa.hi + sb.hi,
            open_lo: sa.open_lo || sb.open_lo,
            open_hi: sa.open_hi || sb.open_hi,
        };
        let knots = table_knots(&span, &sums, TABLE_KNOTS);
        let quad = conv_quad();
        let values: Vec<f64> = knots
            .par_iter()
            .map(|z| {
                // x ranges over supp(X) ∩ (z - supp(Y)); each end keeps the flag of its binding side.
                let (blo, bhi) = (z - sb.hi, z - sb.lo);
                let (lo, open_lo) = if blo > sa.lo { (blo, sb.open_hi) } else { (sa.lo, sa.open_lo) };
                let (hi, open_hi) = if bhi < sa.hi { (bhi, sb.open_lo) } else { (sa.hi, sa.open_hi) };
                if hi <= lo {
                    return 0.0;
                }
                let inner = Span { lo, hi, open_lo, open_hi };
                let mut breaks = ka.clone();
                breaks.extend(kb.iter().map(|k| z - k));
                quad.integrate_span(|x| self.value(&[x]) * other.value(&[z - x]), &inner, &breaks).value.max(0.0)
            })
            .collect();
        let (pl, _) = PiecewiseLinear::normalized(knots, values)?;
        Ok(DensitySpec::from_piecewise(pl))
    }

    /// Samples `f` on `resolution` nodes per axis spanning `[-radius, radius]^n`.
    ///
    /// Boundary nodes are zeroed and the grid is renormalised; the factor is
    /// recorded in [`GridDensity::renormalization`].
    pub fn discretize(&self, radius: f64, resolution: usize) -> Result<GridDensity> {
        if resolution < 16 {
            return Err(Error::Resolution(resolution));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(crate::error::invalid("radius", "must be positive and finite"));
        }
        if self.dim > 2 {
            return Err(Error::Unsupported(format!("grids in dimension {}", self.dim)));
        }
        let tail = self.tail_mass_outside_box(radius);
        if tail >= TAIL_BOUND {
            return Err(Error::TailMass { radius, tail });
        }
        let h = 2.0 * radius / (resolution - 1) as f64;
        let coord = |i: usize| -radius + i as f64 * h;
        let values: Vec<f64> = match self.dim {
            1 => (0..resolution).map(|i| self.value(&[coord(i)])).collect(),
            _ => (0..resolution)
                .into_par_iter()
                .flat_map_iter(|i| (0..resolution).map(move |j| self.value(&[coord(i), coord(j)])))
                .collect(),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("density is unbounded on a grid node".into()));
        }
        GridDensity::normalized(vec![-radius; self.dim], vec![h; self.dim], vec![resolution; self.dim], values)
    }

    /// Discretisation at the truncation radius and the default resolution.
    pub fn discretize_default(&self) -> Result<GridDensity> {
        let res = if self.dim == 1 { DEFAULT_RESOLUTION_1D } else { DEFAULT_RESOLUTION_2D };
        self.discretize(self.radius, res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::Concavity;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_self_convolution_is_triangle() {
        let u = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        let t = u.self_convolve().unwrap();
        for x in [-0.7f64, 0.0, 0.25, 1.2] {
            let expected = (1.0f64 - x.abs()).max(0.0);
            assert_relative_eq!(t.evaluate(&[x]).unwrap(), expected, epsilon = 1e-14);
        }
        assert_eq!(t.concavity(), Concavity::LogConcave);
    }

    #[test]
    fn gaussian_self_convolution_doubles_variance() {
        let g = DensitySpec::standard_gaussian(1).self_convolve().unwrap();
        let expected = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(g.evaluate(&[0.0]).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn numeric_autocorrelation_of_laplace() {
        // Laplace has no closed-form branch here; X' - X has density (1 + |x|) e^{-|x|} / 4.
        let l = DensitySpec::laplace(1.0).unwrap();
        let h = l.self_convolve().unwrap();
        for x in [0.0, 0.5, 2.0, -3.0] {
            let expected = (1.0 + f64::abs(x)) * (-f64::abs(x)).exp() / 4.0;
            assert_relative_eq!(h.evaluate(&[x]).unwrap(), expected, max_relative = 1e-4);
        }
        assert!(h.is_symmetric());
    }

    #[test]
    fn uniform_plus_uniform() {
        let a = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        let b = DensitySpec::uniform_interval(0.0, 2.0).unwrap();
        let s = a.convolve(&b).unwrap();
        assert_relative_eq!(s.evaluate(&[1.5]).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(s.evaluate(&[0.5]).unwrap(), 0.25, epsilon = 1e-12);
        assert_eq!(s.support_range(&[1.0]), (0.0, 3.0));
    }

    #[test]
    fn uniform_plus_gaussian() {
        let u = DensitySpec::uniform_interval(-0.5, 0.5).unwrap();
        let g = DensitySpec::standard_gaussian(1);
        let s = u.convolve(&g).unwrap();
        let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-x / 2f64.sqrt());
        for z in [0.0, 0.8, -2.5] {
            assert_relative_eq!(s.evaluate(&[z]).unwrap(), phi(z + 0.5) - phi(z - 0.5), max_relative = 1e-5);
        }
    }

    #[test]
    fn discretize_checks() {
        let u = DensitySpec::uniform_interval(-0.5, 0.5).unwrap();
        let g = u.discretize(1.0, 1024).unwrap();
        assert_relative_eq!(g.mass(), 1.0, epsilon = 1e-9);
        let n = DensitySpec::standard_gaussian(1);
        assert!(n.discretize(8.0, 1024).is_ok());
        assert!(n.tail_mass_outside_box(8.0) < 1e-10);
        assert!(matches!(n.discretize(1.0, 1024), Err(Error::TailMass { .. })));
        assert!(matches!(n.discretize(8.0, 8), Err(Error::Resolution(8))));
    }
}
