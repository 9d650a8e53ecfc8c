//! Radial generalized Gaussians `A (1 - β|x|²/2)_+^{1/β - n/2 - 1}`.
//!
//! `β > 0` gives compact support on the ball of radius `√(2/β)`, `β < 0` a
//! heavy-tailed Student-type law and `β = 0` the Gaussian limit
//! `exp(-|x|²/2)`. The constant `A` is found by radial quadrature.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::distribution::{Beta as BetaDist, ContinuousCDF};
use statrs::function::gamma::{digamma, gamma_ur, ln_gamma};

use crate::error::{invalid, Error, Result};
use crate::quad::{Estimate, Quadrature};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedGaussian {
    beta: f64,
    dim: usize,
    scale: f64,
    #[serde(skip)]
    exponent: f64,
    #[serde(skip)]
    log_norm: f64,
}

impl GeneralizedGaussian {
    pub fn new(beta: f64, dim: usize, scale: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!("generalized Gaussians in dimension {dim}")));
        }
        if !beta.is_finite() || beta > 2.0 / (dim as f64 + 1.0) + 1e-15 {
            return Err(invalid("beta", format!("must satisfy beta <= 2/(n+1) = {}", 2.0 / (dim as f64 + 1.0))));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive and finite"));
        }
        let exponent = if beta == 0.0 { 0.0 } else { 1.0 / beta - dim as f64 / 2.0 - 1.0 };
        let mut gg = Self { beta, dim, scale, exponent, log_norm: 0.0 };
        let mass = gg.radial_power_integral(1.0)?;
        gg.log_norm = -mass.value.ln();
        Ok(gg)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Kernel exponent `1/β - n/2 - 1`.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Normalising constant `A` for unit scale.
    pub fn norm_constant(&self) -> f64 {
        self.log_norm.exp()
    }

    /// Support radius for `β > 0`.
    pub fn radius(&self) -> Option<f64> {
        (self.beta > 0.0).then(|| self.scale * (2.0 / self.beta).sqrt())
    }

    fn log_kernel(&self, u: f64) -> f64 {
        if self.beta == 0.0 {
            return -0.5 * u * u;
        }
        let base = 1.0 - 0.5 * self.beta * u * u;
        if base <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if self.exponent == 0.0 {
            return 0.0;
        }
        self.exponent * base.ln()
    }

    fn log_peak(&self) -> f64 {
        self.log_norm - self.dim as f64 * self.scale.ln()
    }

    pub fn pdf_radius(&self, r: f64) -> f64 {
        (self.log_peak() + self.log_kernel(r / self.scale)).exp()
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.pdf_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    pub fn sup(&self) -> f64 {
        if self.beta > 0.0 && self.exponent < 0.0 {
            f64::INFINITY
        } else {
            self.log_peak().exp()
        }
    }

    fn sphere_area(&self) -> f64 {
        let n = self.dim as f64;
        2.0 * PI.powf(n / 2.0) / ln_gamma(n / 2.0).exp()
    }

    /// `∫ f^q` with the current normalisation; `+∞` when the integral diverges.
    pub fn radial_power_integral(&self, q: f64) -> Result<Estimate> {
        let n = self.dim as f64;
        let quad = Quadrature::default();
        let qe = q * self.exponent;
        let lp = q * self.log_norm;
        let unit = if self.beta > 0.0 {
            if qe <= -1.0 {
                return Ok(Estimate::new(f64::INFINITY, 0.0));
            }
            let rmax = (2.0 / self.beta).sqrt();
            let half = 0.5 * self.beta;
            // 1 - βu²/2 = (β/2)(rmax - u)(rmax + u)
            quad.integrate_right_power(
                |u| (lp + (n - 1.0) * u.ln() + qe * (half * (rmax + u)).ln()).exp(),
                0.0,
                rmax,
                qe,
                &[],
            )
        } else if self.beta < 0.0 {
            let gamma = -(n + 1.0 + 2.0 * qe);
            if gamma <= -1.0 {
                return Ok(Estimate::new(f64::INFINITY, 0.0));
            }
            let b = -0.5 * self.beta;
            quad.integrate_right_power(
                |w| {
                    let u = w / (1.0 - w);
                    let log = lp + (n - 1.0) * u.ln() + qe * (1.0 + b * u * u).ln() - (2.0 + gamma) * (1.0 - w).ln();
                    log.exp()
                },
                0.0,
                1.0,
                gamma,
                &[],
            )
        } else {
            quad.integrate(|u| (lp + (n - 1.0) * u.ln() - 0.5 * q * u * u).exp(), 0.0, 40.0 / q.sqrt())
        };
        // Undo the unit-scale normalisation: ∫ f_σ^q = σ^{n(1-q)} ∫ f_1^q.
        Ok(unit * (self.sphere_area() * self.scale.powf(n * (1.0 - q))))
    }

    /// Shannon entropy from the Beta / Beta-prime law of `β|Y|²/2`.
    pub fn shannon(&self) -> f64 {
        let n = self.dim as f64;
        let base = -self.log_peak();
        if self.beta == 0.0 {
            return base + n / 2.0;
        }
        let e = self.exponent;
        let mean_log = if self.beta > 0.0 {
            digamma(e + 1.0) - digamma(e + 1.0 + n / 2.0)
        } else {
            let b = -e - n / 2.0;
            digamma(n / 2.0 + b) - digamma(b)
        };
        base - e * mean_log
    }

    /// `P(|X| > r)`.
    pub fn radial_tail(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        let u = r / self.scale;
        if self.beta == 0.0 {
            return gamma_ur(n / 2.0, 0.5 * u * u);
        }
        let v = 0.5 * self.beta.abs() * u * u;
        if self.beta > 0.0 {
            if v >= 1.0 {
                return 0.0;
            }
            let law = BetaDist::new(n / 2.0, self.exponent + 1.0).expect("valid beta law");
            law.sf(v)
        } else {
            let law = BetaDist::new(n / 2.0, -self.exponent - n / 2.0).expect("valid beta law");
            law.sf(v / (1.0 + v))
        }
    }

    /// Law of `β|Y|²/2` used for sampling: `(a, b, prime)`.
    pub(crate) fn radial_law(&self) -> Option<(f64, f64, bool)> {
        let n = self.dim as f64;
        if self.beta > 0.0 {
            Some((n / 2.0, self.exponent + 1.0, false))
        } else if self.beta < 0.0 {
            Some((n / 2.0, -self.exponent - n / 2.0, true))
        } else {
            None
        }
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::new(self.beta, self.dim, self.scale * a.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::beta::beta;

    /// Closed-form normaliser through the Beta function, as an oracle.
    fn oracle_norm(b: f64, n: f64, e: f64) -> f64 {
        let surface = 2.0 * PI.powf(n / 2.0) / ln_gamma(n / 2.0).exp();
        if b > 0.0 {
            1.0 / (surface * 0.5 * (2.0 / b).powf(n / 2.0) * beta(n / 2.0, e + 1.0))
        } else {
            1.0 / (surface * 0.5 * (2.0 / -b).powf(n / 2.0) * beta(n / 2.0, -e - n / 2.0))
        }
    }

    #[test]
    fn numeric_normaliser_matches_beta_oracle() {
        for (b, n) in [(0.5, 1usize), (2.0 / 3.0, 2), (0.2, 2), (-1.0, 1), (-0.5, 2), (1.0, 1)] {
            let gg = GeneralizedGaussian::new(b, n, 1.0).unwrap();
            let oracle = oracle_norm(b, n as f64, gg.exponent());
            assert_relative_eq!(gg.norm_constant(), oracle, max_relative = 1e-9);
        }
        let g = GeneralizedGaussian::new(0.0, 1, 1.0).unwrap();
        assert_relative_eq!(g.norm_constant(), 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn shannon_matches_quadrature() {
        let gg = GeneralizedGaussian::new(0.4, 1, 1.3).unwrap();
        let rmax = gg.radius().unwrap();
        let q = Quadrature::default();
        let h = q.integrate(
            |x| {
                let f = gg.pdf(&[x]);
                if f > 0.0 {
                    -f * f.ln()
                } else {
                    0.0
                }
            },
            -rmax,
            rmax,
        );
        assert_relative_eq!(gg.shannon(), h.value, max_relative = 1e-8);
    }

    #[test]
    fn beta_bound_enforced() {
        assert!(GeneralizedGaussian::new(0.7, 2, 1.0).is_err());
        assert!(GeneralizedGaussian::new(1.0, 1, 1.0).is_ok());
    }

    #[test]
    fn tail_is_monotone() {
        let gg = GeneralizedGaussian::new(-1.0, 1, 1.0).unwrap();
        assert!(gg.radial_tail(1.0) > gg.radial_tail(10.0));
        assert_relative_eq!(gg.radial_tail(0.0), 1.0, epsilon = 1e-12);
    }
}
