//! Piecewise-linear densities on the line.
//!
//! Marginals and numeric convolutions are tabulated on knots and then treated
//! as exact piecewise-linear functions: every integral below is the exact
//! integral of the interpolant, so results are consistent with mass
//! normalisation and with each other.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

/// Relative spread below which segment integrals switch to a midpoint expansion.
const FLAT: f64 = 1e-4;

impl PiecewiseLinear {
    /// Builds the interpolant through `(knots[i], values[i])`, zero outside the knots.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(invalid("knots", "need at least two knots and one value per knot"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
            return Err(invalid("knots", "must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("values", "must be finite and non-negative"));
        }
        Ok(Self { knots, values })
    }

    /// Same as [`Self::new`] followed by renormalisation to unit mass.
    pub fn normalized(knots: Vec<f64>, values: Vec<f64>) -> Result<(Self, f64)> {
        let mut pl = Self::new(knots, values)?;
        let mass = pl.mass();
        if !(mass > 0.0) {
            return Err(invalid("values", "total mass is zero"));
        }
        let factor = 1.0 / mass;
        pl.values.iter_mut().for_each(|v| *v *= factor);
        Ok((pl, factor))
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lo(&self) -> f64 {
        self.knots[0]
    }

    pub fn hi(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots.windows(2).zip(self.values.windows(2)).map(|(k, v)| (k[0], k[1], v[0], v[1]))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if !(x >= self.lo() && x <= self.hi()) {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| *k <= x).clamp(1, self.knots.len() - 1);
        let (x0, x1) = (self.knots[i - 1], self.knots[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        let w = (x - x0) / (x1 - x0);
        (y0 + w * (y1 - y0)).max(0.0)
    }

    pub fn mass(&self) -> f64 {
        self.segments().map(|(x0, x1, a, b)| 0.5 * (x1 - x0) * (a + b)).sum()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Length of the set where the interpolant is positive.
    pub fn support_length(&self) -> f64 {
        self.segments().filter(|(_, _, a, b)| *a > 0.0 || *b > 0.0).map(|(x0, x1, _, _)| x1 - x0).sum()
    }

    /// Smallest and largest points of the support.
    pub fn support_bounds(&self) -> (f64, f64) {
        let mut lo = self.hi();
        let mut hi = self.lo();
        for (x0, x1, a, b) in self.segments() {
            if a > 0.0 || b > 0.0 {
                lo = lo.min(x0);
                hi = hi.max(x1);
            }
        }
        (lo, hi)
    }

    /// Exact `∫ g^q` for `q > 0`.
    pub fn power_integral(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0);
        self.segments().map(|(x0, x1, a, b)| (x1 - x0) * mean_power(a, b, q)).sum()
    }

    /// Exact `-∫ g log g`.
    pub fn shannon(&self) -> f64 {
        -self.segments().map(|(x0, x1, a, b)| (x1 - x0) * mean_xlogx(a, b)).sum::<f64>()
    }

    /// Exact `∫ |t - c|^p g(t) dt` for `p > -1`.
    pub fn abs_moment(&self, c: f64, p: f64) -> f64 {
        debug_assert!(p > -1.0);
        let mut total = 0.0;
        for (x0, x1, a, b) in self.segments() {
            if a == 0.0 && b == 0.0 {
                continue;
            }
            if x0 < c && c < x1 {
                let mid = a + (b - a) * (c - x0) / (x1 - x0);
                total += side_moment(0.0, c - x0, mid, a, p);
                total += side_moment(0.0, x1 - c, mid, b, p);
            } else if x0 >= c {
                total += side_moment(x0 - c, x1 - c, a, b, p);
            } else {
                total += side_moment(c - x1, c - x0, b, a, p);
            }
        }
        total
    }

    /// Cumulative distribution at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (x0, x1, a, b) in self.segments() {
            if x >= x1 {
                acc += 0.5 * (x1 - x0) * (a + b);
            } else if x > x0 {
                let w = x - x0;
                let slope = (b - a) / (x1 - x0);
                acc += a * w + 0.5 * slope * w * w;
                break;
            } else {
                break;
            }
        }
        acc
    }

    /// Inverse CDF for `u` in `[0, mass]`, solving the per-segment quadratic exactly.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (x0, x1, a, b) in self.segments() {
            let seg = 0.5 * (x1 - x0) * (a + b);
            if acc + seg >= u && seg > 0.0 {
                let target = u - acc;
                let h = x1 - x0;
                let slope = (b - a) / h;
                let w = if slope.abs() * h <= 1e-12 * (a + b) {
                    target / a.max(f64::MIN_POSITIVE)
                } else {
                    // a w + slope w²/2 = target, stable root.
                    let disc = (a * a + 2.0 * slope * target).max(0.0);
                    2.0 * target / (a + disc.sqrt())
                };
                return x0 + w.clamp(0.0, h);
            }
            acc += seg;
        }
        self.hi()
    }

    pub fn map_affine(&self, scale: f64, shift: f64) -> Self {
        debug_assert!(scale != 0.0);
        let mut knots: Vec<f64> = self.knots.iter().map(|k| scale * k + shift).collect();
        let mut values: Vec<f64> = self.values.iter().map(|v| v / scale.abs()).collect();
        if scale < 0.0 {
            knots.reverse();
            values.reverse();
        }
        Self { knots, values }
    }

    /// True when the logarithm of the knot values is concave on a single support interval.
    pub fn is_log_concave(&self) -> bool {
        let (lo, hi) = self.support_bounds();
        let inner: Vec<(f64, f64)> =
            self.knots.iter().zip(&self.values).filter(|(k, _)| **k > lo && **k < hi).map(|(k, v)| (*k, *v)).collect();
        if inner.iter().any(|(_, v)| *v <= 0.0) {
            return false;
        }
        inner.windows(3).all(|w| {
            let (x0, y0) = (w[0].0, w[0].1.ln());
            let (x1, y1) = (w[1].0, w[1].1.ln());
            let (x2, y2) = (w[2].0, w[2].1.ln());
            let s0 = (y1 - y0) / (x1 - x0);
            let s1 = (y2 - y1) / (x2 - x1);
            s1 <= s0 + 1e-9 * (1.0 + s0.abs())
        })
    }
}

/// Mean of `y^q` for `y` linear from `a` to `b`.
fn mean_power(a: f64, b: f64, q: f64) -> f64 {
    let m = 0.5 * (a + b);
    if m <= 0.0 {
        return 0.0;
    }
    let d = 0.5 * (b - a);
    if d.abs() <= FLAT * m {
        let r = d / m;
        return m.powf(q) * (1.0 + q * (q - 1.0) / 6.0 * r * r);
    }
    (b.powf(q + 1.0) - a.powf(q + 1.0)) / ((q + 1.0) * (b - a))
}

/// Mean of `y log y` for `y` linear from `a` to `b`.
fn mean_xlogx(a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    if m <= 0.0 {
        return 0.0;
    }
    let d = 0.5 * (b - a);
    if d.abs() <= FLAT * m {
        return m * m.ln() + d * d / (6.0 * m);
    }
    let g = |y: f64| if y > 0.0 { 0.5 * y * y * y.ln() - 0.25 * y * y } else { 0.0 };
    (g(b) - g(a)) / (b - a)
}

/// `∫_{u0}^{u1} u^p (linear from ya at u0 to yb at u1) du` with `0 <= u0 < u1`.
fn side_moment(u0: f64, u1: f64, ya: f64, yb: f64, p: f64) -> f64 {
    if u1 <= u0 {
        return 0.0;
    }
    let slope = (yb - ya) / (u1 - u0);
    let alpha = ya - slope * u0;
    let pow = |e: f64| (u1.powf(e) - u0.powf(e)) / e;
    alpha * pow(p + 1.0) + slope * pow(p + 2.0)
}
