//! One-dimensional numerical integration.
//!
//! Globally adaptive Gauss–Kronrod (7/15) with user breakpoints, plus a
//! change of variables for integrable power singularities `(x - a)^e`,
//! `e > -1`, at an interval endpoint. Every integral in the crate that is not
//! available in closed form goes through here or through the grid rules in
//! [`crate::densities::grid`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Value of an integral together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0 };

    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.error + rhs.error)
    }
}

impl std::ops::Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, rhs: f64) -> Estimate {
        Estimate::new(self.value * rhs, self.error * rhs.abs())
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::ZERO, |a, b| a + b)
    }
}

/// Tolerances for the adaptive rule.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 400 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single Gauss–Kronrod 15-point evaluation on `[a, b]`, QUADPACK error heuristic.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    Estimate::new(value, err)
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Estimate {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates `f` over `[a, b]`, splitting first at every break inside the
    /// interval. Breaks outside `(a, b)` are ignored.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, breaks: &[f64]) -> Estimate {
        if !(b > a) {
            if a == b {
                return Estimate::ZERO;
            }
            let r = self.integrate_with_breaks(f, b, a, breaks);
            return Estimate::new(-r.value, r.error);
        }
        let mut points: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite() && *x > a && *x < b).collect();
        points.sort_by(f64::total_cmp);
        points.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
        let mut edges = Vec::with_capacity(points.len() + 2);
        edges.push(a);
        edges.extend(points);
        edges.push(b);

        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        for w in edges.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let e = gk15(&f, w[0], w[1]);
            total += e.value;
            total_err += e.error;
            heap.push(Segment { a: w[0], b: w[1], value: e.value, error: e.error });
        }
        let max_intervals = self.max_intervals.max(heap.len() + 1);
        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) && heap.len() < max_intervals {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval exhausted at floating-point resolution.
                heap.push(Segment { error: 0.0, ..worst });
                total_err -= worst.error;
                continue;
            }
            let left = gk15(&f, worst.a, mid);
            let right = gk15(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(Segment { a: worst.a, b: mid, value: left.value, error: left.error });
            heap.push(Segment { a: mid, b: worst.b, value: right.value, error: right.error });
        }
        // Re-sum to shed accumulated cancellation in the running totals.
        let segments = heap.into_vec();
        let value = segments.iter().map(|s| s.value).sum();
        let error = segments.iter().map(|s| s.error).sum::<f64>().max(0.0);
        Estimate::new(value, error)
    }

    /// `∫_a^b (x - a)^exponent f(x) dx` for `exponent > -1` and smooth `f`.
    ///
    /// For negative exponents the substitution `w = (x - a)^(exponent + 1)`
    /// removes the singularity exactly; breaks are mapped accordingly.
    pub fn integrate_left_power<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        exponent: f64,
        breaks: &[f64],
    ) -> Estimate {
        debug_assert!(exponent > -1.0);
        if b <= a {
            return Estimate::ZERO;
        }
        if exponent >= 0.0 {
            return self.integrate_with_breaks(|x| (x - a).powf(exponent) * f(x), a, b, breaks);
        }
        let s = exponent + 1.0;
        let inv = 1.0 / s;
        let upper = (b - a).powf(s);
        let mapped: Vec<f64> = breaks.iter().filter(|x| **x > a && **x < b).map(|x| (x - a).powf(s)).collect();
        self.integrate_with_breaks(|w| f(a + w.powf(inv)), 0.0, upper, &mapped) * inv
    }

    /// `∫_a^b (b - x)^exponent f(x) dx`, mirror image of [`Self::integrate_left_power`].
    pub fn integrate_right_power<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        exponent: f64,
        breaks: &[f64],
    ) -> Estimate {
        let mirrored: Vec<f64> = breaks.iter().map(|x| a + b - x).collect();
        self.integrate_left_power(|y| f(a + b - y), a, b, exponent, &mirrored)
    }

    /// `∫_a^b |x - c|^exponent f(x) dx`, splitting at `c` when it lies inside.
    pub fn integrate_abs_power<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        c: f64,
        exponent: f64,
        breaks: &[f64],
    ) -> Estimate {
        if c <= a || c >= b {
            self.shifted_power(&f, a, b, c, exponent, breaks)
        } else {
            self.integrate_right_power(&f, a, c, exponent, breaks)
                + self.integrate_left_power(&f, c, b, exponent, breaks)
        }
    }

    fn shifted_power<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        c: f64,
        exponent: f64,
        breaks: &[f64],
    ) -> Estimate {
        if c <= a {
            // (x - c)^e = ((x - a) + (a - c))^e; singular only when c == a.
            if c == a {
                return self.integrate_left_power(f, a, b, exponent, breaks);
            }
            self.integrate_with_breaks(|x| (x - c).powf(exponent) * f(x), a, b, breaks)
        } else if c == b {
            self.integrate_right_power(f, a, b, exponent, breaks)
        } else {
            self.integrate_with_breaks(|x| (c - x).powf(exponent) * f(x), a, b, breaks)
        }
    }
}

/// Integration domain: a finite core `[lo, hi]` whose ends may be open, meaning
/// the integrand still carries mass beyond them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Span {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, open_lo: false, open_hi: false }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, open_lo: true, open_hi: true }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        !self.open_lo && !self.open_hi
    }

    /// Image under `t ↦ a t + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        if a >= 0.0 {
            Self { lo: a * self.lo + b, hi: a * self.hi + b, ..*self }
        } else {
            Self { lo: a * self.hi + b, hi: a * self.lo + b, open_lo: self.open_hi, open_hi: self.open_lo }
        }
    }
}

const MAX_TAIL_PIECES: usize = 64;

impl Quadrature {
    /// Integrates over a [`Span`], extending open ends by doubling pieces until
    /// a piece no longer changes the total.
    pub fn integrate_span<F: Fn(f64) -> f64>(&self, f: F, span: &Span, breaks: &[f64]) -> Estimate {
        let mut total = self.integrate_with_breaks(&f, span.lo, span.hi, breaks);
        let base = span.width().max(1.0);
        total = total + self.tails(&f, span, base, breaks, total.value);
        total
    }

    fn tails<F: Fn(f64) -> f64>(&self, f: &F, span: &Span, base: f64, breaks: &[f64], core: f64) -> Estimate {
        let mut extra = Estimate::ZERO;
        for (open, sign, start) in [(span.open_hi, 1.0, span.hi), (span.open_lo, -1.0, span.lo)] {
            if !open {
                continue;
            }
            let mut a = start;
            let mut width = base;
            for _ in 0..MAX_TAIL_PIECES {
                let b = a + sign * width;
                let piece = self.integrate_with_breaks(f, a.min(b), a.max(b), breaks);
                extra = extra + piece;
                if piece.value.abs() <= 1e-17 * (core + extra.value).abs() || piece.value == 0.0 {
                    break;
                }
                a = b;
                width *= 2.0;
            }
        }
        extra
    }

    /// `∫ |t - c|^exponent f(t) dt` over a span; the singular point must lie in the core.
    pub fn integrate_abs_power_span<F: Fn(f64) -> f64>(
        &self,
        f: F,
        span: &Span,
        c: f64,
        exponent: f64,
        breaks: &[f64],
    ) -> Estimate {
        let core = self.integrate_abs_power(&f, span.lo, span.hi, c, exponent, breaks);
        let weighted = |t: f64| (t - c).abs().powf(exponent) * f(t);
        let base = span.width().max(1.0);
        core + self.tails(&weighted, span, base, breaks, core.value)
    }
}

/// Convenience wrapper with default tolerances.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Estimate {
    Quadrature::default().integrate(f, a, b)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        iterations += 1;
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform grid scan followed by golden-section refinement around the best node.
pub fn grid_then_golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize, tol: f64) -> (f64, f64) {
    let nodes = nodes.max(3);
    let step = (b - a) / (nodes - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..nodes {
        let v = f(a + step * i as f64);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = a + step * best.saturating_sub(1) as f64;
    let hi = a + step * (best + 1).min(nodes - 1) as f64;
    let (x, fx) = golden_section_max(&f, lo, hi, tol);
    if fx >= best_val {
        (x, fx)
    } else {
        (a + step * best as f64, best_val)
    }
}

/// Chebyshev–Lobatto points on `[a, b]`, ascending, `count >= 2`.
pub fn chebyshev_lobatto(a: f64, b: f64, count: usize) -> Vec<f64> {
    let n = count.max(2) - 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut pts: Vec<f64> = (0..=n).map(|k| mid - half * (std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
    pts[0] = a;
    pts[n] = b;
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0);
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn breaks_handle_kinks() {
        let q = Quadrature::default();
        let r = q.integrate_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0]);
        assert_relative_eq!(r.value, 2.5, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x: f64| (-0.5 * x * x).exp(), -12.0, 12.0);
        assert_relative_eq!(r.value, (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn strong_power_singularity() {
        // ∫_0^1 x^{-0.999} dx = 1000
        let q = Quadrature::default();
        let r = q.integrate_left_power(|_| 1.0, 0.0, 1.0, -0.999, &[]);
        assert_relative_eq!(r.value, 1000.0, max_relative = 1e-10);
        // ∫_0^2 x^{-1/2} (1 + x) dx = 2√2 + (2/3) 2^{3/2}
        let r = q.integrate_left_power(|x| 1.0 + x, 0.0, 2.0, -0.5, &[]);
        let exact = 2.0 * 2f64.sqrt() + 2.0 / 3.0 * 2f64.powf(1.5);
        assert_relative_eq!(r.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn abs_power_split() {
        let q = Quadrature::default();
        // ∫_{-1}^{1} |x|^{-1/2} dx = 4
        let r = q.integrate_abs_power(|_| 1.0, -1.0, 1.0, 0.0, -0.5, &[]);
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-11);
        // c outside the interval: ∫_1^2 (x - 0)^2 dx = 7/3
        let r = q.integrate_abs_power(|_| 1.0, 1.0, 2.0, 0.0, 2.0, &[]);
        assert_relative_eq!(r.value, 7.0 / 3.0, max_relative = 1e-12);
        let r = q.integrate_abs_power(|_| 1.0, -2.0, -1.0, 0.0, 2.0, &[]);
        assert_relative_eq!(r.value, 7.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn golden_section_finds_quadratic_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert_relative_eq!(fx, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn chebyshev_endpoints() {
        let p = chebyshev_lobatto(-1.0, 3.0, 9);
        assert_eq!(p.len(), 9);
        assert_eq!(p[0], -1.0);
        assert_eq!(p[8], 3.0);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn open_span_recovers_tails() {
        let q = Quadrature::default();
        let r = q.integrate_span(|x: f64| (-x.abs()).exp(), &Span::open(-1.0, 1.0), &[0.0]);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        let r = q.integrate_abs_power_span(|x: f64| (-x.abs()).exp(), &Span::open(-1.0, 1.0), 0.0, 2.0, &[]);
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn span_affine_swaps_flags() {
        let s = Span { lo: 0.0, hi: 1.0, open_lo: false, open_hi: true }.affine(-2.0, 1.0);
        assert_eq!(s, Span { lo: -1.0, hi: 1.0, open_lo: true, open_hi: false });
    }
}
