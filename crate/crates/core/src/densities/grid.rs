//! Densities tabulated on regular grids in one or two dimensions.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::PiecewiseLinear;
use crate::error::{invalid, Error, Result};

/// Node values on `origin + i·spacing`, row-major with the last axis fastest.
///
/// Values are read as samples of a continuous density: evaluation between
/// nodes is multilinear and integrals use the trapezoidal rule, which equals
/// the plain node sum times the cell volume because boundary nodes are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    /// Factor applied to the raw node values to reach unit mass.
    #[serde(default = "one")]
    pub renormalization: f64,
}

fn one() -> f64 {
    1.0
}

impl GridDensity {
    /// Validates a grid without renormalising it.
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dim = shape.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!("grid densities in dimension {dim}")));
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: origin.len().min(spacing.len()) });
        }
        if shape.iter().any(|s| *s < 3) {
            return Err(invalid("shape", "need at least three nodes per axis"));
        }
        if spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) || origin.iter().any(|o| !o.is_finite()) {
            return Err(invalid("spacing", "must be positive and finite"));
        }
        if values.len() != shape.iter().product::<usize>() {
            return Err(invalid("values", "length must equal the product of the shape"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("values", "must be finite and non-negative"));
        }
        Ok(Self { origin, spacing, shape, values, renormalization: 1.0 })
    }

    /// Zeroes the boundary nodes and rescales to unit mass.
    pub fn normalized(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let mut grid = Self::new(origin, spacing, shape, values)?;
        grid.zero_boundary();
        let mass = grid.mass();
        if !(mass > 0.0) {
            return Err(invalid("values", "total mass is zero"));
        }
        let factor = 1.0 / mass;
        grid.values.iter_mut().for_each(|v| *v *= factor);
        grid.renormalization = factor;
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.origin[a] + (self.shape[a] - 1) as f64 * self.spacing[a]).collect()
    }

    pub fn node(&self, index: &[usize]) -> Vec<f64> {
        (0..self.dim()).map(|a| self.origin[a] + index[a] as f64 * self.spacing[a]).collect()
    }

    fn flat(&self, index: &[usize]) -> usize {
        match self.dim() {
            1 => index[0],
            _ => index[0] * self.shape[1] + index[1],
        }
    }

    pub fn value_at(&self, index: &[usize]) -> f64 {
        self.values[self.flat(index)]
    }

    fn zero_boundary(&mut self) {
        match self.dim() {
            1 => {
                let n = self.shape[0];
                self.values[0] = 0.0;
                self.values[n - 1] = 0.0;
            }
            _ => {
                let (r, c) = (self.shape[0], self.shape[1]);
                for j in 0..c {
                    self.values[j] = 0.0;
                    self.values[(r - 1) * c + j] = 0.0;
                }
                for i in 0..r {
                    self.values[i * c] = 0.0;
                    self.values[i * c + c - 1] = 0.0;
                }
            }
        }
    }

    /// True when every boundary node is zero.
    pub fn boundary_is_zero(&self) -> bool {
        let mut probe = self.clone();
        probe.zero_boundary();
        probe.values == self.values
    }

    /// Multilinear interpolation, zero outside the grid box.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut idx = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for a in 0..self.dim() {
            let u = (x[a] - self.origin[a]) / self.spacing[a];
            let n = self.shape[a];
            if !(u >= 0.0 && u <= (n - 1) as f64) {
                return 0.0;
            }
            let i = (u.floor() as usize).min(n - 2);
            idx[a] = i;
            frac[a] = u - i as f64;
        }
        match self.dim() {
            1 => {
                let (i, w) = (idx[0], frac[0]);
                (1.0 - w) * self.values[i] + w * self.values[i + 1]
            }
            _ => {
                let c = self.shape[1];
                let (i, j) = (idx[0], idx[1]);
                let (u, w) = (frac[0], frac[1]);
                let v00 = self.values[i * c + j];
                let v01 = self.values[i * c + j + 1];
                let v10 = self.values[(i + 1) * c + j];
                let v11 = self.values[(i + 1) * c + j + 1];
                (1.0 - u) * ((1.0 - w) * v00 + w * v01) + u * ((1.0 - w) * v10 + w * v11)
            }
        }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoidal `∫ φ(f)`, with φ applied to node values.
    pub fn integrate_nodes<F: Fn(f64) -> f64 + Sync>(&self, phi: F) -> f64 {
        self.values.iter().map(|v| phi(*v)).sum::<f64>() * self.cell_volume()
    }

    /// Same rule on the sub-grid of even nodes, for Richardson-style error estimates.
    pub fn integrate_nodes_coarse<F: Fn(f64) -> f64 + Sync>(&self, phi: F) -> f64 {
        let vol = self.cell_volume() * (1usize << self.dim()) as f64;
        match self.dim() {
            1 => self.values.iter().step_by(2).map(|v| phi(*v)).sum::<f64>() * vol,
            _ => {
                let c = self.shape[1];
                let mut total = 0.0;
                for i in (0..self.shape[0]).step_by(2) {
                    for j in (0..c).step_by(2) {
                        total += phi(self.values[i * c + j]);
                    }
                }
                total * vol
            }
        }
    }

    /// Parameter interval of the line `point + t·dir` inside the grid box.
    pub fn chord(&self, point: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let upper = self.upper();
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for a in 0..self.dim() {
            if dir[a] == 0.0 {
                if point[a] < self.origin[a] || point[a] > upper[a] {
                    return None;
                }
                continue;
            }
            let t0 = (self.origin[a] - point[a]) / dir[a];
            let t1 = (upper[a] - point[a]) / dir[a];
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
        (hi > lo).then_some((lo, hi))
    }

    fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trapezoidal integral of the interpolant along `point + t·dir`, step half a cell.
    pub fn line_integral(&self, point: &[f64], dir: &[f64]) -> f64 {
        let Some((lo, hi)) = self.chord(point, dir) else { return 0.0 };
        let step = 0.5 * self.min_spacing();
        let count = ((hi - lo) / step).ceil().max(1.0) as usize;
        let h = (hi - lo) / count as f64;
        let mut x = vec![0.0; self.dim()];
        let mut total = 0.0;
        for k in 1..count {
            let t = lo + k as f64 * h;
            for a in 0..self.dim() {
                x[a] = point[a] + t * dir[a];
            }
            total += self.evaluate(&x);
        }
        // Endpoints lie on the grid boundary where the interpolant vanishes.
        total * h
    }

    /// Samples of `t ↦ f(point + t·dir)` at a step of half a cell.
    pub fn line_samples(&self, point: &[f64], dir: &[f64]) -> (f64, Vec<f64>) {
        let Some((lo, hi)) = self.chord(point, dir) else { return (1.0, Vec::new()) };
        let step = 0.5 * self.min_spacing();
        let count = ((hi - lo) / step).ceil().max(1.0) as usize;
        let h = (hi - lo) / count as f64;
        let mut x = vec![0.0; self.dim()];
        let samples = (0..=count)
            .map(|k| {
                let t = lo + k as f64 * h;
                for a in 0..self.dim() {
                    x[a] = point[a] + t * dir[a];
                }
                self.evaluate(&x)
            })
            .collect();
        (h, samples)
    }

    /// Range of `v·x` over the grid box.
    pub fn box_range(&self, v: &[f64]) -> (f64, f64) {
        let upper = self.upper();
        let mut lo = 0.0;
        let mut hi = 0.0;
        for a in 0..self.dim() {
            let (x, y) = (v[a] * self.origin[a], v[a] * upper[a]);
            lo += x.min(y);
            hi += x.max(y);
        }
        (lo, hi)
    }

    /// Range of `v·x` over the cells touching a positive node.
    pub fn support_range(&self, v: &[f64]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let h = &self.spacing;
        let slack: f64 = (0..self.dim()).map(|a| v[a].abs() * h[a]).sum();
        let visit = |idx: &[usize], lo: &mut f64, hi: &mut f64| {
            let x = self.node(idx);
            let p: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
            *lo = lo.min(p - slack);
            *hi = hi.max(p + slack);
        };
        match self.dim() {
            1 => {
                for i in 0..self.shape[0] {
                    if self.values[i] > 0.0 {
                        visit(&[i], &mut lo, &mut hi);
                    }
                }
            }
            _ => {
                let c = self.shape[1];
                for i in 0..self.shape[0] {
                    for j in 0..c {
                        if self.values[i * c + j] > 0.0 {
                            visit(&[i, j], &mut lo, &mut hi);
                        }
                    }
                }
            }
        }
        let (blo, bhi) = self.box_range(v);
        (lo.max(blo), hi.min(bhi))
    }

    /// Marginal of `v·X` for unit `v`, tabulated on knots half a cell apart.
    pub fn marginal(&self, v: &[f64]) -> Result<PiecewiseLinear> {
        if self.dim() == 1 {
            let pl = PiecewiseLinear::new(
                (0..self.shape[0]).map(|i| self.origin[0] + i as f64 * self.spacing[0]).collect(),
                self.values.clone(),
            )?;
            return Ok(pl.map_affine(v[0], 0.0));
        }
        let (lo, hi) = self.box_range(v);
        let step = 0.5 * self.min_spacing();
        let count = ((hi - lo) / step).ceil() as usize;
        let knots: Vec<f64> = (0..=count).map(|k| lo + (hi - lo) * k as f64 / count as f64).collect();
        let u = [-v[1], v[0]];
        let values: Vec<f64> = knots.par_iter().map(|t| self.line_integral(&[t * v[0], t * v[1]], &u)).collect();
        Ok(PiecewiseLinear::normalized(knots, values)?.0)
    }

    /// Density of `X' - X` for i.i.d. `X, X'`, by FFT autocorrelation.
    ///
    /// The result is symmetrised node-by-node so that `f̂(x) = f̂(-x)` holds exactly.
    pub fn autocorrelation(&self) -> Result<Self> {
        let mut reversed = self.values.clone();
        reversed.reverse();
        let (mut values, shape) = fft_convolve(&self.values, &self.shape, &reversed, &self.shape);
        let vol = self.cell_volume();
        let n = values.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let m = 0.5 * (values[i] + values[j]) * vol;
            values[i] = m.max(0.0);
            values[j] = m.max(0.0);
        }
        if n % 2 == 1 {
            values[n / 2] = (values[n / 2] * vol).max(0.0);
        }
        let origin: Vec<f64> = (0..self.dim()).map(|a| -((self.shape[a] - 1) as f64) * self.spacing[a]).collect();
        let mut out = Self::new(origin, self.spacing.clone(), shape, values)?;
        // Extreme lags only pair boundary nodes, which vanish; drop FFT round-off there.
        out.zero_boundary();
        let mass = out.mass();
        out.values.iter_mut().for_each(|v| *v /= mass);
        out.renormalization = 1.0 / mass;
        Ok(out)
    }

    /// Density of `X + Y` for independent grid densities with equal spacing.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        if self.spacing.iter().zip(&other.spacing).any(|(a, b)| (a - b).abs() > 1e-12 * a) {
            return Err(Error::Unsupported("convolution of grids with different spacings".into()));
        }
        let (mut values, shape) = fft_convolve(&self.values, &self.shape, &other.values, &other.shape);
        let vol = self.cell_volume();
        values.iter_mut().for_each(|v| *v = (*v * vol).max(0.0));
        let origin = self.origin.iter().zip(&other.origin).map(|(a, b)| a + b).collect();
        let mut out = Self::new(origin, self.spacing.clone(), shape, values)?;
        // Extreme lags only pair boundary nodes, which vanish; drop FFT round-off there.
        out.zero_boundary();
        let mass = out.mass();
        out.values.iter_mut().for_each(|v| *v /= mass);
        out.renormalization = 1.0 / mass;
        Ok(out)
    }

    /// Grid of `aX`.
    pub fn scaled(&self, a: f64) -> Self {
        let dim = self.dim();
        let spacing: Vec<f64> = self.spacing.iter().map(|h| h * a.abs()).collect();
        let mut values: Vec<f64> = self.values.iter().map(|v| v / a.abs().powi(dim as i32)).collect();
        let origin: Vec<f64> = if a > 0.0 {
            self.origin.iter().map(|o| o * a).collect()
        } else {
            values.reverse();
            self.upper().iter().map(|u| u * a).collect()
        };
        Self { origin, spacing, shape: self.shape.clone(), values, renormalization: self.renormalization }
    }

    /// Maximum of `|f(x) - f(-x)|` over nodes, `None` when the grid is not centred.
    pub fn asymmetry(&self) -> Option<f64> {
        let upper = self.upper();
        let centred = (0..self.dim()).all(|a| (self.origin[a] + upper[a]).abs() <= 1e-9 * self.spacing[a]);
        if !centred {
            return None;
        }
        let n = self.values.len();
        Some((0..n).map(|i| (self.values[i] - self.values[n - 1 - i]).abs()).fold(0.0, f64::max))
    }

    /// True when the node values factor as an outer product (rank one).
    pub fn is_separable(&self) -> bool {
        if self.dim() == 1 {
            return true;
        }
        let (r, c) = (self.shape[0], self.shape[1]);
        let rows: Vec<f64> = (0..r).map(|i| self.values[i * c..(i + 1) * c].iter().sum()).collect();
        let cols: Vec<f64> = (0..c).map(|j| (0..r).map(|i| self.values[i * c + j]).sum()).collect();
        let total: f64 = rows.iter().sum();
        let scale = self.sup();
        (0..r).all(|i| (0..c).all(|j| (self.values[i * c + j] - rows[i] * cols[j] / total).abs() <= 1e-9 * scale))
    }
}

/// Full linear convolution of two row-major arrays via zero-padded FFTs.
pub fn fft_convolve(a: &[f64], shape_a: &[usize], b: &[f64], shape_b: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let dim = shape_a.len();
    let out_shape: Vec<usize> = (0..dim).map(|k| shape_a[k] + shape_b[k] - 1).collect();
    let padded: Vec<usize> = out_shape.iter().map(|n| n.next_power_of_two()).collect();
    let mut planner = FftPlanner::<f64>::new();
    let embed = |src: &[f64], shape: &[usize]| {
        let total: usize = padded.iter().product();
        let mut buf = vec![Complex::new(0.0, 0.0); total];
        match dim {
            1 => {
                for (i, v) in src.iter().enumerate() {
                    buf[i].re = *v;
                }
            }
            _ => {
                for i in 0..shape[0] {
                    for j in 0..shape[1] {
                        buf[i * padded[1] + j].re = src[i * shape[1] + j];
                    }
                }
            }
        }
        buf
    };
    let mut fa = embed(a, shape_a);
    let mut fb = embed(b, shape_b);
    transform(&mut planner, &mut fa, &padded, false);
    transform(&mut planner, &mut fb, &padded, false);
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y);
    transform(&mut planner, &mut fa, &padded, true);
    let norm = 1.0 / padded.iter().product::<usize>() as f64;
    let out = match dim {
        1 => (0..out_shape[0]).map(|i| fa[i].re * norm).collect(),
        _ => {
            let mut out = Vec::with_capacity(out_shape[0] * out_shape[1]);
            for i in 0..out_shape[0] {
                for j in 0..out_shape[1] {
                    out.push(fa[i * padded[1] + j].re * norm);
                }
            }
            out
        }
    };
    (out, out_shape)
}

fn transform(planner: &mut FftPlanner<f64>, data: &mut [Complex<f64>], shape: &[usize], inverse: bool) {
    let plan = |planner: &mut FftPlanner<f64>, n: usize| {
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };
    match shape.len() {
        1 => plan(planner, shape[0]).process(data),
        _ => {
            let (r, c) = (shape[0], shape[1]);
            let row_fft = plan(planner, c);
            data.par_chunks_mut(c).for_each(|row| row_fft.process(row));
            let col_fft = plan(planner, r);
            let mut columns = vec![Complex::new(0.0, 0.0); r * c];
            for i in 0..r {
                for j in 0..c {
                    columns[j * r + i] = data[i * c + j];
                }
            }
            columns.par_chunks_mut(r).for_each(|col| col_fft.process(col));
            for j in 0..c {
                for i in 0..r {
                    data[i * c + j] = columns[j * r + i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn box_1d() -> GridDensity {
        // Uniform on [0, 1] sampled at step 1/8 with zero ends outside.
        let values: Vec<f64> = (0..11).map(|i| if (1..=9).contains(&i) { 1.0 } else { 0.0 }).collect();
        GridDensity::normalized(vec![-0.125], vec![0.125], vec![11], values).unwrap()
    }

    #[test]
    fn fft_matches_direct_convolution() {
        let a = [1.0, 2.0, 3.0];
        let b = [0.5, -1.0];
        let (c, shape) = fft_convolve(&a, &[3], &b, &[2]);
        assert_eq!(shape, vec![4]);
        for (x, y) in c.iter().zip([0.5, 0.0, -0.5, -3.0]) {
            assert_relative_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn autocorrelation_is_symmetric_with_unit_mass() {
        let g = box_1d();
        let ac = g.autocorrelation().unwrap();
        assert_relative_eq!(ac.mass(), 1.0, epsilon = 1e-12);
        let n = ac.values.len();
        for i in 0..n {
            assert_eq!(ac.values[i], ac.values[n - 1 - i]);
        }
        assert_eq!(ac.asymmetry(), Some(0.0));
    }

    #[test]
    fn bilinear_is_exact_on_planes() {
        let values: Vec<f64> = (0..25).map(|k| (k / 5) as f64 + 2.0 * (k % 5) as f64).collect();
        let g = GridDensity::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![5, 5], values).unwrap();
        assert_relative_eq!(g.evaluate(&[1.5, 2.25]), 1.5 + 4.5, epsilon = 1e-14);
        assert!(!g.is_separable());
    }
}
