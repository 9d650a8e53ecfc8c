use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::directions::dot;
use crate::error::{invalid, Error, Result};

/// Multivariate normal with cached Cholesky factor, precision and log-determinant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gaussian {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    #[serde(skip)]
    chol: Vec<Vec<f64>>,
    #[serde(skip)]
    precision: Vec<Vec<f64>>,
    #[serde(skip)]
    log_det: f64,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(invalid("mean", "must be non-empty"));
        }
        if covariance.len() != n || covariance.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: covariance.len() });
        }
        if mean.iter().chain(covariance.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(invalid("covariance", "entries must be finite"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (covariance[i][j], covariance[j][i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(invalid("covariance", "must be symmetric"));
                }
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| covariance[i][j]);
        let chol = m.clone().cholesky().ok_or_else(|| invalid("covariance", "must be positive definite"))?;
        let l = chol.l();
        let log_det = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
        let inv = chol.inverse();
        Ok(Self { chol: rows(&l), precision: rows(&inv), mean, covariance, log_det })
    }

    pub fn standard(dim: usize) -> Self {
        let cov = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(vec![0.0; dim], cov).expect("identity covariance")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &[Vec<f64>] {
        &self.covariance
    }

    pub fn cholesky(&self) -> &[Vec<f64>] {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    fn quad_form(&self, m: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
        m.iter().zip(a).map(|(row, ai)| ai * dot(row, b)).sum()
    }

    /// Log-density at `x`.
    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        let n = self.dim() as f64;
        -0.5 * (self.quad_form(&self.precision, &d, &d) + n * (2.0 * PI).ln() + self.log_det)
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn peak(&self) -> f64 {
        (-0.5 * (self.dim() as f64 * (2.0 * PI).ln() + self.log_det)).exp()
    }

    /// Mean and variance of `v·X`.
    pub fn projection(&self, v: &[f64]) -> (f64, f64) {
        (dot(v, &self.mean), self.quad_form(&self.covariance, v, v))
    }

    /// Restriction to the line `point + t·dir`, as `scale · exp(-(t - centre)² / (2 var))`.
    pub fn line_restriction(&self, point: &[f64], dir: &[f64]) -> (f64, f64, f64) {
        let d: Vec<f64> = point.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        let a = self.quad_form(&self.precision, dir, dir);
        let b = self.quad_form(&self.precision, dir, &d);
        let c = self.quad_form(&self.precision, &d, &d);
        let centre = -b / a;
        let log_scale = -0.5 * (c - b * b / a) - 0.5 * (self.dim() as f64 * (2.0 * PI).ln() + self.log_det);
        (log_scale.exp(), centre, 1.0 / a)
    }

    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        let mean = self.mean.iter().zip(shift).map(|(m, s)| scale * m + s).collect();
        let cov = self.covariance.iter().map(|r| r.iter().map(|c| c * scale * scale).collect()).collect();
        Self::new(mean, cov)
    }

    /// Distribution of the independent sum with `other`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mean = self.mean.iter().zip(&other.mean).map(|(a, b)| a + b).collect();
        let cov = self
            .covariance
            .iter()
            .zip(&other.covariance)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect();
        Self::new(mean, cov)
    }

    /// Draws `L z + μ` for a standard normal vector `z`.
    pub fn transform_standard(&self, z: &[f64]) -> Vec<f64> {
        let l = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.chol[i][j]);
        let x = l * DVector::from_column_slice(z);
        x.iter().zip(&self.mean).map(|(a, b)| a + b).collect()
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn standard_peak() {
        let g = Gaussian::standard(1);
        assert_relative_eq!(g.pdf(&[0.0]), 0.398_942_280_401_432_7, epsilon = 1e-16);
    }

    #[test]
    fn line_restriction_matches_pdf() {
        let g = Gaussian::new(vec![0.3, -0.1], vec![vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap();
        let (s, c, var) = g.line_restriction(&[0.2, 0.5], &[0.6, 0.8]);
        for t in [-1.0, 0.0, 0.7] {
            let x = [0.2 + 0.6 * t, 0.5 + 0.8 * t];
            assert_relative_eq!(g.pdf(&x), s * (-(t - c) * (t - c) / (2.0 * var)).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(Gaussian::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }
}
