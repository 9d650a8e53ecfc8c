//! Seeded i.i.d. sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp, Gamma, StandardNormal};

use super::{DensitySpec, Family, GridDensity, PiecewiseLinear};
use crate::bodies::SupportBody;
use crate::error::{invalid, Result};

impl DensitySpec {
    /// `count` independent draws; identical seeds give identical samples.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(invalid("count", "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = self.sampler()?;
        Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
    }

    fn sampler(&self) -> Result<Sampler<'_>> {
        Ok(match &self.family {
            Family::Grid(g) if g.dim() == 1 || g.is_separable() => Sampler::GridAxes(grid_axes(g)?),
            Family::Grid(g) => Sampler::GridReject(g),
            Family::Product(fs) => Sampler::Product(fs.iter().map(|f| f.sampler()).collect::<Result<_>>()?),
            Family::Exponential { rate, reflected } => {
                Sampler::Exponential(Exp::new(*rate).map_err(|e| invalid("rate", e.to_string()))?, *reflected)
            }
            Family::ExponentialPower { shape, scale } => Sampler::ExpPower(
                Gamma::new(1.0 / shape, 1.0).map_err(|e| invalid("shape", e.to_string()))?,
                *shape,
                *scale,
            ),
            Family::GeneralizedGaussian(g) => match g.radial_law() {
                Some((a, b, prime)) => Sampler::Radial {
                    law: Some((Beta::new(a, b).map_err(|e| invalid("beta", e.to_string()))?, prime)),
                    beta: g.beta(),
                    scale: g.scale(),
                    dim: g.dim(),
                },
                None => Sampler::Radial { law: None, beta: 0.0, scale: g.scale(), dim: g.dim() },
            },
            Family::PiecewiseLinear(pl) => Sampler::Piecewise(pl),
            Family::Gaussian(_) | Family::Uniform { .. } | Family::Covariogram { .. } => Sampler::Direct(self),
        })
    }
}

enum Sampler<'a> {
    Direct(&'a DensitySpec),
    Exponential(Exp<f64>, bool),
    ExpPower(Gamma<f64>, f64, f64),
    Radial { law: Option<(Beta<f64>, bool)>, beta: f64, scale: f64, dim: usize },
    Product(Vec<Sampler<'a>>),
    Piecewise(&'a PiecewiseLinear),
    GridAxes(Vec<(PiecewiseLinear, f64)>),
    GridReject(&'a GridDensity),
}

fn grid_axes(g: &GridDensity) -> Result<Vec<(PiecewiseLinear, f64)>> {
    let axis_knots = |a: usize| (0..g.shape[a]).map(|i| g.origin[a] + i as f64 * g.spacing[a]).collect::<Vec<_>>();
    if g.dim() == 1 {
        let pl = PiecewiseLinear::new(axis_knots(0), g.values.clone())?;
        let mass = pl.mass();
        return Ok(vec![(pl, mass)]);
    }
    let (r, c) = (g.shape[0], g.shape[1]);
    let rows: Vec<f64> = (0..r).map(|i| g.values[i * c..(i + 1) * c].iter().sum()).collect();
    let cols: Vec<f64> = (0..c).map(|j| (0..r).map(|i| g.values[i * c + j]).sum()).collect();
    let mut out = Vec::new();
    for (a, w) in [(0, rows), (1, cols)] {
        let pl = PiecewiseLinear::new(axis_knots(a), w)?;
        let mass = pl.mass();
        out.push((pl, mass));
    }
    Ok(out)
}

fn uniform_in_body<R: Rng>(body: &SupportBody, rng: &mut R) -> Vec<f64> {
    match body {
        SupportBody::Box { half_widths } => half_widths.iter().map(|h| rng.random_range(-*h..*h)).collect(),
        SupportBody::Ball { dim, radius } => loop {
            let x: Vec<f64> = (0..*dim).map(|_| rng.random_range(-*radius..*radius)).collect();
            if body.contains(&x) {
                break x;
            }
        },
        SupportBody::Polygon { vertices } => {
            let bx = vertices.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
            let by = vertices.iter().map(|p| p[1].abs()).fold(0.0, f64::max);
            loop {
                let x = vec![rng.random_range(-bx..bx), rng.random_range(-by..by)];
                if body.contains(&x) {
                    break x;
                }
            }
        }
    }
}

fn unit_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break z.iter().map(|x| x / n).collect();
        }
    }
}

impl Sampler<'_> {
    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Sampler::Direct(spec) => match &spec.family {
                Family::Gaussian(g) => {
                    let z: Vec<f64> = (0..g.dim()).map(|_| rng.sample(StandardNormal)).collect();
                    g.transform_standard(&z)
                }
                Family::Uniform { body, center } => {
                    uniform_in_body(body, rng).iter().zip(center).map(|(x, c)| x + c).collect()
                }
                Family::Covariogram { body } => {
                    let a = uniform_in_body(body, rng);
                    let b = uniform_in_body(body, rng);
                    b.iter().zip(&a).map(|(x, y)| x - y).collect()
                }
                _ => unreachable!("direct sampling is only built for closed families"),
            },
            Sampler::Exponential(d, reflected) => {
                let x = d.sample(rng);
                vec![if *reflected { -x } else { x }]
            }
            Sampler::ExpPower(gamma, shape, scale) => {
                let w: f64 = gamma.sample(rng);
                let mag = scale * (shape * w).powf(1.0 / shape);
                vec![if rng.random::<bool>() { mag } else { -mag }]
            }
            Sampler::Radial { law, beta, scale, dim } => {
                let radius = match law {
                    Some((b, prime)) => {
                        let x: f64 = b.sample(rng);
                        let v = if *prime { x / (1.0 - x) } else { x };
                        scale * (2.0 * v / beta.abs()).sqrt()
                    }
                    None => {
                        let z: f64 = (0..*dim).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum();
                        scale * z.sqrt()
                    }
                };
                unit_direction(*dim, rng).iter().map(|u| u * radius).collect()
            }
            Sampler::Product(parts) => parts.iter().map(|p| p.draw(rng)[0]).collect(),
            Sampler::Piecewise(pl) => vec![pl.quantile(rng.random::<f64>() * pl.mass())],
            Sampler::GridAxes(axes) => axes.iter().map(|(pl, m)| pl.quantile(rng.random::<f64>() * m)).collect(),
            Sampler::GridReject(g) => {
                let upper = g.upper();
                let bound = g.sup();
                loop {
                    let x: Vec<f64> = (0..g.dim()).map(|a| rng.random_range(g.origin[a]..upper[a])).collect();
                    if rng.random::<f64>() * bound < g.evaluate(&x) {
                        break x;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[Vec<f64>]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().map(|x| x[0]).sum::<f64>() / n;
        let v = xs.iter().map(|x| (x[0] - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn uniform_mean() {
        let u = DensitySpec::uniform_interval(0.0, 1.0).unwrap();
        let xs = u.sample(7, 100_000).unwrap();
        assert!((mean_var(&xs).0 - 0.5).abs() < 0.005);
    }

    #[test]
    fn gaussian_variance() {
        let g = DensitySpec::standard_gaussian(1);
        let xs = g.sample(11, 100_000).unwrap();
        assert!((mean_var(&xs).1 - 1.0).abs() < 0.02);
    }

    #[test]
    fn deterministic_and_count_checked() {
        let g = DensitySpec::laplace(1.0).unwrap();
        assert_eq!(g.sample(3, 10).unwrap(), g.sample(3, 10).unwrap());
        assert!(g.sample(3, 0).is_err());
    }

    #[test]
    fn exponential_power_variance() {
        // Var = σ² k^{2/k} Γ(3/k) / Γ(1/k); for k = 2, σ = 1 this is 1.
        let f = DensitySpec::exponential_power(2.0, 1.0).unwrap();
        let xs = f.sample(5, 100_000).unwrap();
        assert!((mean_var(&xs).1 - 1.0).abs() < 0.02);
    }

    #[test]
    fn heavy_generalized_gaussian_samples_are_finite() {
        let f = DensitySpec::generalized_gaussian(-1.0, 2, 1.0).unwrap();
        let xs = f.sample(1, 1000).unwrap();
        assert!(xs.iter().all(|x| x.iter().all(|v| v.is_finite())));
    }
}
