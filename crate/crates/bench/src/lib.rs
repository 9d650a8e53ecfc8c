//! Fixtures shared by the benchmarks.

use epigeom::{DensitySpec, SupportBody};

pub fn disk() -> DensitySpec {
    DensitySpec::uniform(SupportBody::ball(2, 1.0).expect("unit disk")).expect("uniform disk")
}

pub fn correlated_gaussian() -> DensitySpec {
    DensitySpec::gaussian(vec![0.0, 0.0], vec![vec![1.0, 0.6], vec![0.6, 1.0]]).expect("positive definite")
}

pub fn exponential_power_line() -> DensitySpec {
    DensitySpec::exponential_power(1.5, 1.0).expect("valid shape")
}
