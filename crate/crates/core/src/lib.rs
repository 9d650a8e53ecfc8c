//! Rényi entropies and entropy powers of densities, sharp exponents for the
//! Rényi entropy power inequality, and the star bodies built from densities.

pub mod bodies;
pub mod densities;
pub mod directions;
pub mod error;
pub mod exponent;
pub mod quad;
pub mod renyi;
pub mod transforms;
pub mod verify;

pub use bodies::{BodyLabel, StarBody, SupportBody};
pub use densities::{Concavity, DensitySpec, Family, GridDensity};
pub use directions::{Direction, DirectionSet};
pub use error::{Error, Result};
pub use exponent::{alpha, alpha_optimized, comparison_bounds, ExponentReport};
pub use renyi::{directional_entropy, renyi_entropy, EntropyResult, Method};
pub use transforms::{IdentityGap, LimitPoint, SphericalFunction};
pub use verify::{CheckReport, JointDensity2D, Verdict};
