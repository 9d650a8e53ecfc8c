pub mod alpha;
pub mod body;
pub mod check;
pub mod entropy;
pub mod transform;

use anyhow::Result;
use epigeom::{DirectionSet, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violated,
}

impl Outcome {
    pub fn from_verdicts<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Self {
        if verdicts.into_iter().any(|v| *v == Verdict::Violated) {
            Self::Violated
        } else {
            Self::Pass
        }
    }
}

/// `count` directions in the natural set for `dim`, or the default set.
pub fn direction_set(dim: usize, count: Option<usize>) -> Result<DirectionSet> {
    Ok(match count {
        Some(n) => DirectionSet::with_count(dim, n)?,
        None => DirectionSet::default_for(dim)?,
    })
}
