//! Correlated noise across privacy levels and the linkage attacks it defeats.
//!
//! Releasing one record to several communities with independent noise lets a
//! recipient of several copies average the noise away. Drawing all copies
//! from one [`NoiseLadder`] makes the least noisy copy a sufficient statistic:
//! every other copy is that copy plus fresh independent noise, so combining
//! them never beats the best single release.

mod ladder;
mod linkage;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ladder::{NoiseLadder, MAX_STEP_TAU};
pub use linkage::{simulate_linkage, AttackReport, Estimator, LinkageScenario, MIN_TRIALS};

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("ladder needs at least one level")]
    NoLevels,
    #[error("privacy level {0} is not positive")]
    NonPositiveLevel(f64),
    #[error("privacy levels must be sorted ascending")]
    UnsortedLevels,
    #[error("noise dimension must be at least 1")]
    ZeroDimension,
    #[error("linkage needs at least one release, got {0}")]
    TooFewReleases(usize),
    #[error("linkage simulation needs at least {min} trials, got {0}", min = MIN_TRIALS)]
    TooFewTrials(usize),
    #[error("releases do not describe one numeric record under one noise model")]
    MixedReleases,
}

/// Whether releases of one record draw independent or ladder-coupled noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseSource {
    Independent,
    #[default]
    Coupled,
}

impl fmt::Display for NoiseSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseSource::Independent => "independent",
            NoiseSource::Coupled => "coupled",
        })
    }
}

impl FromStr for NoiseSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent" => Ok(Self::Independent),
            "coupled" => Ok(Self::Coupled),
            other => Err(format!("unknown noise source `{other}`")),
        }
    }
}

/// Releases `record` once per entry of `epsilons`, all noise drawn from a
/// single ladder: `y(ε) = d + δ·V_ε`.
pub fn coupled_release<R: Rng + ?Sized>(
    record: &[f64],
    epsilons: &[f64],
    sensitivity: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, CouplingError> {
    if epsilons.is_empty() {
        return Err(CouplingError::TooFewReleases(0));
    }
    let noise = linkage::coupled_noise(epsilons, record.len(), sensitivity, rng)?;
    Ok(noise
        .into_iter()
        .map(|v| record.iter().zip(v).map(|(d, x)| d + x).collect())
        .collect())
}
