//! Linkage-attack simulation: an adversary holding several releases of one
//! record combines them and is compared with the best single release.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CouplingError, NoiseLadder, NoiseSource};
use crate::dp::{sample_laplace, Payload, SanitizedRelease};
use crate::rng::par_trials;

pub const MIN_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// The release with the largest ε.
    BestSingle,
    /// Unweighted mean.
    Average,
    /// Mean weighted by `1/Var = ε²/(2δ²)`.
    InverseVariance,
    /// Independent-Laplace MLE: the ε-weighted median.
    MaximumLikelihood,
}

impl Estimator {
    pub const ALL: [Estimator; 4] =
        [Estimator::BestSingle, Estimator::Average, Estimator::InverseVariance, Estimator::MaximumLikelihood];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::BestSingle => "best-single",
            Estimator::Average => "average",
            Estimator::InverseVariance => "inverse-variance",
            Estimator::MaximumLikelihood => "maximum-likelihood",
        }
    }

    /// Combines per-release values of one coordinate.
    pub fn combine(self, values: &[f64], epsilons: &[f64]) -> f64 {
        match self {
            Estimator::BestSingle => values[best_index(epsilons)],
            Estimator::Average => values.iter().sum::<f64>() / values.len() as f64,
            Estimator::InverseVariance => {
                let w: f64 = epsilons.iter().map(|e| e * e).sum();
                values.iter().zip(epsilons).map(|(v, e)| v * e * e).sum::<f64>() / w
            }
            Estimator::MaximumLikelihood => weighted_median(values, epsilons),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown estimator `{s}`"))
    }
}

fn best_index(epsilons: &[f64]) -> usize {
    let mut best = 0;
    for (i, e) in epsilons.iter().enumerate() {
        if *e > epsilons[best] {
            best = i;
        }
    }
    best
}

fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let half = weights.iter().sum::<f64>() / 2.0;
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if acc >= half {
            return values[i];
        }
    }
    values[order[order.len() - 1]]
}

/// Several releases of one record at the given ε levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkageScenario {
    pub epsilons: Vec<f64>,
    pub coupling: NoiseSource,
    pub estimator: Estimator,
    pub sensitivity: f64,
    pub truth: Vec<f64>,
}

impl LinkageScenario {
    pub fn new(epsilons: Vec<f64>, coupling: NoiseSource, estimator: Estimator) -> Self {
        LinkageScenario { epsilons, coupling, estimator, sensitivity: 1.0, truth: vec![0.0] }
    }

    /// Scenario replaying the noise model of existing numeric releases of a
    /// single record.
    pub fn from_releases(
        releases: &[SanitizedRelease],
        truth: Vec<f64>,
        sensitivity: f64,
        estimator: Estimator,
    ) -> Result<Self, CouplingError> {
        let first = releases.first().ok_or(CouplingError::TooFewReleases(0))?;
        for r in releases {
            if r.releaser != first.releaser || r.noise_source != first.noise_source {
                return Err(CouplingError::MixedReleases);
            }
            match &r.payload {
                Payload::Numeric(v) if v.len() == truth.len() => {}
                _ => return Err(CouplingError::MixedReleases),
            }
        }
        Ok(LinkageScenario {
            epsilons: releases.iter().map(|r| r.epsilon).collect(),
            coupling: first.noise_source,
            estimator,
            sensitivity,
            truth,
        })
    }

    /// One joint draw of all releases, in scenario order.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Vec<f64>>, CouplingError> {
        let n = self.truth.len();
        match self.coupling {
            NoiseSource::Independent => Ok(self
                .epsilons
                .iter()
                .map(|&e| self.truth.iter().map(|d| d + sample_laplace(rng, self.sensitivity / e)).collect())
                .collect()),
            NoiseSource::Coupled => coupled_noise(&self.epsilons, n, self.sensitivity, rng).map(|noise| {
                noise
                    .into_iter()
                    .map(|v| v.iter().zip(&self.truth).map(|(x, d)| d + x).collect())
                    .collect()
            }),
        }
    }
}

/// Noise vectors for each requested ε drawn from one shared ladder, scaled
/// by `sensitivity`. Equal ε values receive identical noise.
pub(crate) fn coupled_noise<R: Rng + ?Sized>(
    epsilons: &[f64],
    dimension: usize,
    sensitivity: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, CouplingError> {
    let mut levels = epsilons.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let ladder = NoiseLadder::build(&levels, dimension, rng)?;
    Ok(epsilons
        .iter()
        .map(|e| ladder.at(*e).expect("level present").iter().map(|x| x * sensitivity).collect())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub k: usize,
    pub coupling: NoiseSource,
    pub estimator: Estimator,
    pub trials: usize,
    pub best_single_rmse: f64,
    pub effective_rmse: f64,
    /// `best_single_rmse / effective_rmse`; above 1 the combination helped.
    pub gain: f64,
}

impl AttackReport {
    pub const CSV_HEADER: &'static str = "scenario_id,k,coupling,estimator,best_single_rmse,effective_rmse,gain";

    pub fn write_csv_row<W: Write>(&self, scenario_id: usize, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            scenario_id, self.k, self.coupling, self.estimator, self.best_single_rmse, self.effective_rmse, self.gain
        )
    }
}

pub fn simulate_linkage(scenario: &LinkageScenario, trials: usize, seed: u64) -> Result<AttackReport, CouplingError> {
    if scenario.epsilons.is_empty() {
        return Err(CouplingError::TooFewReleases(0));
    }
    if trials < MIN_TRIALS {
        return Err(CouplingError::TooFewTrials(trials));
    }
    if scenario.truth.is_empty() {
        return Err(CouplingError::ZeroDimension);
    }
    let chunks = par_trials(trials, seed, |rng, n| -> Result<(f64, f64), CouplingError> {
        let (mut best_sq, mut est_sq) = (0.0, 0.0);
        let mut coord = vec![0.0; scenario.epsilons.len()];
        for _ in 0..n {
            let draws = scenario.draw(rng)?;
            for (c, d) in scenario.truth.iter().enumerate() {
                for (slot, y) in coord.iter_mut().zip(&draws) {
                    *slot = y[c];
                }
                let best = Estimator::BestSingle.combine(&coord, &scenario.epsilons);
                let est = scenario.estimator.combine(&coord, &scenario.epsilons);
                best_sq += (best - d).powi(2);
                est_sq += (est - d).powi(2);
            }
        }
        Ok((best_sq, est_sq))
    });
    let (mut best_sq, mut est_sq) = (0.0, 0.0);
    for c in chunks {
        let (b, e) = c?;
        best_sq += b;
        est_sq += e;
    }
    let best_single_rmse = (best_sq / trials as f64).sqrt();
    let effective_rmse = (est_sq / trials as f64).sqrt();
    let gain = if effective_rmse == 0.0 { 1.0 } else { best_single_rmse / effective_rmse };
    Ok(AttackReport {
        k: scenario.epsilons.len(),
        coupling: scenario.coupling,
        estimator: scenario.estimator,
        trials,
        best_single_rmse,
        effective_rmse,
        gain,
    })
}
