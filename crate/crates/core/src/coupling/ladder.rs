use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use super::CouplingError;
use crate::dp::sample_laplace;

/// Largest `|τ| = 1 − ε_lo/ε_hi` allowed in a single multivariate step.
pub const MAX_STEP_TAU: f64 = 0.01;

/// Noise samples `V_ε` at a sorted set of privacy levels, coupled so the
/// family is Markov in ε while each level keeps a Laplace marginal.
///
/// The top level is drawn fresh. Walking down from `ε_hi` to `ε_lo`, the
/// previous sample is kept with probability `(ε_lo/ε_hi)²`; otherwise an
/// independent jump drawn at `ε_lo` is added. Since a level-ε jump has
/// characteristic function `ε²/(ε²+|t|²)`, the mixture reproduces exactly that
/// function at `ε_lo`. In one dimension this is `Lap(1/ε)`; in `n`
/// dimensions it is the symmetric multivariate Laplace law (a Gaussian scale
/// mixture), whose every coordinate is `Lap(1/ε)`. Multivariate walks are
/// split into steps with `|τ| ≤` [`MAX_STEP_TAU`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseLadder {
    levels: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

impl NoiseLadder {
    /// `levels` must be positive and non-decreasing; equal levels share one sample.
    pub fn build<R: Rng + ?Sized>(levels: &[f64], dimension: usize, rng: &mut R) -> Result<Self, CouplingError> {
        validate_levels(levels)?;
        if dimension == 0 {
            return Err(CouplingError::ZeroDimension);
        }
        let top = levels.len() - 1;
        let mut samples = vec![Vec::new(); levels.len()];
        samples[top] = jump(levels[top], dimension, rng);
        for i in (0..top).rev() {
            let mut v = samples[i + 1].clone();
            if dimension == 1 {
                step(&mut v, levels[i + 1], levels[i], rng);
            } else {
                let ratio = levels[i] / levels[i + 1];
                let k = if ratio >= 1.0 - MAX_STEP_TAU {
                    1
                } else {
                    (ratio.ln() / (1.0 - MAX_STEP_TAU).ln()).ceil() as u32
                };
                let rho = ratio.powf(1.0 / f64::from(k));
                let mut hi = levels[i + 1];
                for s in 1..=k {
                    let lo = if s == k { levels[i] } else { levels[i + 1] * rho.powi(s as i32) };
                    step(&mut v, hi, lo, rng);
                    hi = lo;
                }
            }
            samples[i] = v;
        }
        Ok(NoiseLadder { levels: levels.to_vec(), samples })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dimension(&self) -> usize {
        self.samples[0].len()
    }

    pub fn sample(&self, index: usize) -> &[f64] {
        &self.samples[index]
    }

    /// Sample at an exact level value.
    pub fn at(&self, epsilon: f64) -> Option<&[f64]> {
        self.levels.iter().position(|&l| l == epsilon).map(|i| self.samples[i].as_slice())
    }
}

fn validate_levels(levels: &[f64]) -> Result<(), CouplingError> {
    if levels.is_empty() {
        return Err(CouplingError::NoLevels);
    }
    if let Some(&bad) = levels.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(CouplingError::NonPositiveLevel(bad));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(CouplingError::UnsortedLevels);
    }
    Ok(())
}

/// Conditional move from level `hi` to level `lo ≤ hi`.
fn step<R: Rng + ?Sized>(v: &mut [f64], hi: f64, lo: f64, rng: &mut R) {
    let keep = (lo / hi).powi(2);
    if keep >= 1.0 || rng.gen::<f64>() < keep {
        return;
    }
    let j = jump(lo, v.len(), rng);
    for (x, j) in v.iter_mut().zip(j) {
        *x += j;
    }
}

/// Fresh draw with characteristic function `ε²/(ε²+|t|²)`.
fn jump<R: Rng + ?Sized>(epsilon: f64, dimension: usize, rng: &mut R) -> Vec<f64> {
    if dimension == 1 {
        return vec![sample_laplace(rng, 1.0 / epsilon)];
    }
    // V = sqrt(W)·Z with W ~ Exp(rate ε²/2), Z standard normal
    let w: f64 = Exp::new(epsilon * epsilon / 2.0).expect("positive rate").sample(rng);
    let s = w.sqrt();
    (0..dimension).map(|_| s * Distribution::<f64>::sample(&StandardNormal, rng)).collect()
}
