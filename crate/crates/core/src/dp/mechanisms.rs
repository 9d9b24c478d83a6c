//! Laplace and exponential mechanisms.

use rand::Rng;

use super::DpError;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), DpError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DpError::NonPositive { name, value })
    }
}

/// `exp(ε)`: the largest admissible ratio `Pr[M(D) ∈ Ω] / Pr[M(D') ∈ Ω]`.
pub fn privacy_ratio_bound(epsilon: f64) -> Result<f64, DpError> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(DpError::NonPositive { name: "epsilon", value: epsilon });
    }
    Ok(epsilon.exp())
}

/// One draw from the zero-mean Laplace distribution with scale `b`.
pub fn sample_laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    // inverse CDF on u ∈ (-1/2, 1/2)
    loop {
        let u: f64 = rng.gen::<f64>() - 0.5;
        if u > -0.5 {
            let mag = -(1.0 - 2.0 * u.abs()).ln();
            return if u < 0.0 { -scale * mag } else { scale * mag };
        }
    }
}

/// Perturbs every coordinate with independent `Lap(δ/ε)` noise.
pub fn laplace_release<R: Rng + ?Sized>(
    value: &[f64],
    sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<Vec<f64>, DpError> {
    require_positive("sensitivity", sensitivity)?;
    require_positive("epsilon", epsilon)?;
    if let Some(bad) = value.iter().find(|v| !v.is_finite()) {
        return Err(DpError::NonFinite(*bad));
    }
    let scale = sensitivity / epsilon;
    Ok(value.iter().map(|v| v + sample_laplace(rng, scale)).collect())
}

/// Selection probabilities `∝ exp(ε·u(o) / (2Δu))`.
pub fn exponential_probabilities(utilities: &[f64], sensitivity: f64, epsilon: f64) -> Result<Vec<f64>, DpError> {
    if utilities.is_empty() {
        return Err(DpError::EmptyCandidates);
    }
    require_positive("sensitivity", sensitivity)?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(DpError::NonPositive { name: "epsilon", value: epsilon });
    }
    if let Some(bad) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(DpError::NonFinite(*bad));
    }
    let scores: Vec<f64> = utilities.iter().map(|u| epsilon * u / (2.0 * sensitivity)).collect();
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Index of the candidate chosen by the exponential mechanism.
pub fn exponential_select<R: Rng + ?Sized>(
    utilities: &[f64],
    sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize, DpError> {
    let probs = exponential_probabilities(utilities, sensitivity, epsilon)?;
    let mut u: f64 = rng.gen();
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return Ok(i);
        }
        u -= p;
    }
    Ok(probs.len() - 1)
}

/// Exponential mechanism over arbitrary candidates with a utility function.
pub fn exponential_release<'a, T, F, R>(
    candidates: &'a [T],
    utility: F,
    sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<&'a T, DpError>
where
    F: Fn(&T) -> f64,
    R: Rng + ?Sized,
{
    let utilities: Vec<f64> = candidates.iter().map(utility).collect();
    let i = exponential_select(&utilities, sensitivity, epsilon, rng)?;
    Ok(&candidates[i])
}
