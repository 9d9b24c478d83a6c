//! RMSE utility: `sqrt(Σ_(i,j) E‖y_ij − d_i‖²)`, with each expectation
//! estimated by the mean over the observations sharing a release key.

use std::collections::BTreeMap;

use super::DpError;

pub fn squared_error(released: &[f64], truth: &[f64]) -> Result<f64, DpError> {
    if released.len() != truth.len() {
        return Err(DpError::DimensionMismatch { expected: truth.len(), found: released.len() });
    }
    Ok(released.iter().zip(truth).map(|(y, d)| (y - d) * (y - d)).sum())
}

/// Groups observations by key (e.g. sender/receiver pair) and returns the
/// square root of the summed per-key mean squared errors.
pub fn rmse<K, Y, D, I>(observations: I) -> Result<f64, DpError>
where
    K: Ord,
    Y: AsRef<[f64]>,
    D: AsRef<[f64]>,
    I: IntoIterator<Item = (K, Y, D)>,
{
    let mut per_key: BTreeMap<K, (f64, u64)> = BTreeMap::new();
    for (key, y, d) in observations {
        let err = squared_error(y.as_ref(), d.as_ref())?;
        let slot = per_key.entry(key).or_insert((0.0, 0));
        slot.0 += err;
        slot.1 += 1;
    }
    if per_key.is_empty() {
        return Err(DpError::EmptyInput);
    }
    Ok(per_key.values().map(|(s, n)| s / *n as f64).sum::<f64>().sqrt())
}

/// Closed-form `E‖V‖²` for `n` coordinates of `Lap(δ/ε)` noise: `2n(δ/ε)²`.
pub fn expected_laplace_squared_error(dimension: usize, sensitivity: f64, epsilon: f64) -> f64 {
    let b = sensitivity / epsilon;
    2.0 * dimension as f64 * b * b
}
