//! Global sensitivity by exhaustive enumeration over a small record domain.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::DpError;

/// Which datasets count as neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Neighboring {
    /// `D'` is `D` with one record added or removed.
    #[default]
    AddRemove,
    /// `D'` is `D` with one record replaced.
    Substitute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    L2,
}

impl Norm {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

/// `max ‖f(D) − f(D')‖` over neighbouring multisets `D, D'` of at most
/// `max_records` records drawn from `domain`.
pub fn global_sensitivity<T, F>(
    domain: &[T],
    max_records: usize,
    neighboring: Neighboring,
    norm: Norm,
    query: F,
) -> Result<f64, DpError>
where
    T: Clone,
    F: Fn(&[T]) -> Vec<f64>,
{
    if domain.is_empty() {
        return Err(DpError::EmptyDomain);
    }
    let datasets = |k: usize| -> Vec<Vec<usize>> {
        if k == 0 {
            vec![Vec::new()]
        } else {
            (0..domain.len()).combinations_with_replacement(k).collect()
        }
    };
    let eval = |idx: &[usize]| -> Vec<f64> {
        let rows: Vec<T> = idx.iter().map(|&i| domain[i].clone()).collect();
        query(&rows)
    };
    let mut worst: f64 = 0.0;
    let mut check = |a: &[f64], b: &[f64]| -> Result<(), DpError> {
        if a.len() != b.len() {
            return Err(DpError::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        worst = worst.max(norm.distance(a, b));
        Ok(())
    };
    for k in 0..=max_records {
        for d in datasets(k) {
            let fd = eval(&d);
            match neighboring {
                Neighboring::AddRemove if k < max_records => {
                    for extra in 0..domain.len() {
                        let mut bigger = d.clone();
                        bigger.push(extra);
                        check(&fd, &eval(&bigger))?;
                    }
                }
                Neighboring::AddRemove => {}
                Neighboring::Substitute => {
                    for pos in 0..d.len() {
                        for repl in 0..domain.len() {
                            let mut other = d.clone();
                            other[pos] = repl;
                            check(&fd, &eval(&other))?;
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}
