//! Sigmoid map from community density to a privacy level ε.

use serde::{Deserialize, Serialize};

use super::DpError;

/// Sigmoid parameters: amplitude `omega`, steepness `theta`, shift `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingParams {
    pub omega: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl MappingParams {
    pub fn new(omega: f64, theta: f64, alpha: f64) -> Result<Self, DpError> {
        let p = MappingParams { omega, theta, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DpError> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(DpError::InvalidParams(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(DpError::InvalidParams(format!("theta must be positive, got {}", self.theta)));
        }
        if !self.alpha.is_finite() {
            return Err(DpError::InvalidParams(format!("alpha must be finite, got {}", self.alpha)));
        }
        Ok(())
    }
}

impl Default for MappingParams {
    fn default() -> Self {
        MappingParams { omega: 2.0, theta: 0.5, alpha: 0.5 }
    }
}

/// Sign convention of the sigmoid exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmoidForm {
    /// `ω / (1 + exp(θ/D − α))`: ε grows with density.
    #[default]
    Increasing,
    /// `ω / (1 + exp(−θ/D − α))`: ε shrinks with density.
    Decreasing,
}

/// Density → ε with a floor for density-zero communities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpsilonMapping {
    pub params: MappingParams,
    pub form: SigmoidForm,
    /// ε returned for density exactly 0; defaults to `omega / 1000`.
    pub floor: Option<f64>,
}

impl EpsilonMapping {
    pub fn new(params: MappingParams) -> Self {
        EpsilonMapping { params, ..Default::default() }
    }

    pub fn floor(&self) -> f64 {
        self.floor.unwrap_or(self.params.omega / 1000.0)
    }

    pub fn epsilon(&self, density: f64) -> Result<f64, DpError> {
        if !(0.0..=1.0).contains(&density) {
            return Err(DpError::InvalidDensity(density));
        }
        self.params.validate()?;
        let floor = self.floor();
        if !(floor > 0.0 && floor < self.params.omega) {
            return Err(DpError::InvalidParams(format!("epsilon floor {floor} outside (0, omega)")));
        }
        if density == 0.0 {
            return Ok(floor);
        }
        let MappingParams { omega, theta, alpha } = self.params;
        let x = match self.form {
            SigmoidForm::Increasing => theta / density - alpha,
            SigmoidForm::Decreasing => -theta / density - alpha,
        };
        Ok(omega * logistic_complement(x))
    }
}

/// `1 / (1 + e^x)`, evaluated without overflow and clamped into `(0, 1)`.
fn logistic_complement(x: f64) -> f64 {
    let v = if x > 0.0 {
        let t = (-x).exp();
        t / (1.0 + t)
    } else {
        1.0 / (1.0 + x.exp())
    };
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// ε for a density under the default form and floor.
pub fn map_density_to_epsilon(density: f64, params: &MappingParams) -> Result<f64, DpError> {
    EpsilonMapping::new(*params).epsilon(density)
}
