//! Run configuration, read from TOML with dotted keys such as
//! `mapping.omega = 2.0` or `ledger.adversary_fraction = 0.2`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::community::AssignmentPolicy;
use crate::coupling::{NoiseSource, MIN_TRIALS};
use crate::dp::{BudgetDirection, EpsilonMapping, MappingParams, PipelineConfig, SigmoidForm};
use crate::graph::HealthGraph;
use crate::ledger::{DifficultyRule, PoisoningConfig};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub graph: GraphConfig,
    pub mapping: MappingConfig,
    pub epsilon: EpsilonConfig,
    pub budget: BudgetConfig,
    pub assignment: AssignmentConfig,
    pub detect: DetectConfig,
    pub coupling: CouplingConfig,
    pub ledger: LedgerConfig,
    pub utility: UtilityConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            out_dir: PathBuf::from("out"),
            graph: GraphConfig::default(),
            mapping: MappingConfig::default(),
            epsilon: EpsilonConfig::default(),
            budget: BudgetConfig::default(),
            assignment: AssignmentConfig::default(),
            detect: DetectConfig::default(),
            coupling: CouplingConfig::default(),
            ledger: LedgerConfig::default(),
            utility: UtilityConfig::default(),
        }
    }
}

/// Edge-list file, or a synthetic graph with `edges` (preferred) or
/// `average_degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub file: Option<PathBuf>,
    pub nodes: usize,
    pub edges: Option<usize>,
    pub average_degree: Option<f64>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { file: None, nodes: 1325, edges: Some(5231), average_degree: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    pub omega: f64,
    pub theta: f64,
    pub alpha: f64,
    /// Use `exp(−θ/D − α)`, under which ε falls as density rises.
    pub decreasing_sign: bool,
}

impl Default for MappingConfig {
    fn default() -> Self {
        let p = MappingParams::default();
        MappingConfig { omega: p.omega, theta: p.theta, alpha: p.alpha, decreasing_sign: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonConfig {
    /// ε for density-zero communities; `omega / 1000` when unset.
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    /// Network budget `B`; unset means the total assigned ε.
    pub value: Option<f64>,
    pub direction: BudgetDirection,
    pub rmse_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignmentConfig {
    pub policy: AssignmentPolicy,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectConfig {
    /// Fixed similarity cut; unset maximizes partition density.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub noise_source: NoiseSource,
    pub sensitivity: f64,
    pub trials: usize,
    /// ε of each release in the linkage experiment.
    pub epsilons: Vec<f64>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            noise_source: NoiseSource::Coupled,
            sensitivity: 1.0,
            trials: 100_000,
            epsilons: vec![0.5, 1.0, 1.5, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerConfig {
    /// Difficulty of freshly mined blocks.
    pub nbits: u32,
    pub max_attempts: u64,
    /// Difficulty ramp used for the hash-rate table.
    pub ramp_base: u32,
    pub ramp_every: u32,
    pub min_community_size: usize,
    pub max_community_size: usize,
    pub adversary_fraction: f64,
    pub poison_fraction: f64,
    pub rounds: usize,
    pub records: usize,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            nbits: 16,
            max_attempts: 1 << 32,
            ramp_base: 32,
            ramp_every: 3,
            min_community_size: 5,
            max_community_size: 60,
            adversary_fraction: 0.2,
            poison_fraction: 0.2,
            rounds: 1000,
            records: 50,
        }
    }
}

impl LedgerConfig {
    pub fn ramp(&self) -> DifficultyRule {
        DifficultyRule::Ramp { base: self.ramp_base, every: self.ramp_every }
    }

    pub fn poisoning(&self, validators: usize) -> PoisoningConfig {
        PoisoningConfig {
            validators,
            adversary_fraction: self.adversary_fraction,
            poison_fraction: self.poison_fraction,
            rounds: self.rounds,
            records: self.records,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UtilityConfig {
    pub epsilons: Vec<f64>,
    pub dimensions: Vec<usize>,
    pub trials: usize,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        UtilityConfig {
            epsilons: (1..=8).map(|i| f64::from(i) * 0.25).collect(),
            dimensions: vec![1, 3],
            trials: 20_000,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        self.mapping().epsilon(1.0).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(v) = self.budget.value {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("budget.value must be positive, got {v}"));
            }
        }
        if let Some(t) = self.detect.threshold {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("detect.threshold must lie in [0, 1], got {t}"));
            }
        }
        if self.graph.file.is_none() && self.graph.edges.is_none() && self.graph.average_degree.is_none() {
            return bad("graph needs file, edges or average_degree".into());
        }
        if !(self.coupling.sensitivity.is_finite() && self.coupling.sensitivity > 0.0) {
            return bad("coupling.sensitivity must be positive".into());
        }
        if self.coupling.trials < MIN_TRIALS {
            return bad(format!("coupling.trials must be at least {MIN_TRIALS}"));
        }
        if self.coupling.epsilons.is_empty() || self.coupling.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad("coupling.epsilons must be a non-empty list of positive values".into());
        }
        if self.utility.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0))
            || self.utility.dimensions.contains(&0)
            || self.utility.trials == 0
        {
            return bad("utility needs positive epsilons, dimensions and trials".into());
        }
        let l = &self.ledger;
        if l.min_community_size == 0 || l.min_community_size > l.max_community_size {
            return bad("ledger community sizes must satisfy 1 <= min <= max".into());
        }
        let ledger_err = |e: crate::ledger::LedgerError| Error::Config(e.to_string());
        self.ledger.ramp().validate().map_err(ledger_err)?;
        self.ledger.poisoning(l.min_community_size).validate().map_err(ledger_err)?;
        if l.nbits > crate::ledger::MAX_NBITS {
            return bad(format!("ledger.nbits must be at most 255, got {}", l.nbits));
        }
        Ok(())
    }

    pub fn mapping(&self) -> EpsilonMapping {
        let m = &self.mapping;
        EpsilonMapping {
            params: MappingParams { omega: m.omega, theta: m.theta, alpha: m.alpha },
            form: if m.decreasing_sign { SigmoidForm::Decreasing } else { SigmoidForm::Increasing },
            floor: self.epsilon.floor,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            mapping: self.mapping(),
            policy: self.assignment.policy,
            noise_source: self.coupling.noise_source,
            sensitivity: self.coupling.sensitivity,
            threshold: self.detect.threshold,
        }
    }

    /// The configured graph; synthetic graphs are seeded with `seed`.
    pub fn load_graph(&self) -> Result<HealthGraph, Error> {
        let g = &self.graph;
        Ok(match (&g.file, g.edges, g.average_degree) {
            (Some(path), _, _) => HealthGraph::load_edge_list(path)?,
            (None, Some(m), _) => HealthGraph::generate_synthetic(g.nodes, m, self.seed)?,
            (None, None, Some(d)) => HealthGraph::generate_with_average_degree(g.nodes, d, self.seed)?,
            (None, None, None) => return Err(Error::Config("graph needs file, edges or average_degree".into())),
        })
    }
}
