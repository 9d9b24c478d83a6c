//! Experiment drivers. Each returns its CSV artifacts as strings and is a
//! pure function of `(config, seed)`, except columns suffixed `_nondet`,
//! which hold wall-clock timings.
//!
//! | experiment             | file                         | columns |
//! |------------------------|------------------------------|---------|
//! | `community-similarity` | `density_vs_size.csv`        | `graph,node_count,communities,mean_density` |
//! |                        | `overlap_distribution.csv`   | `graph,multiplicity,nodes` |
//! | `privacy-levels`       | `privacy_levels.csv`         | `community_id,node_count,edge_count,density,uniform_epsilon,personalized_epsilon` |
//! |                        | `pdp_emulated_baseline.csv`  | `node,hops,epsilon` |
//! | `utility`              | `rmse_vs_epsilon.csv`        | `epsilon,dimension,trials,empirical_rmse,expected_rmse` |
//! | `hashrate`             | `hashrate.csv`               | `blocks,fixed_nbits,fixed,ramp` |
//! | `poisoning`            | `aae_vs_size.csv`            | `community_size,adversaries,rounds,acceptance_rate,aae` |
//! | `overhead`             | `overhead.csv`               | `communities,repeats,total_seconds_nondet,per_community_seconds_nondet` |

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;

use crate::community::{detect_communities, network_density, CommunityPartition};
use crate::config::Config;
use crate::dp::{expected_laplace_squared_error, laplace_release, rmse};
use crate::graph::{HealthGraph, NodeId};
use crate::ledger::{required_hashrate, required_hashrate_with, simulate_poisoning};
use crate::rng::{derived, par_trials, seeded};
use crate::Error;

/// Synthetic stand-ins for the two evaluation networks: (label, nodes, edges).
pub const REFERENCE_GRAPHS: [(&str, usize, usize); 2] =
    [("doximity-like", 2122, 14389), ("healthtap-like", 1325, 5231)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CommunitySimilarity,
    PrivacyLevels,
    Utility,
    Hashrate,
    Poisoning,
    Overhead,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::CommunitySimilarity,
        Experiment::PrivacyLevels,
        Experiment::Utility,
        Experiment::Hashrate,
        Experiment::Poisoning,
        Experiment::Overhead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CommunitySimilarity => "community-similarity",
            Experiment::PrivacyLevels => "privacy-levels",
            Experiment::Utility => "utility",
            Experiment::Hashrate => "hashrate",
            Experiment::Poisoning => "poisoning",
            Experiment::Overhead => "overhead",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: &'static str,
    pub csv: String,
}

impl Artifact {
    fn new(file_name: &'static str, header: &str) -> Self {
        Artifact { file_name, csv: format!("{header}\n") }
    }

    fn row(&mut self, fields: fmt::Arguments<'_>) {
        writeln!(self.csv, "{fields}").expect("writing to a String");
    }

    /// Data rows split into fields, header excluded.
    pub fn rows(&self) -> Vec<Vec<&str>> {
        self.csv.lines().skip(1).map(|l| l.split(',').collect()).collect()
    }
}

pub fn run_experiment(experiment: Experiment, config: &Config) -> Result<Vec<Artifact>, Error> {
    config.validate()?;
    match experiment {
        Experiment::CommunitySimilarity => community_similarity(config),
        Experiment::PrivacyLevels => privacy_levels(config),
        Experiment::Utility => utility(config),
        Experiment::Hashrate => hashrate(config),
        Experiment::Poisoning => poisoning(config),
        Experiment::Overhead => overhead(config),
    }
}

pub fn write_artifacts(artifacts: &[Artifact], dir: &Path) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(a.file_name);
            std::fs::write(&path, &a.csv)?;
            Ok(path)
        })
        .collect()
}

/// Nodes per membership count, counting only communities with at least two
/// edges; single-edge leaves never merged with anything.
pub fn overlap_distribution(partition: &CommunityPartition) -> BTreeMap<usize, usize> {
    let mut dist = BTreeMap::new();
    for ids in partition.memberships().values() {
        let k = ids.iter().filter(|&&c| partition.communities[c].edge_count() >= 2).count();
        *dist.entry(k).or_insert(0) += 1;
    }
    dist
}

/// (communities, mean density) keyed by community node count.
pub fn density_by_size(partition: &CommunityPartition) -> BTreeMap<usize, (usize, f64)> {
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for c in &partition.communities {
        let slot = acc.entry(c.node_count()).or_default();
        slot.0 += 1;
        slot.1 += c.density;
    }
    acc.into_iter().map(|(k, (n, s))| (k, (n, s / n as f64))).collect()
}

fn community_similarity(config: &Config) -> Result<Vec<Artifact>, Error> {
    let mut sizes = Artifact::new("density_vs_size.csv", "graph,node_count,communities,mean_density");
    let mut overlap = Artifact::new("overlap_distribution.csv", "graph,multiplicity,nodes");
    for (i, (label, n, m)) in REFERENCE_GRAPHS.into_iter().enumerate() {
        let g = HealthGraph::generate_synthetic(n, m, config.seed.wrapping_add(i as u64 + 1))?;
        let (_, p) = detect_communities(&g, config.detect.threshold)?;
        for (size, (count, mean)) in density_by_size(&p) {
            sizes.row(format_args!("{label},{size},{count},{mean}"));
        }
        for (k, nodes) in overlap_distribution(&p).range(2..) {
            overlap.row(format_args!("{label},{k},{nodes}"));
        }
    }
    Ok(vec![sizes, overlap])
}

fn privacy_levels(config: &Config) -> Result<Vec<Artifact>, Error> {
    let g = config.load_graph()?;
    let (_, p) = detect_communities(&g, config.detect.threshold)?;
    let mapping = config.mapping();
    let uniform = mapping.epsilon(network_density(&p.communities).clamp(0.0, 1.0))?;
    let mut levels = Artifact::new(
        "privacy_levels.csv",
        "community_id,node_count,edge_count,density,uniform_epsilon,personalized_epsilon",
    );
    for c in &p.communities {
        let personal = mapping.epsilon(c.density)?;
        levels.row(format_args!(
            "{},{},{},{},{uniform},{personal}",
            c.id,
            c.node_count(),
            c.edge_count(),
            c.density
        ));
    }

    // Emulated baseline: ε halves with each hop from the highest-degree node.
    let mut baseline = Artifact::new("pdp_emulated_baseline.csv", "node,hops,epsilon");
    let top = mapping.params.omega / 2.0;
    if let Some(source) = g.nodes().max_by_key(|&n| (g.degree(n).unwrap_or(0), std::cmp::Reverse(n))) {
        for (node, hops) in bfs_hops(&g, source)? {
            baseline.row(format_args!("{node},{hops},{}", top / 2f64.powi(hops as i32)));
        }
    }
    Ok(vec![levels, baseline])
}

fn bfs_hops(g: &HealthGraph, source: NodeId) -> Result<BTreeMap<NodeId, usize>, Error> {
    let mut hops = BTreeMap::from([(source, 0)]);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = hops[&u];
        for &v in g.neighbors(u)? {
            if let std::collections::btree_map::Entry::Vacant(e) = hops.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(hops)
}

fn utility(config: &Config) -> Result<Vec<Artifact>, Error> {
    let u = &config.utility;
    let delta = config.coupling.sensitivity;
    let mut out = Artifact::new("rmse_vs_epsilon.csv", "epsilon,dimension,trials,empirical_rmse,expected_rmse");
    for (row, (&eps, &dim)) in u.epsilons.iter().flat_map(|e| u.dimensions.iter().map(move |d| (e, d))).enumerate() {
        let seed = derived(config.seed, row as u64).gen();
        let sums = par_trials(u.trials, seed, |rng, n| -> Result<f64, Error> {
            let truth: Vec<f64> = (0..dim).map(|i| i as f64).collect();
            let mut obs = Vec::with_capacity(n);
            for t in 0..n {
                obs.push((t, laplace_release(&truth, delta, eps, rng)?, truth.clone()));
            }
            // rmse² over single-observation keys is the summed squared error
            Ok(rmse(obs)?.powi(2))
        });
        let total: f64 = sums.into_iter().sum::<Result<f64, Error>>()?;
        let empirical = (total / u.trials as f64).sqrt();
        let expected = expected_laplace_squared_error(dim, delta, eps).sqrt();
        out.row(format_args!("{eps},{dim},{},{empirical},{expected}", u.trials));
    }
    Ok(vec![out])
}

fn hashrate(config: &Config) -> Result<Vec<Artifact>, Error> {
    let rule = config.ledger.ramp();
    let base = config.ledger.ramp_base;
    let mut out = Artifact::new("hashrate.csv", "blocks,fixed_nbits,fixed,ramp");
    for k in 1..=30 {
        let fixed = required_hashrate(k, base)?;
        let ramp = required_hashrate_with(k, &rule)?;
        out.row(format_args!("{k},{base},{fixed},{ramp}"));
    }
    Ok(vec![out])
}

fn poisoning(config: &Config) -> Result<Vec<Artifact>, Error> {
    let l = &config.ledger;
    let mut out = Artifact::new("aae_vs_size.csv", "community_size,adversaries,rounds,acceptance_rate,aae");
    for n in l.min_community_size..=l.max_community_size {
        let r = simulate_poisoning(&l.poisoning(n), derived(config.seed, n as u64).gen())?;
        out.row(format_args!("{n},{},{},{},{}", r.adversaries, r.rounds, r.acceptance_rate, r.aae));
    }
    Ok(vec![out])
}

fn overhead(config: &Config) -> Result<Vec<Artifact>, Error> {
    let mapping = config.mapping();
    let mut rng = seeded(config.seed);
    let mut out = Artifact::new(
        "overhead.csv",
        "communities,repeats,total_seconds_nondet,per_community_seconds_nondet",
    );
    for count in [10usize, 30, 100, 300, 1_000, 3_000, 10_000, 30_000] {
        let densities: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let repeats = (300_000 / count).max(3);
        let start = Instant::now();
        let mut sink = 0.0;
        for _ in 0..repeats {
            for &d in &densities {
                sink += mapping.epsilon(d)?;
            }
        }
        std::hint::black_box(sink);
        let total = start.elapsed().as_secs_f64() / repeats as f64;
        out.row(format_args!("{count},{repeats},{total},{}", total / count as f64));
    }
    Ok(vec![out])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Config {
        let mut c = Config::default();
        c.graph.nodes = 60;
        c.graph.edges = Some(200);
        c.ledger.rounds = 50;
        c.utility.trials = 2000;
        c
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn hashrate_columns() {
        let a = &run_experiment(Experiment::Hashrate, &quick()).unwrap()[0];
        let rows = a.rows();
        assert_eq!(rows.len(), 30);
        assert_eq!(rows[0], vec!["1", "32", "4294967296", "4294967296"]);
        let ramp: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(ramp.windows(2).all(|w| w[0] < w[1]));
        assert!(ramp[29] / ramp[0] > 1e3);
    }

    #[test]
    fn uniform_baseline_is_constant() {
        let arts = run_experiment(Experiment::PrivacyLevels, &quick()).unwrap();
        let rows = arts[0].rows();
        assert!(rows.iter().all(|r| r[4] == rows[0][4]));
        assert!(arts[1].rows().iter().any(|r| r[1] == "0"));
    }

    #[test]
    fn utility_tracks_closed_form() {
        let a = &run_experiment(Experiment::Utility, &quick()).unwrap()[0];
        for r in a.rows() {
            let (emp, exp): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
            assert!((emp / exp - 1.0).abs() < 0.1, "{r:?}");
        }
    }

    #[test]
    fn deterministic_except_timing() {
        let c = quick();
        for e in [Experiment::CommunitySimilarity, Experiment::PrivacyLevels, Experiment::Utility, Experiment::Poisoning] {
            assert_eq!(run_experiment(e, &c).unwrap(), run_experiment(e, &c).unwrap(), "{e}");
        }
        let o = &run_experiment(Experiment::Overhead, &c).unwrap()[0];
        assert_eq!(o.rows().len(), 8);
    }

    #[test]
    fn write_to_dir() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_artifacts(&run_experiment(Experiment::Hashrate, &quick()).unwrap(), dir.path()).unwrap();
        assert!(std::fs::read_to_string(&paths[0]).unwrap().starts_with("blocks,fixed_nbits,fixed,ramp\n"));
    }
}
