use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use trustdp::community::{read_partition, write_dendrogram_csv, write_partition};
use trustdp::coupling::{simulate_linkage, AttackReport};
use trustdp::dp::{
    check_tradeoff, expected_laplace_squared_error, parse_records_csv, parse_releases_csv, write_releases_csv,
};
use trustdp::experiments::write_artifacts;
use trustdp::ledger::{hash_hex, simulate_poisoning, DifficultyRule};
use trustdp::{
    detect_communities_with, run_experiment, sanitize_pipeline, AssignmentPolicy, Config, DetectOptions, Error,
    Estimator, Experiment, LinkageScenario, NoiseSource, PrivacyAssignment, SensitiveRecord, SubChain, Transaction,
};

#[derive(Parser)]
#[command(name = "trustdp", version, about = "Density-personalized differential privacy with per-community ledgers")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect link communities and export the node partition.
    Detect {
        /// Edge list; defaults to the configured graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the merge dendrogram as CSV.
        #[arg(long)]
        dendrogram: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        policy: Option<AssignmentPolicy>,
    },
    /// Map community densities from a partition file to privacy levels.
    Epsilon {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Run the personalized sanitization pipeline.
    Sanitize {
        #[arg(long)]
        graph: Option<PathBuf>,
        /// `node,kind,value,candidates` rows; defaults to each node's degree.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        noise: Option<NoiseSource>,
    },
    /// Simulate linkage attacks on multiple releases of one record.
    Linkage {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        estimator: Option<Estimator>,
    },
    /// Sub-chain operations.
    Chain {
        #[command(subcommand)]
        action: ChainCommand,
    },
    /// Run a named experiment and write its CSVs to the output directory.
    Experiment { name: String },
}

#[derive(Subcommand)]
enum ChainCommand {
    /// Mine one block of a community's releases onto a chain file.
    Mine {
        #[arg(long)]
        releases: PathBuf,
        #[arg(long)]
        community: u32,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        timestamp: Option<u32>,
    },
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
    /// Poisoning simulation for one community size.
    Poison {
        #[arg(long, default_value_t = 40)]
        size: usize,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        adversary_fraction: Option<f64>,
    },
    /// Hex dump of every block header.
    Dump {
        #[arg(long)]
        file: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownExperiment(_) | Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

macro_rules! data_err {
    ($e:expr) => {
        Failure::from(Error::from($e))
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir.clone_from(d);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output(cfg: &Config, explicit: Option<PathBuf>, default_name: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
    let path = explicit.unwrap_or_else(|| cfg.out_dir.join(default_name));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let f = File::create(&path)?;
    Ok((path, BufWriter::new(f)))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Detect { graph, out, dendrogram, threshold, policy } => {
            if let Some(g) = graph {
                cfg.graph.file = Some(g);
            }
            let opts = DetectOptions {
                threshold: threshold.or(cfg.detect.threshold),
                policy: policy.unwrap_or(cfg.assignment.policy),
            };
            let g = cfg.load_graph()?;
            let (dendro, p) = detect_communities_with(&g, &opts).map_err(|e| data_err!(e))?;
            let (path, mut w) = output(&cfg, out, "partition.txt")?;
            write_partition(&p, &mut w)?;
            w.flush()?;
            if let Some(d) = dendrogram {
                let (_, mut dw) = output(&cfg, Some(d), "")?;
                write_dendrogram_csv(&dendro, &mut dw)?;
                dw.flush()?;
            }
            println!(
                "{} nodes, {} edges, {} communities, network density {:.6} -> {}",
                g.node_count(),
                g.edge_count(),
                p.communities.len(),
                p.network_density,
                path.display()
            );
        }
        Command::Epsilon { partition, out, budget } => {
            let f = File::open(&partition).map_err(|e| Failure::Data(format!("{}: {e}", partition.display())))?;
            let records = read_partition(BufReader::new(f)).map_err(|e| data_err!(e))?;
            let mapping = cfg.mapping();
            let mut densities = std::collections::BTreeMap::new();
            for r in &records {
                densities.insert(r.community, r.density);
            }
            let per_community = densities
                .iter()
                .map(|(&c, &d)| mapping.epsilon(d).map(|e| (c, e)))
                .collect::<Result<_, _>>()
                .map_err(|e| data_err!(e))?;
            let mut assignment = PrivacyAssignment::new(per_community, 0.0);
            assignment.budget = budget.or(cfg.budget.value).unwrap_or(assignment.total_epsilon);
            let (path, mut w) = output(&cfg, out, "epsilon.csv")?;
            writeln!(w, "community_id,density,epsilon")?;
            for (c, e) in &assignment.per_community_epsilon {
                writeln!(w, "{c},{},{e}", densities[c])?;
            }
            w.flush()?;
            let delta = cfg.coupling.sensitivity;
            let expected_rmse = assignment
                .per_community_epsilon
                .values()
                .map(|&e| expected_laplace_squared_error(1, delta, e))
                .sum::<f64>()
                .sqrt();
            let report = check_tradeoff(
                &assignment,
                cfg.budget.rmse_bound.unwrap_or(expected_rmse),
                expected_rmse,
                cfg.budget.direction,
            );
            println!(
                "{} communities, total epsilon {:.6}, budget {:.6} ({}), expected rmse {:.6} ({}) -> {}",
                assignment.per_community_epsilon.len(),
                report.total_epsilon,
                report.budget,
                if report.budget_ok { "ok" } else { "violated" },
                report.observed_rmse,
                if report.utility_ok { "ok" } else { "violated" },
                path.display()
            );
        }
        Command::Sanitize { graph, records, out, noise } => {
            if let Some(g) = graph {
                cfg.graph.file = Some(g);
            }
            if let Some(n) = noise {
                cfg.coupling.noise_source = n;
            }
            let g = cfg.load_graph()?;
            let records = match records {
                Some(p) => parse_records_csv(&read_text(&p)?).map_err(|e| data_err!(e))?,
                None => g
                    .nodes()
                    .map(|n| (n, SensitiveRecord::Numeric(vec![g.degree(n).unwrap_or(0) as f64])))
                    .collect(),
            };
            let result = sanitize_pipeline(&g, &records, &cfg.pipeline(), cfg.seed).map_err(|e| data_err!(e))?;
            let (path, mut w) = output(&cfg, out, "releases.csv")?;
            write_releases_csv(&result.releases, &mut w)?;
            w.flush()?;
            println!(
                "{} records, {} releases over {} communities -> {}",
                records.len(),
                result.releases.len(),
                result.partition.communities.len(),
                path.display()
            );
        }
        Command::Linkage { out, trials, estimator } => {
            let trials = trials.unwrap_or(cfg.coupling.trials);
            let estimators: Vec<Estimator> = estimator.map_or(Estimator::ALL.to_vec(), |e| vec![e]);
            let (path, mut w) = output(&cfg, out, "linkage.csv")?;
            writeln!(w, "{}", AttackReport::CSV_HEADER)?;
            let mut id = 0;
            for coupling in [NoiseSource::Independent, NoiseSource::Coupled] {
                for &est in &estimators {
                    let mut s = LinkageScenario::new(cfg.coupling.epsilons.clone(), coupling, est);
                    s.sensitivity = cfg.coupling.sensitivity;
                    let r = simulate_linkage(&s, trials, cfg.seed.wrapping_add(id as u64)).map_err(|e| data_err!(e))?;
                    r.write_csv_row(id, &mut w)?;
                    println!("{coupling:>11} {est:<18} gain {:.4}", r.gain);
                    id += 1;
                }
            }
            w.flush()?;
            println!("-> {}", path.display());
        }
        Command::Chain { action } => chain(&cfg, action)?,
        Command::Experiment { name } => {
            let exp: Experiment = name.parse()?;
            let artifacts = run_experiment(exp, &cfg)?;
            for p in write_artifacts(&artifacts, &cfg.out_dir)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn chain(cfg: &Config, action: ChainCommand) -> Result<(), Failure> {
    match action {
        ChainCommand::Mine { releases, community, file, timestamp } => {
            let releases = parse_releases_csv(&read_text(&releases)?).map_err(|e| data_err!(e))?;
            let mut chain = if file.exists() {
                let c = SubChain::load(&file).map_err(|e| data_err!(e))?;
                let report = c.validate();
                if !report.is_valid() {
                    return Err(Failure::Data(format!("refusing to extend {}: {report}", file.display())));
                }
                if c.community_id != community {
                    return Err(Failure::Data(format!("{} holds community {}", file.display(), c.community_id)));
                }
                c
            } else {
                SubChain::new(community, DifficultyRule::Fixed { nbits: cfg.ledger.nbits }).map_err(|e| data_err!(e))?
            };
            let tip_time = chain.blocks.last().map_or(0, |b| b.header.timestamp);
            let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()) as u32;
            let ts = timestamp.unwrap_or(now).max(tip_time);
            let txs = releases
                .iter()
                .filter(|r| r.community_id == community as usize)
                .map(|r| Transaction::from_release(r, ts))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| data_err!(e))?;
            if txs.is_empty() {
                return Err(Failure::Data(format!("no releases for community {community}")));
            }
            let n = txs.len();
            let attempts = chain.mine_next(txs, ts, cfg.ledger.max_attempts).map_err(|e| data_err!(e))?;
            chain.append_last(&file).map_err(|e| data_err!(e))?;
            let b = chain.blocks.last().expect("just mined");
            println!(
                "block {} ({n} txs) nonce {} after {attempts} attempts, hash {}",
                chain.len() - 1,
                b.header.nonce,
                hash_hex(&b.hash())
            );
        }
        ChainCommand::Validate { file } => {
            let c = SubChain::load(&file).map_err(|e| data_err!(e))?;
            let report = c.validate();
            if !report.is_valid() {
                return Err(Failure::Data(format!("{}: {report}", file.display())));
            }
            println!("{}: {report}", file.display());
        }
        ChainCommand::Poison { size, rounds, adversary_fraction } => {
            let mut p = cfg.ledger.poisoning(size);
            if let Some(r) = rounds {
                p.rounds = r;
            }
            if let Some(f) = adversary_fraction {
                p.adversary_fraction = f;
            }
            p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let r = simulate_poisoning(&p, cfg.seed).map_err(|e| data_err!(e))?;
            println!("community_size,adversaries,rounds,acceptance_rate,aae");
            println!("{},{},{},{},{}", r.validators, r.adversaries, r.rounds, r.acceptance_rate, r.aae);
        }
        ChainCommand::Dump { file } => {
            let c = SubChain::load(&file).map_err(|e| data_err!(e))?;
            match c.dump_headers(io::stdout().lock()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}
