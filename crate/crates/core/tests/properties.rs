use std::collections::BTreeMap;

use proptest::prelude::*;

use trustdp::coupling::NoiseLadder;
use trustdp::dp::{PipelineConfig, SensitiveRecord};
use trustdp::experiments::{run_experiment, Experiment};
use trustdp::ledger::{merkle_root, simulate_poisoning, BlockHeader, PoisoningConfig, SubChain, Transaction};
use trustdp::rng::derived;
use trustdp::{
    detect_communities, sanitize_pipeline, Config, DifficultyRule, EpsilonMapping, HealthGraph, MappingParams, NodeId,
};

fn small_graph() -> impl Strategy<Value = HealthGraph> {
    prop::collection::vec((0u32..12, 0u32..12), 1..30).prop_filter_map("needs an edge", |pairs| {
        let g = HealthGraph::from_edges(pairs.into_iter().filter(|(a, b)| a != b)).ok()?;
        (g.edge_count() > 0).then_some(g)
    })
}

fn transaction() -> impl Strategy<Value = Transaction> {
    (0u32..100, 1u32..5000, any::<u32>(), prop::collection::vec(any::<u8>(), 1..40))
        .prop_map(|(r, e, t, p)| Transaction::new(NodeId(r), 0, e, t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(g in small_graph()) {
        let back = HealthGraph::parse_edge_list(&g.to_edge_list_string()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn adjacency_is_symmetric(g in small_graph()) {
        for u in g.nodes() {
            for &v in g.neighbors(u).unwrap() {
                prop_assert!(g.neighbors(v).unwrap().contains(&u));
            }
        }
    }

    #[test]
    fn generator_is_pure(n in 2usize..40, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let m = ((n * (n - 1) / 2) as f64 * frac) as usize;
        let a = HealthGraph::generate_synthetic(n, m, seed).unwrap();
        prop_assert_eq!(a.edge_count(), m);
        prop_assert_eq!(a, HealthGraph::generate_synthetic(n, m, seed).unwrap());
    }

    #[test]
    fn detection_invariants(g in small_graph()) {
        let (dendro, p) = detect_communities(&g, None).unwrap();
        let sims: Vec<_> = dendro.steps.iter().map(|s| s.similarity).collect();
        prop_assert!(sims.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((0.0..=1.0).contains(&p.network_density));
        for c in &p.communities {
            prop_assert!((0.0..=1.0).contains(&c.density));
        }
        // every edge lands in exactly one community
        prop_assert_eq!(p.total_edges(), g.edge_count());
        // every node is assigned
        for u in g.nodes() {
            prop_assert!(p.assigned_community(u).is_some());
        }
        let (_, again) = detect_communities(&g, None).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn mapping_is_monotone(a in 0.001f64..1.0, b in 0.001f64..1.0,
                           omega in 0.1f64..5.0, theta in 0.01f64..0.5, alpha in 0.0f64..2.0) {
        let m = EpsilonMapping::new(MappingParams::new(omega, theta, alpha).unwrap());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (el, eh) = (m.epsilon(lo).unwrap(), m.epsilon(hi).unwrap());
        prop_assert!(el <= eh);
        prop_assert!(el > 0.0 && eh < omega);
    }

    #[test]
    fn pipeline_is_pure_in_seed(g in small_graph(), seed in any::<u64>()) {
        let records: BTreeMap<NodeId, SensitiveRecord> =
            g.nodes().map(|u| (u, SensitiveRecord::Numeric(vec![f64::from(u.0), 1.0]))).collect();
        let cfg = PipelineConfig::default();
        let a = sanitize_pipeline(&g, &records, &cfg, seed).unwrap();
        let b = sanitize_pipeline(&g, &records, &cfg, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn merkle_root_is_order_sensitive(txs in prop::collection::vec(transaction(), 2..8)) {
        prop_assume!(txs[0] != txs[1]);
        let mut swapped = txs.clone();
        swapped.swap(0, 1);
        prop_assert_ne!(merkle_root(&txs).unwrap(), merkle_root(&swapped).unwrap());
    }

    #[test]
    fn header_round_trip(parent in any::<[u8; 32]>(), root in any::<[u8; 32]>(),
                         timestamp in any::<u32>(), nbits in 0u32..256, nonce in any::<u32>()) {
        let h = BlockHeader { version: 3, parent_hash: parent, merkle_root: root, timestamp, nbits, nonce };
        prop_assert_eq!(BlockHeader::from_bytes(&h.to_bytes()).unwrap(), h);
    }

    #[test]
    fn chain_tampering_is_detected(txs in prop::collection::vec(transaction(), 1..4), bit in any::<prop::sample::Index>()) {
        let mut chain = SubChain::new(0, DifficultyRule::Fixed { nbits: 4 }).unwrap();
        chain.mine_next(txs.clone(), 1, 1 << 20).unwrap();
        chain.mine_next(txs, 2, 1 << 20).unwrap();
        let mut bytes = chain.to_bytes();
        let i = bit.index(bytes.len() * 8);
        bytes[i / 8] ^= 1 << (i % 8);
        let caught = SubChain::from_bytes(&bytes).map_or(true, |c| !c.validate().is_valid());
        prop_assert!(caught);
    }

    #[test]
    fn mining_is_deterministic(txs in prop::collection::vec(transaction(), 1..4), ts in any::<u32>()) {
        let mine = || {
            let mut c = SubChain::new(0, DifficultyRule::Fixed { nbits: 6 }).unwrap();
            c.mine_next(txs.clone(), ts, 1 << 20).unwrap();
            c
        };
        prop_assert_eq!(mine(), mine());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn honest_majority_blocks_poisoning(n in 3usize..40, f in 0.0f64..0.5, q in 0.01f64..1.0, seed in any::<u64>()) {
        let cfg = PoisoningConfig::new(n, f, q, 50);
        prop_assume!(2 * cfg.adversaries() < n);
        let r = simulate_poisoning(&cfg, seed).unwrap();
        prop_assert_eq!(r.acceptance_rate, 0.0);
        prop_assert_eq!(r.aae, 0.0);
    }
}

fn ladder_column(levels: &[f64], index: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = derived(seed, 0);
    let mut out: Vec<f64> = (0..n).map(|_| NoiseLadder::build(levels, 1, &mut rng).unwrap().sample(index)[0]).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

// Adding a coarser or finer level must not disturb the noise seen at an existing level.
#[test]
fn ladder_errors_are_local_to_their_level() {
    let n = 20_000;
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    let base = ladder_column(&[1.0], 0, n, 1);
    for (levels, idx) in [(&[0.5, 1.0][..], 1), (&[1.0, 2.0][..], 0), (&[0.25, 1.0, 4.0][..], 1)] {
        let other = ladder_column(levels, idx, n, 2);
        let d = two_sample_ks(&base, &other);
        assert!(d < critical, "levels {levels:?}: KS {d} >= {critical}");
    }
}

// The step from the middle level down depends only on the middle value, not on
// how many levels sit above it.
#[test]
fn ladder_is_markov() {
    let trials = 200_000;
    let keep_rate = |levels: &[f64], lo: usize| {
        let mut rng = derived(3, levels.len() as u64);
        let kept = (0..trials)
            .filter(|_| {
                let l = NoiseLadder::build(levels, 1, &mut rng).unwrap();
                l.sample(lo) == l.sample(lo + 1)
            })
            .count();
        kept as f64 / trials as f64
    };
    let short = keep_rate(&[0.5, 1.0], 0);
    let long = keep_rate(&[0.5, 1.0, 2.0, 4.0], 0);
    assert!((short - long).abs() < 0.01, "{short} vs {long}");
    assert!((short - 0.25).abs() < 0.01);
}

#[test]
fn experiments_are_deterministic() {
    let mut cfg = Config::default();
    cfg.ledger.rounds = 20;
    for e in [Experiment::PrivacyLevels, Experiment::Hashrate, Experiment::Poisoning] {
        assert_eq!(run_experiment(e, &cfg).unwrap(), run_experiment(e, &cfg).unwrap(), "{}", e.name());
    }
}
