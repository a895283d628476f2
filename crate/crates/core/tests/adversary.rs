mod common;

use itsnet::adversary::{
    build_security_matrix, certify, conditional_mi, conditional_mi_sets, entropy_of, exact_mi_oracle,
    lemma_rank_experiment, simulate_transcript, wilson_interval, LemmaConfig, MiScope, Sampler, Transcript,
};
use itsnet::amplify::{encrypt, ChannelCipherState};
use itsnet::gf2::BitString;
use itsnet::predistribution::{generate, KeyStore, NodeSet, SchemeSpec};
use itsnet::rates::rational;
use itsnet::secure_check::RateProfile;
use itsnet::seed::Seed;
use proptest::prelude::*;

/// Conditional mutual information by inclusion-exclusion over pool scans.
fn scan_conditional_mi(ks: &KeyStore, targets: &[u32], given: &NodeSet) -> i64 {
    let base = common::scan_entropy(ks, given);
    let mut total = 0;
    for mask in 1u32..(1 << targets.len()) {
        let chosen = (0..targets.len()).filter(|b| mask >> b & 1 == 1).map(|b| targets[b]);
        let h = common::scan_entropy(ks, &NodeSet::new(chosen.chain(given.iter()))) - base;
        total += if mask.count_ones() % 2 == 1 { h } else { -h };
    }
    total
}

fn send(ks: &KeyStore, tr: &mut Transcript, i: u32, j: u32, len: usize, d: usize, seed: u64) {
    let mut state = ChannelCipherState::with_weight(i, j, d).unwrap();
    let msg = BitString::random(len, &mut Seed::from(seed).derive(1).rng());
    let ct = encrypt(ks, &mut state, &msg, Seed::from(seed)).unwrap();
    tr.record(ks, ct, d).unwrap();
}

#[test]
fn one_key_bit_leaks_exactly_when_it_comes_from_a_hacked_group() {
    let ks = generate(&SchemeSpec::Combinational { a: 3 }, 4, 3, Seed::from(0)).unwrap();
    let from_hacked = ks.group(&NodeSet::new([1, 2, 4])).unwrap().bits[0];
    let mut leaks = 0;
    for seed in 0..16 {
        let mut tr = Transcript::new(NodeSet::new([4]));
        send(&ks, &mut tr, 1, 2, 1, 1, seed);
        let mi = exact_mi_oracle(&ks, &tr, MiScope::Channel(1, 2)).unwrap();
        let hit = tr.messages[0].rows[0] == vec![from_hacked];
        assert_eq!(mi, if hit { 1.0 } else { 0.0 }, "seed {seed}");
        assert_eq!(build_security_matrix(&ks, &tr).unwrap().full_rank, !hit);
        leaks += usize::from(hit);
    }
    assert!(leaks > 0 && leaks < 16);
}

#[test]
fn conditional_information_of_three_node_groups() {
    let ks = generate(&SchemeSpec::Combinational { a: 3 }, 5, 12, Seed::from(0)).unwrap();
    let size = ks.groups()[0].bits.len() as i64;
    // any two nodes share C(3,1) groups; any three share one
    assert_eq!(conditional_mi(&ks, 2, 0).unwrap(), 3 * size);
    assert_eq!(conditional_mi(&ks, 3, 0).unwrap(), size);
    assert_eq!(conditional_mi(&ks, 4, 0).unwrap(), 0);
    assert_eq!(conditional_mi(&ks, 2, 1).unwrap(), 2 * size);
    assert_eq!(conditional_mi(&ks, 1, 0).unwrap(), entropy_of(&ks, &NodeSet::new([1])) as i64);
    assert!(conditional_mi(&ks, 3, 3).is_err());
}

#[test]
fn interior_profile_is_certified() {
    let ks = generate(&SchemeSpec::Combinational { a: 3 }, 4, 600, Seed::from(2)).unwrap();
    let profile = RateProfile::uniform(4, 1, &rational(1, 18)).unwrap();
    let tr = simulate_transcript(&ks, &profile, 16, Seed::from(5)).unwrap();
    assert_eq!(tr.messages.len(), 6);
    assert_eq!(certify(&ks, &tr, 1).unwrap(), None);
}

#[test]
fn wilson_interval_brackets_the_estimate() {
    for trials in [1u64, 7, 100, 1000] {
        for successes in [0, trials / 3, trials] {
            let (lo, hi) = wilson_interval(successes, trials);
            let p = successes as f64 / trials as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0, "{successes}/{trials}");
        }
    }
}

#[test]
fn full_rank_probability_does_not_grow_with_rows() {
    for sampler in [Sampler::FixedWeight { d: 6 }, Sampler::Bernoulli { c: 1.5 }] {
        let rates: Vec<u64> = (10..=40)
            .step_by(3)
            .map(|k| {
                lemma_rank_experiment(&LemmaConfig { r: 40, k, sampler, trials: 60, seed: Seed::from(8) })
                    .unwrap()
                    .successes
            })
            .collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{sampler:?}: {rates:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracle_information_is_the_rank_deficit(
        seed in any::<u64>(),
        hacked in proptest::option::of(1u32..=5),
        lens in proptest::collection::vec(0usize..4, 3),
        d in 1usize..3,
    ) {
        let ks = generate(&SchemeSpec::Combinational { a: 3 }, 5, 6, Seed::from(seed)).unwrap();
        prop_assume!(ks.u() <= 20);
        let hacked = hacked.map(|h| NodeSet::new([h])).unwrap_or_else(NodeSet::empty);
        let mut tr = Transcript::new(hacked.clone());
        let mut k = 0u64;
        for ((i, j), len) in [(1, 2), (2, 3), (1, 4)].into_iter().zip(lens) {
            if !hacked.contains(i) && !hacked.contains(j) {
                send(&ks, &mut tr, i, j, len, d, seed.wrapping_add(k));
                k += 1;
            }
        }
        let mi = exact_mi_oracle(&ks, &tr, MiScope::All).unwrap();
        let w = build_security_matrix(&ks, &tr).unwrap();
        let deficit = (w.a_matrix.rows() - w.rank) as f64;
        prop_assert!((mi - deficit).abs() < 1e-9, "mi {} deficit {}", mi, deficit);
    }

    #[test]
    fn conditional_information_matches_a_pool_scan(
        seed in any::<u64>(),
        targets in proptest::sample::subsequence(vec![1u32, 2, 3, 4, 5, 6], 1..4),
        given in proptest::sample::subsequence(vec![1u32, 2, 3, 4, 5, 6], 0..3),
    ) {
        let given = NodeSet::new(given.into_iter().filter(|g| !targets.contains(g)));
        let spec = SchemeSpec::Random { p: rational(1, 2) };
        let ks = generate(&spec, 6, 40, Seed::from(seed)).unwrap();
        let nodes = NodeSet::new(targets.iter().copied());
        prop_assert_eq!(conditional_mi_sets(&ks, &nodes, &given).unwrap(), scan_conditional_mi(&ks, &targets, &given));
    }
}
