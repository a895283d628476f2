//! Independent oracles shared by the integration tests. Everything here is
//! written from first principles on top of the public keystore accessors so
//! that it can be compared against the library's optimised paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use itsnet::multipath::Topology;
use itsnet::predistribution::{KeyStore, NodeId, NodeSet};
use itsnet::rates::Rational;
use itsnet::secure_check::{Pair, RateProfile};

/// Pool bits shared by both endpoints of a channel and by no hacked node,
/// found by scanning every pool index and asking who holds it.
pub fn scan_unhacked_union(ks: &KeyStore, channels: &[Pair], hacked: &NodeSet) -> u64 {
    (0..ks.u())
        .filter(|&b| {
            let holders = holders_of(ks, b);
            holders.is_disjoint(hacked) && channels.iter().any(|&(i, j)| holders.contains(i) && holders.contains(j))
        })
        .count() as u64
}

/// Holders of pool bit `b`; bits nobody stores have an empty holder set.
pub fn holders_of(ks: &KeyStore, b: usize) -> NodeSet {
    ks.holders(b).cloned().unwrap_or_else(NodeSet::empty)
}

pub fn scan_r_secrecy(ks: &KeyStore, channels: &[Pair], hacked: &NodeSet) -> Rational {
    Rational::new(scan_unhacked_union(ks, channels, hacked).into(), ks.l().into())
}

/// Per-channel bitmasks over the pool, built from the holder scan.
pub struct PoolMasks {
    words: usize,
    channel: Vec<(Pair, Vec<u64>)>,
}

impl PoolMasks {
    pub fn new(ks: &KeyStore) -> Self {
        let words = ks.u().div_ceil(64);
        let channel = (1..=ks.n())
            .tuple_combinations()
            .map(|(i, j)| {
                let mut mask = vec![0u64; words];
                for b in 0..ks.u() {
                    let h = holders_of(ks, b);
                    if h.contains(i) && h.contains(j) {
                        mask[b / 64] |= 1 << (b % 64);
                    }
                }
                ((i, j), mask)
            })
            .collect();
        PoolMasks { words, channel }
    }

    pub fn hacked_mask(&self, ks: &KeyStore, hacked: &NodeSet) -> Vec<u64> {
        let mut mask = vec![0u64; self.words];
        for b in 0..ks.u() {
            if !holders_of(ks, b).is_disjoint(hacked) {
                mask[b / 64] |= 1 << (b % 64);
            }
        }
        mask
    }

    pub fn mask(&self, pair: Pair) -> &[u64] {
        &self.channel.iter().find(|(p, _)| *p == pair).expect("pair").1
    }

    pub fn union_size(&self, pairs: &[Pair], hacked_mask: &[u64]) -> u64 {
        let mut acc = vec![0u64; self.words];
        for &p in pairs {
            for (a, m) in acc.iter_mut().zip(self.mask(p)) {
                *a |= m;
            }
        }
        acc.iter().zip(hacked_mask).map(|(a, h)| (a & !h).count_ones() as u64).sum()
    }
}

/// Outcome of the brute-force region test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteVerdict {
    pub achievable: bool,
    /// Every violating (hacked set, channel set), with the oracle union size.
    pub violations: Vec<(NodeSet, Vec<Pair>, u64)>,
}

/// Enumerates every hacked set of size at most `t` and every subset of the
/// positive-rate unhacked channels; a subset violates when its rate sum is
/// positive and at least its shared unhacked rate.
pub fn brute_force_region(ks: &KeyStore, profile: &RateProfile, t: u32) -> BruteVerdict {
    let masks = PoolMasks::new(ks);
    let l = Rational::from_integer(ks.l().into());
    let mut violations = Vec::new();
    for k in 0..=t as usize {
        for hacked in (1..=ks.n()).combinations(k) {
            let hacked = NodeSet::from_sorted(hacked);
            let hm = masks.hacked_mask(ks, &hacked);
            let live: Vec<(Pair, Rational)> = profile
                .positive()
                .filter(|((i, j), _)| !hacked.contains(*i) && !hacked.contains(*j))
                .map(|(p, r)| (p, r.clone()))
                .collect();
            for subset in (1..=live.len()).flat_map(|s| live.iter().combinations(s)) {
                let sum: Rational = subset.iter().map(|(_, r)| r.clone()).sum();
                let pairs: Vec<Pair> = subset.iter().map(|(p, _)| *p).collect();
                let union = masks.union_size(&pairs, &hm);
                if &sum * &l >= Rational::from_integer(union.into()) {
                    violations.push((hacked.clone(), pairs, union));
                }
            }
        }
    }
    BruteVerdict {
        achievable: violations.is_empty(),
        violations,
    }
}

/// Minimum over hacked sets of size exactly `t` and `w` unhacked channels of
/// the shared unhacked rate, by exhaustive search.
pub fn exhaustive_r_secrecy_w(ks: &KeyStore, t: u32, w: usize) -> Rational {
    let masks = PoolMasks::new(ks);
    let mut best: Option<u64> = None;
    for hacked in (1..=ks.n()).combinations(t as usize) {
        let hacked = NodeSet::from_sorted(hacked);
        let hm = masks.hacked_mask(ks, &hacked);
        let free: Vec<NodeId> = (1..=ks.n()).filter(|i| !hacked.contains(*i)).collect();
        let pairs: Vec<Pair> = free.iter().copied().tuple_combinations().collect();
        for subset in pairs.into_iter().combinations(w) {
            let u = masks.union_size(&subset, &hm);
            best = Some(best.map_or(u, |b| b.min(u)));
        }
    }
    Rational::new(best.expect("at least one channel set").into(), ks.l().into())
}

/// Number of distinct pool bits held by any node of `nodes`, by pool scan.
pub fn scan_entropy(ks: &KeyStore, nodes: &NodeSet) -> i64 {
    (0..ks.u())
        .filter(|&b| !holders_of(ks, b).is_disjoint(nodes))
        .count() as i64
}

/// Largest number of internally node-disjoint `s`-`dst` paths, computed as
/// the smallest separating vertex set (plus one for a direct edge) over all
/// subsets of the other vertices.
pub fn brute_force_min_separator(g: &Topology, s: NodeId, dst: NodeId) -> usize {
    let others: Vec<NodeId> = (1..=g.n()).filter(|&v| v != s && v != dst).collect();
    let direct = usize::from(g.has_edge(s, dst));
    let mut best = usize::MAX;
    for mask in 0u32..(1 << others.len()) {
        let removed: BTreeSet<NodeId> = (0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
        if removed.len() >= best {
            continue;
        }
        if !reachable_without(g, s, dst, &removed) {
            best = removed.len();
        }
    }
    best + direct
}

/// Whether `dst` is reachable from `s` avoiding `removed` and the direct edge.
fn reachable_without(g: &Topology, s: NodeId, dst: NodeId, removed: &BTreeSet<NodeId>) -> bool {
    let mut seen = BTreeSet::from([s]);
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if v == s && w == dst {
                continue;
            }
            if w == dst {
                return true;
            }
            if !removed.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    false
}

/// Checks that `paths` are simple `s`-`dst` paths over edges of `g` sharing
/// no internal node.
pub fn paths_are_valid(g: &Topology, s: NodeId, dst: NodeId, paths: &[Vec<NodeId>]) -> bool {
    let mut used = BTreeSet::new();
    let mut direct = 0;
    for p in paths {
        if p.first() != Some(&s) || p.last() != Some(&dst) || p.len() < 2 {
            return false;
        }
        if !p.windows(2).all(|e| g.has_edge(e[0], e[1])) {
            return false;
        }
        if p.len() == 2 {
            direct += 1;
        }
        for &v in &p[1..p.len() - 1] {
            if !used.insert(v) || v == s || v == dst {
                return false;
            }
        }
    }
    direct <= 1
}
