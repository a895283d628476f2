//! Achievability of channel-rate profiles against up to `t` hacked nodes.
//!
//! Three checkers are provided:
//!
//! * [`check_exact`] enumerates every hacked set and every channel subset of a
//!   realized keystore. It decides achievability exactly but is exponential,
//!   so it refuses networks above a configurable size.
//! * [`check_relaxed`] compares, for each subset size `w`, the `w` largest
//!   rates against the closed-form minimum shared rate of `w` channels. A
//!   pass is sufficient for achievability; a failure is only advisory.
//! * [`check_feasibility`] builds an explicit split of every channel's rate
//!   over the groups serving it and checks each group's capacity. A pass is
//!   sufficient; a failure never proves non-achievability.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplify::channel;
use crate::error::{Error, Result};
use crate::predistribution::{KeyStore, NodeId, NodeSet, SchemeSpec};
use crate::rates::{alpha_unchecked, binomial, check_probability, pow, serde_rational, NetworkParams, Rational};

pub type Pair = (NodeId, NodeId);

/// Requested channel rates `r_ij = m_ij / l` over unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateProfile {
    pub n: u32,
    pub t: u32,
    rates: BTreeMap<Pair, Rational>,
}

#[derive(Serialize, Deserialize)]
struct RateEntry {
    i: NodeId,
    j: NodeId,
    #[serde(with = "serde_rational")]
    r: Rational,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    n: u32,
    t: u32,
    rates: Vec<RateEntry>,
}

impl RateProfile {
    pub fn new(n: u32, t: u32) -> Result<Self> {
        NetworkParams::new(n, t)?;
        Ok(RateProfile {
            n,
            t,
            rates: BTreeMap::new(),
        })
    }

    /// The same rate on every pair.
    pub fn uniform(n: u32, t: u32, r: &Rational) -> Result<Self> {
        let mut profile = RateProfile::new(n, t)?;
        for (i, j) in (1..=n).tuple_combinations() {
            profile.set(i, j, r.clone())?;
        }
        Ok(profile)
    }

    pub fn params(&self) -> NetworkParams {
        NetworkParams { n: self.n, t: self.t }
    }

    pub fn set(&mut self, i: NodeId, j: NodeId, r: Rational) -> Result<()> {
        let pair = channel(i, j)?;
        if pair.0 == 0 || pair.1 > self.n {
            return Err(Error::InvalidNode {
                node: if pair.0 == 0 { 0 } else { pair.1 },
                n: self.n,
            });
        }
        if r.is_negative() || r > Rational::one() {
            return Err(Error::InvalidArgument(format!("rate {r} on ({i}, {j}) outside [0, 1]")));
        }
        if r.is_zero() {
            self.rates.remove(&pair);
        } else {
            self.rates.insert(pair, r);
        }
        Ok(())
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> Rational {
        channel(i, j)
            .ok()
            .and_then(|p| self.rates.get(&p).cloned())
            .unwrap_or_else(Rational::zero)
    }

    /// Channels with a positive rate, in pair order.
    pub fn positive(&self) -> impl Iterator<Item = (Pair, &Rational)> {
        self.rates.iter().map(|(p, r)| (*p, r))
    }

    pub fn is_zero(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn sum(&self, channels: &[Pair]) -> Rational {
        channels.iter().map(|&(i, j)| self.get(i, j)).sum()
    }

    /// Every rate multiplied by `c`; `c` must keep rates within `[0, 1]`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        let mut out = RateProfile::new(self.n, self.t)?;
        for ((i, j), r) in self.positive() {
            out.set(i, j, r * c)?;
        }
        Ok(out)
    }

    /// Renames node `i` to `labels[i - 1]`.
    pub fn relabeled(&self, labels: &[NodeId]) -> Result<Self> {
        if labels.len() != self.n as usize || NodeSet::new(labels.iter().copied()).len() != labels.len() {
            return Err(Error::InvalidArgument("relabeling must be a permutation of the nodes".into()));
        }
        let mut out = RateProfile::new(self.n, self.t)?;
        for ((i, j), r) in self.positive() {
            out.set(labels[i as usize - 1], labels[j as usize - 1], r.clone())?;
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text)?;
        let mut profile = RateProfile::new(file.n, file.t)?;
        let mut seen = std::collections::BTreeSet::new();
        for e in file.rates {
            if !seen.insert(channel(e.i, e.j)?) {
                return Err(Error::Format(format!("pair ({}, {}) listed twice", e.i, e.j)));
            }
            profile.set(e.i, e.j, e.r)?;
        }
        Ok(profile)
    }

    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            n: self.n,
            t: self.t,
            rates: self
                .positive()
                .map(|((i, j), r)| RateEntry { i, j, r: r.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("profile serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Achievable,
    NotAchievable,
    /// The checker's condition failed but it is only sufficient.
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Relaxed,
    Feasibility,
}

/// A hacked set and channel subset whose rate sum reaches the shared
/// unhacked rate of those channels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub hacked: NodeSet,
    pub channels: Vec<Pair>,
    #[serde(with = "serde_rational")]
    pub sum: Rational,
    #[serde(with = "serde_rational")]
    pub r_secrecy: Rational,
}

/// One row of the relaxed checker: the `w` largest rates against the
/// minimum shared rate of `w` channels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WMargin {
    pub w: u64,
    #[serde(with = "serde_rational")]
    pub max_sum: Rational,
    #[serde(with = "serde_rational")]
    pub r_secrecy: Rational,
    #[serde(with = "serde_rational")]
    pub margin: Rational,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowEntry {
    pub group: NodeSet,
    pub i: NodeId,
    pub j: NodeId,
    #[serde(with = "serde_rational")]
    pub x: Rational,
}

/// The explicit rate split for one hacked set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HackedFlow {
    pub hacked: NodeSet,
    pub entries: Vec<FlowEntry>,
    /// Smallest `|u_G \ u_h| / l - Σ x` over groups.
    #[serde(with = "serde_rational")]
    pub min_slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowAssignment {
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub flows: Vec<HackedFlow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecurityVerdict {
    pub status: Status,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub margins: Vec<WMargin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SecurityVerdict {
    fn new(status: Status, method: Method) -> Self {
        SecurityVerdict {
            status,
            method,
            witness: None,
            margins: Vec::new(),
            flow: None,
            note: None,
        }
    }

    pub fn achievable(&self) -> bool {
        self.status == Status::Achievable
    }
}

fn check_profile(ks: &KeyStore, profile: &RateProfile, t: u32) -> Result<NetworkParams> {
    if profile.n != ks.n() {
        return Err(Error::InvalidArgument(format!(
            "profile is for n = {} but the keystore has n = {}",
            profile.n,
            ks.n()
        )));
    }
    NetworkParams::new(ks.n(), t)
}

fn hacked_sets(n: u32, t: u32) -> Vec<NodeSet> {
    (0..=t)
        .flat_map(|k| (1..=n).combinations(k as usize).map(NodeSet::from_sorted))
        .collect()
}

fn hacked_set_count(n: u32, t: u32) -> BigInt {
    (0..=t as i64).map(|k| binomial(n as i64, k)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    pub max_nodes: u32,
    /// Largest number of positive-rate channels per hacked set (subsets are `2^k`).
    pub max_channels: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            max_nodes: 7,
            max_channels: 24,
        }
    }
}

/// Lexicographic order of the sorted index lists encoded by two masks.
fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let d = (a ^ b).trailing_zeros();
    if a >> d & 1 == 1 {
        // a continues with d; b either continues with something larger or stops
        b >> d != 0
    } else {
        a >> d == 0
    }
}

/// Decides achievability by enumerating every hacked set of size at most
/// `t` and every subset of positive-rate unhacked channels. Requires
/// `Σ r < r_secrecy` strictly for every subset with a positive sum.
///
/// The reported witness is the smallest violating subset in lexicographic
/// order of its sorted channel list, ties broken by the hacked set.
pub fn check_exact(ks: &KeyStore, profile: &RateProfile, t: u32) -> Result<SecurityVerdict> {
    check_exact_with(ks, profile, t, ExactOptions::default())
}

pub fn check_exact_with(
    ks: &KeyStore,
    profile: &RateProfile,
    t: u32,
    options: ExactOptions,
) -> Result<SecurityVerdict> {
    let params = check_profile(ks, profile, t)?;
    if params.n > options.max_nodes {
        return Err(Error::EnumerationBudget {
            detail: format!("n = {} exceeds the limit of {} nodes", params.n, options.max_nodes),
        });
    }
    let denominators = profile.positive().map(|(_, r)| r.denom().clone());
    let scale = crate::rates::lcm_all(denominators);
    let too_fine = || Error::InvalidArgument("rate denominators too large for exact enumeration".into());
    let scale_u = scale.to_u128().ok_or_else(too_fine)?;
    let l = ks.l() as u128;
    let scaled: BTreeMap<Pair, u128> = profile
        .positive()
        .map(|(p, r)| {
            (r.numer() * (&scale / r.denom()))
                .to_u128()
                .map(|v| (p, v))
                .ok_or_else(too_fine)
        })
        .collect::<Result<_>>()?;
    // Σ r · D · l must fit for every subset.
    let total: u128 = scaled.values().sum();
    total.checked_mul(l).ok_or_else(too_fine)?;
    (ks.u() as u128).checked_mul(scale_u).ok_or_else(too_fine)?;

    let per_set: Vec<Result<Option<(u64, Vec<Pair>, NodeSet)>>> = hacked_sets(params.n, t)
        .into_par_iter()
        .map(|hacked| {
            let pos: Vec<(Pair, u128)> = scaled
                .iter()
                .filter(|((i, j), _)| !hacked.contains(*i) && !hacked.contains(*j))
                .map(|(p, v)| (*p, *v))
                .collect();
            if pos.is_empty() {
                return Ok(None);
            }
            if pos.len() > options.max_channels {
                return Err(Error::EnumerationBudget {
                    detail: format!(
                        "{} positive-rate channels exceed the limit of {}",
                        pos.len(),
                        options.max_channels
                    ),
                });
            }
            let best = min_violation(ks, &hacked, &pos, l, scale_u);
            Ok(best.map(|mask| {
                let pairs = (0..pos.len()).filter(|b| mask >> b & 1 == 1).map(|b| pos[b].0).collect();
                (mask, pairs, hacked)
            }))
        })
        .collect();

    let mut best: Option<(Vec<Pair>, NodeSet)> = None;
    for item in per_set {
        if let Some((_, pairs, hacked)) = item? {
            let better = match &best {
                None => true,
                Some((bp, bh)) => (&pairs, &hacked) < (bp, bh),
            };
            if better {
                best = Some((pairs, hacked));
            }
        }
    }
    match best {
        None => Ok(SecurityVerdict::new(Status::Achievable, Method::Exact)),
        Some((channels, hacked)) => {
            let mut verdict = SecurityVerdict::new(Status::NotAchievable, Method::Exact);
            verdict.witness = Some(Witness {
                sum: profile.sum(&channels),
                r_secrecy: ks.r_secrecy(&channels, &hacked)?,
                hacked,
                channels,
            });
            Ok(verdict)
        }
    }
}

/// Lexicographically smallest violating subset of `pos` for one hacked set.
fn min_violation(ks: &KeyStore, hacked: &NodeSet, pos: &[(Pair, u128)], l: u128, scale: u128) -> Option<u64> {
    let k = pos.len();
    let full: u64 = (1u64 << k) - 1;
    // a[M] = bits of groups whose covered channels are exactly the complement of M
    let mut z = vec![0u64; 1 << k];
    let mut total = 0u64;
    for g in ks.groups().iter().filter(|g| g.nodes.is_disjoint(hacked)) {
        let cover = pos
            .iter()
            .enumerate()
            .filter(|(_, ((i, j), _))| g.nodes.contains(*i) && g.nodes.contains(*j))
            .fold(0u64, |m, (b, _)| m | 1 << b);
        if cover != 0 {
            z[(!cover & full) as usize] += g.bits.len() as u64;
            total += g.bits.len() as u64;
        }
    }
    // superset sums: z[S] = bits of groups covering no channel of S
    for b in 0..k {
        let bit = 1usize << b;
        for m in 0..(1usize << k) {
            if m & bit == 0 {
                z[m] += z[m | bit];
            }
        }
    }
    let mut sums = vec![0u128; 1 << k];
    let mut best: Option<u64> = None;
    for m in 1..(1usize << k) {
        sums[m] = sums[m & (m - 1)] + pos[m.trailing_zeros() as usize].1;
        let union = (total - z[m]) as u128;
        if sums[m] * l >= union * scale && best.is_none_or(|b| lex_less(m as u64, b)) {
            best = Some(m as u64);
        }
    }
    best
}

/// Recomputes both sides of a witness from the keystore.
pub fn validate_witness(ks: &KeyStore, profile: &RateProfile, witness: &Witness) -> Result<bool> {
    let sum = profile.sum(&witness.channels);
    let r = ks.r_secrecy(&witness.channels, &witness.hacked)?;
    Ok(sum == witness.sum && r == witness.r_secrecy && sum.is_positive() && sum >= r)
}

/// The `w`-th pair (1-based) in lexicographic order over nodes `1..=m`.
pub fn lex_pair(m: u32, w: u64) -> Result<Pair> {
    let total = m as u64 * (m as u64).saturating_sub(1) / 2;
    if w == 0 || w > total {
        return Err(Error::InvalidArgument(format!("w = {w} outside 1..={total}")));
    }
    let mut before = 0u64;
    for x in 1..m {
        let row = (m - x) as u64;
        if w <= before + row {
            return Ok((x, x + (w - before) as u32));
        }
        before += row;
    }
    unreachable!("w within range")
}

/// The first `w` pairs in lexicographic order over nodes `1..=m`.
pub fn lex_prefix(m: u32, w: u64) -> Vec<Pair> {
    (1..=m).tuple_combinations().take(w as usize).collect()
}

/// Closed-form minimum, over hacked sets of size `t` and channel sets of
/// size `w`, of the shared unhacked-secret-bit rate.
pub fn r_secrecy_w(spec: &SchemeSpec, params: NetworkParams, w: u64) -> Result<Rational> {
    spec.validate(params.n)?;
    let n = params.n as i64;
    let m = n - params.t as i64;
    let (x, y) = lex_pair(m as u32, w)?;
    let (x, y) = (x as i64, y as i64);
    match spec {
        SchemeSpec::Pairwise | SchemeSpec::Same | SchemeSpec::Combinational { .. } => {
            let a = spec.group_size(params.n).expect("combinational family") as i64;
            let num = binomial(m, a) - binomial(m - x, a) - binomial(m - y, a - 1);
            Ok(Rational::new(num, binomial(n - 1, a - 1)))
        }
        SchemeSpec::Random { p } => {
            check_probability(p, false)?;
            let q = Rational::one() - p;
            let inner = alpha_unchecked(m, p) / p
                - pow(&q, x) * alpha_unchecked(m - x, p) / p
                - pow(&q, y - 1) * (Rational::one() - pow(&q, m - y));
            Ok(pow(&q, params.t as i64) * inner)
        }
        SchemeSpec::SampledCombinational { .. } => Err(Error::InvalidScheme(
            "sampled designs are not symmetric; no closed form for r_secrecy(w)".into(),
        )),
        SchemeSpec::Hybrid { .. } => spec
            .components()
            .into_iter()
            .map(|(fraction, child)| Ok(fraction * r_secrecy_w(child, params, w)?))
            .sum(),
    }
}

/// `r_secrecy(w)` read off a symmetric keystore: nodes `n-t+1..=n` hacked and
/// the first `w` lexicographic pairs of the rest.
pub fn r_secrecy_w_store(ks: &KeyStore, t: u32, w: u64) -> Result<Rational> {
    if !ks.is_symmetric() {
        return Err(Error::InvalidScheme(format!(
            "{} is not symmetric; r_secrecy(w) needs a full minimisation",
            ks.scheme()
        )));
    }
    let params = NetworkParams::new(ks.n(), t)?;
    let m = params.n - params.t;
    lex_pair(m, w)?;
    let hacked = NodeSet::new(m + 1..=params.n);
    ks.r_secrecy(&lex_prefix(m, w), &hacked)
}

/// Sufficient test: for every `w`, the `w` largest rates must sum to less
/// than `r_secrecy(w)` (or to zero).
pub fn check_relaxed(spec: &SchemeSpec, params: NetworkParams, profile: &RateProfile) -> Result<SecurityVerdict> {
    if profile.n != params.n {
        return Err(Error::InvalidArgument(format!(
            "profile is for n = {} but the parameters have n = {}",
            profile.n, params.n
        )));
    }
    let m = (params.n - params.t) as u64;
    let mut rates: Vec<&Rational> = profile.positive().map(|(_, r)| r).collect();
    rates.sort_by(|a, b| b.cmp(a));
    let mut margins = Vec::new();
    let mut max_sum = Rational::zero();
    for w in 1..=m * (m - 1) / 2 {
        if let Some(r) = rates.get(w as usize - 1) {
            max_sum += *r;
        }
        let r_secrecy = r_secrecy_w(spec, params, w)?;
        let passes = max_sum.is_zero() || max_sum < r_secrecy;
        margins.push(WMargin {
            w,
            margin: &r_secrecy - &max_sum,
            max_sum: max_sum.clone(),
            r_secrecy,
            passes,
        });
    }
    let status = if margins.iter().all(|m| m.passes) {
        Status::Achievable
    } else {
        Status::Undecided
    };
    let mut verdict = SecurityVerdict::new(status, Method::Relaxed);
    verdict.margins = margins;
    Ok(verdict)
}

/// Default slack factor for the feasibility construction: `2^-20`.
pub fn default_epsilon() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 20)
}

/// Largest number of hacked sets the feasibility checker will walk.
pub const FEASIBILITY_MAX_HACKED_SETS: u64 = 1 << 20;

/// Sufficient test: for every hacked set, split each unhacked channel's rate
/// `(1+ε) r_ij` over the unhacked groups containing both endpoints in
/// proportion to `|u_G| / |G|`, then require every group's total to fit in
/// `|u_G| / l`.
pub fn check_feasibility(
    ks: &KeyStore,
    profile: &RateProfile,
    t: u32,
    epsilon: &Rational,
) -> Result<SecurityVerdict> {
    let params = check_profile(ks, profile, t)?;
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    let count = hacked_set_count(params.n, t);
    if count > BigInt::from(FEASIBILITY_MAX_HACKED_SETS) {
        return Err(Error::EnumerationBudget {
            detail: format!("{count} hacked sets exceed the limit of {FEASIBILITY_MAX_HACKED_SETS}"),
        });
    }
    let grow = Rational::one() + epsilon;
    let l = Rational::from_integer(ks.l().into());
    let results: Vec<std::result::Result<HackedFlow, String>> = hacked_sets(params.n, t)
        .into_par_iter()
        .map(|hacked| flow_for(ks, profile, &hacked, &grow, &l))
        .collect();
    let mut flows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(flow) => flows.push(flow),
            Err(note) => {
                let mut verdict = SecurityVerdict::new(Status::Undecided, Method::Feasibility);
                verdict.note = Some(note);
                return Ok(verdict);
            }
        }
    }
    let mut verdict = SecurityVerdict::new(Status::Achievable, Method::Feasibility);
    verdict.flow = Some(FlowAssignment {
        epsilon: epsilon.clone(),
        flows,
    });
    Ok(verdict)
}

fn flow_for(
    ks: &KeyStore,
    profile: &RateProfile,
    hacked: &NodeSet,
    grow: &Rational,
    l: &Rational,
) -> std::result::Result<HackedFlow, String> {
    let groups: Vec<(&NodeSet, Rational, Rational)> = ks
        .groups()
        .iter()
        .filter(|g| g.nodes.len() >= 2 && g.nodes.is_disjoint(hacked))
        .map(|g| {
            let size = Rational::from_integer(g.bits.len().into());
            let weight = &size / Rational::from_integer(g.nodes.len().into());
            (&g.nodes, weight, size / l)
        })
        .collect();
    let mut load = vec![Rational::zero(); groups.len()];
    let mut entries = Vec::new();
    for ((i, j), r) in profile.positive() {
        if hacked.contains(i) || hacked.contains(j) {
            continue;
        }
        let serving: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].0.contains(i) && groups[g].0.contains(j))
            .collect();
        let total: Rational = serving.iter().map(|&g| groups[g].1.clone()).sum();
        if total.is_zero() {
            return Err(format!(
                "with hacked set {hacked}, channel ({i}, {j}) has no unhacked group to draw from"
            ));
        }
        for g in serving {
            let x = &groups[g].1 / &total * grow * r;
            load[g] += &x;
            entries.push(FlowEntry {
                group: groups[g].0.clone(),
                i,
                j,
                x,
            });
        }
    }
    let mut min_slack: Option<Rational> = None;
    for (g, (nodes, _, capacity)) in groups.iter().enumerate() {
        let slack = capacity - &load[g];
        if slack.is_negative() {
            return Err(format!(
                "with hacked set {hacked}, group {nodes} is asked for {} but holds {capacity}",
                load[g]
            ));
        }
        if min_slack.as_ref().is_none_or(|m| slack < *m) {
            min_slack = Some(slack);
        }
    }
    entries.sort_by(|a, b| (&a.group, a.i, a.j).cmp(&(&b.group, b.i, b.j)));
    Ok(HackedFlow {
        hacked: hacked.clone(),
        entries,
        min_slack: min_slack.unwrap_or_else(Rational::zero),
    })
}

/// Channels whose rate equals the whole shared rate they could ever get
/// alone: `r_ij >= r_secrecy({(i,j)}, ∅)`.
pub fn saturated_channels(ks: &KeyStore, profile: &RateProfile) -> Result<Vec<Pair>> {
    let mut out = Vec::new();
    for ((i, j), r) in profile.positive() {
        if *r >= ks.r_secrecy(&[(i, j)], &NodeSet::empty())? {
            out.push((i, j));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predistribution::generate;
    use crate::rates::rational;
    use crate::seed::Seed;

    fn triples(l: u64) -> KeyStore {
        generate(&SchemeSpec::Combinational { a: 3 }, 4, l, Seed::from(1)).unwrap()
    }

    fn eps() -> Rational {
        rational(1, 1 << 20)
    }

    #[test]
    fn lex_order_helpers() {
        assert_eq!(lex_pair(3, 1).unwrap(), (1, 2));
        assert_eq!(lex_pair(3, 3).unwrap(), (2, 3));
        assert_eq!(lex_pair(4, 4).unwrap(), (2, 3));
        assert!(lex_pair(3, 4).is_err());
        assert!(lex_pair(3, 0).is_err());
        assert_eq!(lex_prefix(4, 3), vec![(1, 2), (1, 3), (1, 4)]);
        // [0, 1] < [0, 2]
        assert!(lex_less(0b011, 0b101));
        // a prefix sorts first: [0] < [0, 1]
        assert!(lex_less(0b001, 0b011));
        assert!(!lex_less(0b011, 0b001));
        // [0, 2] < [1]
        assert!(lex_less(0b101, 0b010));
        assert!(!lex_less(0b010, 0b010));
    }

    #[test]
    fn single_channel_boundary() {
        let ks = triples(3);
        let mut p = RateProfile::new(4, 0).unwrap();
        p.set(1, 2, rational(2, 3) - eps()).unwrap();
        assert!(check_exact(&ks, &p, 0).unwrap().achievable());
        p.set(1, 2, rational(2, 3)).unwrap();
        let v = check_exact(&ks, &p, 0).unwrap();
        assert_eq!(v.status, Status::NotAchievable);
        let w = v.witness.unwrap();
        assert_eq!(w.channels, vec![(1, 2)]);
        assert!(w.hacked.is_empty());
        assert!(validate_witness(&ks, &p, &w).unwrap());
    }

    #[test]
    fn star_of_node_one() {
        let ks = triples(3);
        let mut p = RateProfile::new(4, 0).unwrap();
        for j in 2..=4 {
            p.set(1, j, rational(1, 3)).unwrap();
        }
        let w = check_exact(&ks, &p, 0).unwrap().witness.unwrap();
        assert_eq!(w.channels, vec![(1, 2), (1, 3), (1, 4)]);
        let e = rational(1, 1000);
        for j in 2..=4 {
            p.set(1, j, rational(1, 3) - &e).unwrap();
        }
        assert!(check_exact(&ks, &p, 0).unwrap().achievable());
    }

    #[test]
    fn one_hacked_node_uniform() {
        let ks = triples(3);
        let ok = RateProfile::uniform(4, 1, &(rational(1, 9) - eps())).unwrap();
        assert!(check_exact(&ks, &ok, 1).unwrap().achievable());
        let edge = RateProfile::uniform(4, 1, &rational(1, 9)).unwrap();
        let v = check_exact(&ks, &edge, 1).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.hacked, NodeSet::new([4]));
        assert_eq!(w.channels, vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(w.r_secrecy, rational(1, 3));
        assert!(check_exact(&ks, &RateProfile::new(4, 1).unwrap(), 1).unwrap().achievable());
    }

    #[test]
    fn exact_refuses_large_networks() {
        let ks = generate(&SchemeSpec::Pairwise, 8, 7, Seed::from(1)).unwrap();
        let p = RateProfile::new(8, 1).unwrap();
        let err = check_exact(&ks, &p, 1).unwrap_err();
        assert!(err.to_string().contains("relaxed"));
    }

    #[test]
    fn closed_form_examples() {
        let params = NetworkParams::new(4, 1).unwrap();
        let spec = SchemeSpec::Combinational { a: 3 };
        assert_eq!(r_secrecy_w(&spec, params, 3).unwrap(), rational(1, 3));
        let ks = triples(3);
        assert_eq!(r_secrecy_w_store(&ks, 1, 3).unwrap(), rational(1, 3));
        // single channel equals the table channel rate
        let table = crate::rates::combinational_max_rates(params, 3).unwrap();
        assert_eq!(r_secrecy_w(&spec, params, 1).unwrap(), table.channel);
        let random = SchemeSpec::Random { p: rational(1, 2) };
        let table = crate::rates::random_max_rates(params, &rational(1, 2)).unwrap();
        assert_eq!(r_secrecy_w(&random, params, 1).unwrap(), table.channel);
        assert!(r_secrecy_w(&spec, params, 4).is_err());
    }

    #[test]
    fn relaxed_binds_at_three_channels() {
        let params = NetworkParams::new(4, 1).unwrap();
        let spec = SchemeSpec::Combinational { a: 3 };
        let p = RateProfile::uniform(4, 1, &rational(1, 9)).unwrap();
        let v = check_relaxed(&spec, params, &p).unwrap();
        assert_eq!(v.status, Status::Undecided);
        let failing: Vec<u64> = v.margins.iter().filter(|m| !m.passes).map(|m| m.w).collect();
        assert_eq!(failing, vec![3]);
        let below = RateProfile::uniform(4, 1, &(rational(1, 9) - eps())).unwrap();
        assert!(check_relaxed(&spec, params, &below).unwrap().achievable());
        assert!(check_relaxed(&spec, params, &RateProfile::new(4, 1).unwrap()).unwrap().achievable());
    }

    #[test]
    fn feasibility_construction() {
        let ks = triples(3);
        let r = rational(1, 9) / (Rational::one() + default_epsilon());
        let p = RateProfile::uniform(4, 1, &r).unwrap();
        let v = check_feasibility(&ks, &p, 1, &default_epsilon()).unwrap();
        assert!(v.achievable());
        let flow = v.flow.unwrap();
        let h4 = flow.flows.iter().find(|f| f.hacked == NodeSet::new([4])).unwrap();
        assert_eq!(h4.entries.len(), 3);
        assert!(h4.entries.iter().all(|e| e.x == rational(1, 9)));
        assert!(h4.min_slack.is_zero());
        let over = RateProfile::uniform(4, 1, &rational(1, 9)).unwrap();
        let v = check_feasibility(&ks, &over, 1, &default_epsilon()).unwrap();
        assert_eq!(v.status, Status::Undecided);
        let zero = RateProfile::new(4, 1).unwrap();
        assert!(check_feasibility(&ks, &zero, 1, &default_epsilon()).unwrap().achievable());
    }

    #[test]
    fn profile_json_roundtrip() {
        let mut p = RateProfile::new(5, 1).unwrap();
        p.set(2, 1, rational(1, 3)).unwrap();
        p.set(4, 5, rational(1, 7)).unwrap();
        let text = p.to_json();
        assert!(text.contains("\"1/3\""));
        assert_eq!(RateProfile::from_json(&text).unwrap(), p);
        let dup = r#"{"n":4,"t":1,"rates":[{"i":1,"j":2,"r":"1/3"},{"i":2,"j":1,"r":"1/4"}]}"#;
        assert!(RateProfile::from_json(dup).is_err());
        let bad = r#"{"n":4,"t":1,"rates":[{"i":1,"j":2,"r":"3/2"}]}"#;
        assert!(RateProfile::from_json(bad).is_err());
    }
}
