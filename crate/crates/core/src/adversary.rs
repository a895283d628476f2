//! The eavesdropper's view: transcripts, the linear system it induces, exact
//! information-theoretic oracles for tiny pools, and Monte Carlo rank
//! experiments.
//!
//! Every key bit is a GF(2) linear function of the pool, and all pool bits
//! are independent and uniform. Entropies of derived quantities are therefore
//! ranks, and perfect secrecy of a transcript reduces to full row rank of the
//! key rows once the hacked columns are removed.

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::amplify::{channel, encrypt, key_rows, ChannelCipherState, CipherText};
use crate::error::{Error, Result};
use crate::gf2::{cross_independent, BitMatrix, BitString};
use crate::predistribution::{generate, KeyStore, NodeId, NodeSet, SchemeSpec};
use crate::secure_check::{check_exact, check_relaxed, Pair, RateProfile};
use crate::seed::Seed;

/// One observed ciphertext together with the exact pool rows of its key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub ciphertext: CipherText,
    pub d: usize,
    /// Row `r` lists the pool bits XORed into key bit `r`.
    pub rows: Vec<Vec<usize>>,
}

impl Message {
    pub fn pair(&self) -> Pair {
        (self.ciphertext.i, self.ciphertext.j)
    }
}

/// Everything the eavesdropper sees: all ciphertexts and the material of the
/// hacked nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub hacked: NodeSet,
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new(hacked: NodeSet) -> Self {
        Transcript {
            hacked,
            messages: Vec::new(),
        }
    }

    /// Adds a ciphertext, rebuilding its sampling rows from the public header.
    pub fn record(&mut self, ks: &KeyStore, ciphertext: CipherText, d: usize) -> Result<()> {
        let rows = key_rows(ks, ciphertext.i, ciphertext.j, d, ciphertext.body.len(), ciphertext.sampling_seed)?;
        self.messages.push(Message { ciphertext, d, rows });
        Ok(())
    }

    /// The same messages seen by an eavesdropper holding `hacked`, with
    /// messages on channels touching a hacked node dropped.
    pub fn restricted_to(&self, hacked: &NodeSet) -> Transcript {
        Transcript {
            hacked: hacked.clone(),
            messages: self
                .messages
                .iter()
                .filter(|m| !hacked.contains(m.ciphertext.i) && !hacked.contains(m.ciphertext.j))
                .cloned()
                .collect(),
        }
    }

    pub fn ciphertexts(&self) -> impl Iterator<Item = &CipherText> {
        self.messages.iter().map(|m| &m.ciphertext)
    }

    pub fn key_bits(&self) -> usize {
        self.messages.iter().map(|m| m.rows.len()).sum()
    }

    fn check_unhacked(&self) -> Result<()> {
        for m in &self.messages {
            let (i, j) = m.pair();
            if self.hacked.contains(i) || self.hacked.contains(j) {
                return Err(Error::HackedChannel(i, j));
            }
        }
        Ok(())
    }
}

/// Sends one message of `floor(l * r_ij)` random bits on every positive-rate
/// channel, in pair order. Message `k` uses sampling seed `seed.derive(2k)`
/// and plaintext seed `seed.derive(2k + 1)`.
pub fn simulate_transcript(ks: &KeyStore, profile: &RateProfile, d: usize, seed: Seed) -> Result<Transcript> {
    let mut transcript = Transcript::default();
    let l = ks.l();
    for (k, ((i, j), r)) in profile.positive().enumerate() {
        let len = (r * crate::rates::Rational::from_integer(l.into()))
            .floor()
            .to_integer();
        let len: usize = len
            .try_into()
            .map_err(|_| Error::InvalidArgument("message length overflow".into()))?;
        if len == 0 {
            continue;
        }
        let mut state = ChannelCipherState::with_weight(i, j, d)?;
        let plaintext = BitString::random(len, &mut seed.derive(2 * k as u64 + 1).rng());
        let ct = encrypt(ks, &mut state, &plaintext, seed.derive(2 * k as u64))?;
        transcript.record(ks, ct, d)?;
    }
    Ok(transcript)
}

/// The key rows of a transcript over the unhacked pool columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecrecyWitness {
    pub a_matrix: BitMatrix,
    pub rank: usize,
    pub full_rank: bool,
    /// Pool index of every column of `a_matrix`.
    pub columns: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    pub hacked: NodeSet,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub full_rank: bool,
}

impl SecrecyWitness {
    pub fn summary(&self, hacked: &NodeSet) -> WitnessSummary {
        WitnessSummary {
            hacked: hacked.clone(),
            rows: self.a_matrix.rows(),
            columns: self.a_matrix.cols(),
            rank: self.rank,
            full_rank: self.full_rank,
        }
    }
}

/// Column map from pool indices to the unhacked columns.
fn unhacked_columns(ks: &KeyStore, hacked: &NodeSet) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
    let hacked_bits = ks.hacked_bits(hacked)?;
    let mut is_hacked = vec![false; ks.u()];
    for b in hacked_bits {
        is_hacked[b] = true;
    }
    let columns: Vec<usize> = (0..ks.u()).filter(|&b| !is_hacked[b]).collect();
    let mut index = vec![None; ks.u()];
    for (c, &b) in columns.iter().enumerate() {
        index[b] = Some(c);
    }
    Ok((columns, index))
}

/// Per-message blocks of key rows restricted to unhacked columns.
fn channel_blocks(ks: &KeyStore, tr: &Transcript) -> Result<(Vec<BitMatrix>, Vec<usize>)> {
    tr.check_unhacked()?;
    let (columns, index) = unhacked_columns(ks, &tr.hacked)?;
    let blocks = tr
        .messages
        .iter()
        .map(|m| {
            let rows: Vec<Vec<usize>> = m
                .rows
                .iter()
                .map(|row| row.iter().filter_map(|&b| index[b]).collect())
                .collect();
            BitMatrix::from_sparse_rows(columns.len(), &rows)
        })
        .collect::<Result<_>>()?;
    Ok((blocks, columns))
}

/// Stacks every key row of the transcript over the unhacked pool columns.
/// Full row rank proves perfect secrecy of the realized transcript.
pub fn build_security_matrix(ks: &KeyStore, tr: &Transcript) -> Result<SecrecyWitness> {
    let (blocks, columns) = channel_blocks(ks, tr)?;
    let a_matrix = if blocks.is_empty() {
        BitMatrix::zeros(0, columns.len())
    } else {
        BitMatrix::stack(&blocks)?
    };
    let rank = a_matrix.rank();
    Ok(SecrecyWitness {
        full_rank: rank == a_matrix.rows(),
        rank,
        a_matrix,
        columns,
    })
}

/// Certifies a transcript against every hacked set of size at most `t`.
/// Returns the first hacked set whose security matrix is rank deficient.
pub fn certify(ks: &KeyStore, tr: &Transcript, t: u32) -> Result<Option<NodeSet>> {
    for k in 0..=t as usize {
        for hacked in (1..=ks.n()).combinations(k) {
            let hacked = NodeSet::from_sorted(hacked);
            if !build_security_matrix(ks, &tr.restricted_to(&hacked))?.full_rank {
                return Ok(Some(hacked));
            }
        }
    }
    Ok(None)
}

/// Which plaintexts the mutual information is measured for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiScope {
    /// Every message on one channel.
    Channel(NodeId, NodeId),
    /// Every message in the transcript.
    All,
}

/// Largest pool the exact oracle will enumerate.
pub const MI_ORACLE_MAX_POOL: usize = 20;

/// `I(x; y, u_h)` in bits for the plaintexts in `scope`, by enumerating all
/// `2^u` pool values.
///
/// Plaintexts are uniform and independent. Ciphertexts outside the scope are
/// then uniform and independent of everything else, so they carry no
/// information and are left out. For the scoped ciphertexts,
/// `I = K + H(u_h) - H(key, u_h)` where `K` is the number of scoped bits.
pub fn exact_mi_oracle(ks: &KeyStore, tr: &Transcript, scope: MiScope) -> Result<f64> {
    let u = ks.u();
    if u > MI_ORACLE_MAX_POOL {
        return Err(Error::InvalidArgument(format!(
            "pool of {u} bits exceeds the exact oracle limit of {MI_ORACLE_MAX_POOL}"
        )));
    }
    tr.check_unhacked()?;
    let selected: Vec<&Message> = match scope {
        MiScope::All => tr.messages.iter().collect(),
        MiScope::Channel(i, j) => {
            let pair = channel(i, j)?;
            if tr.hacked.contains(pair.0) || tr.hacked.contains(pair.1) {
                return Err(Error::HackedChannel(pair.0, pair.1));
            }
            tr.messages.iter().filter(|m| m.pair() == pair).collect()
        }
    };
    let key_masks: Vec<u32> = selected
        .iter()
        .flat_map(|m| m.rows.iter())
        .map(|row| row.iter().fold(0u32, |acc, &b| acc | 1 << b))
        .collect();
    let hacked_bits = ks.hacked_bits(&tr.hacked)?;
    let hacked_mask = hacked_bits.iter().fold(0u32, |acc, &b| acc | 1 << b);
    let k = key_masks.len();
    if k + hacked_bits.len() > 128 {
        return Err(Error::InvalidArgument("oracle observation exceeds 128 bits".into()));
    }
    let mut joint: HashMap<u128, u64> = HashMap::new();
    let mut marginal: HashMap<u32, u64> = HashMap::new();
    for v in 0u32..(1u32 << u) {
        let seen = v & hacked_mask;
        let mut key = 0u128;
        for (r, &mask) in key_masks.iter().enumerate() {
            key |= (((v & mask).count_ones() & 1) as u128) << r;
        }
        *joint.entry(key | (seen as u128) << k).or_default() += 1;
        *marginal.entry(seen).or_default() += 1;
    }
    let entropy = |counts: &mut dyn Iterator<Item = u64>| -> f64 {
        let weighted: f64 = counts.map(|c| c as f64 * (c as f64).log2()).sum();
        u as f64 - weighted / (1u64 << u) as f64
    };
    let h_joint = entropy(&mut joint.values().copied());
    let h_hacked = entropy(&mut marginal.values().copied());
    Ok(k as f64 + h_hacked - h_joint)
}

/// Entropy in bits of the material held by `nodes`: the number of distinct
/// pool bits, which is the GF(2) rank of their selection rows.
pub fn entropy_of(ks: &KeyStore, nodes: &NodeSet) -> u64 {
    ks.groups()
        .iter()
        .filter(|g| !g.nodes.is_disjoint(nodes))
        .map(|g| g.bits.len() as u64)
        .sum()
}

/// Mutual information among the material of `targets` given `given`:
/// `Σ_{∅≠S⊆targets} (-1)^{|S|+1} H(u_S | u_given)`.
pub fn conditional_mi_sets(ks: &KeyStore, targets: &NodeSet, given: &NodeSet) -> Result<i64> {
    for i in targets.iter().chain(given.iter()) {
        if i == 0 || i > ks.n() {
            return Err(Error::InvalidNode { node: i, n: ks.n() });
        }
    }
    if targets.is_empty() || !targets.is_disjoint(given) {
        return Err(Error::InvalidArgument("targets must be non-empty and disjoint from the conditioning set".into()));
    }
    if targets.len() > 24 {
        return Err(Error::InvalidArgument("at most 24 target nodes".into()));
    }
    let base = entropy_of(ks, given) as i64;
    let t = targets.as_slice();
    let mut total = 0i64;
    for mask in 1u32..(1 << t.len()) {
        let chosen = (0..t.len()).filter(|b| mask >> b & 1 == 1).map(|b| t[b]);
        let union = NodeSet::new(chosen.chain(given.iter()));
        let h = entropy_of(ks, &union) as i64 - base;
        total += if mask.count_ones() % 2 == 1 { h } else { -h };
    }
    Ok(total)
}

/// `I(a|b)` with targets `b+1..=b+a` and conditioning set `1..=b`. For
/// symmetric stores the value does not depend on which nodes are chosen.
pub fn conditional_mi(ks: &KeyStore, a: u32, b: u32) -> Result<i64> {
    if a == 0 || a + b > ks.n() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= a and a + b <= n; got a = {a}, b = {b}, n = {}",
            ks.n()
        )));
    }
    conditional_mi_sets(ks, &NodeSet::new(b + 1..=b + a), &NodeSet::new(1..=b))
}

/// Outcome of a Monte Carlo experiment, one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: String,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: String,
}

impl ExperimentRecord {
    fn new(experiment: &str, params: String, trials: u64, successes: u64, seed: Seed) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        ExperimentRecord {
            experiment: experiment.into(),
            params,
            trials,
            successes,
            p_hat: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            seed: seed.to_hex(),
        }
    }
}

/// Wilson score 95% interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + Z * Z / n;
    let centre = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// How rows of the random matrices are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampler {
    /// Each entry is 1 with probability `c ln(r) / r`.
    Bernoulli { c: f64 },
    /// Each row has exactly `d` ones.
    FixedWeight { d: usize },
}

impl Sampler {
    fn describe(&self, r: usize) -> String {
        match self {
            Sampler::Bernoulli { c } => format!("bernoulli;c={c};density={:.6}", bernoulli_density(r, *c)),
            Sampler::FixedWeight { d } => format!("fixed_weight;d={d}"),
        }
    }
}

/// `c ln(r) / r`, capped at 1.
pub fn bernoulli_density(r: usize, c: f64) -> f64 {
    (c * (r as f64).ln() / r as f64).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaConfig {
    /// Columns.
    pub r: usize,
    /// Rows.
    pub k: usize,
    pub sampler: Sampler,
    pub trials: u64,
    pub seed: Seed,
}

/// Fraction of `k x r` random matrices with full row rank. Trial `s` uses
/// `seed.derive(s)`.
pub fn lemma_rank_experiment(cfg: &LemmaConfig) -> Result<ExperimentRecord> {
    if cfg.trials == 0 || cfg.r == 0 {
        return Err(Error::InvalidArgument("need at least one trial and one column".into()));
    }
    if let Sampler::FixedWeight { d } = cfg.sampler {
        if d > cfg.r {
            return Err(Error::WeightTooLarge { d, available: cfg.r });
        }
    }
    let outcomes: Vec<Result<bool>> = (0..cfg.trials)
        .into_par_iter()
        .map(|s| {
            let seed = cfg.seed.derive(s);
            let m = match cfg.sampler {
                Sampler::Bernoulli { c } => BitMatrix::random_bernoulli(cfg.k, cfg.r, bernoulli_density(cfg.r, c), seed)?,
                Sampler::FixedWeight { d } => BitMatrix::random_fixed_weight(cfg.k, cfg.r, d, seed)?,
            };
            Ok(m.has_full_row_rank())
        })
        .collect();
    let successes = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    let params = format!(
        "r={};k={};k_over_r={:.4};{}",
        cfg.r,
        cfg.k,
        cfg.k as f64 / cfg.r as f64,
        cfg.sampler.describe(cfg.r)
    );
    Ok(ExperimentRecord::new("lemma_rank", params, cfg.trials, successes as u64, cfg.seed))
}

/// Runs the rank experiment over every `(k/r, c)` combination for the
/// Bernoulli sampler, in the order given.
pub fn lemma_sweep(r: usize, ratios: &[f64], cs: &[f64], trials: u64, seed: Seed) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for &ratio in ratios {
        for &c in cs {
            out.push(lemma_rank_experiment(&LemmaConfig {
                r,
                k: (ratio * r as f64).round() as usize,
                sampler: Sampler::Bernoulli { c },
                trials,
                seed,
            })?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossConfig {
    pub spec: SchemeSpec,
    pub n: u32,
    pub l: u64,
    pub hacked: NodeSet,
    pub profile: RateProfile,
    pub d: usize,
    pub trials: u64,
    pub seed: Seed,
}

/// Fraction of trials in which the per-channel key blocks of a fresh store
/// and transcript are cross-independent over the unhacked columns. Trial `s`
/// generates its store from `seed.derive(s)` and its messages from
/// `seed.derive(s).derive(1)`.
pub fn cross_independence_experiment(cfg: &CrossConfig) -> Result<ExperimentRecord> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let t = cfg.profile.t;
    let first = generate(&cfg.spec, cfg.n, cfg.l, cfg.seed.derive(0))?;
    let inside = if cfg.n <= 7 {
        check_exact(&first, &cfg.profile, t)?.achievable()
    } else {
        check_relaxed(&cfg.spec, cfg.profile.params(), &cfg.profile)?.achievable()
    };
    if !inside {
        return Err(Error::InvalidArgument(
            "rate profile is outside the achievable region; the experiment is meaningless".into(),
        ));
    }
    let outcomes: Vec<Result<bool>> = (0..cfg.trials)
        .into_par_iter()
        .map(|s| {
            let seed = cfg.seed.derive(s);
            let ks = generate(&cfg.spec, cfg.n, cfg.l, seed)?;
            let tr = simulate_transcript(&ks, &cfg.profile, cfg.d, seed.derive(1))?.restricted_to(&cfg.hacked);
            let (blocks, _) = channel_blocks(&ks, &tr)?;
            if blocks.is_empty() {
                return Ok(true);
            }
            cross_independent(&blocks)
        })
        .collect();
    let successes = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    let params = format!(
        "scheme={};n={};t={};l={};d={};hacked={}",
        cfg.spec, cfg.n, t, cfg.l, cfg.d, cfg.hacked
    );
    Ok(ExperimentRecord::new("cross_independence", params, cfg.trials, successes as u64, cfg.seed))
}

/// Fraction of seeds whose simulated transcript is certified against every
/// hacked set of size at most `profile.t`. Seed `s` builds the store from
/// `seed.derive(s)` and the messages from `seed.derive(s).derive(1)`.
pub fn secrecy_experiment(
    spec: &SchemeSpec,
    n: u32,
    l: u64,
    profile: &RateProfile,
    d: usize,
    trials: u64,
    seed: Seed,
) -> Result<ExperimentRecord> {
    let outcomes: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|s| {
            let trial = seed.derive(s);
            let ks = generate(spec, n, l, trial)?;
            let tr = simulate_transcript(&ks, profile, d, trial.derive(1))?;
            Ok(certify(&ks, &tr, profile.t)?.is_none())
        })
        .collect();
    let successes = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    let params = format!("scheme={spec};n={n};t={};l={l};d={d}", profile.t);
    Ok(ExperimentRecord::new("secrecy", params, trials, successes as u64, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::rational;

    #[test]
    fn empty_transcript_is_vacuously_secret() {
        let ks = generate(&SchemeSpec::Pairwise, 4, 3, Seed::from(1)).unwrap();
        let w = build_security_matrix(&ks, &Transcript::default()).unwrap();
        assert_eq!(w.a_matrix.rows(), 0);
        assert!(w.full_rank);
        assert_eq!(exact_mi_oracle(&ks, &Transcript::default(), MiScope::All).unwrap(), 0.0);
    }

    #[test]
    fn same_key_overuse_is_rank_deficient() {
        let ks = generate(&SchemeSpec::Same, 4, 40, Seed::from(2)).unwrap();
        let mut p = RateProfile::new(4, 0).unwrap();
        p.set(1, 2, rational(21, 40)).unwrap();
        p.set(3, 4, rational(21, 40)).unwrap();
        let tr = simulate_transcript(&ks, &p, 8, Seed::from(3)).unwrap();
        assert_eq!(tr.key_bits(), 42);
        assert!(!build_security_matrix(&ks, &tr).unwrap().full_rank);
    }

    #[test]
    fn hacked_messages_are_refused() {
        let ks = generate(&SchemeSpec::Combinational { a: 3 }, 4, 6, Seed::from(2)).unwrap();
        let p = RateProfile::uniform(4, 1, &rational(1, 6)).unwrap();
        let mut tr = simulate_transcript(&ks, &p, 2, Seed::from(3)).unwrap();
        tr.hacked = NodeSet::new([4]);
        assert!(matches!(build_security_matrix(&ks, &tr), Err(Error::HackedChannel(..))));
        let tr = tr.restricted_to(&NodeSet::new([4]));
        assert!(matches!(
            exact_mi_oracle(&ks, &tr, MiScope::Channel(1, 4)),
            Err(Error::HackedChannel(1, 4))
        ));
    }

    #[test]
    fn key_reuse_leaks() {
        let ks = generate(&SchemeSpec::Combinational { a: 3 }, 4, 9, Seed::from(5)).unwrap();
        let mut tr = Transcript::default();
        for _ in 0..2 {
            let mut state = ChannelCipherState::with_weight(1, 2, 3).unwrap();
            let ct = encrypt(&ks, &mut state, &BitString::ones(1), Seed::from(77)).unwrap();
            tr.record(&ks, ct, 3).unwrap();
        }
        assert!(!build_security_matrix(&ks, &tr).unwrap().full_rank);
        assert_eq!(exact_mi_oracle(&ks, &tr, MiScope::Channel(1, 2)).unwrap(), 1.0);
    }

    #[test]
    fn conditional_mi_small_cases() {
        let same = generate(&SchemeSpec::Same, 4, 8, Seed::from(1)).unwrap();
        assert_eq!(conditional_mi(&same, 2, 0).unwrap(), 8);
        assert_eq!(conditional_mi(&same, 2, 1).unwrap(), 0);
        let pair = generate(&SchemeSpec::Pairwise, 4, 9, Seed::from(1)).unwrap();
        assert_eq!(conditional_mi(&pair, 2, 0).unwrap(), 3);
        assert_eq!(conditional_mi(&pair, 3, 0).unwrap(), 0);
        assert_eq!(conditional_mi(&pair, 1, 0).unwrap(), 9);
        assert!(conditional_mi(&pair, 3, 2).is_err());
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(200, 200);
        assert!(lo > 0.98 && hi == 1.0);
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi < 0.08);
    }

    #[test]
    fn more_rows_than_columns_never_independent() {
        let rec = lemma_rank_experiment(&LemmaConfig {
            r: 100,
            k: 120,
            sampler: Sampler::FixedWeight { d: 10 },
            trials: 20,
            seed: Seed::from(1),
        })
        .unwrap();
        assert_eq!(rec.successes, 0);
    }
}
