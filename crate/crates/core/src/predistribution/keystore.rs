use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gf2::BitString;
use crate::predistribution::design::random_regular_groups;
use crate::predistribution::permutation::PermutationFamily;
use crate::predistribution::{NodeId, NodeSet, SchemeSpec};
use crate::rates::{binomial, Rational};
use crate::seed::Seed;

/// Stream labels for seeds derived from a keystore's root seed.
pub(crate) mod stream {
    pub const POOL: u64 = 1;
    pub const PERMUTATION: u64 = 2;
    pub const DESIGN: u64 = 3;
    pub const PART_BASE: u64 = 16;
}

const NO_GROUP: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenerateOptions {
    /// Fail instead of rounding down when a group quota does not divide the budget.
    pub strict: bool,
}

/// One non-hybrid component of a store, occupying a contiguous pool range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub spec: SchemeSpec,
    pub offset: usize,
    pub len: usize,
    /// Per-node storage given to this part.
    pub budget: u64,
    pub seed: Seed,
    pub permutation: Option<PermutationFamily>,
}

impl Part {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len
    }

    pub fn is_random(&self) -> bool {
        matches!(self.spec, SchemeSpec::Random { .. })
    }
}

/// Pool bits handed to exactly the nodes of `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub nodes: NodeSet,
    /// Ascending pool indices.
    pub bits: Vec<usize>,
}

/// Splits the per-node budget between hybrid components and sizes each part.
pub(crate) fn plan_parts(
    spec: &SchemeSpec,
    n: u32,
    l: u64,
    part_seeds: &[Seed],
    options: GenerateOptions,
) -> Result<Vec<Part>> {
    spec.validate(n)?;
    let components = spec.components();
    if part_seeds.len() != components.len() {
        return Err(Error::Format(format!(
            "scheme has {} parts but {} part seeds were given",
            components.len(),
            part_seeds.len()
        )));
    }
    let mut budgets = Vec::with_capacity(components.len());
    let mut left = l;
    for (k, (fraction, _)) in components.iter().enumerate() {
        let b = if k + 1 == components.len() {
            left
        } else {
            (fraction * Rational::from_integer(l.into()))
                .floor()
                .to_integer()
                .to_u64()
                .unwrap_or(0)
        };
        budgets.push(b);
        left -= b;
    }

    let mut parts = Vec::with_capacity(components.len());
    let mut offset = 0usize;
    for (((_, child), budget), seed) in components.iter().zip(budgets).zip(part_seeds) {
        let (len, permutation) = part_size(child, n, budget, *seed, options)?;
        parts.push(Part {
            spec: (*child).clone(),
            offset,
            len,
            budget,
            seed: *seed,
            permutation,
        });
        offset += len;
    }
    Ok(parts)
}

fn quota_groups(spec: &SchemeSpec, n: u32) -> Result<(u64, u64)> {
    let too_big = || Error::InvalidScheme(format!("{spec} has too many groups for n = {n}"));
    match spec {
        SchemeSpec::SampledCombinational { a, m } => Ok((*a as u64 * *m as u64 / n as u64, *m as u64)),
        other => {
            let a = other.group_size(n).expect("combinational family") as i64;
            let quota = binomial(n as i64 - 1, a - 1).to_u64().ok_or_else(too_big)?;
            let count = binomial(n as i64, a).to_u64().ok_or_else(too_big)?;
            Ok((quota, count))
        }
    }
}

fn part_size(
    spec: &SchemeSpec,
    n: u32,
    budget: u64,
    seed: Seed,
    options: GenerateOptions,
) -> Result<(usize, Option<PermutationFamily>)> {
    if let SchemeSpec::Random { p } = spec {
        if budget == 0 {
            return Ok((0, None));
        }
        let u = (Rational::from_integer(budget.into()) / p)
            .round()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidScheme("pool too large".into()))?;
        let perm = PermutationFamily::new(u, n, seed.derive(stream::PERMUTATION))?;
        return Ok((u as usize, Some(perm)));
    }
    let (quota, count) = quota_groups(spec, n)?;
    if options.strict && budget % quota != 0 {
        return Err(Error::QuotaNotDivisible { l: budget, quota });
    }
    let len = (budget / quota)
        .checked_mul(count)
        .filter(|&v| v <= u32::MAX as u64)
        .ok_or_else(|| Error::InvalidScheme(format!("{spec} pool too large for n = {n}")))?;
    Ok((len as usize, None))
}

/// Holder sets for every bit of one part, as `(node set, local bit indices)`.
fn assign_part(part: &Part, n: u32) -> Result<Vec<(NodeSet, Vec<usize>)>> {
    if part.len == 0 {
        return Ok(Vec::new());
    }
    if let Some(perm) = &part.permutation {
        let mut by_holders: BTreeMap<NodeSet, Vec<usize>> = BTreeMap::new();
        for k in 1..=part.len as u64 {
            let mut holders = Vec::new();
            for i in 1..=n {
                if perm.permute(k, i)? <= part.budget {
                    holders.push(i);
                }
            }
            if !holders.is_empty() {
                by_holders
                    .entry(NodeSet::from_sorted(holders))
                    .or_default()
                    .push(part.offset + k as usize - 1);
            }
        }
        return Ok(by_holders.into_iter().collect());
    }
    let sets: Vec<NodeSet> = match &part.spec {
        SchemeSpec::SampledCombinational { a, m } => {
            random_regular_groups(n, *a, *m, part.seed.derive(stream::DESIGN))?
        }
        other => {
            let a = other.group_size(n).expect("combinational family") as usize;
            (1..=n)
                .combinations(a)
                .map(NodeSet::from_sorted)
                .collect()
        }
    };
    let size = part.len / sets.len();
    Ok(sets
        .into_iter()
        .enumerate()
        .map(|(k, nodes)| {
            let start = part.offset + k * size;
            (nodes, (start..start + size).collect())
        })
        .collect())
}

/// The pre-distributed secret material of a whole network.
#[derive(Clone, Debug)]
pub struct KeyStore {
    n: u32,
    l: u64,
    scheme: SchemeSpec,
    seed: Seed,
    pool: BitString,
    parts: Vec<Part>,
    groups: Vec<Group>,
    bit_group: Vec<u32>,
    slots: Vec<Vec<usize>>,
}

pub fn generate(spec: &SchemeSpec, n: u32, l: u64, seed: Seed) -> Result<KeyStore> {
    generate_with(spec, n, l, seed, GenerateOptions::default())
}

pub fn generate_with(
    spec: &SchemeSpec,
    n: u32,
    l: u64,
    seed: Seed,
    options: GenerateOptions,
) -> Result<KeyStore> {
    if l == 0 {
        return Err(Error::InvalidArgument("per-node budget l must be positive".into()));
    }
    let part_seeds = part_seeds(spec, seed);
    let parts = plan_parts(spec, n, l, &part_seeds, options)?;
    let mut merged: BTreeMap<NodeSet, Vec<usize>> = BTreeMap::new();
    for part in &parts {
        for (nodes, bits) in assign_part(part, n)? {
            merged.entry(nodes).or_default().extend(bits);
        }
    }
    let u: usize = parts.iter().map(|p| p.len).sum();
    let pool = BitString::random(u, &mut seed.derive(stream::POOL).rng());
    KeyStore::assemble(n, l, spec.clone(), seed, parts, merged, pool)
}

pub(crate) fn part_seeds(spec: &SchemeSpec, seed: Seed) -> Vec<Seed> {
    (0..spec.components().len())
        .map(|k| seed.derive(stream::PART_BASE + k as u64))
        .collect()
}

fn check_node(i: NodeId, n: u32) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::InvalidNode { node: i, n });
    }
    Ok(())
}

fn check_pair(i: NodeId, j: NodeId, n: u32) -> Result<()> {
    check_node(i, n)?;
    check_node(j, n)?;
    if i == j {
        return Err(Error::InvalidArgument(format!("channel ({i}, {j}) needs two distinct nodes")));
    }
    Ok(())
}

/// Slot order for one node: group parts list their bits ascending, random
/// parts list location `1..=budget` through the inverse permutation.
fn node_slots<'a>(
    node: NodeId,
    parts: &[Part],
    held: impl Iterator<Item = &'a usize>,
) -> Result<Vec<usize>> {
    let mut held: Vec<usize> = held.copied().collect();
    held.sort_unstable();
    let mut slots = Vec::with_capacity(held.len());
    for part in parts {
        match &part.permutation {
            Some(perm) => {
                for loc in 1..=part.budget {
                    slots.push(part.offset + perm.invert(loc, node)? as usize - 1);
                }
            }
            None => slots.extend(held.iter().copied().filter(|b| part.range().contains(b))),
        }
    }
    Ok(slots)
}

impl KeyStore {
    pub(crate) fn assemble(
        n: u32,
        l: u64,
        scheme: SchemeSpec,
        seed: Seed,
        parts: Vec<Part>,
        groups: BTreeMap<NodeSet, Vec<usize>>,
        pool: BitString,
    ) -> Result<KeyStore> {
        let u = pool.len();
        if parts.iter().map(|p| p.len).sum::<usize>() != u {
            return Err(Error::Format(format!("pool of {u} bits does not match the scheme layout")));
        }
        let mut bit_group = vec![NO_GROUP; u];
        let mut list = Vec::with_capacity(groups.len());
        for (g, (nodes, mut bits)) in groups.into_iter().filter(|(_, b)| !b.is_empty()).enumerate() {
            if nodes.is_empty() || nodes.iter().any(|i| i == 0 || i > n) {
                return Err(Error::Format(format!("group {nodes} has invalid members")));
            }
            bits.sort_unstable();
            for &b in &bits {
                if b >= u || bit_group[b] != NO_GROUP {
                    return Err(Error::Format(format!("pool bit {b} listed twice or out of range")));
                }
                bit_group[b] = g as u32;
            }
            list.push(Group { nodes, bits });
        }

        let mut held: Vec<Vec<usize>> = vec![Vec::new(); n as usize];
        for group in &list {
            for i in group.nodes.iter() {
                held[i as usize - 1].extend(&group.bits);
            }
        }
        let mut slots = Vec::with_capacity(n as usize);
        for i in 1..=n {
            let s = node_slots(i, &parts, held[i as usize - 1].iter())?;
            if s.len() as u64 > l {
                return Err(Error::Format(format!("node {i} holds {} bits, budget {l}", s.len())));
            }
            if s.len() != held[i as usize - 1].len()
                || s.iter().any(|&b| !list[bit_group[b] as usize].nodes.contains(i))
            {
                return Err(Error::Format(format!(
                    "node {i}'s locations disagree with the group table"
                )));
            }
            slots.push(s);
        }
        Ok(KeyStore {
            n,
            l,
            scheme,
            seed,
            pool,
            parts,
            groups: list,
            bit_group,
            slots,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// Total pool size `u`.
    pub fn u(&self) -> usize {
        self.pool.len()
    }

    pub fn scheme(&self) -> &SchemeSpec {
        &self.scheme
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn pool(&self) -> &BitString {
        &self.pool
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    /// Non-empty groups in canonical node-set order.
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group(&self, nodes: &NodeSet) -> Option<&Group> {
        self.groups
            .binary_search_by(|g| g.nodes.cmp(nodes))
            .ok()
            .map(|k| &self.groups[k])
    }

    /// Nodes holding pool bit `index`, if it was handed out at all.
    pub fn holders(&self, index: usize) -> Option<&NodeSet> {
        match self.bit_group.get(index) {
            Some(&g) if g != NO_GROUP => Some(&self.groups[g as usize].nodes),
            _ => None,
        }
    }

    /// Pool indices held by node `i`, in storage-location order.
    pub fn node_bits(&self, i: NodeId) -> Result<&[usize]> {
        check_node(i, self.n)?;
        Ok(&self.slots[i as usize - 1])
    }

    pub fn is_symmetric(&self) -> bool {
        self.scheme.is_symmetric()
    }

    /// Pool bits held by both `i` and `j`, ascending.
    pub fn common_bits(&self, i: NodeId, j: NodeId) -> Result<Vec<usize>> {
        check_pair(i, j, self.n)?;
        let mut bits: Vec<usize> = self
            .groups
            .iter()
            .filter(|g| g.nodes.contains(i) && g.nodes.contains(j))
            .flat_map(|g| g.bits.iter().copied())
            .collect();
        bits.sort_unstable();
        Ok(bits)
    }

    /// Pool bits known to an eavesdropper who read every node in `hacked`.
    pub fn hacked_bits(&self, hacked: &NodeSet) -> Result<Vec<usize>> {
        for i in hacked.iter() {
            check_node(i, self.n)?;
        }
        let mut bits: Vec<usize> = self
            .groups
            .iter()
            .filter(|g| !g.nodes.is_disjoint(hacked))
            .flat_map(|g| g.bits.iter().copied())
            .collect();
        bits.sort_unstable();
        Ok(bits)
    }

    /// `|∪ u_ij \ u_h|` over the given channels.
    pub fn unhacked_union_size(&self, channels: &[(NodeId, NodeId)], hacked: &NodeSet) -> Result<u64> {
        for &(i, j) in channels {
            check_pair(i, j, self.n)?;
            if hacked.contains(i) || hacked.contains(j) {
                return Err(Error::HackedChannel(i.min(j), i.max(j)));
            }
        }
        Ok(self
            .groups
            .iter()
            .filter(|g| {
                g.nodes.is_disjoint(hacked)
                    && channels.iter().any(|&(i, j)| g.nodes.contains(i) && g.nodes.contains(j))
            })
            .map(|g| g.bits.len() as u64)
            .sum())
    }

    /// Shared unhacked-secret-bit rate of a channel set, `|∪ u_ij \ u_h| / l`.
    pub fn r_secrecy(&self, channels: &[(NodeId, NodeId)], hacked: &NodeSet) -> Result<Rational> {
        let size = self.unhacked_union_size(channels, hacked)?;
        Ok(Rational::new(size.into(), self.l.into()))
    }

    /// What node `i` carries after deployment.
    pub fn node_view(&self, i: NodeId) -> Result<NodeView> {
        check_node(i, self.n)?;
        let memberships = self
            .groups
            .iter()
            .filter(|g| g.nodes.contains(i))
            .filter_map(|g| {
                let bits: Vec<usize> = g
                    .bits
                    .iter()
                    .copied()
                    .filter(|&b| !self.part_of(b).is_random())
                    .collect();
                (!bits.is_empty()).then(|| Group {
                    nodes: g.nodes.clone(),
                    bits,
                })
            })
            .collect();
        let slots = &self.slots[i as usize - 1];
        let values = BitString::from_bits(slots.iter().map(|&b| self.pool.get(b)));
        NodeView::assemble(
            i,
            self.n,
            self.l,
            self.scheme.clone(),
            self.parts.clone(),
            memberships,
            values,
        )
    }

    pub fn part_of(&self, index: usize) -> &Part {
        self.parts
            .iter()
            .find(|p| p.range().contains(&index))
            .expect("pool index inside some part")
    }
}

/// Key material a party can use to derive channel keys.
pub trait SecretMaterial {
    fn node_count(&self) -> u32;

    /// Per-node budget `l`.
    fn budget(&self) -> u64;

    /// Ascending pool indices shared by `i` and `j`.
    fn common_bits(&self, i: NodeId, j: NodeId) -> Result<Vec<usize>>;

    fn pool_bit(&self, index: usize) -> Result<bool>;

    fn common_values(&self, i: NodeId, j: NodeId) -> Result<(Vec<usize>, BitString)> {
        let bits = SecretMaterial::common_bits(self, i, j)?;
        let values = bits
            .iter()
            .map(|&b| self.pool_bit(b))
            .collect::<Result<Vec<_>>>()?;
        Ok((bits, BitString::from_bits(values)))
    }
}

impl SecretMaterial for KeyStore {
    fn node_count(&self) -> u32 {
        self.n
    }

    fn budget(&self) -> u64 {
        self.l
    }

    fn common_bits(&self, i: NodeId, j: NodeId) -> Result<Vec<usize>> {
        KeyStore::common_bits(self, i, j)
    }

    fn pool_bit(&self, index: usize) -> Result<bool> {
        if index >= self.pool.len() {
            return Err(Error::InvalidArgument(format!("pool index {index} out of range")));
        }
        Ok(self.pool.get(index))
    }
}

/// One node's share of a keystore: its stored bit values by location, the
/// groups it belongs to, and the public permutation data needed to locate
/// bits of random parts.
#[derive(Clone, Debug)]
pub struct NodeView {
    node: NodeId,
    n: u32,
    l: u64,
    scheme: SchemeSpec,
    parts: Vec<Part>,
    memberships: Vec<Group>,
    values: BitString,
    slot_pool: Vec<usize>,
    by_pool: Vec<(usize, usize)>,
}

impl NodeView {
    pub(crate) fn assemble(
        node: NodeId,
        n: u32,
        l: u64,
        scheme: SchemeSpec,
        parts: Vec<Part>,
        memberships: Vec<Group>,
        values: BitString,
    ) -> Result<NodeView> {
        check_node(node, n)?;
        if memberships.iter().any(|g| !g.nodes.contains(node)) {
            return Err(Error::Format(format!("membership list of node {node} is inconsistent")));
        }
        let slot_pool = node_slots(node, &parts, memberships.iter().flat_map(|g| g.bits.iter()))?;
        if slot_pool.len() != values.len() {
            return Err(Error::Format(format!(
                "node {node} stores {} values for {} locations",
                values.len(),
                slot_pool.len()
            )));
        }
        let mut by_pool: Vec<(usize, usize)> =
            slot_pool.iter().enumerate().map(|(slot, &b)| (b, slot)).collect();
        by_pool.sort_unstable();
        Ok(NodeView {
            node,
            n,
            l,
            scheme,
            parts,
            memberships,
            values,
            slot_pool,
            by_pool,
        })
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn scheme(&self) -> &SchemeSpec {
        &self.scheme
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn memberships(&self) -> &[Group] {
        &self.memberships
    }

    /// Stored values by location.
    pub fn values(&self) -> &BitString {
        &self.values
    }

    /// Pool index of every storage location.
    pub fn locations(&self) -> &[usize] {
        &self.slot_pool
    }

    fn peer_of(&self, i: NodeId, j: NodeId) -> Result<NodeId> {
        check_pair(i, j, self.n)?;
        if i == self.node {
            Ok(j)
        } else if j == self.node {
            Ok(i)
        } else {
            Err(Error::InvalidArgument(format!(
                "node {} cannot see channel ({i}, {j})",
                self.node
            )))
        }
    }
}

impl SecretMaterial for NodeView {
    fn node_count(&self) -> u32 {
        self.n
    }

    fn budget(&self) -> u64 {
        self.l
    }

    /// Group parts are read from the membership table; random parts walk the
    /// node's own locations through the inverse permutation and keep the
    /// indices the peer stores within its budget.
    fn common_bits(&self, i: NodeId, j: NodeId) -> Result<Vec<usize>> {
        let peer = self.peer_of(i, j)?;
        let mut bits: Vec<usize> = self
            .memberships
            .iter()
            .filter(|g| g.nodes.contains(peer))
            .flat_map(|g| g.bits.iter().copied())
            .collect();
        for part in &self.parts {
            if let Some(perm) = &part.permutation {
                for loc in 1..=part.budget {
                    let k = perm.invert(loc, self.node)?;
                    if perm.permute(k, peer)? <= part.budget {
                        bits.push(part.offset + k as usize - 1);
                    }
                }
            }
        }
        bits.sort_unstable();
        Ok(bits)
    }

    fn pool_bit(&self, index: usize) -> Result<bool> {
        self.by_pool
            .binary_search_by(|&(b, _)| b.cmp(&index))
            .map(|k| self.values.get(self.by_pool[k].1))
            .map_err(|_| {
                Error::InvalidArgument(format!("node {} does not hold pool bit {index}", self.node))
            })
    }
}
