//! Random regular group designs: `m` distinct `a`-subsets of `{1..n}` with
//! every node in exactly `a·m/n` of them, the shape of a regular LDPC
//! parity-check matrix (rows are groups, columns are nodes).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::predistribution::{NodeId, NodeSet};
use crate::rates::binomial;
use crate::seed::{sample_distinct, Seed};

pub const DESIGN_RETRIES: usize = 10_000;
const PICKS_PER_GROUP: usize = 64;

/// Builds the groups one at a time. Nodes whose remaining degree equals the
/// number of groups still to place must join the current group; the rest of
/// the group is sampled uniformly among nodes with spare degree. Duplicate
/// groups are resampled, and a dead end restarts the whole construction.
pub fn random_regular_groups(n: u32, a: u32, m: u32, seed: Seed) -> Result<Vec<NodeSet>> {
    if a == 0 || a > n {
        return Err(Error::InvalidArgument(format!("group size {a} outside [1, {n}]")));
    }
    if (a as u64 * m as u64) % n as u64 != 0 {
        return Err(Error::InvalidArgument(format!(
            "a*m = {} not divisible by n = {n}",
            a as u64 * m as u64
        )));
    }
    if binomial(n as i64, a as i64) < m.into() {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds C({n}, {a})")));
    }
    let degree = (a as u64 * m as u64 / n as u64) as u32;
    let mut rng = seed.rng();
    'attempt: for _ in 0..DESIGN_RETRIES {
        let mut remaining = vec![degree; n as usize];
        let mut used: BTreeSet<Vec<NodeId>> = BTreeSet::new();
        let mut groups = Vec::with_capacity(m as usize);
        for left in (1..=m).rev() {
            let forced: Vec<NodeId> = (1..=n).filter(|&i| remaining[i as usize - 1] == left).collect();
            let spare: Vec<NodeId> = (1..=n)
                .filter(|&i| (1..left).contains(&remaining[i as usize - 1]))
                .collect();
            if forced.len() > a as usize || forced.len() + spare.len() < a as usize {
                continue 'attempt;
            }
            let need = a as usize - forced.len();
            let mut placed = None;
            for _ in 0..PICKS_PER_GROUP {
                let mut group = forced.clone();
                group.extend(sample_distinct(&mut rng, spare.len(), need).into_iter().map(|k| spare[k]));
                group.sort_unstable();
                if !used.contains(&group) {
                    placed = Some(group);
                    break;
                }
            }
            let Some(group) = placed else { continue 'attempt };
            for &i in &group {
                remaining[i as usize - 1] -= 1;
            }
            used.insert(group.clone());
            groups.push(NodeSet::from_sorted(group));
        }
        return Ok(groups);
    }
    Err(Error::DesignRetriesExhausted {
        retries: DESIGN_RETRIES,
    })
}
