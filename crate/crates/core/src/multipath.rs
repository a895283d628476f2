//! Delivery over node-disjoint paths with XOR secret sharing.
//!
//! A message is split into `t+1` packets whose XOR is the message; any `t` of
//! them are uniform and independent of it. Sending each packet along its own
//! internally node-disjoint path means `t` hacked relays learn nothing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::amplify::channel;
use crate::error::{Error, Result};
use crate::gf2::BitString;
use crate::predistribution::{NodeId, NodeSet};
use crate::seed::{Seed, uniform_below};

/// An undirected simple graph on nodes `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: u32,
    adj: Vec<BTreeSet<NodeId>>,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    n: u32,
    adjacency: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Topology {
    pub fn new(n: u32) -> Self {
        Topology {
            n,
            adj: vec![BTreeSet::new(); n as usize + 1],
        }
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Topology::new(n);
        for i in 1..=n {
            for j in i + 1..=n {
                g.add_edge(i, j).expect("valid nodes");
            }
        }
        g
    }

    /// Erdős–Rényi graph: each edge present with probability `p`.
    pub fn random(n: u32, p: f64, seed: Seed) -> Self {
        let mut rng = seed.rng();
        let threshold = (p.clamp(0.0, 1.0) * (1u64 << 32) as f64) as u64;
        let mut g = Topology::new(n);
        for i in 1..=n {
            for j in i + 1..=n {
                if uniform_below(&mut rng, 1 << 32) < threshold {
                    g.add_edge(i, j).expect("valid nodes");
                }
            }
        }
        g
    }

    pub fn from_edges(n: u32, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut g = Topology::new(n);
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::InvalidNode { node: i, n: self.n });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        let (i, j) = channel(i, j)?;
        self.adj[i as usize].insert(j);
        self.adj[j as usize].insert(i);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) {
        if let Some(a) = self.adj.get_mut(i as usize) {
            a.remove(&j);
        }
        if let Some(b) = self.adj.get_mut(j as usize) {
            b.remove(&i);
        }
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adj.get(i as usize).is_some_and(|a| a.contains(&j))
    }

    pub fn neighbors(&self, i: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[i as usize].iter().copied()
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        (1..=self.n)
            .flat_map(|i| self.adj[i as usize].range(i + 1..).map(move |&j| (i, j)))
            .collect()
    }

    /// Reads `{"n": 4, "adjacency": {"1": [2, 3], ...}}`. An edge listed in
    /// either direction is enough.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text)?;
        let mut g = Topology::new(file.n);
        for (i, list) in file.adjacency {
            for j in list {
                g.add_edge(i, j)?;
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let adjacency = (1..=self.n)
            .map(|i| (i, self.neighbors(i).collect()))
            .collect();
        serde_json::to_string_pretty(&TopologyFile { n: self.n, adjacency }).expect("topology serializes")
    }
}

/// Result of a disjoint-path search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PathSearch {
    Found { paths: Vec<Vec<NodeId>> },
    /// Fewer paths exist. `separator` plus, when `direct_edge` is set, the
    /// edge between the endpoints separates them, and its size equals `max`.
    Infeasible {
        max: usize,
        separator: NodeSet,
        direct_edge: bool,
        paths: Vec<Vec<NodeId>>,
    },
}

struct FlowNet {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i32>,
    next: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNet {
    fn new(vertices: usize) -> Self {
        FlowNet {
            head: vec![NIL; vertices],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        }
    }

    fn arc(&mut self, a: usize, b: usize, c: i32) {
        for (x, y, c) in [(a, b, c), (b, a, 0)] {
            self.to.push(y);
            self.cap.push(c);
            self.next.push(self.head[x]);
            self.head[x] = self.to.len() - 1;
        }
    }

    fn arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(self.head[v]).filter(|&e| e != NIL), move |&e| {
            Some(self.next[e]).filter(|&e| e != NIL)
        })
    }

    /// Shortest augmenting path from `s` to `t`; returns whether one was found.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via = vec![NIL; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let mut arcs: Vec<usize> = self.arcs(v).collect();
            arcs.sort_by_key(|&e| self.to[e]);
            for e in arcs {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = e;
                    queue.push_back(w);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut w = t;
        while w != s {
            let e = via[w];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            w = self.to[e ^ 1];
        }
        true
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for e in self.arcs(v) {
                if self.cap[e] > 0 && !seen[self.to[e]] {
                    seen[self.to[e]] = true;
                    stack.push(self.to[e]);
                }
            }
        }
        seen
    }
}

/// Up to `count` internally node-disjoint paths from `s` to `dst`, via unit
/// node capacities and augmenting paths. Paths are returned sorted by node
/// sequence. When fewer exist, the result carries a minimum separator.
pub fn disjoint_paths(g: &Topology, s: NodeId, dst: NodeId, count: usize) -> Result<PathSearch> {
    g.check(s)?;
    g.check(dst)?;
    channel(s, dst)?;
    let n = g.n() as usize;
    let (inp, out) = (|v: NodeId| 2 * v as usize, |v: NodeId| 2 * v as usize + 1);
    let big = count as i32 + 1;
    let mut net = FlowNet::new(2 * n + 2);
    for v in 1..=g.n() {
        let c = if v == s || v == dst { big } else { 1 };
        net.arc(inp(v), out(v), c);
    }
    // Only node arcs (and the direct edge) may be cut, so a minimum cut is a
    // vertex separator.
    for (i, j) in g.edges() {
        let c = if (i, j) == channel(s, dst)? { 1 } else { big };
        net.arc(out(i), inp(j), c);
        net.arc(out(j), inp(i), c);
    }
    let mut flow = 0;
    while flow < count && net.augment(out(s), inp(dst)) {
        flow += 1;
    }

    // Walk the saturated edge arcs from s to recover the paths, cancelling
    // flow that runs both ways along an edge and cutting any loops.
    let mut used: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (i, j) in g.edges() {
        let carries = |a: NodeId, b: NodeId| {
            net.arcs(out(a))
                .find(|&e| net.to[e] == inp(b) && e % 2 == 0)
                .is_some_and(|e| net.cap[e ^ 1] > 0)
        };
        match (carries(i, j), carries(j, i)) {
            (true, false) => used.entry(i).or_default().push(j),
            (false, true) => used.entry(j).or_default().push(i),
            _ => {}
        }
    }
    let mut paths = Vec::with_capacity(flow);
    while let Some(first) = used.get_mut(&s).and_then(|l| l.pop()) {
        let mut path = vec![s, first];
        while *path.last().expect("non-empty") != dst {
            let v = *path.last().expect("non-empty");
            let next = used.get_mut(&v).and_then(|l| l.pop()).expect("flow is conserved");
            match path.iter().position(|&w| w == next) {
                Some(k) => path.truncate(k + 1),
                None => path.push(next),
            }
            if path.len() == 1 {
                break;
            }
        }
        if path.len() > 1 {
            paths.push(path);
        }
    }
    paths.sort();
    if flow == count {
        return Ok(PathSearch::Found { paths });
    }
    let reach = net.reachable(out(s));
    let separator = NodeSet::new(
        (1..=g.n()).filter(|&v| v != s && v != dst && reach[inp(v)] && !reach[out(v)]),
    );
    let direct_edge = g.has_edge(s, dst);
    debug_assert_eq!(separator.len() + direct_edge as usize, flow);
    Ok(PathSearch::Infeasible {
        max: flow,
        separator,
        direct_edge,
        paths,
    })
}

/// `t+1` packets whose XOR is the message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareSet {
    pub packets: Vec<BitString>,
}

/// Splits `x` into `t+1` packets: `t` uniform masks from `seed`, then
/// `x` XOR all masks.
pub fn share(x: &BitString, t: usize, seed: Seed) -> ShareSet {
    let mut rng = seed.rng();
    let masks: Vec<BitString> = (0..t).map(|_| BitString::random(x.len(), &mut rng)).collect();
    share_with(x, &masks).expect("masks match the message length")
}

/// Deterministic sharing with caller-supplied masks.
pub fn share_with(x: &BitString, masks: &[BitString]) -> Result<ShareSet> {
    let mut last = x.clone();
    for m in masks {
        last.xor_assign(m)?;
    }
    let mut packets = masks.to_vec();
    packets.push(last);
    Ok(ShareSet { packets })
}

/// XOR of exactly `t+1` packets.
pub fn reconstruct(packets: &[BitString], t: usize) -> Result<BitString> {
    if packets.len() != t + 1 {
        return Err(Error::DimensionMismatch {
            expected: t + 1,
            actual: packets.len(),
        });
    }
    let mut out = packets[0].clone();
    for p in &packets[1..] {
        out.xor_assign(p)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChannelCost {
    pub i: NodeId,
    pub j: NodeId,
    pub bits: u64,
}

/// Delivery plan: one packet per path, every hop a one-time-pad channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub source: NodeId,
    pub destination: NodeId,
    pub t: usize,
    pub message_bits: u64,
    pub paths: Vec<Vec<NodeId>>,
    pub channel_costs: Vec<ChannelCost>,
    pub total_bits: u64,
}

/// Plans delivery of an `m`-bit message tolerating `t` hacked relays, never
/// using a channel in `blocked`.
pub fn plan(
    g: &Topology,
    s: NodeId,
    dst: NodeId,
    t: usize,
    m: u64,
    blocked: &[(NodeId, NodeId)],
) -> Result<std::result::Result<Plan, PathSearch>> {
    let mut usable = g.clone();
    for &(i, j) in blocked {
        usable.remove_edge(i, j);
    }
    let paths = match disjoint_paths(&usable, s, dst, t + 1)? {
        PathSearch::Found { paths } => paths,
        infeasible => return Ok(Err(infeasible)),
    };
    let mut costs: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for path in &paths {
        for hop in path.windows(2) {
            *costs.entry(channel(hop[0], hop[1])?).or_default() += m;
        }
    }
    let total_bits = costs.values().sum();
    Ok(Ok(Plan {
        source: s,
        destination: dst,
        t,
        message_bits: m,
        paths,
        channel_costs: costs.into_iter().map(|((i, j), bits)| ChannelCost { i, j, bits }).collect(),
        total_bits,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_has_two_paths() {
        let g = Topology::complete(4);
        for (s, d) in [(1, 2), (1, 4), (3, 2)] {
            match disjoint_paths(&g, s, d, 2).unwrap() {
                PathSearch::Found { paths } => {
                    assert_eq!(paths.len(), 2);
                    assert!(paths.iter().any(|p| p.len() == 2));
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn cut_vertex_is_reported() {
        let g = Topology::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        match disjoint_paths(&g, 1, 3, 2).unwrap() {
            PathSearch::Infeasible { max, separator, direct_edge, paths } => {
                assert_eq!(max, 1);
                assert_eq!(separator, NodeSet::new([2]));
                assert!(!direct_edge);
                assert_eq!(paths, vec![vec![1, 2, 3]]);
            }
            other => panic!("{other:?}"),
        }
        let lonely = Topology::new(3);
        match disjoint_paths(&lonely, 1, 3, 1).unwrap() {
            PathSearch::Infeasible { max, separator, .. } => {
                assert_eq!(max, 0);
                assert!(separator.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shares_roundtrip() {
        let x = BitString::random(100, &mut Seed::from(1).rng());
        for t in 0..4 {
            let s = share(&x, t, Seed::from(t as u64));
            assert_eq!(s.packets.len(), t + 1);
            assert_eq!(reconstruct(&s.packets, t).unwrap(), x);
        }
        assert_eq!(share(&x, 0, Seed::from(1)).packets, vec![x.clone()]);
        assert!(reconstruct(&share(&x, 2, Seed::from(1)).packets[..2], 2).is_err());
    }

    #[test]
    fn plan_costs_each_hop() {
        let g = Topology::complete(5);
        let p = plan(&g, 1, 2, 1, 10, &[]).unwrap().unwrap();
        assert_eq!(p.paths, vec![vec![1, 2], vec![1, 3, 2]]);
        assert_eq!(p.total_bits, 30);
        let p = plan(&g, 1, 2, 1, 10, &[(1, 2)]).unwrap().unwrap();
        assert!(p.paths.iter().all(|path| path.len() == 3));
        assert_eq!(p.total_bits, 40);
        assert!(plan(&g, 1, 2, 4, 10, &[]).unwrap().is_err());
    }

    #[test]
    fn topology_json() {
        let g = Topology::from_edges(4, &[(1, 2), (2, 3), (4, 1)]).unwrap();
        let back = Topology::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let text = r#"{"n": 3, "adjacency": {"1": [2], "2": [3]}}"#;
        assert_eq!(Topology::from_json(text).unwrap().edges(), vec![(1, 2), (2, 3)]);
        assert!(Topology::from_json(r#"{"n": 2, "adjacency": {"1": [1]}}"#).is_err());
    }
}
