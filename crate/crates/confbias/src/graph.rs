//! Undirected graphs, induced subgraphs, BFS distances, distance histograms
//! and labeled-tree enumeration.
//!
//! Node identity is stable: subgraphs are taken with a membership mask over
//! the full id space, never relabeled, so allocations and biases computed on
//! different node sets refer to the same ids.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{rat_int, DeltaPoly, Rat};
use crate::{Error, Result};

pub const MAX_NODES: usize = 64;

/// A set of node ids, backed by a bitmask. Graphs are capped at 64 nodes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(n: usize) -> NodeSet {
        assert!(n <= MAX_NODES);
        if n == MAX_NODES {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> NodeSet {
        assert!(i < MAX_NODES);
        NodeSet(1u64 << i)
    }

    pub fn from_nodes(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    pub fn from_mask(mask: u64) -> NodeSet {
        NodeSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1u64 << i) != 0
    }

    pub fn with(self, i: usize) -> NodeSet {
        NodeSet(self.0 | NodeSet::singleton(i).0)
    }

    pub fn without(self, i: usize) -> NodeSet {
        NodeSet(self.0 & !NodeSet::singleton(i).0)
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn nodes(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter()
            .fold(NodeSet::EMPTY, |acc, i| acc.with(i))
    }
}

impl std::fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.nodes().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let nodes: Vec<usize> = Vec::deserialize(deserializer)?;
        for &i in &nodes {
            if i >= MAX_NODES {
                return Err(D::Error::custom(format!("node id {i} too large")));
            }
        }
        Ok(NodeSet::from_nodes(&nodes))
    }
}

/// An undirected simple graph over dense integer node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, deduplicating edges after canonicalization.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n > MAX_NODES {
            return Err(Error::GraphTooLarge(MAX_NODES));
        }
        let mut canon = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            canon.insert((a.min(b), a.max(b)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &canon {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: canon,
            adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn full_set(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    fn check_subset(&self, s: NodeSet) -> Result<()> {
        match s.difference(self.full_set()).min() {
            Some(node) => Err(Error::NodeOutOfRange { node, n: self.n }),
            None => Ok(()),
        }
    }

    /// The subgraph induced by `s`, on the same id space.
    pub fn induced_subgraph(&self, s: NodeSet) -> Result<Graph> {
        self.check_subset(s)?;
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| s.contains(a) && s.contains(b))
            .collect();
        Graph::new(self.n, &edges)
    }

    /// BFS distances from `src`, restricted to the induced subgraph on `within`.
    pub fn bfs_distances(&self, src: usize, within: NodeSet) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n];
        if !within.contains(src) {
            return dist;
        }
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if within.contains(v) && dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// The shortest path from `from` to `to` within `within`, inclusive of
    /// both endpoints, or `None` if disconnected.
    pub fn bfs_path(&self, from: usize, to: usize, within: NodeSet) -> Option<Vec<usize>> {
        if !within.contains(from) || !within.contains(to) {
            return None;
        }
        let mut parent = vec![usize::MAX; self.n];
        let mut seen = NodeSet::singleton(from);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.adj[u] {
                if within.contains(v) && !seen.contains(v) {
                    seen = seen.with(v);
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if !seen.contains(to) {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Counts of unordered node pairs at each distance within the induced
    /// subgraph on `s`. Disconnected pairs are omitted (delta^inf := 0).
    pub fn distance_histogram(&self, s: NodeSet) -> Result<std::collections::BTreeMap<u32, u64>> {
        self.check_subset(s)?;
        let mut hist = std::collections::BTreeMap::new();
        for i in s.iter() {
            let dist = self.bfs_distances(i, s);
            for j in s.iter() {
                if j > i {
                    if let Some(t) = dist[j] {
                        *hist.entry(t).or_insert(0u64) += 1;
                    }
                }
            }
        }
        Ok(hist)
    }

    /// The distance-polynomial worth of `s`: 2 * sum_t U_t(G[s]) delta^t.
    pub fn distance_worth(&self, s: NodeSet) -> Result<DeltaPoly> {
        let hist = self.distance_histogram(s)?;
        Ok(DeltaPoly::from_terms(
            hist.into_iter().map(|(t, u)| (t, rat_int(2 * u as i64))),
        ))
    }

    /// Connected components of the induced subgraph on `s`, sorted by their
    /// smallest member.
    pub fn components(&self, s: NodeSet) -> Vec<NodeSet> {
        let mut seen = NodeSet::EMPTY;
        let mut out = Vec::new();
        for i in s.iter() {
            if seen.contains(i) {
                continue;
            }
            let dist = self.bfs_distances(i, s);
            let comp: NodeSet = s.iter().filter(|&j| dist[j].is_some()).collect();
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    /// True when the whole graph is a tree (connected, n-1 edges).
    pub fn is_tree(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.edges.len() == self.n - 1 && self.components(self.full_set()).len() == 1
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = GraphJson::deserialize(deserializer)?;
        let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(json.n, &edges).map_err(|e| D::Error::custom(e.to_string()))
    }
}

const TREE_ENUM_MIN: usize = 2;
const TREE_ENUM_MAX: usize = 8;

/// Decodes a Prufer sequence into the edge list of a labeled tree on `n` nodes.
fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    debug_assert_eq!(seq.len(), n - 2);
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] = 0;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// All n^(n-2) labeled trees on `n` nodes, 2 <= n <= 8.
pub fn enumerate_labeled_trees(n: usize) -> Result<Vec<Graph>> {
    if !(TREE_ENUM_MIN..=TREE_ENUM_MAX).contains(&n) {
        return Err(Error::TreeSizeOutOfRange(n, TREE_ENUM_MIN, TREE_ENUM_MAX));
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut out = Vec::new();
    loop {
        out.push(Graph::new(n, &prufer_decode(&seq, n))?);
        // odometer over [0, n)^(n-2)
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// Evaluates a distance worth at a rational delta; test oracle convenience.
pub fn worth_value(g: &Graph, s: NodeSet, delta: &Rat) -> Result<Rat> {
    Ok(g.distance_worth(s)?.eval(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    fn star(k: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
        Graph::new(k + 1, &edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn build_smallest_star() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn build_isolated_node() {
        let g = Graph::new(1, &[]).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_edges_dedupe_silently() {
        let g = Graph::new(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_rejects_bad_edges() {
        assert!(matches!(
            Graph::new(2, &[(0, 5)]),
            Err(Error::NodeOutOfRange { node: 5, n: 2 })
        ));
        assert!(matches!(Graph::new(2, &[(1, 1)]), Err(Error::SelfLoop(1))));
    }

    #[test]
    fn induced_leaves_of_star_are_edgeless() {
        let g = star(3);
        let sub = g.induced_subgraph(NodeSet::from_nodes(&[1, 2, 3])).unwrap();
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn induced_pair_of_star_keeps_one_edge() {
        // S-R-W with R the hub: {S,R} induces a single edge
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let sub = g.induced_subgraph(NodeSet::from_nodes(&[0, 1])).unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.has_edge(0, 1));
    }

    #[test]
    fn induced_full_set_is_identity() {
        let g = path(5);
        assert_eq!(g.induced_subgraph(g.full_set()).unwrap(), g);
    }

    #[test]
    fn induced_is_idempotent() {
        let g = star(4);
        let s = NodeSet::from_nodes(&[0, 1, 2]);
        let once = g.induced_subgraph(s).unwrap();
        assert_eq!(once.induced_subgraph(s).unwrap(), once);
    }

    #[test]
    fn star_histogram() {
        for k in 1..=6usize {
            let g = star(k);
            let hist = g.distance_histogram(g.full_set()).unwrap();
            assert_eq!(hist.get(&1), Some(&(k as u64)));
            if k >= 2 {
                assert_eq!(hist.get(&2), Some(&((k * (k - 1) / 2) as u64)));
            }
        }
    }

    #[test]
    fn edgeless_histogram_is_empty() {
        let g = Graph::new(3, &[]).unwrap();
        assert!(g.distance_histogram(g.full_set()).unwrap().is_empty());
    }

    #[test]
    fn path4_histogram() {
        let g = path(4);
        let hist = g.distance_histogram(g.full_set()).unwrap();
        let expected: std::collections::BTreeMap<u32, u64> =
            [(1, 3), (2, 2), (3, 1)].into_iter().collect();
        assert_eq!(hist, expected);
    }

    #[test]
    fn worth_of_star3() {
        let g = star(3);
        let w = g.distance_worth(g.full_set()).unwrap();
        assert_eq!(w, DeltaPoly::from_terms([(1, rat(6, 1)), (2, rat(6, 1))]));
    }

    #[test]
    fn tree_counts() {
        assert_eq!(enumerate_labeled_trees(2).unwrap().len(), 1);
        assert_eq!(enumerate_labeled_trees(3).unwrap().len(), 3);
        assert_eq!(enumerate_labeled_trees(4).unwrap().len(), 16);
        assert_eq!(enumerate_labeled_trees(5).unwrap().len(), 125);
        assert!(enumerate_labeled_trees(1).is_err());
        assert!(enumerate_labeled_trees(9).is_err());
    }

    #[test]
    fn n4_trees_split_into_stars_and_paths() {
        // classify by max degree: stars have a degree-3 node, paths do not
        let trees = enumerate_labeled_trees(4).unwrap();
        let mut stars = 0;
        let mut paths = 0;
        for t in &trees {
            let max_deg = (0..4).map(|i| t.neighbors(i).len()).max().unwrap();
            match max_deg {
                3 => stars += 1,
                2 => paths += 1,
                _ => panic!("unexpected degree sequence"),
            }
        }
        assert_eq!(stars, 4);
        assert_eq!(paths, 12);
    }

    #[test]
    fn every_tree_is_a_tree() {
        for n in 2..=5 {
            for t in enumerate_labeled_trees(n).unwrap() {
                assert_eq!(t.edge_count(), n - 1);
                assert!(t.is_tree());
            }
        }
    }

    proptest! {
        #[test]
        fn histogram_counts_connected_pairs(
            n in 1usize..7,
            edge_bits in proptest::collection::vec(any::<bool>(), 21),
            subset_mask in any::<u64>(),
        ) {
            let mut edges = Vec::new();
            let mut idx = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if edge_bits[idx] {
                        edges.push((i, j));
                    }
                    idx += 1;
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let s = NodeSet::from_mask(subset_mask).intersection(g.full_set());
            let hist = g.distance_histogram(s).unwrap();
            let total: u64 = hist.values().sum();
            // oracle: direct pairwise BFS connectivity count
            let mut connected = 0u64;
            for i in s.iter() {
                let dist = g.bfs_distances(i, s);
                for j in s.iter() {
                    if j > i && dist[j].is_some() {
                        connected += 1;
                    }
                }
            }
            prop_assert_eq!(total, connected);
            let pairs = (s.len() * s.len().saturating_sub(1) / 2) as u64;
            prop_assert!(total <= pairs);
        }
    }
}
