//! Conference structures (hypergraphs over the player set), restriction,
//! connectivity partitions and the conference-restricted worth.
//!
//! A coalition can coordinate only in conferences fully contained in it; its
//! worth is the sum of distance worths of the resulting connectivity blocks,
//! each evaluated on the induced subgraph of the base graph.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::{Graph, NodeSet, MAX_NODES};
use crate::poly::DeltaPoly;
use crate::{Error, Result};

/// A set of hyperedges, each with at least two members.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConferenceStructure {
    hyperedges: BTreeSet<NodeSet>,
}

impl ConferenceStructure {
    pub fn new<I: IntoIterator<Item = NodeSet>>(hyperedges: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for h in hyperedges {
            if h.len() < 2 {
                return Err(Error::HyperedgeTooSmall(h.len()));
            }
            set.insert(h);
        }
        Ok(ConferenceStructure { hyperedges: set })
    }

    pub fn empty() -> Self {
        ConferenceStructure::default()
    }

    pub fn hyperedges(&self) -> impl Iterator<Item = NodeSet> + '_ {
        self.hyperedges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    pub fn contains(&self, h: NodeSet) -> bool {
        self.hyperedges.contains(&h)
    }

    /// Adds a hyperedge (|H| >= 2), deduplicating silently.
    pub fn add(&mut self, h: NodeSet) -> Result<()> {
        if h.len() < 2 {
            return Err(Error::HyperedgeTooSmall(h.len()));
        }
        self.hyperedges.insert(h);
        Ok(())
    }

    /// Keeps exactly the hyperedges fully inside `x`.
    pub fn restrict(&self, x: NodeSet) -> ConferenceStructure {
        ConferenceStructure {
            hyperedges: self
                .hyperedges
                .iter()
                .copied()
                .filter(|h| h.is_subset_of(x))
                .collect(),
        }
    }

    pub fn union(&self, other: &ConferenceStructure) -> ConferenceStructure {
        ConferenceStructure {
            hyperedges: self.hyperedges.union(&other.hyperedges).copied().collect(),
        }
    }
}

/// One 2-member hyperedge per graph edge.
pub fn dyadic_conferences(g: &Graph) -> ConferenceStructure {
    ConferenceStructure {
        hyperedges: g
            .edges()
            .map(|(a, b)| NodeSet::from_nodes(&[a, b]))
            .collect(),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let xr = self.find(x);
        let yr = self.find(y);
        if xr != yr {
            self.parent[xr.max(yr)] = xr.min(yr);
        }
    }
}

/// The partition of `s` induced by the hyperedges contained in `s`.
/// Members touched by no contained hyperedge form singleton blocks.
/// Blocks are sorted by their smallest member.
pub fn conference_components(s: NodeSet, h: &ConferenceStructure) -> Vec<NodeSet> {
    let mut uf = UnionFind::new(MAX_NODES);
    for edge in h.hyperedges() {
        if edge.is_subset_of(s) {
            let first = edge.min().unwrap();
            for i in edge.iter() {
                uf.union(first, i);
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, NodeSet> = Default::default();
    for i in s.iter() {
        let root = uf.find(i);
        let block = blocks.entry(root).or_insert(NodeSet::EMPTY);
        *block = block.with(i);
    }
    blocks.into_values().collect()
}

/// Conference-restricted worth of coalition `c`: the sum of distance worths
/// of its connectivity blocks, each evaluated on the induced subgraph of `g`.
pub fn restricted_worth(g: &Graph, h: &ConferenceStructure, c: NodeSet) -> Result<DeltaPoly> {
    let mut total = DeltaPoly::zero();
    for block in conference_components(c, h) {
        total = &total + &g.distance_worth(block)?;
    }
    Ok(total)
}

#[derive(Serialize, Deserialize)]
struct ConferenceJson {
    hyperedges: Vec<NodeSet>,
}

impl Serialize for ConferenceStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConferenceJson {
            hyperedges: self.hyperedges.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConferenceStructure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = ConferenceJson::deserialize(deserializer)?;
        ConferenceStructure::new(json.hyperedges).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, DeltaPoly};
    use proptest::prelude::*;

    // 3-node star S-R-W with R = node 1 the hub.
    fn three_star() -> (Graph, ConferenceStructure) {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let h = dyadic_conferences(&g);
        (g, h)
    }

    #[test]
    fn dyadic_of_three_star() {
        let (_, h) = three_star();
        assert_eq!(h.len(), 2);
        assert!(h.contains(NodeSet::from_nodes(&[0, 1])));
        assert!(h.contains(NodeSet::from_nodes(&[1, 2])));
    }

    #[test]
    fn dyadic_of_edgeless_graph_is_empty() {
        let g = Graph::new(4, &[]).unwrap();
        assert!(dyadic_conferences(&g).is_empty());
    }

    #[test]
    fn restrict_drops_hyperedges_using_the_hub() {
        let (_, h) = three_star();
        assert!(h.restrict(NodeSet::from_nodes(&[0, 2])).is_empty());
        let sr = h.restrict(NodeSet::from_nodes(&[0, 1]));
        assert_eq!(sr.len(), 1);
        assert_eq!(h.restrict(NodeSet::full(3)), h);
    }

    #[test]
    fn components_of_three_star() {
        let (_, h) = three_star();
        let full = NodeSet::full(3);
        assert_eq!(conference_components(full, &h), vec![full]);
        let sw = NodeSet::from_nodes(&[0, 2]);
        assert_eq!(
            conference_components(sw, &h),
            vec![NodeSet::singleton(0), NodeSet::singleton(2)]
        );
        let mut h2 = h.clone();
        h2.add(sw).unwrap();
        assert_eq!(conference_components(sw, &h2), vec![sw]);
    }

    #[test]
    fn restricted_worth_of_three_star() {
        let (g, h) = three_star();
        let full = restricted_worth(&g, &h, NodeSet::full(3)).unwrap();
        assert_eq!(full, DeltaPoly::from_terms([(1, rat(4, 1)), (2, rat(2, 1))]));
        let pair = restricted_worth(&g, &h, NodeSet::from_nodes(&[0, 1])).unwrap();
        assert_eq!(pair, DeltaPoly::term(1, rat(2, 1)));
        let pair2 = restricted_worth(&g, &h, NodeSet::from_nodes(&[1, 2])).unwrap();
        assert_eq!(pair2, DeltaPoly::term(1, rat(2, 1)));
    }

    #[test]
    fn hyperedge_between_disconnected_nodes_is_worthless() {
        // H-connected block {S,W} still evaluates on the edgeless G[{S,W}]
        let (g, h) = three_star();
        let mut h2 = h.clone();
        h2.add(NodeSet::from_nodes(&[0, 2])).unwrap();
        let w = restricted_worth(&g, &h2, NodeSet::from_nodes(&[0, 2])).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn hyperedge_size_guard() {
        assert!(ConferenceStructure::new([NodeSet::singleton(0)]).is_err());
        let mut h = ConferenceStructure::empty();
        assert!(h.add(NodeSet::EMPTY).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let (_, h) = three_star();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"hyperedges":[[0,1],[1,2]]}"#);
        let back: ConferenceStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
    }

    fn random_graph(n: usize, edge_bits: &[bool]) -> Graph {
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
        Graph::new(n, &edges).unwrap()
    }

    proptest! {
        #[test]
        fn components_partition_the_set(
            n in 1usize..7,
            edge_bits in proptest::collection::vec(any::<bool>(), 21),
            subset_mask in any::<u64>(),
        ) {
            let g = random_graph(n, &edge_bits);
            let h = dyadic_conferences(&g);
            let s = NodeSet::from_mask(subset_mask).intersection(g.full_set());
            let blocks = conference_components(s, &h);
            let mut seen = NodeSet::EMPTY;
            for b in &blocks {
                prop_assert!(seen.intersection(*b).is_empty());
                seen = seen.union(*b);
            }
            prop_assert_eq!(seen, s);
        }

        #[test]
        fn restriction_is_monotone_and_composes(
            n in 1usize..7,
            edge_bits in proptest::collection::vec(any::<bool>(), 21),
            outer_mask in any::<u64>(),
            inner_mask in any::<u64>(),
        ) {
            let g = random_graph(n, &edge_bits);
            let h = dyadic_conferences(&g);
            let outer = NodeSet::from_mask(outer_mask).intersection(g.full_set());
            let inner = NodeSet::from_mask(inner_mask).intersection(outer);
            let restricted = h.restrict(outer);
            for he in restricted.hyperedges() {
                prop_assert!(h.contains(he));
            }
            prop_assert_eq!(restricted.restrict(inner), h.restrict(inner));
        }

        // Adding a hyperedge whose members are pairwise disconnected in G
        // leaves every coalition's restricted worth unchanged (dyadic base
        // structure, the setting of the null-conference example).
        #[test]
        fn null_conference_invariance(
            comp_sizes in proptest::collection::vec(1usize..4, 2..4),
            edge_bits in proptest::collection::vec(any::<bool>(), 21),
        ) {
            // build a disconnected graph from blocks, then pick one node per block
            let n: usize = comp_sizes.iter().sum();
            prop_assume!(n <= 7);
            let mut edges = Vec::new();
            let mut offset = 0;
            let mut reps = Vec::new();
            let mut idx = 0;
            for &size in &comp_sizes {
                reps.push(offset);
                for i in 0..size {
                    for j in (i + 1)..size {
                        if edge_bits[idx % edge_bits.len()] {
                            edges.push((offset + i, offset + j));
                        }
                        idx += 1;
                    }
                }
                offset += size;
            }
            let g = Graph::new(n, &edges).unwrap();
            let h = dyadic_conferences(&g);
            let extra = NodeSet::from_nodes(&reps[..2]);
            // representatives live in different blocks, hence disconnected in G
            let mut h2 = h.clone();
            h2.add(extra).unwrap();
            for mask in 0..(1u64 << n) {
                let c = NodeSet::from_mask(mask);
                prop_assert_eq!(
                    restricted_worth(&g, &h, c).unwrap(),
                    restricted_worth(&g, &h2, c).unwrap()
                );
            }
        }
    }
}
