//! Exact Shapley-value engine over arbitrary coalition worth functions,
//! Myerson values on hypergraph communication situations, and the
//! path-sharing fast path for trees with dyadic conferences.

use std::collections::{BTreeMap, HashMap};

use num::BigInt;
use serde::Serialize;

use crate::conference::{restricted_worth, ConferenceStructure};
use crate::graph::{Graph, NodeSet};
use crate::poly::{rat, DeltaPoly, Rat};
use crate::{Error, Result};

/// Exact subset enumeration is capped at this many players by default.
pub const DEFAULT_MAX_PLAYERS: usize = 14;

const GUARD_ENV_VAR: &str = "CONFBIAS_MAX_PLAYERS";

/// The enumeration guard, overridable via `CONFBIAS_MAX_PLAYERS`.
pub fn enumeration_guard() -> usize {
    std::env::var(GUARD_ENV_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_PLAYERS)
}

/// Payoffs per player, as exact polynomials in delta.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct AllocationVector {
    payoffs: BTreeMap<usize, DeltaPoly>,
}

impl AllocationVector {
    pub fn payoff(&self, i: usize) -> DeltaPoly {
        self.payoffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DeltaPoly)> {
        self.payoffs.iter().map(|(i, p)| (*i, p))
    }

    pub fn players(&self) -> NodeSet {
        self.payoffs.keys().copied().collect()
    }

    /// Sum of payoffs over a node set.
    pub fn total_over(&self, s: NodeSet) -> DeltaPoly {
        let mut acc = DeltaPoly::zero();
        for i in s.iter() {
            if let Some(p) = self.payoffs.get(&i) {
                acc = &acc + p;
            }
        }
        acc
    }
}

impl FromIterator<(usize, DeltaPoly)> for AllocationVector {
    fn from_iter<T: IntoIterator<Item = (usize, DeltaPoly)>>(iter: T) -> Self {
        AllocationVector {
            payoffs: iter.into_iter().collect(),
        }
    }
}

/// Exact Shapley value over all subsets of `players`.
///
/// Worths are memoized per subset; each is reused across every player's
/// marginal sum. Weights s!(n-s-1)!/n! are exact rationals.
pub fn shapley<F>(players: NodeSet, mut worth: F, guard: usize) -> Result<AllocationVector>
where
    F: FnMut(NodeSet) -> Result<DeltaPoly>,
{
    let n = players.len();
    if n > guard {
        return Err(Error::TooManyPlayers { size: n, guard });
    }
    if n == 0 {
        return Ok(AllocationVector::default());
    }

    let mask = players.mask();
    let mut memo: HashMap<u64, DeltaPoly> = HashMap::with_capacity(1usize << n);
    let mut sub = mask;
    loop {
        memo.insert(sub, worth(NodeSet::from_mask(sub))?);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }

    let mut fact = vec![BigInt::from(1u32)];
    for i in 1..=n {
        let next = fact[i - 1].clone() * BigInt::from(i as u64);
        fact.push(next);
    }
    let weights: Vec<Rat> = (0..n)
        .map(|s| Rat::new(fact[s].clone() * fact[n - 1 - s].clone(), fact[n].clone()))
        .collect();
    let neg_weights: Vec<Rat> = weights.iter().map(|w| -w.clone()).collect();

    let mut payoffs = BTreeMap::new();
    for i in players.iter() {
        let rest = players.without(i).mask();
        let bit = 1u64 << i;
        let mut acc = DeltaPoly::zero();
        let mut sub = rest;
        loop {
            let s = sub.count_ones() as usize;
            acc.add_scaled(&memo[&(sub | bit)], &weights[s]);
            acc.add_scaled(&memo[&sub], &neg_weights[s]);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        payoffs.insert(i, acc);
    }
    Ok(AllocationVector { payoffs })
}

/// Myerson value of the conference-restricted game on `players`.
pub fn myerson_conference(
    g: &Graph,
    h: &ConferenceStructure,
    players: NodeSet,
) -> Result<AllocationVector> {
    let restricted = h.restrict(players);
    shapley(
        players,
        |s| restricted_worth(g, &restricted, s),
        enumeration_guard(),
    )
}

/// Myerson allocation on a tree with dyadic conferences, without subset
/// enumeration: every node on the unique p-q path of length t receives
/// delta^t/(t+1) per ordered pair, i.e. twice that per unordered pair.
pub fn tree_path_sharing(t: &Graph) -> Result<AllocationVector> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    let n = t.node_count();
    let full = t.full_set();
    let mut payoffs: BTreeMap<usize, DeltaPoly> = (0..n).map(|i| (i, DeltaPoly::zero())).collect();
    for p in 0..n {
        for q in (p + 1)..n {
            let path = t.bfs_path(p, q, full).expect("tree is connected");
            let len = (path.len() - 1) as u32;
            let share = rat(2, (len + 1) as i64);
            for &x in &path {
                payoffs.get_mut(&x).unwrap().add_term(len, &share);
            }
        }
    }
    Ok(AllocationVector { payoffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conference::dyadic_conferences;
    use crate::poly::rat_int;

    fn star(k: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
        Graph::new(k + 1, &edges).unwrap()
    }

    fn d(terms: &[(u32, i64, i64)]) -> DeltaPoly {
        DeltaPoly::from_terms(terms.iter().map(|&(p, n, q)| (p, rat(n, q))))
    }

    #[test]
    fn three_star_example() {
        // S-R-W with R = node 1 the hub
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        let leaf = d(&[(1, 1, 1), (2, 2, 3)]);
        let hub = d(&[(1, 2, 1), (2, 2, 3)]);
        assert_eq!(mu.payoff(0), leaf);
        assert_eq!(mu.payoff(2), leaf);
        assert_eq!(mu.payoff(1), hub);
    }

    #[test]
    fn single_edge_splits_evenly() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        assert_eq!(mu.payoff(0), DeltaPoly::term(1, rat_int(1)));
        assert_eq!(mu.payoff(1), DeltaPoly::term(1, rat_int(1)));
    }

    #[test]
    fn star3_closed_forms() {
        let g = star(3);
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        assert_eq!(mu.payoff(0), d(&[(1, 3, 1), (2, 2, 1)]));
        for leaf in 1..=3 {
            assert_eq!(mu.payoff(leaf), d(&[(1, 1, 1), (2, 4, 3)]));
        }
    }

    #[test]
    fn empty_conference_structure_gives_zero() {
        let g = star(3);
        let h = ConferenceStructure::empty();
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        for (_, p) in mu.iter() {
            assert!(p.is_zero());
        }
    }

    #[test]
    fn guard_rejects_large_player_sets() {
        let err = shapley(
            NodeSet::full(15),
            |_| Ok(DeltaPoly::zero()),
            DEFAULT_MAX_PLAYERS,
        )
        .unwrap_err();
        assert!(matches!(err, Error::TooManyPlayers { size: 15, guard: 14 }));
    }

    #[test]
    fn isolated_nodes_are_null_players() {
        let g = Graph::new(4, &[(0, 1)]).unwrap();
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        assert!(mu.payoff(2).is_zero());
        assert!(mu.payoff(3).is_zero());
    }

    #[test]
    fn path_sharing_star_closed_forms() {
        for k in 1..=5usize {
            let g = star(k);
            let mu = tree_path_sharing(&g).unwrap();
            let kk = k as i64;
            assert_eq!(mu.payoff(0), d(&[(1, kk, 1), (2, kk * (kk - 1), 3)]));
            for leaf in 1..=k {
                assert_eq!(mu.payoff(leaf), d(&[(1, 1, 1), (2, 2 * (kk - 1), 3)]));
            }
        }
    }

    #[test]
    fn path_sharing_two_star_hub_formula() {
        // hub-hub join: sender hub 0 with k leaves, other hub k+1 with l leaves
        for (k, l) in [(1usize, 1usize), (2, 1), (2, 3), (3, 2)] {
            let mut edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
            edges.push((0, k + 1));
            edges.extend((k + 2..k + l + 2).map(|i| (k + 1, i)));
            let g = Graph::new(k + l + 2, &edges).unwrap();
            let mu = tree_path_sharing(&g).unwrap();
            let (ki, li) = (k as i64, l as i64);
            let expected = d(&[
                (1, ki + 1, 1),
                (2, ki * ki + ki + 2 * li, 3),
                (3, ki * li, 2),
            ]);
            assert_eq!(mu.payoff(0), expected);
        }
    }

    #[test]
    fn path_sharing_rejects_non_trees() {
        let cycle = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(tree_path_sharing(&cycle), Err(Error::NotATree)));
        let forest = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(tree_path_sharing(&forest), Err(Error::NotATree)));
    }

    #[test]
    fn fast_path_matches_shapley_on_small_trees() {
        for n in 2..=5usize {
            for t in crate::graph::enumerate_labeled_trees(n).unwrap() {
                let h = dyadic_conferences(&t);
                let brute = myerson_conference(&t, &h, t.full_set()).unwrap();
                let fast = tree_path_sharing(&t).unwrap();
                assert_eq!(brute, fast, "n={n}");
            }
        }
    }

    #[test]
    fn component_efficiency() {
        // two components: a triangle-free path and an edge
        let g = Graph::new(6, &[(0, 1), (1, 2), (4, 5)]).unwrap();
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        for block in crate::conference::conference_components(g.full_set(), &h) {
            let total = mu.total_over(block);
            let worth = restricted_worth(&g, &h, block).unwrap();
            assert_eq!(total, worth);
        }
    }

    #[test]
    fn symmetric_players_get_equal_payoffs() {
        let g = star(4);
        let h = dyadic_conferences(&g);
        let mu = myerson_conference(&g, &h, g.full_set()).unwrap();
        for leaf in 2..=4 {
            assert_eq!(mu.payoff(1), mu.payoff(leaf));
        }
    }
}
