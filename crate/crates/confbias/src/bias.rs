//! Bargaining-power bias components and the effective bias of a
//! conversation held inside a conference.
//!
//! A component measures how much the subject player loses when another
//! player is removed (with conferences restricted accordingly). Parameter
//! names are explicit (`removed`, `subject`) so no index convention can be
//! misread.

use serde::Serialize;

use crate::conference::ConferenceStructure;
use crate::graph::{Graph, NodeSet};
use crate::myerson::{myerson_conference, AllocationVector};
use crate::poly::{rat_int, DeltaPoly};
use crate::{Error, Result};

/// A conversation: a conference, a sender and a receiver.
/// Every other conference member is a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConversationSpec {
    pub conference: NodeSet,
    pub sender: usize,
    pub receiver: usize,
}

impl ConversationSpec {
    pub fn new(conference: NodeSet, sender: usize, receiver: usize) -> Result<Self> {
        if sender == receiver {
            return Err(Error::RoleCoincidence);
        }
        if !conference.contains(sender) {
            return Err(Error::RoleOutsideSet {
                role: "sender",
                node: sender,
            });
        }
        if !conference.contains(receiver) {
            return Err(Error::RoleOutsideSet {
                role: "receiver",
                node: receiver,
            });
        }
        if conference.len() < 2 {
            return Err(Error::ConferenceTooSmall);
        }
        Ok(ConversationSpec {
            conference,
            sender,
            receiver,
        })
    }

    pub fn witnesses(&self) -> NodeSet {
        self.conference.without(self.sender).without(self.receiver)
    }
}

/// How much `subject` loses when `removed` leaves the game:
/// mu_subject(players) - mu_subject(players minus removed).
pub fn bias_component(
    g: &Graph,
    h: &ConferenceStructure,
    players: NodeSet,
    removed: usize,
    subject: usize,
) -> Result<DeltaPoly> {
    if removed == subject {
        return Err(Error::RemovedIsSubject);
    }
    for (role, node) in [("removed", removed), ("subject", subject)] {
        if !players.contains(node) {
            return Err(Error::RoleOutsideSet { role, node });
        }
    }
    let mu_full = myerson_conference(g, h, players)?;
    let reduced = players.without(removed);
    let mu_minus = myerson_conference(g, &h.restrict(reduced), reduced)?;
    Ok(&mu_full.payoff(subject) - &mu_minus.payoff(subject))
}

/// One witness's pair of components in the effective-bias sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTerm {
    pub witness: usize,
    /// Sender's loss if the witness is removed.
    pub sender_witness: DeltaPoly,
    /// Witness's loss if the receiver is removed.
    pub witness_receiver: DeltaPoly,
}

/// All bias components of a conversation plus their aggregate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiasReport {
    pub sender: usize,
    pub receiver: usize,
    /// Sender's loss if the receiver is removed.
    pub sender_receiver: DeltaPoly,
    pub witness_terms: Vec<WitnessTerm>,
    /// (sender_receiver + sum of witness terms) / (|W| + 1).
    pub effective: DeltaPoly,
}

/// Computes every bias component of the conversation and the effective bias.
///
/// All Myerson values are taken on the full `players` set; the conversation's
/// conference determines only the witness list.
pub fn effective_bias_report(
    g: &Graph,
    h: &ConferenceStructure,
    players: NodeSet,
    conv: &ConversationSpec,
) -> Result<BiasReport> {
    if !conv.conference.is_subset_of(players) {
        let node = conv.conference.difference(players).min().unwrap();
        return Err(Error::RoleOutsideSet {
            role: "conference member",
            node,
        });
    }
    let sender = conv.sender;
    let receiver = conv.receiver;
    let witnesses = conv.witnesses();

    let mu_full = myerson_conference(g, h, players)?;
    let mu_without = |removed: usize| -> Result<AllocationVector> {
        let reduced = players.without(removed);
        myerson_conference(g, &h.restrict(reduced), reduced)
    };

    let mu_minus_receiver = mu_without(receiver)?;
    let sender_receiver = &mu_full.payoff(sender) - &mu_minus_receiver.payoff(sender);

    let mut witness_terms = Vec::new();
    let mut sum = sender_receiver.clone();
    for w in witnesses.iter() {
        let mu_minus_w = mu_without(w)?;
        let sender_witness = &mu_full.payoff(sender) - &mu_minus_w.payoff(sender);
        let witness_receiver = &mu_full.payoff(w) - &mu_minus_receiver.payoff(w);
        sum = &(&sum + &sender_witness) + &witness_receiver;
        witness_terms.push(WitnessTerm {
            witness: w,
            sender_witness,
            witness_receiver,
        });
    }
    let divisor = rat_int((witnesses.len() + 1) as i64);
    let effective = sum.scale(&divisor.recip());

    Ok(BiasReport {
        sender,
        receiver,
        sender_receiver,
        witness_terms,
        effective,
    })
}

/// The effective bias polynomial only.
pub fn effective_bias(
    g: &Graph,
    h: &ConferenceStructure,
    players: NodeSet,
    conv: &ConversationSpec,
) -> Result<DeltaPoly> {
    Ok(effective_bias_report(g, h, players, conv)?.effective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conference::dyadic_conferences;
    use crate::poly::rat;

    fn d(terms: &[(u32, i64, i64)]) -> DeltaPoly {
        DeltaPoly::from_terms(terms.iter().map(|&(p, n, q)| (p, rat(n, q))))
    }

    // S = 0, R = 1 (hub), W = 2
    fn three_star() -> (Graph, ConferenceStructure) {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let h = dyadic_conferences(&g);
        (g, h)
    }

    #[test]
    fn three_star_components() {
        let (g, h) = three_star();
        let full = g.full_set();
        // subject S, removed R (the hub): S loses everything
        let b_sr = bias_component(&g, &h, full, 1, 0).unwrap();
        assert_eq!(b_sr, d(&[(1, 1, 1), (2, 2, 3)]));
        // subject W, removed R
        let b_wr = bias_component(&g, &h, full, 1, 2).unwrap();
        assert_eq!(b_wr, d(&[(1, 1, 1), (2, 2, 3)]));
        // subject S, removed W
        let b_sw = bias_component(&g, &h, full, 2, 0).unwrap();
        assert_eq!(b_sw, d(&[(2, 2, 3)]));
    }

    #[test]
    fn disconnected_players_have_zero_components() {
        let g = Graph::new(2, &[]).unwrap();
        let h = ConferenceStructure::empty();
        let b = bias_component(&g, &h, g.full_set(), 0, 1).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn component_argument_checks() {
        let (g, h) = three_star();
        let full = g.full_set();
        assert!(matches!(
            bias_component(&g, &h, full, 0, 0),
            Err(Error::RemovedIsSubject)
        ));
        assert!(bias_component(&g, &h, NodeSet::from_nodes(&[0, 1]), 2, 0).is_err());
    }

    #[test]
    fn three_star_effective_bias_all_role_permutations() {
        let (g, h) = three_star();
        let full = g.full_set();
        let expected = d(&[(1, 1, 1), (2, 1, 1)]);
        for (s, r) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)] {
            let conv = ConversationSpec::new(full, s, r).unwrap();
            let beff = effective_bias(&g, &h, full, &conv).unwrap();
            assert_eq!(beff, expected, "roles S={s} R={r}");
        }
    }

    #[test]
    fn empty_witness_set_degenerates_to_pair_component() {
        let (g, h) = three_star();
        let full = g.full_set();
        let conv = ConversationSpec::new(NodeSet::from_nodes(&[0, 1]), 0, 1).unwrap();
        let report = effective_bias_report(&g, &h, full, &conv).unwrap();
        assert!(report.witness_terms.is_empty());
        assert_eq!(report.effective, report.sender_receiver);
        // private S-R talk on the 3-star: delta + 2/3 delta^2
        assert_eq!(report.effective, d(&[(1, 1, 1), (2, 2, 3)]));
    }

    #[test]
    fn conversation_spec_validation() {
        let full = NodeSet::full(3);
        assert!(matches!(
            ConversationSpec::new(full, 1, 1),
            Err(Error::RoleCoincidence)
        ));
        assert!(ConversationSpec::new(NodeSet::from_nodes(&[0, 1]), 0, 2).is_err());
    }

    #[test]
    fn effective_bias_positive_on_connected_graph() {
        let (g, h) = three_star();
        let full = g.full_set();
        let conv = ConversationSpec::new(full, 0, 2).unwrap();
        let beff = effective_bias(&g, &h, full, &conv).unwrap();
        for num in 1..10i64 {
            assert!(beff.eval(&rat(num, 10)) > rat(0, 1));
        }
    }
}
