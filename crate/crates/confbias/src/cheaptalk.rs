//! Partition-Threshold rule: Crawford-Sobel partition boundaries driven by
//! the effective bias, with verification against the witness-augmented
//! composite cost (the unaggregated sum, not the mean).

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::bias::{effective_bias_report, BiasReport, ConversationSpec};
use crate::conference::ConferenceStructure;
use crate::graph::{Graph, NodeSet};
use crate::poly::{rat, rat_int, DeltaPoly, DeltaValue, Rat};
use crate::{Error, Result};

/// beta(n) = 1/(2n(n+1)), the partition-count threshold.
pub fn beta(n: u32) -> Result<Rat> {
    if n < 1 {
        return Err(Error::ParamOutOfRange("beta requires n >= 1".into()));
    }
    let n = n as i64;
    Ok(rat(1, 2 * n * (n + 1)))
}

/// The unique N >= 1 with beta(N) <= b < beta(N-1), beta(0) = +inf.
pub fn partition_count(b: &Rat) -> Result<u32> {
    if !b.is_positive() {
        return Err(Error::NonPositiveBias);
    }
    let mut n = 1u32;
    while beta(n)? > *b {
        n += 1;
    }
    Ok(n)
}

/// Boundary points t_0 = 0 < t_1 < ... < t_n = 1 for a size-n partition
/// under bias `b`: t_k = k*t_1 + 2b*k(k-1) with t_1 = 1/n - 2b(n-1).
///
/// The construction gives t_n = 1 as an exact rational identity.
pub fn partition_boundaries(b: &Rat, n: u32) -> Result<Vec<Rat>> {
    if n < 1 {
        return Err(Error::ParamOutOfRange("partition size must be >= 1".into()));
    }
    let n_i = n as i64;
    let t1 = rat(1, n_i) - rat(2 * (n_i - 1), 1) * b;
    if !t1.is_positive() {
        return Err(Error::DegeneratePartition(n));
    }
    let mut points = Vec::with_capacity(n as usize + 1);
    for k in 0..=n_i {
        points.push(rat_int(k) * &t1 + rat(2 * k * (k - 1), 1) * b);
    }
    debug_assert!(points[n as usize].is_one());
    Ok(points)
}

/// Receiver best responses: midpoints of consecutive boundaries.
pub fn actions(boundaries: &[Rat]) -> Vec<Rat> {
    boundaries
        .windows(2)
        .map(|w| (&w[0] + &w[1]) * rat(1, 2))
        .collect()
}

/// Bias components evaluated at a concrete delta.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasValues {
    /// b^S_R.
    pub sender_receiver: Rat,
    /// Per witness: (b^S_w, b^w_R).
    pub witness_terms: Vec<(Rat, Rat)>,
}

impl BiasValues {
    pub fn aggregate(&self) -> Rat {
        let mut sum = self.sender_receiver.clone();
        for (sw, wr) in &self.witness_terms {
            sum += sw;
            sum += wr;
        }
        sum / rat_int((self.witness_terms.len() + 1) as i64)
    }

    fn composite_offsets(&self) -> Vec<Rat> {
        std::iter::once(self.sender_receiver.clone())
            .chain(self.witness_terms.iter().map(|(sw, wr)| sw + wr))
            .collect()
    }

    pub fn from_report(report: &BiasReport, delta: &DeltaValue) -> BiasValues {
        BiasValues {
            sender_receiver: report.sender_receiver.eval_at(delta),
            witness_terms: report
                .witness_terms
                .iter()
                .map(|t| (t.sender_witness.eval_at(delta), t.witness_receiver.eval_at(delta)))
                .collect(),
        }
    }
}

/// Sender's composite quadratic cost at action `a`, state `theta`:
/// the full sum over the witness-mediated offsets, not the aggregate.
fn composite_cost(a: &Rat, theta: &Rat, offsets: &[Rat]) -> Rat {
    let mut cost = Rat::zero();
    for b in offsets {
        let gap = a - theta - b;
        cost -= &gap * &gap;
    }
    cost
}

/// Sender-indifference residuals at every interior boundary.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ResidualReport {
    pub residuals: Vec<Rat>,
    pub max_residual: Rat,
}

/// Checks that at each interior boundary the sender is indifferent between
/// the neighboring actions under the composite (unaggregated) cost.
pub fn verify_equilibrium(values: &BiasValues, boundaries: &[Rat]) -> ResidualReport {
    let acts = actions(boundaries);
    let offsets = values.composite_offsets();
    let mut residuals = Vec::new();
    for k in 1..boundaries.len().saturating_sub(1) {
        let theta = &boundaries[k];
        let below = composite_cost(&acts[k - 1], theta, &offsets);
        let above = composite_cost(&acts[k], theta, &offsets);
        residuals.push((below - above).abs());
    }
    let max_residual = residuals.iter().max().cloned().unwrap_or_else(Rat::zero);
    ResidualReport {
        residuals,
        max_residual,
    }
}

/// The Pareto-superior cheap-talk partition equilibrium of a conversation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionEquilibrium {
    pub n_partitions: u32,
    #[serde(serialize_with = "ser_rats")]
    pub boundaries: Vec<Rat>,
    #[serde(serialize_with = "ser_rats")]
    pub actions: Vec<Rat>,
    pub effective_bias: DeltaPoly,
    #[serde(serialize_with = "ser_rat")]
    pub bias_value: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub max_residual: Rat,
    #[serde(skip)]
    pub bias_report: BiasReport,
    #[serde(skip)]
    pub residuals: ResidualReport,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::poly::rat_string(r))
}

fn ser_rats<S: serde::Serializer>(rs: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&crate::poly::rat_string(r))?;
    }
    seq.end()
}

/// Full pipeline: effective bias -> evaluate at delta -> partition count ->
/// boundaries -> composite-cost verification.
pub fn solve_conversation(
    g: &Graph,
    h: &ConferenceStructure,
    players: NodeSet,
    conv: &ConversationSpec,
    delta: &DeltaValue,
) -> Result<PartitionEquilibrium> {
    let report = effective_bias_report(g, h, players, conv)?;
    let bias_value = report.effective.eval_at(delta);
    if bias_value.is_zero() {
        return Err(Error::OutOfModel);
    }
    let n = partition_count(&bias_value)?;
    let boundaries = partition_boundaries(&bias_value, n)?;
    let acts = actions(&boundaries);
    let values = BiasValues::from_report(&report, delta);
    let residuals = verify_equilibrium(&values, &boundaries);
    Ok(PartitionEquilibrium {
        n_partitions: n,
        max_residual: residuals.max_residual.clone(),
        boundaries,
        actions: acts,
        effective_bias: report.effective.clone(),
        bias_value,
        bias_report: report,
        residuals,
    })
}
