use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("graphs larger than {0} nodes are not supported")]
    GraphTooLarge(usize),
    #[error("delta must lie in (0,1), got {0}")]
    DeltaOutOfRange(String),
    #[error("invalid rational: {0}")]
    BadRational(String),
    #[error("hyperedge must have at least 2 members, got {0}")]
    HyperedgeTooSmall(usize),
    #[error("player set of size {size} exceeds the exact-enumeration guard {guard}; use the tree fast path or a smaller instance")]
    TooManyPlayers { size: usize, guard: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("tree size {0} outside supported range {1}..={2}")]
    TreeSizeOutOfRange(usize, usize, usize),
    #[error("sender and receiver must differ")]
    RoleCoincidence,
    #[error("removed and subject players must differ")]
    RemovedIsSubject,
    #[error("{role} {node} is not a member of the required node set")]
    RoleOutsideSet { role: &'static str, node: usize },
    #[error("conference must have at least 2 members")]
    ConferenceTooSmall,
    #[error("partition count requires a strictly positive bias")]
    NonPositiveBias,
    #[error("no equilibrium with {0} partitions: first interval degenerates")]
    DegeneratePartition(u32),
    #[error("effective bias is zero at this delta: conversation is out of model (unbounded precision)")]
    OutOfModel,
    #[error("unknown closed form `{0}`")]
    UnknownClosedForm(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}
