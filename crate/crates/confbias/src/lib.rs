//! Conference-bias engine: distance-polynomial worths on social graphs,
//! Myerson-value allocations restricted by conference structures,
//! bargaining-power bias components, and the cheap-talk partition
//! equilibrium the resulting effective bias induces.
//!
//! Everything upstream of the cheap-talk stage is exact: worths, allocations
//! and biases are polynomials in the link parameter delta with
//! arbitrary-precision rational coefficients.

pub mod bias;
pub mod cheaptalk;
pub mod conference;
mod error;
pub mod graph;
pub mod myerson;
pub mod poly;
pub mod scenarios;

pub use error::Error;
pub use graph::{Graph, NodeSet};
pub use poly::{DeltaPoly, DeltaValue, Rat};

pub type Result<T> = std::result::Result<T, Error>;
