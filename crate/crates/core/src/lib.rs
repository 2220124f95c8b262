//! Exact state-vector simulation of small quantum query algorithms over
//! classical oracles, with the classical reductions they are compared against.

pub mod bits;
pub mod classical;
pub mod cli;
pub mod error;
pub mod oracles;
pub mod quantum;
pub mod sat;
pub mod statevec;

pub use bits::Bits;
pub use error::{Error, Result};
pub use oracles::CountedOracle;
