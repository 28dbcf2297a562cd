//! Outcome-supervised higher-order networks from labeled event sequences.
//!
//! The crate builds weighted directed graphs whose nodes are conditional
//! contexts (`C|A` reads "C given A occurred earlier") plus two absorbing
//! outcome sinks, then analyzes them with absorbing random walks,
//! information-gain statistics, cross-graph path comparison, and a
//! graph-native outcome scorer with a label-noise sweep harness.

mod error;

pub mod builder;
pub mod corpus;
pub mod paths;
pub mod predict;
pub mod seqstats;
pub mod walker;

pub use error::{Error, Result};
