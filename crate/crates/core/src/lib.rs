//! Predicts the best processor configuration (which big.LITTLE core renders
//! and at what frequencies both clusters run) for a given web page and
//! optimization goal: load time, energy, or energy-delay product.
//!
//! The pipeline: parse the page into a DOM tree and style rules
//! ([`webparse`]), count workload features ([`features`]), score candidate
//! configurations on an analytic device model ([`device`]), train per-goal
//! SVM classifiers on brute-force optima ([`learn`]), and deploy them in a
//! simulated rendering session ([`sched`]).

pub mod corpus;
pub mod device;
pub mod error;
pub mod features;
pub mod learn;
pub mod report;
pub mod sched;
pub mod stats;
pub mod webparse;

pub use error::{Error, Result};
