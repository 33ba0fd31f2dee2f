//! Dense subhypergraph detection toolkit: uniform hypergraph storage with
//! colex edge indexing, null and planted Bernoulli samplers, five test
//! statistics, closed-form detection boundary calculators, and a
//! deterministic Monte Carlo risk harness with CSV and SVG reporting.

pub mod boundaries;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod hypergraph;
pub mod models;
pub mod plot;
pub mod report;
pub mod statistics;

pub use error::{Error, Result};
