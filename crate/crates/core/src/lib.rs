//! Deterministic discrete-time simulator for a heterogeneous wireless sensor
//! network monitoring a rectangular area.
//!
//! The crate models random sensor deployment with coverage checking, four
//! routing topologies with failure repair, a first-order radio energy model
//! driving node death, in-network data aggregation, and a suite of six
//! diagnostic classifiers whose misclassification rate is tracked against the
//! network's operating age. Everything is reproducible from a single master
//! seed: identical configuration and seed produce byte-identical result files.

pub mod collection;
pub mod datagen;
pub mod diagnostics;
pub mod energy;
mod error;
pub mod experiment;
pub mod seeding;
pub mod topology;
pub mod world;

pub use error::{Result, SimError};
