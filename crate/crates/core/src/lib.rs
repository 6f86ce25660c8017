//! Noisy GHZ-state distribution for network-based QRAM.
//!
//! `sim` produces event timing for the two distribution protocols, `analytics`
//! turns that timing into layer fidelities and `model` aggregates them over a
//! QRAM tree and over seeds. `oracle` is a brute-force density-matrix
//! simulator used to check the closed forms at small scale; `validation` runs
//! those checks. `experiments` expands sweep configs and writes result files.

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod noise;
pub mod oracle;
pub mod sim;
pub mod validation;

pub use analytics::{GhzCorner, LinkChain, PairParams};
pub use error::{Error, Result};
pub use experiments::{SweepConfig, SweepRow};
pub use model::{MonteCarloSummary, QramEstimate};
pub use noise::NoiseParams;
pub use oracle::DenseState;
pub use sim::{Placement, Protocol, QramRunResult, SimConfig, TimingModel};
