//! Pairwise-difference decoding toolkit: measurement graphs, channel
//! divergence metrics, exact maximum-likelihood decoding, recovery-threshold
//! predicates, and reproducible Monte Carlo experiments.
//!
//! The model: a hidden vector x in {0..M-1}^n, and for each edge (i,j) of a
//! measurement graph a noisy observation of the difference (x_i - x_j) mod M.
//! Recovery is defined modulo a global offset.

pub mod channel;
pub mod decoder;
pub mod divergence;
pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod rng;
pub mod thresholds;

pub use channel::{ChannelFamily, EdgeChannelMap, Observations};
pub use decoder::{DecodeResult, Hypothesis};
pub use divergence::{DivergenceProfile, Pmf};
pub use error::{Error, Result};
pub use graph::{CutProfile, Graph};
pub use montecarlo::{ExperimentConfig, SweepResult};
pub use rng::CounterRng;
pub use thresholds::ThresholdReport;
