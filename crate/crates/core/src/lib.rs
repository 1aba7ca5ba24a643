//! Market regime clustering with path signatures.
//!
//! - [`signature`]: truncated tensor algebra, path signatures, log-signatures.
//! - [`spectral`]: random-walk spectral clustering at multiple scales.
//! - [`metrics`]: MMD between signature samples and the similarity heuristics.
//! - [`market`]: GBM simulation and regime points.
//! - [`experiment`]: config-driven runs and report output.

pub mod experiment;
pub mod market;
pub mod metrics;
pub mod seeding;
pub mod signature;
pub mod spectral;
