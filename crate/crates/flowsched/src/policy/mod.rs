//! Scheduling policies driven through the engine's hook contract.

pub(crate) mod bins;
pub mod density_weight;
pub mod superbins;
pub mod two_bins;

pub use density_weight::{classify, ClassifiedJob, DensityWeightPolicy};
pub use superbins::SuperbinsPolicy;
pub use two_bins::TwoBinsPolicy;
