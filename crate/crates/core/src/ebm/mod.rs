//! Classical energy-based model over bitstrings, trained against circuit
//! output distributions.
//!
//! The model assigns p_W(x) ∝ e^{f_W(x)} with f_W a fully connected network
//! over the ±1 spin encoding of x. Distributions and samples are exact: the
//! partition function is enumerated over all 2^N bitstrings, so negative
//! samples are unbiased regardless of the landscape. Training minimizes the
//! cross entropy −Σ_x p(x) log p_W(x) whose gradient is the difference of
//! ⟨∇_W f_W⟩ under the data and model distributions, stepped by Adam or by
//! natural gradient descent with an explicit Fisher matrix.

mod model;
mod optim;
mod train;

pub use model::{ArchProfile, MlpEnergyModel};
pub use optim::{fisher_matrix, AdamState, NgdState, ADAM_EPSILON};
pub use train::{
    exact_sample, exact_sample_with, train, EpochRecord, OptimizerKind, TrainConfig, TrainRun,
    TrainingTrace,
};
