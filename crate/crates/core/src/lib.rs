//! Exact simulation and analysis of gate-density-tuned IQP circuits at desk
//! scale (N ≤ 20 qubits, full 2^N enumeration).
//!
//! The crate covers the full pipeline:
//!
//! * [`transform`] — fast Walsh–Hadamard kernels shared by everything below;
//! * [`circuit`] — random instances, exact output states and distributions
//!   for the Z_{¬i} (family D) and Z_i (family F) diagonal circuits;
//! * [`hamiltonian`] — exact classical parent Hamiltonians of strictly
//!   positive distributions, coupling-sum complexity measures and certified
//!   truncation;
//! * [`diagnostics`] — entanglement spectra, gap-ratio statistics against
//!   the GOE/GUE surmises, Porter–Thomas comparisons, Savitzky–Golay
//!   smoothing;
//! * [`ebm`] — energy-based models with exact enumeration sampling, trained
//!   by Adam or natural gradient descent.

pub mod circuit;
pub mod diagnostics;
pub mod ebm;
pub mod error;
pub mod hamiltonian;
pub mod transform;

pub use circuit::{
    analytic_product_distribution, CircuitInstance, GateFamily, ProbDist, Statevector,
};
pub use error::{Error, Result};
pub use hamiltonian::{find_truncation_threshold, l1_distance, CouplingSpectrum};
