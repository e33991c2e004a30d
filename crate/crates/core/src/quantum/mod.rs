//! Complex linear algebra for qubit registers: single-qubit gates, the dense
//! and product state backends, separability diagnostics and measurement.
//!
//! Qubits are indexed from 0. Qubit 0 is the most significant bit of a dense
//! basis index, so `|q₀q₁…q_{n-1}⟩` has index `Σ q_k·2^{n-1-k}`.

mod fidelity;
mod operator;
mod separability;
mod state;

use thiserror::Error;

pub use fidelity::fidelity_up_to_global_phase;
pub use operator::{FactoredOperator, QubitOperator};
pub use separability::{
    is_fully_separable, max_impurity, reduced_density, reduced_purity, Separability,
};
pub use state::{Measurement, ProductState, PureState, QuantumState, QubitState};

/// Largest register that may be expanded into a dense amplitude vector by
/// default (2^24 amplitudes, 256 MiB of `Complex64`).
pub const DEFAULT_DENSE_LIMIT: usize = 24;

/// Tolerance on the norm of a stored dense state.
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on the norm of a single product-state factor.
pub const FACTOR_NORM_TOL: f64 = 1e-12;

/// Minimum probability for an outcome to count as certain.
pub const CERTAINTY_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("operator has {got} factors but the register has {expected} qubits")]
    FactorCount { expected: usize, got: usize },

    #[error("{n} qubits exceeds the dense limit of {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },

    #[error("amplitude vector has length {len}, expected 2^{n}")]
    Length { n: usize, len: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("non-finite amplitude")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("register must contain at least one qubit")]
    Empty,
}

pub type QuantumResult<T> = Result<T, QuantumError>;

/// Fails if a dense register of `n` qubits would exceed `limit`.
pub fn check_dense(n: usize, limit: usize) -> QuantumResult<()> {
    if n > limit || n >= usize::BITS as usize {
        Err(QuantumError::DenseLimit { n, limit })
    } else {
        Ok(())
    }
}
