//! Simulation of the Bernstein–Vazirani parity algorithm at two levels.
//!
//! The gate-level layer ([`quantum`], [`bv`]) runs the algorithm on a dense
//! state vector or on an entanglement-free product state, with both the
//! `n+1`-qubit bit-flip oracle and the `n`-qubit phase oracle. The pulse-level
//! layer ([`nmr`], [`spectro`]) simulates a two-spin NMR ensemble through
//! pseudo-pure preparation, the compiled pulse sequence, FID acquisition and
//! spectral decoding of the answer.
//!
//! Bit order is fixed throughout: qubit 0 (spin A) is the most significant bit
//! of a basis index, so the basis index of `|a₁a₂…aₙ⟩` reads like the string.

pub mod bv;
pub mod fmt;
pub mod nmr;
pub mod quantum;
pub mod spectro;

pub use num_complex::Complex64 as C64;
