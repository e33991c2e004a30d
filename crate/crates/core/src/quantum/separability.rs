use nalgebra::Matrix2;

use super::operator::{ONE, ZERO};
use super::{ProductState, PureState, QuantumError, QuantumResult, QuantumState, QubitState};
use crate::C64;

/// Single-qubit reduced density matrix `ρ_k = Tr_{¬k} |ψ⟩⟨ψ|`.
pub fn reduced_density(state: &PureState, qubit: usize) -> QuantumResult<Matrix2<C64>> {
    let n = state.num_qubits();
    if qubit >= n {
        return Err(QuantumError::QubitIndex { index: qubit, n });
    }
    let mask = state.mask(qubit);
    let amps = state.amplitudes();
    let (mut p0, mut p1, mut c) = (0.0, 0.0, ZERO);
    for (i, a) in amps.iter().enumerate().filter(|(i, _)| i & mask == 0) {
        let b = amps[i | mask];
        p0 += a.norm_sqr();
        p1 += b.norm_sqr();
        c += a * b.conj();
    }
    Ok(Matrix2::new(
        C64::new(p0, 0.0),
        c,
        c.conj(),
        C64::new(p1, 0.0),
    ))
}

/// `Tr(ρ_k²)` of qubit `k`; 1 for an unentangled qubit, 0.5 when maximally
/// entangled with the rest of the register.
pub fn reduced_purity(state: &PureState, qubit: usize) -> QuantumResult<f64> {
    let rho = reduced_density(state, qubit)?;
    let (p0, p1, c) = (rho[(0, 0)].re, rho[(1, 1)].re, rho[(0, 1)]);
    Ok(p0 * p0 + p1 * p1 + 2.0 * c.norm_sqr())
}

/// Largest single-qubit impurity `1 − Tr(ρ_k²)` over the register.
pub fn max_impurity(state: &PureState) -> f64 {
    (0..state.num_qubits())
        .map(|k| 1.0 - reduced_purity(state, k).expect("index in range"))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Separability {
    pub separable: bool,
    /// Extracted factors, present only when `separable` is set.
    pub factors: Option<ProductState>,
}

/// A pure state is a full product iff every single-qubit reduced state is
/// pure. When it is, each factor is the dominant eigenvector of `ρ_k`.
pub fn is_fully_separable(state: &PureState, tol: f64) -> Separability {
    let n = state.num_qubits();
    let mut factors = Vec::with_capacity(n);
    for k in 0..n {
        let rho = reduced_density(state, k).expect("index in range");
        let (p0, p1, c) = (rho[(0, 0)].re, rho[(1, 1)].re, rho[(0, 1)]);
        let purity = p0 * p0 + p1 * p1 + 2.0 * c.norm_sqr();
        if purity < 1.0 - tol {
            return Separability {
                separable: false,
                factors: None,
            };
        }
        factors.push(dominant_eigenvector(p0, p1, c));
    }
    Separability {
        separable: true,
        factors: Some(ProductState::new(factors).expect("n ≥ 1")),
    }
}

/// Eigenvector of `[[p0, c], [c*, p1]]` for the larger eigenvalue.
fn dominant_eigenvector(p0: f64, p1: f64, c: C64) -> QubitState {
    let half_gap = 0.5 * (p0 - p1);
    let lambda = 0.5 * (p0 + p1) + (half_gap * half_gap + c.norm_sqr()).sqrt();
    // pick the row of (ρ − λ)v = 0 that is better conditioned
    let (v0, v1) = if p0 >= p1 {
        (C64::new(lambda - p1, 0.0), c.conj())
    } else {
        (c, C64::new(lambda - p0, 0.0))
    };
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return QubitState::new(ONE, ZERO).expect("unit");
    }
    QubitState::new(v0 / norm, v1 / norm).expect("normalized eigenvector")
}
