use nalgebra::DMatrix;

use super::{QuantumError, QuantumResult};
use crate::C64;

/// `|Tr(U†V)| / d`: 1 exactly when `V = e^{iφ}U` for unitary `U`, `V`.
pub fn fidelity_up_to_global_phase(u: &DMatrix<C64>, v: &DMatrix<C64>) -> QuantumResult<f64> {
    if !u.is_square() || u.shape() != v.shape() || u.nrows() == 0 {
        return Err(QuantumError::Dimension(format!(
            "{:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let d = u.nrows();
    let tr: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(tr.norm() / d as f64)
}
