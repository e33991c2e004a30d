use nalgebra::{Matrix2, Matrix4};

use super::{Axis, Spin, SpinSystemParams, Targets};
use crate::C64;

pub type Matrix4C = Matrix4<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cartesian {
    X,
    Y,
    Z,
}

fn pauli(c: Cartesian) -> Matrix2<C64> {
    match c {
        Cartesian::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
        Cartesian::Y => Matrix2::new(ZERO, -I, I, ZERO),
        Cartesian::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
    }
}

fn embed(spin: Spin, m: &Matrix2<C64>) -> Matrix4C {
    let id = Matrix2::<C64>::identity();
    let k = match spin {
        Spin::A => m.kronecker(&id),
        Spin::B => id.kronecker(m),
    };
    Matrix4C::from_iterator(k.iter().cloned())
}

/// `I_c^spin = σ_c / 2` embedded in the two-spin space.
pub fn spin_operator(spin: Spin, c: Cartesian) -> Matrix4C {
    embed(spin, &(pauli(c) * C64::new(0.5, 0.0)))
}

/// Diagonal of the Hamiltonian in rad/s, indexed by basis state `|m_A m_B⟩`.
pub fn energies(p: &SpinSystemParams) -> [f64; 4] {
    let tau = std::f64::consts::TAU;
    std::array::from_fn(|i| {
        let ma = if i & 0b10 == 0 { 0.5 } else { -0.5 };
        let mb = if i & 0b01 == 0 { 0.5 } else { -0.5 };
        tau * p.nu_a * ma + tau * p.nu_b * mb + tau * p.j * ma * mb
    })
}

/// `H = ω_A I_z^A + ω_B I_z^B + 2πJ I_z^A I_z^B` in rad/s.
pub fn hamiltonian(p: &SpinSystemParams) -> Matrix4C {
    Matrix4C::from_diagonal(&energies(p).map(|e| C64::new(e, 0.0)).into())
}

/// Closed-form `exp(−iθ n̂·I)` on the targeted spins.
pub fn rotation(targets: Targets, axis: Axis, angle: f64) -> Matrix4C {
    let (c, sign) = match axis {
        Axis::X => (Cartesian::X, 1.0),
        Axis::MinusX => (Cartesian::X, -1.0),
        Axis::Y => (Cartesian::Y, 1.0),
        Axis::MinusY => (Cartesian::Y, -1.0),
    };
    let half = 0.5 * angle * sign;
    let single: Matrix2<C64> =
        Matrix2::identity() * C64::new(half.cos(), 0.0) - pauli(c) * C64::new(0.0, half.sin());
    let id = Matrix2::<C64>::identity();
    let on = |spin| if targets.contains(spin) { single } else { id };
    Matrix4C::from_iterator(on(Spin::A).kronecker(&on(Spin::B)).iter().cloned())
}

/// `exp(−iG)` for Hermitian `G`, by eigendecomposition.
pub fn expm_hermitian(generator: &Matrix4C) -> Matrix4C {
    let eig = generator.symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, -l));
    eig.eigenvectors * Matrix4C::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}
