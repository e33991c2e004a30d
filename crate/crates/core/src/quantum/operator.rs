use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;

use crate::C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix acting on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOperator(Matrix2<C64>);

impl QubitOperator {
    pub fn new(matrix: Matrix2<C64>) -> Self {
        Self(matrix)
    }

    /// `(1/√2)[[1, 1], [1, −1]]`
    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self(Matrix2::new(h, h, h, -h))
    }

    /// `diag(1, −1)`
    pub fn pauli_z() -> Self {
        Self(Matrix2::new(ONE, ZERO, ZERO, -ONE))
    }

    pub fn pauli_x() -> Self {
        Self(Matrix2::new(ZERO, ONE, ONE, ZERO))
    }

    /// `diag(1, 1)`
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Matrix2::identity()
    }

    /// True when both off-diagonal entries are exactly zero.
    pub fn is_diagonal(&self) -> bool {
        self.0[(0, 1)] == ZERO && self.0[(1, 0)] == ZERO
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.0.adjoint() * self.0;
        (p - Matrix2::identity()).iter().all(|z| z.norm() <= tol)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, amps: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[(0, 0)] * amps[0] + m[(0, 1)] * amps[1],
            m[(1, 0)] * amps[0] + m[(1, 1)] * amps[1],
        ]
    }
}

/// Matrix product: `a * b` applies `b` first.
impl std::ops::Mul for QubitOperator {
    type Output = QubitOperator;

    fn mul(self, rhs: Self) -> Self::Output {
        Self(self.0 * rhs.0)
    }
}

/// A tensor product `U⁰ ⊗ U¹ ⊗ … ⊗ U^{n-1}` of single-qubit operators.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredOperator {
    factors: Vec<QubitOperator>,
}

impl FactoredOperator {
    pub fn new(factors: Vec<QubitOperator>) -> Self {
        Self { factors }
    }

    /// The same operator on every one of `n` qubits.
    pub fn uniform(op: QubitOperator, n: usize) -> Self {
        Self {
            factors: vec![op; n],
        }
    }

    pub fn factors(&self) -> &[QubitOperator] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factor-wise product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Option<Self> {
        (self.len() == rhs.len()).then(|| {
            Self::new(
                self.factors
                    .iter()
                    .zip(&rhs.factors)
                    .map(|(a, b)| *a * *b)
                    .collect(),
            )
        })
    }

    /// Dense `2^n × 2^n` matrix. Only meant for small registers in checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::from_element(1, 1, ONE);
        for f in &self.factors {
            let f = nalgebra::DMatrix::from_iterator(2, 2, f.matrix().iter().cloned());
            m = m.kronecker(&f);
        }
        m
    }
}
