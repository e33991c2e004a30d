//! Two-spin NMR ensemble simulation in the rotating frame.
//!
//! The Hamiltonian is `H = ω_A I_z^A + ω_B I_z^B + 2πJ I_z^A I_z^B` with
//! `ω = 2πν` for rotating-frame offsets `ν`. It is diagonal, so free evolution
//! is applied exactly as phase factors. Pulses are instantaneous rotations:
//! angle `θ` about axis `n̂` conjugates by `exp(−iθ n̂·I)` with `I = σ/2`.
//!
//! Spin A is qubit 0 (most significant bit of the 4-dimensional basis index),
//! spin B is qubit 1, and `|0⟩` is spin-up (`m = +½`).

mod density;
mod experiment;
mod library;
mod operators;
mod sequence;

use std::fmt;

use thiserror::Error;

pub use density::{
    apply_hard_pulse, free_evolve, free_evolve_with, gradient_crush, thermal_state,
    DeviationDensityMatrix, PseudoPure,
};
pub use experiment::{detection_pulse, run_experiment, run_reference, ExperimentRun};
pub use library::{
    compile_ua, compiled_suite, composite_z_all, ideal_target, pseudo_hadamard, pseudo_pure_prep,
    soft_z, CompiledCheck, HadamardDirection, SequenceOptions,
};
pub use operators::{
    energies, expm_hermitian, hamiltonian, rotation, spin_operator, Cartesian, Matrix4C,
};
pub use sequence::{
    coupling_phase, execute, sequence_unitary, Evolution, GradientMode, HardPulse, PulseEvent,
    PulseSequence,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmrError {
    #[error("invalid spin system: {0}")]
    Params(String),

    #[error("spin {0} has zero offset; a soft z rotation would need an infinite delay")]
    ZeroOffset(Spin),

    #[error("invalid pulse event: {0}")]
    Event(String),

    #[error("sequence contains a gradient and has no unitary propagator")]
    Gradient,

    #[error("expected a 2-bit string, got {0} bits")]
    WrongLength(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix is not a valid deviation density matrix: {0}")]
    Density(String),
}

pub type NmrResult<T> = Result<T, NmrError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    A,
    B,
}

impl Spin {
    /// Qubit index of the spin (A = 0, B = 1).
    pub fn qubit(self) -> usize {
        match self {
            Spin::A => 0,
            Spin::B => 1,
        }
    }

    pub fn other(self) -> Spin {
        match self {
            Spin::A => Spin::B,
            Spin::B => Spin::A,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::A => "A",
            Spin::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Targets {
    A,
    B,
    AB,
}

impl Targets {
    pub fn contains(self, spin: Spin) -> bool {
        matches!(
            (self, spin),
            (Targets::AB, _) | (Targets::A, Spin::A) | (Targets::B, Spin::B)
        )
    }

    pub fn only(spin: Spin) -> Targets {
        match spin {
            Spin::A => Targets::A,
            Spin::B => Targets::B,
        }
    }
}

impl fmt::Display for Targets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Targets::A => "A",
            Targets::B => "B",
            Targets::AB => "AB",
        })
    }
}

impl std::str::FromStr for Targets {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" => Ok(Targets::A),
            "B" => Ok(Targets::B),
            "AB" => Ok(Targets::AB),
            _ => Err(format!("unknown targets {s:?}")),
        }
    }
}

/// Transverse rotation axis of a hard pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    MinusX,
    Y,
    MinusY,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::MinusX => "-x",
            Axis::Y => "y",
            Axis::MinusY => "-y",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "x" => Ok(Axis::X),
            "-x" => Ok(Axis::MinusX),
            "y" => Ok(Axis::Y),
            "-y" => Ok(Axis::MinusY),
            _ => Err(format!("unknown axis {s:?}")),
        }
    }
}

/// Rotating-frame offsets and scalar coupling, all in Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinSystemParams {
    pub nu_a: f64,
    pub nu_b: f64,
    pub j: f64,
}

impl Default for SpinSystemParams {
    /// 765 Hz chemical-shift separation placed symmetrically about the carrier,
    /// `J = 7.17 Hz`.
    fn default() -> Self {
        Self {
            nu_a: 382.5,
            nu_b: -382.5,
            j: 7.17,
        }
    }
}

impl SpinSystemParams {
    pub fn validate(&self) -> NmrResult<()> {
        if ![self.nu_a, self.nu_b, self.j].iter().all(|v| v.is_finite()) {
            return Err(NmrError::Params("non-finite parameter".into()));
        }
        if self.nu_a == self.nu_b {
            return Err(NmrError::Params("offsets of A and B must differ".into()));
        }
        if self.j <= 0.0 {
            return Err(NmrError::Params(format!(
                "J must be positive, got {}",
                self.j
            )));
        }
        Ok(())
    }

    pub fn offset(&self, spin: Spin) -> f64 {
        match spin {
            Spin::A => self.nu_a,
            Spin::B => self.nu_b,
        }
    }

    /// The `1/(2J)` delay of the pseudo-pure preparation.
    pub fn half_coupling_period(&self) -> f64 {
        1.0 / (2.0 * self.j)
    }
}
