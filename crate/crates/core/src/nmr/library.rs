use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use super::operators::{expm_hermitian, spin_operator, Cartesian, Matrix4C};
use super::sequence::{
    coupling_phase, sequence_unitary, Evolution, GradientMode, PulseEvent, PulseSequence,
};
use super::{Axis, NmrError, NmrResult, Spin, SpinSystemParams, Targets};
use crate::bv::{build_phase_oracle, BitString};
use crate::quantum::fidelity_up_to_global_phase;
use crate::C64;
use nalgebra::DMatrix;

/// Choices shared by the sequence builders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceOptions {
    pub gradient: GradientMode,
    /// Evolution during the `1/(2J)` delay of the preparation.
    pub prep_delay: Evolution,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self {
            gradient: GradientMode::Physical,
            prep_delay: Evolution::CouplingOnly,
        }
    }
}

/// Gradient-based pseudo-pure preparation of `|00⟩` from the thermal state:
///
/// `R_x^B(π/3) − G_z − R_x^A(π/4) − 1/(2J) − R_{−y}^A(π/4) − G_z`
///
/// The first pulse leaves `I_z^A + ½I_z^B`; the rest converts half of the
/// A polarization into `2I_z^A I_z^B`, giving `½(I_z^A + I_z^B + 2I_z^A I_z^B)`
/// which is `|00⟩⟨00| − I/4`.
pub fn pseudo_pure_prep(p: &SpinSystemParams, opts: &SequenceOptions) -> PulseSequence {
    PulseSequence::from_events(
        "pseudo_pure_prep",
        vec![
            PulseEvent::pulse(Targets::B, Axis::X, FRAC_PI_3),
            PulseEvent::Gradient(opts.gradient),
            PulseEvent::pulse(Targets::A, Axis::X, FRAC_PI_4),
            PulseEvent::Delay {
                duration: p.half_coupling_period(),
                evolution: opts.prep_delay,
            },
            PulseEvent::pulse(Targets::A, Axis::Y, -FRAC_PI_4),
            PulseEvent::Gradient(opts.gradient),
        ],
    )
    .expect("finite events")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HadamardDirection {
    /// `h = R_{−y}^{AB}(π/2)`
    Forward,
    /// `h⁻¹ = R_y^{AB}(π/2)`
    Inverse,
}

pub fn pseudo_hadamard(direction: HadamardDirection) -> PulseSequence {
    let (label, axis) = match direction {
        HadamardDirection::Forward => ("h", Axis::MinusY),
        HadamardDirection::Inverse => ("h_inv", Axis::Y),
    };
    PulseSequence::from_events(label, vec![PulseEvent::pulse(Targets::AB, axis, FRAC_PI_2)])
        .expect("finite events")
}

/// Selective `R_z(π)` on `spin`: free evolution for `τ = 1/(2|ν|)` with two π
/// pulses on the other spin refocusing its offset and the coupling.
///
/// `τ/4 − R_x^{other}(π) − τ/2 − R_{−x}^{other}(π) − τ/4`
pub fn soft_z(spin: Spin, p: &SpinSystemParams) -> NmrResult<PulseSequence> {
    let nu = p.offset(spin);
    if nu == 0.0 || !nu.is_finite() {
        return Err(NmrError::ZeroOffset(spin));
    }
    let tau = 1.0 / (2.0 * nu.abs());
    let other = Targets::only(spin.other());
    PulseSequence::from_events(
        format!("soft_z({spin})"),
        vec![
            PulseEvent::delay(tau / 4.0),
            PulseEvent::pulse(other, Axis::X, PI),
            PulseEvent::delay(tau / 2.0),
            PulseEvent::pulse(other, Axis::MinusX, PI),
            PulseEvent::delay(tau / 4.0),
        ],
    )
}

/// `R_{−y}^{AB}(π/2) − R_x^{AB}(π) − R_y^{AB}(π/2)`, a non-selective `R_z(π)`.
pub fn composite_z_all() -> PulseSequence {
    PulseSequence::from_events(
        "composite_z",
        vec![
            PulseEvent::pulse(Targets::AB, Axis::MinusY, FRAC_PI_2),
            PulseEvent::pulse(Targets::AB, Axis::X, PI),
            PulseEvent::pulse(Targets::AB, Axis::Y, FRAC_PI_2),
        ],
    )
    .expect("finite events")
}

/// Pulse realisation of the two-qubit phase oracle `U_a`.
pub fn compile_ua(a: &BitString, p: &SpinSystemParams) -> NmrResult<PulseSequence> {
    if a.len() != 2 {
        return Err(NmrError::WrongLength(a.len()));
    }
    let body = match a.bits() {
        [0, 0] => PulseSequence::new(""),
        [0, 1] => soft_z(Spin::B, p)?,
        [1, 0] => soft_z(Spin::A, p)?,
        _ => composite_z_all(),
    };
    let mut seq = PulseSequence::new(format!("U_{a}"));
    seq.append(&body);
    Ok(seq)
}

/// Ideal propagator a compiled sequence should match up to global phase.
///
/// Rotations are built as `exp(−iθ n̂·I)` by eigendecomposition and oracles
/// from the gate-level phase oracle, independently of the pulse path.
pub fn ideal_target(name: &str) -> Option<Matrix4C> {
    let rot = |axis: Cartesian, angle: f64| {
        let g = (spin_operator(Spin::A, axis) + spin_operator(Spin::B, axis)) * C64::from(angle);
        expm_hermitian(&g)
    };
    let oracle = |a: &str| -> Matrix4C {
        let d = build_phase_oracle(&a.parse().expect("bit string"))
            .operator()
            .to_dense();
        Matrix4C::from_iterator(d.iter().cloned())
    };
    Some(match name {
        "h" => rot(Cartesian::Y, -FRAC_PI_2),
        "h_inv" => rot(Cartesian::Y, FRAC_PI_2),
        "soft_z(A)" | "U_10" => oracle("10"),
        "soft_z(B)" | "U_01" => oracle("01"),
        "composite_z" | "U_11" => oracle("11"),
        "U_00" => oracle("00"),
        _ => return None,
    })
}

/// A compiled sequence scored against its ideal propagator.
#[derive(Clone, Debug)]
pub struct CompiledCheck {
    pub name: String,
    pub sequence: PulseSequence,
    /// `|Tr(U†V)|/4` against [`ideal_target`].
    pub fidelity: f64,
    /// Net `J` phase over the delays; see [`coupling_phase`].
    pub coupling_phase: Option<f64>,
}

/// `h`, `h⁻¹`, both soft z rotations, the composite sandwich and all four `U_a`.
pub fn compiled_suite(p: &SpinSystemParams) -> NmrResult<Vec<CompiledCheck>> {
    let mut seqs = vec![
        ("h".to_string(), pseudo_hadamard(HadamardDirection::Forward)),
        (
            "h_inv".to_string(),
            pseudo_hadamard(HadamardDirection::Inverse),
        ),
        ("soft_z(A)".to_string(), soft_z(Spin::A, p)?),
        ("soft_z(B)".to_string(), soft_z(Spin::B, p)?),
        ("composite_z".to_string(), composite_z_all()),
    ];
    for a in ["00", "01", "10", "11"] {
        seqs.push((
            format!("U_{a}"),
            compile_ua(&a.parse().expect("bit string"), p)?,
        ));
    }
    seqs.into_iter()
        .map(|(name, sequence)| {
            let u = sequence_unitary(&sequence, p)?;
            let target = ideal_target(&name).expect("target for every suite entry");
            let dense = |m: &Matrix4C| DMatrix::from_iterator(4, 4, m.iter().cloned());
            let fidelity = fidelity_up_to_global_phase(&dense(&u), &dense(&target))
                .expect("square matrices of equal size");
            let coupling_phase = coupling_phase(&sequence, p);
            Ok(CompiledCheck {
                name,
                sequence,
                fidelity,
                coupling_phase,
            })
        })
        .collect()
}
