use std::f64::consts::FRAC_PI_2;

use super::density::{thermal_state, DeviationDensityMatrix};
use super::library::{
    compile_ua, pseudo_hadamard, pseudo_pure_prep, HadamardDirection, SequenceOptions,
};
use super::sequence::{execute, PulseEvent, PulseSequence};
use super::{Axis, NmrResult, SpinSystemParams, Targets};
use crate::bv::BitString;

/// States captured along one simulated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    /// Every event from the thermal state to the detection pulse.
    pub sequence: PulseSequence,
    /// After pseudo-pure preparation.
    pub prepared: DeviationDensityMatrix,
    /// After the algorithm, before the readout gradient.
    pub pre_detection: DeviationDensityMatrix,
    /// After the detection pulse, ready for acquisition.
    pub detected: DeviationDensityMatrix,
}

/// `R_y^{AB}(π/2)` read pulse.
pub fn detection_pulse() -> PulseEvent {
    PulseEvent::pulse(Targets::AB, Axis::Y, FRAC_PI_2)
}

fn readout(opts: &SequenceOptions) -> PulseSequence {
    PulseSequence::from_events(
        "readout",
        vec![PulseEvent::Gradient(opts.gradient), detection_pulse()],
    )
    .expect("finite events")
}

fn run(
    label: String,
    algorithm: &PulseSequence,
    p: &SpinSystemParams,
    opts: &SequenceOptions,
) -> NmrResult<ExperimentRun> {
    p.validate()?;
    let prep = pseudo_pure_prep(p, opts);
    let readout = readout(opts);

    let prepared = execute(&prep, &thermal_state(p), p)?;
    let pre_detection = execute(algorithm, &prepared, p)?;
    let detected = execute(&readout, &pre_detection, p)?;

    let mut sequence = PulseSequence::new(label);
    for part in [&prep, algorithm, &readout] {
        sequence.append(part);
    }
    Ok(ExperimentRun {
        sequence,
        prepared,
        pre_detection,
        detected,
    })
}

/// Thermal → pseudo-pure `|00⟩` → `h` → `U_a` → `h⁻¹` → gradient → read pulse.
pub fn run_experiment(
    a: &BitString,
    p: &SpinSystemParams,
    opts: &SequenceOptions,
) -> NmrResult<ExperimentRun> {
    let mut algorithm = pseudo_hadamard(HadamardDirection::Forward);
    algorithm.append(&compile_ua(a, p)?);
    algorithm.append(&pseudo_hadamard(HadamardDirection::Inverse));
    run(format!("experiment a={a}"), &algorithm, p, opts)
}

/// The `|00⟩` reference: pseudo-pure preparation followed directly by readout.
pub fn run_reference(p: &SpinSystemParams, opts: &SequenceOptions) -> NmrResult<ExperimentRun> {
    run("reference".to_string(), &PulseSequence::new(""), p, opts)
}
