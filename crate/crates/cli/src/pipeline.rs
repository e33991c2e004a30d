//! Simulated two-spin experiment from thermal equilibrium to decoded answer.

use anyhow::bail;
use bvsim_core::bv::BitString;
use bvsim_core::nmr::{run_experiment, run_reference, ExperimentRun};
use bvsim_core::spectro::{
    acquire_fid, decode_answer, noise_floor, phase_reference, process, read_doublets,
    DoubletReading, Fid, SpectroError, Spectrum,
};

use crate::config::Config;

pub struct NmrOutcome {
    pub hidden: BitString,
    pub reference: ExperimentRun,
    pub experiment: ExperimentRun,
    pub reference_fid: Fid,
    pub experiment_fid: Fid,
    /// Phased with the zero-order phase fitted on the reference.
    pub reference_spectrum: Spectrum,
    pub experiment_spectrum: Spectrum,
    pub reference_readings: [DoubletReading; 2],
    pub readings: [DoubletReading; 2],
    pub floor: f64,
    pub decoded: Result<BitString, SpectroError>,
}

impl NmrOutcome {
    pub fn success(&self) -> bool {
        self.decoded.as_ref().is_ok_and(|d| *d == self.hidden)
    }
}

pub fn run_nmr(a: &BitString, config: &Config) -> anyhow::Result<NmrOutcome> {
    if a.len() != 2 {
        bail!("the two-spin experiment needs a 2-bit hidden string, got {a}");
    }
    let p = config.spin();
    let acq = config.acquisition();
    let opts = config.sequence_options();

    let reference = run_reference(&p, &opts)?;
    let experiment = run_experiment(a, &p, &opts)?;
    let reference_fid = acquire_fid(&reference.detected, &p, &acq)?;
    let experiment_fid = acquire_fid(&experiment.detected, &p, &acq)?;

    let raw_reference = process(&reference_fid);
    let phi = phase_reference(&raw_reference)?;
    let reference_spectrum = raw_reference.phased(phi);
    let experiment_spectrum = process(&experiment_fid).phased(phi);

    let reference_readings = read_doublets(&reference_spectrum, &p)?;
    let readings = read_doublets(&experiment_spectrum, &p)?;
    let floor = noise_floor(&reference_readings, config.noise_floor);
    let decoded = decode_answer(&readings, floor);
    Ok(NmrOutcome {
        hidden: a.clone(),
        reference,
        experiment,
        reference_fid,
        experiment_fid,
        reference_spectrum,
        experiment_spectrum,
        reference_readings,
        readings,
        floor,
        decoded,
    })
}
