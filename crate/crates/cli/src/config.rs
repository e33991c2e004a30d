//! Run configuration loaded from a flat `key = value` file.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use bvsim_core::nmr::{Evolution, GradientMode, SequenceOptions, SpinSystemParams};
use bvsim_core::quantum::DEFAULT_DENSE_LIMIT;
use bvsim_core::spectro::AcquisitionParams;
use serde::{Deserialize, Deserializer};

fn parsed<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Rotating-frame offset of spin A, Hz.
    pub nu_a: f64,
    /// Rotating-frame offset of spin B, Hz.
    pub nu_b: f64,
    /// Scalar coupling, Hz.
    pub j: f64,
    pub sweep_width: f64,
    pub points: usize,
    pub t2_star: f64,
    #[serde(deserialize_with = "parsed")]
    pub gradient: GradientMode,
    /// Evolution during the preparation delay.
    #[serde(deserialize_with = "parsed")]
    pub prep_delay: Evolution,
    pub seed: u64,
    pub dense_limit: usize,
    /// Decode threshold relative to the reference doublet integral.
    pub noise_floor: f64,
    /// Allowed `1 − F` for compiled sequences.
    pub fidelity_tol: f64,
    /// Allowed single-qubit impurity for a run to count as unentangled.
    pub impurity_tol: f64,
}

/// Largest dense size the simulator will ever allocate.
const HARD_DENSE_CAP: usize = 30;

impl Default for Config {
    fn default() -> Self {
        let spin = SpinSystemParams::default();
        let acq = AcquisitionParams::default();
        Self {
            nu_a: spin.nu_a,
            nu_b: spin.nu_b,
            j: spin.j,
            sweep_width: acq.sweep_width,
            points: acq.points,
            t2_star: acq.t2_star,
            gradient: GradientMode::Physical,
            prep_delay: Evolution::CouplingOnly,
            seed: 0,
            dense_limit: DEFAULT_DENSE_LIMIT,
            noise_floor: 1e-6,
            fidelity_tol: 1e-6,
            impurity_tol: 1e-10,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn spin(&self) -> SpinSystemParams {
        SpinSystemParams {
            nu_a: self.nu_a,
            nu_b: self.nu_b,
            j: self.j,
        }
    }

    pub fn acquisition(&self) -> AcquisitionParams {
        AcquisitionParams {
            sweep_width: self.sweep_width,
            points: self.points,
            t2_star: self.t2_star,
        }
    }

    pub fn sequence_options(&self) -> SequenceOptions {
        SequenceOptions {
            gradient: self.gradient,
            prep_delay: self.prep_delay,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let spin = self.spin();
        spin.validate()?;
        if self.nu_a == 0.0 || self.nu_b == 0.0 {
            bail!(
                "offsets must be non-zero for soft z rotations (nu_a = {}, nu_b = {})",
                self.nu_a,
                self.nu_b
            );
        }
        if (self.nu_a - self.nu_b).abs() < 3.0 * self.j {
            bail!("offsets must be at least 3J apart so the doublet windows do not overlap");
        }
        self.acquisition().validate(&spin)?;
        if self.dense_limit == 0 || self.dense_limit > HARD_DENSE_CAP {
            bail!(
                "dense_limit must be in 1..={HARD_DENSE_CAP}, got {}",
                self.dense_limit
            );
        }
        for (name, v) in [
            ("noise_floor", self.noise_floor),
            ("fidelity_tol", self.fidelity_tol),
            ("impurity_tol", self.impurity_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                bail!("{name} must lie in (0, 1), got {v}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
        Config::default().validate().unwrap();
    }

    #[test]
    fn overrides_and_enums() {
        let c =
            Config::parse("seed = 7\ngradient = \"crush_all\"\nprep_delay = \"full\"\nj = 7.0\n")
                .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.gradient, GradientMode::CrushAll);
        assert_eq!(c.prep_delay, Evolution::Full);
        assert_eq!(c.j, 7.0);
    }

    #[test]
    fn narrow_sweep_width_is_rejected() {
        let err = Config::parse("sweep_width = 700.0").unwrap_err();
        assert!(format!("{err:#}").contains("sweep_width"), "{err:#}");
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(Config::parse("nu_c = 1.0").is_err());
        assert!(Config::parse("gradient = \"sideways\"").is_err());
        assert!(Config::parse("points = 1000").is_err());
        assert!(Config::parse("dense_limit = 40").is_err());
        assert!(Config::parse("noise_floor = 0.0").is_err());
        assert!(Config::parse("nu_a = 0.0").is_err());
    }
}
