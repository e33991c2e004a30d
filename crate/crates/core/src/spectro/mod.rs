//! Synthetic NMR readout: FID acquisition, Fourier transform, zero-order
//! phasing against the `|00⟩` reference, doublet integration and decoding.
//!
//! The detected signal is `Tr(ρ(t)(I₊^A + I₊^B))·e^{−t/T2*}`. With the rotation
//! convention of [`crate::nmr`], a spin in `|0⟩` read by `R_y(π/2)` gives `+I_x`
//! and a positive absorption doublet centred at the spin's offset.

mod readout;

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::fmt::sig;
use crate::nmr::{energies, DeviationDensityMatrix, Spin, SpinSystemParams};
use crate::C64;

pub use readout::{decode_answer, noise_floor, phase_reference, read_doublets, DoubletReading};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectroError {
    #[error("invalid acquisition parameters: {0}")]
    Acquisition(String),

    #[error("no peaks detected in the reference spectrum")]
    NoPeaks,

    #[error(
        "integration windows of A and B overlap (separation {separation} Hz < 3J = {width} Hz)"
    )]
    WindowOverlap { separation: f64, width: f64 },

    #[error("integration window for spin {0} falls outside the spectral width")]
    WindowOutside(Spin),

    #[error("spin {spin} doublet integral {integral:e} is below the noise floor {floor:e}")]
    Inconclusive {
        spin: Spin,
        integral: f64,
        floor: f64,
    },
}

pub type SpectroResult<T> = Result<T, SpectroError>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcquisitionParams {
    /// Hz.
    pub sweep_width: f64,
    pub points: usize,
    /// Apodization time constant, s.
    pub t2_star: f64,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        Self {
            sweep_width: 2048.0,
            points: 16384,
            t2_star: 0.3,
        }
    }
}

impl AcquisitionParams {
    pub fn dwell(&self) -> f64 {
        1.0 / self.sweep_width
    }

    pub fn resolution(&self) -> f64 {
        self.sweep_width / self.points as f64
    }

    pub fn validate(&self, p: &SpinSystemParams) -> SpectroResult<()> {
        let bad = |msg: String| Err(SpectroError::Acquisition(msg));
        if !(self.t2_star > 0.0 && self.t2_star.is_finite()) {
            return bad(format!("t2_star must be positive, got {}", self.t2_star));
        }
        if self.points < 2 || !self.points.is_power_of_two() {
            return bad(format!(
                "points must be a power of two, got {}",
                self.points
            ));
        }
        let needed = 2.0 * (p.nu_a.abs().max(p.nu_b.abs()) + p.j);
        if self.sweep_width.is_nan() || self.sweep_width <= needed {
            return bad(format!(
                "sweep_width {} Hz must exceed 2·(max|offset| + J) = {} Hz",
                self.sweep_width, needed
            ));
        }
        if self.resolution().is_nan() || self.resolution() >= p.j / 4.0 {
            return bad(format!(
                "resolution {} Hz must be finer than J/4 = {} Hz",
                self.resolution(),
                p.j / 4.0
            ));
        }
        Ok(())
    }
}

/// Free induction decay sampled at `t_k = k·dwell`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fid {
    pub samples: Vec<C64>,
    pub dwell: f64,
}

impl Fid {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,real,imag\n");
        for (k, s) in self.samples.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                sig(k as f64 * self.dwell),
                sig(s.re),
                sig(s.im)
            ));
        }
        out
    }
}

/// `(transition start, transition end)` basis pairs contributing to `I₊`.
/// `I₊` raises spin A on `|1m⟩ → |0m⟩` and spin B on `|m1⟩ → |m0⟩`.
const TRANSITIONS: [(usize, usize); 4] = [(0b00, 0b10), (0b01, 0b11), (0b00, 0b01), (0b10, 0b11)];

/// Closed-form FID of `rho` under free precession.
pub fn acquire_fid(
    rho: &DeviationDensityMatrix,
    p: &SpinSystemParams,
    acq: &AcquisitionParams,
) -> SpectroResult<Fid> {
    acq.validate(p)?;
    let e = energies(p);
    let m = rho.matrix();
    // Tr(ρ I₊) = Σ ρ_{jk} (I₊)_{kj}; element ρ_{jk} precesses at −(E_j − E_k)
    let lines: Vec<(C64, f64)> = TRANSITIONS
        .iter()
        .map(|&(k, j)| (m[(j, k)], -(e[j] - e[k])))
        .filter(|(amp, _)| *amp != C64::new(0.0, 0.0))
        .collect();
    let dwell = acq.dwell();
    let samples = (0..acq.points)
        .map(|k| {
            let t = k as f64 * dwell;
            let decay = (-t / acq.t2_star).exp();
            lines
                .iter()
                .map(|&(amp, w)| amp * C64::from_polar(decay, w * t))
                .sum()
        })
        .collect();
    Ok(Fid { samples, dwell })
}

/// Complex spectrum on the centred axis `[−SW/2, SW/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<C64>,
    pub sweep_width: f64,
    /// Zero-order phase already applied, rad.
    pub phase_applied: f64,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.sweep_width / self.values.len() as f64
    }

    pub fn freq(&self, bin: usize) -> f64 {
        (bin as f64 - (self.values.len() / 2) as f64) * self.resolution()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.freq(i)).collect()
    }

    /// Nearest bin to `f` (clamped to the axis).
    pub fn bin_of(&self, f: f64) -> usize {
        let b = (f / self.resolution()).round() + (self.values.len() / 2) as f64;
        b.clamp(0.0, (self.values.len() - 1) as f64) as usize
    }

    /// Energy normalised so that it equals the FID energy (Parseval).
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    /// Multiplies every value by `e^{iφ}`.
    pub fn phased(&self, phi: f64) -> Spectrum {
        let rot = C64::from_polar(1.0, phi);
        Spectrum {
            values: self.values.iter().map(|v| v * rot).collect(),
            sweep_width: self.sweep_width,
            phase_applied: self.phase_applied + phi,
        }
    }

    /// Full width at half maximum of the absorption peak nearest `near`,
    /// searched within `±search` Hz.
    pub fn linewidth(&self, near: f64, search: f64) -> Option<f64> {
        let lo = self.bin_of(near - search);
        let hi = self.bin_of(near + search);
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let peak = (lo..=hi).max_by(|&a, &b| re[a].total_cmp(&re[b]))?;
        let half = re[peak] / 2.0;
        if half <= 0.0 {
            return None;
        }
        let mut l = peak;
        while l > 0 && re[l] > half {
            l -= 1;
        }
        let mut r = peak;
        while r + 1 < re.len() && re[r] > half {
            r += 1;
        }
        let cross = |inside: usize, outside: usize| {
            let frac = (re[inside] - half) / (re[inside] - re[outside]);
            self.freq(inside) + frac * (self.freq(outside) - self.freq(inside))
        };
        Some(cross(r - 1, r) - cross(l + 1, l))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,real,imag\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                sig(self.freq(i)),
                sig(v.re),
                sig(v.im)
            ));
        }
        out
    }
}

fn forward_fft(len: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(len)
}

/// Forward DFT `S_m = Σ_k s_k e^{−2πi km/N}`, reordered so 0 Hz sits at bin N/2.
pub fn transform(fid: &Fid) -> Spectrum {
    let n = fid.samples.len();
    let mut values = fid.samples.clone();
    if n > 0 {
        forward_fft(n).process(&mut values);
        values.rotate_left(n.div_ceil(2));
    }
    Spectrum {
        values,
        sweep_width: 1.0 / fid.dwell,
        phase_applied: 0.0,
    }
}

/// Standard processing: the first sample is halved before the transform so
/// the discrete sum does not add a constant `s₀/2` baseline to every bin.
pub fn process(fid: &Fid) -> Spectrum {
    let mut corrected = fid.clone();
    if let Some(first) = corrected.samples.first_mut() {
        *first *= 0.5;
    }
    transform(&corrected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::{apply_hard_pulse, thermal_state, Axis, HardPulse, Targets};
    use std::f64::consts::{FRAC_PI_2, TAU};

    /// Direct O(N²) DFT, same ordering as `transform`.
    fn naive_dft(samples: &[C64], dwell: f64) -> Spectrum {
        let n = samples.len();
        let values = (0..n)
            .map(|bin| {
                let m = (bin + n / 2) % n;
                samples
                    .iter()
                    .enumerate()
                    .map(|(k, s)| s * C64::from_polar(1.0, -TAU * (k * m) as f64 / n as f64))
                    .sum()
            })
            .collect();
        Spectrum {
            values,
            sweep_width: 1.0 / dwell,
            phase_applied: 0.0,
        }
    }

    #[test]
    fn fft_matches_naive_dft() {
        let fid = Fid {
            samples: (0..64)
                .map(|k| C64::new((k as f64 * 0.3).sin(), (k as f64).cos() * 0.1))
                .collect(),
            dwell: 1e-3,
        };
        let fast = transform(&fid);
        let slow = naive_dft(&fid.samples, fid.dwell);
        for (a, b) in fast.values.iter().zip(&slow.values) {
            assert!((a - b).norm() < 1e-10);
        }
        assert_eq!(fast.freq(0), -500.0);
        assert_eq!(fast.freq(32), 0.0);
    }

    #[test]
    fn zero_and_linearity() {
        let zero = Fid {
            samples: vec![C64::new(0.0, 0.0); 32],
            dwell: 1e-3,
        };
        assert!(transform(&zero).values.iter().all(|v| v.norm() == 0.0));
        let a = Fid {
            samples: (0..32).map(|k| C64::new(k as f64, 0.0)).collect(),
            dwell: 1e-3,
        };
        let b = Fid {
            samples: (0..32).map(|k| C64::new(0.0, (k * k) as f64)).collect(),
            dwell: 1e-3,
        };
        let sum = Fid {
            samples: a
                .samples
                .iter()
                .zip(&b.samples)
                .map(|(x, y)| x + y)
                .collect(),
            dwell: 1e-3,
        };
        let (sa, sb, ss) = (transform(&a), transform(&b), transform(&sum));
        for i in 0..32 {
            assert!((sa.values[i] + sb.values[i] - ss.values[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn single_exponential_gives_one_line() {
        let dwell = 1.0 / 1024.0;
        let f0 = 100.0;
        let fid = Fid {
            samples: (0..4096)
                .map(|k| {
                    let t = k as f64 * dwell;
                    C64::from_polar((-t / 0.2).exp(), TAU * f0 * t)
                })
                .collect(),
            dwell,
        };
        let s = transform(&fid);
        let peak = (0..s.values.len())
            .max_by(|&a, &b| s.values[a].re.total_cmp(&s.values[b].re))
            .unwrap();
        assert!((s.freq(peak) - f0).abs() <= s.resolution());
        assert!((fid.energy() - s.energy()).abs() <= 1e-9 * fid.energy());
    }

    #[test]
    fn no_transverse_terms_give_zero_fid() {
        let p = SpinSystemParams::default();
        let fid = acquire_fid(&thermal_state(&p), &p, &AcquisitionParams::default()).unwrap();
        assert!(fid.samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn thermal_read_has_four_lines() {
        let p = SpinSystemParams::default();
        let rho = apply_hard_pulse(
            &thermal_state(&p),
            &HardPulse::new(Targets::AB, Axis::Y, FRAC_PI_2),
        );
        let acq = AcquisitionParams::default();
        let s = transform(&acquire_fid(&rho, &p, &acq).unwrap());
        for f in [382.5 - 3.585, 382.5 + 3.585, -382.5 - 3.585, -382.5 + 3.585] {
            let b = s.bin_of(f);
            // local maximum of the absorption within one bin of the expected line
            let window = (b - 1)..=(b + 1);
            let best = window
                .clone()
                .max_by(|&x, &y| s.values[x].re.total_cmp(&s.values[y].re))
                .unwrap();
            assert!(
                s.values[best].re > s.values[b - 4].re && s.values[best].re > s.values[b + 4].re
            );
            assert!(s.values[best].re > 0.0);
        }
    }

    #[test]
    fn linewidth_scales_with_t2() {
        let p = SpinSystemParams::default();
        let rho = apply_hard_pulse(
            &thermal_state(&p),
            &HardPulse::new(Targets::AB, Axis::Y, FRAC_PI_2),
        );
        let width = |t2: f64| {
            let acq = AcquisitionParams {
                t2_star: t2,
                ..Default::default()
            };
            let s = transform(&acquire_fid(&rho, &p, &acq).unwrap());
            s.linewidth(382.5 + 3.585, 1.0).unwrap()
        };
        let (w1, w2) = (width(0.3), width(0.6));
        assert!(
            (w1 - 1.0 / (std::f64::consts::PI * 0.3)).abs() < 0.05 * w1,
            "{w1}"
        );
        assert!((w1 / w2 - 2.0).abs() < 0.1, "{w1} / {w2}");
    }

    #[test]
    fn acquisition_validation() {
        let p = SpinSystemParams::default();
        AcquisitionParams::default().validate(&p).unwrap();
        let narrow = AcquisitionParams {
            sweep_width: 700.0,
            ..Default::default()
        };
        assert!(narrow.validate(&p).is_err());
        let odd = AcquisitionParams {
            points: 1000,
            ..Default::default()
        };
        assert!(odd.validate(&p).is_err());
        let coarse = AcquisitionParams {
            points: 256,
            ..Default::default()
        };
        assert!(coarse.validate(&p).is_err());
    }

    #[test]
    fn first_point_correction_removes_baseline() {
        // a pure decaying line, far from the edges, sits on a zero baseline
        let dwell = 1.0 / 1024.0;
        let fid = Fid {
            samples: (0..8192)
                .map(|k| {
                    C64::from_polar(
                        (-(k as f64) * dwell / 0.3).exp(),
                        TAU * 200.0 * k as f64 * dwell,
                    )
                })
                .collect(),
            dwell,
        };
        let far = |s: &Spectrum| s.values[s.bin_of(-300.0)].re;
        assert!((far(&transform(&fid)) - 0.5).abs() < 0.01);
        assert!(far(&process(&fid)).abs() < 0.01);
    }

    #[test]
    fn csv_headers() {
        let fid = Fid {
            samples: vec![C64::new(1.0, -0.5); 4],
            dwell: 0.5,
        };
        let csv = fid.to_csv();
        assert!(csv.starts_with("t_s,real,imag\n0,1,-0.5\n0.5,1,-0.5\n"));
        let s = transform(&fid);
        let csv = s.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "freq_hz,real,imag");
        assert_eq!(rows.len(), 5);
        assert!(rows[1].starts_with("-1,"));
    }
}
