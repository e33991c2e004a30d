use super::{SpectroError, SpectroResult, Spectrum};
use crate::bv::BitString;
use crate::nmr::{Spin, SpinSystemParams};
use crate::C64;

/// Fraction of the tallest magnitude a bin must reach to count as a peak.
const PEAK_FRACTION: f64 = 0.5;

/// Zero-order phase `φ` maximising `Σ_peaks Re(e^{iφ} S)`, i.e. `−arg Σ_peaks S`.
pub fn phase_reference(reference: &Spectrum) -> SpectroResult<f64> {
    let max = reference
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(SpectroError::NoPeaks);
    }
    let v = &reference.values;
    let sum: C64 = (0..v.len())
        .filter(|&i| {
            let m = v[i].norm();
            m >= PEAK_FRACTION * max
                && (i == 0 || m >= v[i - 1].norm())
                && (i + 1 == v.len() || m >= v[i + 1].norm())
        })
        .map(|i| v[i])
        .sum();
    Ok(-sum.arg())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubletReading {
    pub spin: Spin,
    /// Midpoint of the two fitted line positions, Hz.
    pub center: f64,
    /// Distance between the two fitted line positions, Hz.
    pub splitting: f64,
    /// `Σ Re S · Δf` over the `3J` window.
    pub integral: f64,
}

/// Sub-bin position of the extremum at `bin` by a parabola through three points.
fn interpolate(spec: &Spectrum, y: &[f64], bin: usize) -> f64 {
    if bin == 0 || bin + 1 >= y.len() {
        return spec.freq(bin);
    }
    let (a, b, c) = (y[bin - 1], y[bin], y[bin + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom == 0.0 {
        0.0
    } else {
        0.5 * (a - c) / denom
    };
    spec.freq(bin) + shift.clamp(-0.5, 0.5) * spec.resolution()
}

fn read_one(spec: &Spectrum, spin: Spin, center: f64, half: f64) -> SpectroResult<DoubletReading> {
    let sw = spec.sweep_width;
    if center - half < -sw / 2.0 || center + half >= sw / 2.0 {
        return Err(SpectroError::WindowOutside(spin));
    }
    let lo = spec.bin_of(center - half);
    let hi = spec.bin_of(center + half);
    let mid = spec.bin_of(center);
    let abs_re: Vec<f64> = spec.values.iter().map(|v| v.re.abs()).collect();
    let integral = spec.values[lo..=hi].iter().map(|v| v.re).sum::<f64>() * spec.resolution();

    let argmax = |range: std::ops::Range<usize>| {
        range
            .max_by(|&a, &b| abs_re[a].total_cmp(&abs_re[b]))
            .expect("non-empty window")
    };
    let left = interpolate(spec, &abs_re, argmax(lo..mid));
    let right = interpolate(spec, &abs_re, argmax(mid..hi + 1));
    Ok(DoubletReading {
        spin,
        center: 0.5 * (left + right),
        splitting: right - left,
        integral,
    })
}

/// Integrates the absorption over `3J` windows centred on each spin's offset.
pub fn read_doublets(spec: &Spectrum, p: &SpinSystemParams) -> SpectroResult<[DoubletReading; 2]> {
    let width = 3.0 * p.j;
    let separation = (p.nu_a - p.nu_b).abs();
    if separation < width {
        return Err(SpectroError::WindowOverlap { separation, width });
    }
    Ok([
        read_one(spec, Spin::A, p.nu_a, width / 2.0)?,
        read_one(spec, Spin::B, p.nu_b, width / 2.0)?,
    ])
}

/// `relative` times the larger reference doublet integral.
pub fn noise_floor(reference: &[DoubletReading; 2], relative: f64) -> f64 {
    relative
        * reference
            .iter()
            .map(|r| r.integral.abs())
            .fold(0.0, f64::max)
}

/// Positive absorption → 0, negative → 1; qubit 0 from spin A. Any doublet
/// below `floor` makes the reading inconclusive.
pub fn decode_answer(readings: &[DoubletReading; 2], floor: f64) -> SpectroResult<BitString> {
    let mut bits = Vec::with_capacity(2);
    for r in readings {
        if r.integral.is_nan() || r.integral.abs() <= floor {
            return Err(SpectroError::Inconclusive {
                spin: r.spin,
                integral: r.integral,
                floor,
            });
        }
        bits.push(u8::from(r.integral < 0.0));
    }
    Ok(BitString::from(bits))
}
