use super::operators::{energies, rotation, Matrix4C};
use super::sequence::{Evolution, GradientMode, HardPulse};
use super::{NmrError, NmrResult, SpinSystemParams};
use crate::C64;

const STRUCTURE_TOL: f64 = 1e-12;

/// Traceless Hermitian part of the high-temperature ensemble density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationDensityMatrix(Matrix4C);

/// `ρ = c(P − I/4) + r` for a basis projector `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoPure {
    /// Excess coefficient `c`; positive when the pseudo-pure state is `P`.
    pub excess: f64,
    /// Frobenius norm of the residual `r`.
    pub residual: f64,
}

impl DeviationDensityMatrix {
    /// Checks Hermiticity and tracelessness, relative to the matrix scale.
    pub fn new(m: Matrix4C) -> NmrResult<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NmrError::Density("non-finite element".into()));
        }
        let herm = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > STRUCTURE_TOL * scale {
            return Err(NmrError::Density(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        if m.trace().norm() > STRUCTURE_TOL * scale {
            return Err(NmrError::Density(format!(
                "trace {} is not zero",
                m.trace()
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix4C {
        &self.0
    }

    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.0[(i, i)].re)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * C64::from(factor))
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &Matrix4C) -> Self {
        Self(u * self.0 * u.adjoint())
    }

    /// Sorted eigenvalues (ascending).
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self
            .0
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    worst = worst.max(self.0[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn trace_error(&self) -> f64 {
        self.0.trace().norm()
    }

    /// Least-squares fit of `c(P_index − I/4)` to this matrix.
    pub fn pseudo_pure(&self, index: usize) -> PseudoPure {
        // Tr((P − I/4)²) = 3/4 and Tr(ρ(P − I/4)) = ρ_ii for traceless ρ
        let excess = self.0[(index, index)].re * 4.0 / 3.0;
        let mut r = self.0;
        for i in 0..4 {
            let target = if i == index { 0.75 } else { -0.25 };
            r[(i, i)] -= C64::from(excess * target);
        }
        PseudoPure {
            excess,
            residual: r.norm(),
        }
    }

    /// Share of the population excess sitting on basis state `index`:
    /// `(p_index − min p) / Σ (p_k − min p)`. 1 for a perfect pseudo-pure state.
    pub fn excess_fraction(&self, index: usize) -> f64 {
        let pops = self.populations();
        let min = pops.iter().copied().fold(f64::INFINITY, f64::min);
        let total: f64 = pops.iter().map(|p| p - min).sum();
        if total == 0.0 {
            return 0.0;
        }
        (pops[index] - min) / total
    }
}

/// `I_z^A + I_z^B`: unit polarization on both spins.
pub fn thermal_state(_p: &SpinSystemParams) -> DeviationDensityMatrix {
    let d = [1.0, 0.0, 0.0, -1.0].map(C64::from);
    DeviationDensityMatrix(Matrix4C::from_diagonal(&d.into()))
}

/// `ρ → e^{−iHt} ρ e^{iHt}` under the full Hamiltonian.
pub fn free_evolve(
    rho: &DeviationDensityMatrix,
    t: f64,
    p: &SpinSystemParams,
) -> NmrResult<DeviationDensityMatrix> {
    free_evolve_with(rho, t, p, Evolution::Full)
}

/// Free evolution with either the full Hamiltonian or the coupling term only.
pub fn free_evolve_with(
    rho: &DeviationDensityMatrix,
    t: f64,
    p: &SpinSystemParams,
    evolution: Evolution,
) -> NmrResult<DeviationDensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(NmrError::Event(format!(
            "delay must be a finite non-negative time, got {t}"
        )));
    }
    let e = evolution_energies(p, evolution);
    let mut m = rho.0;
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                m[(j, k)] *= C64::from_polar(1.0, -(e[j] - e[k]) * t);
            }
        }
    }
    Ok(DeviationDensityMatrix(m))
}

pub(crate) fn evolution_energies(p: &SpinSystemParams, evolution: Evolution) -> [f64; 4] {
    match evolution {
        Evolution::Full => energies(p),
        Evolution::CouplingOnly => energies(&SpinSystemParams {
            nu_a: 0.0,
            nu_b: 0.0,
            j: p.j,
        }),
    }
}

pub fn apply_hard_pulse(rho: &DeviationDensityMatrix, pulse: &HardPulse) -> DeviationDensityMatrix {
    rho.conjugate(&rotation(pulse.targets, pulse.axis, pulse.angle))
}

/// Coherence order of element `(j, k)`: `m(j) − m(k)` in total `I_z`.
fn coherence_order(j: usize, k: usize) -> i32 {
    k.count_ones() as i32 - j.count_ones() as i32
}

/// Dephases coherences. `Physical` keeps zero-quantum terms; `CrushAll`
/// keeps only populations.
pub fn gradient_crush(rho: &DeviationDensityMatrix, mode: GradientMode) -> DeviationDensityMatrix {
    let mut m = rho.0;
    for j in 0..4 {
        for k in 0..4 {
            let kill = match mode {
                GradientMode::Physical => coherence_order(j, k) != 0,
                GradientMode::CrushAll => j != k,
            };
            if kill {
                m[(j, k)] = C64::new(0.0, 0.0);
            }
        }
    }
    DeviationDensityMatrix(m)
}
