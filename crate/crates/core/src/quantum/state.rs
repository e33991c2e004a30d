use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::{ONE, ZERO};
use super::{
    check_dense, FactoredOperator, QuantumError, QuantumResult, CERTAINTY_THRESHOLD,
    FACTOR_NORM_TOL, NORM_TOL,
};
use crate::C64;

/// Outcome of a full-register measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// One entry per measured qubit, each 0 or 1, qubit 0 first.
    pub bits: Vec<u8>,
    /// Set when the sampled string had probability ≥ 1 − 1e-9.
    pub certain: bool,
}

/// Operations shared by the dense and product backends.
pub trait QuantumState: Sized {
    fn num_qubits(&self) -> usize;

    /// Applies `U⁰ ⊗ … ⊗ U^{n-1}`, consuming the input state.
    fn apply_factored(self, op: &FactoredOperator) -> QuantumResult<Self>;

    /// Samples every qubit in the computational basis. Deterministic in `seed`.
    fn measure_all(&self, seed: u64) -> Measurement;
}

/// Dense `2^n` amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// Validates length, finiteness and normalization.
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> QuantumResult<Self> {
        if n == 0 {
            return Err(QuantumError::Empty);
        }
        if n >= usize::BITS as usize || amps.len() != 1usize << n {
            return Err(QuantumError::Length { n, len: amps.len() });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized { norm_sqr });
        }
        Ok(Self { n, amps })
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize, limit: usize) -> QuantumResult<Self> {
        if n == 0 {
            return Err(QuantumError::Empty);
        }
        check_dense(n, limit)?;
        let mut amps = vec![ZERO; 1 << n];
        let len = amps.len();
        *amps.get_mut(index).ok_or(QuantumError::Length { n, len })? = ONE;
        Ok(Self { n, amps })
    }

    /// `|0…0⟩`
    pub fn zero(n: usize, limit: usize) -> QuantumResult<Self> {
        Self::basis(n, 0, limit)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> QuantumResult<C64> {
        if self.n != other.n {
            return Err(QuantumError::Dimension(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Bit mask of qubit `k` within a basis index.
    pub(crate) fn mask(&self, k: usize) -> usize {
        1 << (self.n - 1 - k)
    }

    /// Measures the leading `count` qubits, tracing out the rest.
    pub fn measure_prefix(&self, count: usize, seed: u64) -> QuantumResult<Measurement> {
        if count == 0 || count > self.n {
            return Err(QuantumError::QubitIndex {
                index: count,
                n: self.n,
            });
        }
        let tail = self.n - count;
        let mut probs = vec![0.0; 1 << count];
        for (i, a) in self.amps.iter().enumerate() {
            probs[i >> tail] += a.norm_sqr();
        }
        let (best, &p_best) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let (outcome, certain) = if p_best >= CERTAINTY_THRESHOLD {
            (best, true)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
            let mut acc = 0.0;
            let mut pick = probs.len() - 1;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if r < acc {
                    pick = i;
                    break;
                }
            }
            (pick, false)
        };
        Ok(Measurement {
            bits: index_bits(outcome, count),
            certain,
        })
    }
}

fn index_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect()
}

impl QuantumState for PureState {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_factored(mut self, op: &FactoredOperator) -> QuantumResult<Self> {
        if op.len() != self.n {
            return Err(QuantumError::FactorCount {
                expected: self.n,
                got: op.len(),
            });
        }
        for (k, u) in op.factors().iter().enumerate() {
            if u.is_identity() {
                continue;
            }
            let stride = self.mask(k);
            let m = u.matrix();
            if u.is_diagonal() {
                let (d0, d1) = (m[(0, 0)], m[(1, 1)]);
                for chunk in self.amps.chunks_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    if d0 != ONE {
                        lo.iter_mut().for_each(|a| *a *= d0);
                    }
                    hi.iter_mut().for_each(|a| *a *= d1);
                }
            } else {
                let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
                for chunk in self.amps.chunks_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (a, b) = (*x, *y);
                        *x = m00 * a + m01 * b;
                        *y = m10 * a + m11 * b;
                    }
                }
            }
        }
        Ok(self)
    }

    fn measure_all(&self, seed: u64) -> Measurement {
        self.measure_prefix(self.n, seed).expect("n ≥ 1")
    }
}

/// Normalized single-qubit state `α|0⟩ + β|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState([C64; 2]);

impl QubitState {
    pub fn new(alpha: C64, beta: C64) -> QuantumResult<Self> {
        if ![alpha, beta]
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
        {
            return Err(QuantumError::NonFinite);
        }
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr.sqrt() - 1.0).abs() > FACTOR_NORM_TOL {
            return Err(QuantumError::NotNormalized { norm_sqr });
        }
        Ok(Self([alpha, beta]))
    }

    pub fn zero() -> Self {
        Self([ONE, ZERO])
    }

    pub fn one() -> Self {
        Self([ZERO, ONE])
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Self::zero()
        } else {
            Self::one()
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.0
    }

    pub fn prob_one(&self) -> f64 {
        self.0[1].norm_sqr() / (self.0[0].norm_sqr() + self.0[1].norm_sqr())
    }
}

/// List of `n` single-qubit factors; the state is their tensor product.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    factors: Vec<QubitState>,
}

impl ProductState {
    pub fn new(factors: Vec<QubitState>) -> QuantumResult<Self> {
        if factors.is_empty() {
            return Err(QuantumError::Empty);
        }
        Ok(Self { factors })
    }

    pub fn zero(n: usize) -> QuantumResult<Self> {
        Self::new(vec![QubitState::zero(); n])
    }

    pub fn factors(&self) -> &[QubitState] {
        &self.factors
    }

    /// Dense amplitudes: `amp[x] = Π_k factor_k[bit_k(x)]`.
    pub fn expand(&self, limit: usize) -> QuantumResult<PureState> {
        let n = self.factors.len();
        check_dense(n, limit)?;
        let mut amps = Vec::with_capacity(1 << n);
        amps.push(ONE);
        for f in &self.factors {
            let [f0, f1] = f.amplitudes();
            amps = amps.iter().flat_map(|&a| [a * f0, a * f1]).collect();
        }
        Ok(PureState { n, amps })
    }
}

impl QuantumState for ProductState {
    fn num_qubits(&self) -> usize {
        self.factors.len()
    }

    fn apply_factored(mut self, op: &FactoredOperator) -> QuantumResult<Self> {
        if op.len() != self.factors.len() {
            return Err(QuantumError::FactorCount {
                expected: self.factors.len(),
                got: op.len(),
            });
        }
        for (f, u) in self.factors.iter_mut().zip(op.factors()) {
            f.0 = u.apply(f.0);
        }
        Ok(self)
    }

    /// Qubits are independent, so each one is sampled from its own marginal.
    fn measure_all(&self, seed: u64) -> Measurement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut log_p = 0.0;
        let mut likely = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let p1 = f.prob_one();
            let bit = u8::from(p1 > 0.5);
            log_p += if bit == 1 { p1 } else { 1.0 - p1 }.ln();
            likely.push(bit);
        }
        if log_p >= CERTAINTY_THRESHOLD.ln() {
            return Measurement {
                bits: likely,
                certain: true,
            };
        }
        let bits = self
            .factors
            .iter()
            .map(|f| u8::from(rng.gen::<f64>() < f.prob_one()))
            .collect();
        Measurement {
            bits,
            certain: false,
        }
    }
}
