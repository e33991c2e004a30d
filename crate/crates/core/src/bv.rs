//! The Bernstein–Vazirani parity problem: find the hidden string `a` given
//! oracle access to `f_a(x) = a·x mod 2`.
//!
//! Two quantum formulations are provided. The original one uses `n+1` qubits
//! and the bit oracle `|x⟩|b⟩ → |x⟩|b ⊕ f_a(x)⟩` with the ancilla in
//! `(|0⟩−|1⟩)/√2`. The refined one drops the ancilla and queries the phase
//! oracle `|x⟩ → (−1)^{f_a(x)}|x⟩`, which factors into `I` or `σ_z` per qubit.
//! Every oracle application, classical or quantum, is counted on the
//! [`ParityOracle`] itself.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::quantum::{
    check_dense, max_impurity, FactoredOperator, ProductState, PureState, QuantumError,
    QuantumState, QubitOperator, DEFAULT_DENSE_LIMIT,
};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BvError {
    #[error("bit strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("invalid bit string {0:?}: expected a non-empty string of 0 and 1")]
    Parse(String),

    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type BvResult<T> = Result<T, BvError>;

/// Non-empty string of bits, bit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> BvResult<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(BvError::Parse(format!("{bits:?}")));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n.max(1)])
    }

    /// `e_i`: all zeros except bit `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut bits = vec![0; n];
        bits[i] = 1;
        Self(bits)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n.max(1)).map(|_| rng.gen_range(0..=1u8)).collect())
    }

    /// Inverse of [`BitString::to_index`]; `n` bits, bit 0 most significant.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect())
    }

    /// Dense basis index with bit 0 most significant.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(Σ aᵢxᵢ) mod 2`
    pub fn dot(&self, other: &BitString) -> BvResult<u8> {
        if self.len() != other.len() {
            return Err(BvError::LengthMismatch(self.len(), other.len()));
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(0, |acc, (a, x)| acc ^ (a & x)))
    }
}

impl From<Vec<u8>> for BitString {
    fn from(bits: Vec<u8>) -> Self {
        Self::new(bits).expect("bits are 0 or 1")
    }
}

impl FromStr for BitString {
    type Err = BvError;

    fn from_str(s: &str) -> BvResult<Self> {
        let bits: Option<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect();
        match bits {
            Some(b) if !b.is_empty() => Ok(Self(b)),
            _ => Err(BvError::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b}"))
    }
}

/// `f_a(x) = a·x mod 2`
pub fn f_a(a: &BitString, x: &BitString) -> BvResult<u8> {
    a.dot(x)
}

/// `U_a = U⁰ ⊗ … ⊗ U^{n-1}` with `Uⁱ = σ_z` when `aᵢ = 1`, `I` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOracleOp {
    hidden: BitString,
    op: FactoredOperator,
}

impl PhaseOracleOp {
    pub fn operator(&self) -> &FactoredOperator {
        &self.op
    }

    /// Eigenvalue `(−1)^{f_a(x)}` of basis state `|x⟩`.
    pub fn phase_of(&self, x: &BitString) -> BvResult<f64> {
        Ok(if self.hidden.dot(x)? == 1 { -1.0 } else { 1.0 })
    }
}

pub fn build_phase_oracle(a: &BitString) -> PhaseOracleOp {
    let factors = a
        .bits()
        .iter()
        .map(|&b| {
            if b == 1 {
                QubitOperator::pauli_z()
            } else {
                QubitOperator::identity()
            }
        })
        .collect();
    PhaseOracleOp {
        hidden: a.clone(),
        op: FactoredOperator::new(factors),
    }
}

/// Permutation `|x⟩|b⟩ → |x⟩|b ⊕ f_a(x)⟩` on `n+1` qubits, ancilla last.
#[derive(Clone, Debug, PartialEq)]
pub struct BitOracleOp {
    hidden_index: usize,
    n: usize,
}

impl BitOracleOp {
    pub fn num_qubits(&self) -> usize {
        self.n + 1
    }

    /// Image of basis index `i = (x << 1) | b`.
    pub fn map_basis(&self, i: usize) -> usize {
        let x = i >> 1;
        let f = ((x & self.hidden_index).count_ones() & 1) as usize;
        i ^ f
    }

    pub fn permutation(&self) -> Vec<usize> {
        (0..1usize << (self.n + 1))
            .map(|i| self.map_basis(i))
            .collect()
    }

    pub fn apply(&self, state: PureState) -> BvResult<PureState> {
        if state.num_qubits() != self.n + 1 {
            return Err(QuantumError::Dimension(format!(
                "bit oracle acts on {} qubits, state has {}",
                self.n + 1,
                state.num_qubits()
            ))
            .into());
        }
        let mut amps = state.amplitudes().to_vec();
        // the map only swaps pairs (x,0) <-> (x,1)
        for pair in amps
            .chunks_mut(2)
            .enumerate()
            .filter(|(x, _)| (x & self.hidden_index).count_ones() & 1 == 1)
        {
            pair.1.swap(0, 1);
        }
        Ok(PureState::from_amplitudes(self.n + 1, amps)?)
    }
}

pub fn build_bit_oracle(a: &BitString, limit: usize) -> BvResult<BitOracleOp> {
    check_dense(a.len() + 1, limit)?;
    Ok(BitOracleOp {
        hidden_index: a.to_index(),
        n: a.len(),
    })
}

/// Black box holding the hidden string. Counts every application.
#[derive(Debug)]
pub struct ParityOracle {
    hidden: BitString,
    phase: PhaseOracleOp,
    queries: u64,
}

impl ParityOracle {
    pub fn new(hidden: BitString) -> Self {
        let phase = build_phase_oracle(&hidden);
        Self {
            hidden,
            phase,
            queries: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.hidden.len()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// The secret, for reporting only. Solvers never read it.
    pub fn hidden(&self) -> &BitString {
        &self.hidden
    }

    /// Classical query `f_a(x)`.
    pub fn evaluate(&mut self, x: &BitString) -> BvResult<u8> {
        let v = f_a(&self.hidden, x)?;
        self.queries += 1;
        Ok(v)
    }

    /// One application of the phase oracle to an `n`-qubit state.
    pub fn apply_phase<S: QuantumState>(&mut self, state: S) -> BvResult<S> {
        let out = state.apply_factored(self.phase.operator())?;
        self.queries += 1;
        Ok(out)
    }

    /// One application of the bit oracle to an `(n+1)`-qubit state.
    pub fn apply_bit(&mut self, state: PureState, limit: usize) -> BvResult<PureState> {
        let out = build_bit_oracle(&self.hidden, limit)?.apply(state)?;
        self.queries += 1;
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Product,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Product => "product",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dense" => Ok(Backend::Dense),
            "product" => Ok(Backend::Product),
            _ => Err(format!("unknown backend {s:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub dense_limit: usize,
    /// Seed for sampling when the outcome is not certain.
    pub seed: u64,
    /// Record the per-step impurity on the dense backend.
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            dense_limit: DEFAULT_DENSE_LIMIT,
            seed: 0,
            record_trace: false,
        }
    }
}

/// Register contents just before measurement.
#[derive(Clone, Debug)]
pub enum FinalState {
    Dense(PureState),
    Product(ProductState),
}

#[derive(Clone, Debug)]
pub struct BvRun {
    pub answer: BitString,
    pub certain: bool,
    pub final_state: FinalState,
    /// Max single-qubit impurity at ψ₀, ψ₁, ψ₂, ψ₃ when recorded.
    pub impurities: Option<[f64; 4]>,
}

impl BvRun {
    pub fn max_impurity(&self) -> Option<f64> {
        self.impurities.map(|v| v.into_iter().fold(0.0, f64::max))
    }
}

/// `(|0⟩)ⁿ|1⟩ → H^{⊗(n+1)} → U_f → H^{⊗n}⊗I → measure the first n qubits`.
pub fn run_original_bv(oracle: &mut ParityOracle, opts: &RunOptions) -> BvResult<BvRun> {
    let n = oracle.n();
    check_dense(n + 1, opts.dense_limit)?;
    let psi0 = PureState::basis(n + 1, 1, opts.dense_limit)?;
    let h_all = FactoredOperator::uniform(QubitOperator::hadamard(), n + 1);
    let mut h_query = vec![QubitOperator::hadamard(); n];
    h_query.push(QubitOperator::identity());
    let h_query = FactoredOperator::new(h_query);

    let psi1 = psi0.clone().apply_factored(&h_all)?;
    let psi2 = oracle.apply_bit(psi1.clone(), opts.dense_limit)?;
    let psi3 = psi2.clone().apply_factored(&h_query)?;
    let m = psi3.measure_prefix(n, opts.seed)?;
    let impurities = opts
        .record_trace
        .then(|| [&psi0, &psi1, &psi2, &psi3].map(max_impurity));
    Ok(BvRun {
        answer: BitString(m.bits),
        certain: m.certain,
        final_state: FinalState::Dense(psi3),
        impurities,
    })
}

/// `(|0⟩)ⁿ → H^{⊗n} → U_a → H^{⊗n} → measure`, on either backend.
///
/// The product backend touches each qubit once per layer, so it is `O(n)`
/// and has no size limit.
pub fn run_refined_bv(
    oracle: &mut ParityOracle,
    backend: Backend,
    opts: &RunOptions,
) -> BvResult<BvRun> {
    let n = oracle.n();
    let h = FactoredOperator::uniform(QubitOperator::hadamard(), n);
    match backend {
        Backend::Dense => {
            let psi0 = PureState::zero(n, opts.dense_limit)?;
            let psi1 = psi0.clone().apply_factored(&h)?;
            let (psi3, impurities) = if opts.record_trace {
                let psi2 = oracle.apply_phase(psi1.clone())?;
                let psi3 = psi2.clone().apply_factored(&h)?;
                let imp = [&psi0, &psi1, &psi2, &psi3].map(max_impurity);
                (psi3, Some(imp))
            } else {
                drop(psi0);
                let psi2 = oracle.apply_phase(psi1)?;
                (psi2.apply_factored(&h)?, None)
            };
            let m = psi3.measure_all(opts.seed);
            Ok(BvRun {
                answer: BitString(m.bits),
                certain: m.certain,
                final_state: FinalState::Dense(psi3),
                impurities,
            })
        }
        Backend::Product => {
            let psi1 = ProductState::zero(n)?.apply_factored(&h)?;
            let psi2 = oracle.apply_phase(psi1)?;
            let psi3 = psi2.apply_factored(&h)?;
            let m = psi3.measure_all(opts.seed);
            Ok(BvRun {
                answer: BitString(m.bits),
                certain: m.certain,
                final_state: FinalState::Product(psi3),
                impurities: opts.record_trace.then_some([0.0; 4]),
            })
        }
    }
}

/// Probes `f_a` at each unit string `e_i`; bit `i` of `a` is `f_a(e_i)`.
pub fn classical_solve(oracle: &mut ParityOracle) -> BvResult<BitString> {
    let n = oracle.n();
    let bits = (0..n)
        .map(|i| oracle.evaluate(&BitString::unit(n, i)))
        .collect::<BvResult<Vec<u8>>>()?;
    Ok(BitString(bits))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparabilityReport {
    /// Max single-qubit impurity `1 − Tr(ρ_k²)` at ψ₀ … ψ₃.
    pub impurities: [f64; 4],
}

impl SeparabilityReport {
    pub fn max(&self) -> f64 {
        self.impurities.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs refined BV densely and records the impurity after every step.
pub fn separability_trace(a: &BitString, limit: usize) -> BvResult<SeparabilityReport> {
    let mut oracle = ParityOracle::new(a.clone());
    let opts = RunOptions {
        dense_limit: limit,
        record_trace: true,
        ..RunOptions::default()
    };
    let run = run_refined_bv(&mut oracle, Backend::Dense, &opts)?;
    Ok(SeparabilityReport {
        impurities: run.impurities.expect("trace requested"),
    })
}

/// Checks phase kickback: the bit oracle on `|x⟩ ⊗ (|0⟩−|1⟩)/√2` must equal
/// `(−1)^{f_a(x)} |x⟩ ⊗ (|0⟩−|1⟩)/√2` for every basis `x`, with the phase
/// taken from the phase oracle. Returns the largest amplitude deviation.
pub fn kickback_equivalence(a: &BitString, limit: usize) -> BvResult<f64> {
    let n = a.len();
    let bit = build_bit_oracle(a, limit)?;
    let phase = build_phase_oracle(a);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut worst: f64 = 0.0;
    for x in 0..1usize << n {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << (n + 1)];
        amps[x << 1] = s;
        amps[(x << 1) | 1] = -s;
        let out = bit.apply(PureState::from_amplitudes(n + 1, amps)?)?;

        let first = PureState::basis(n, x, limit)?.apply_factored(phase.operator())?;
        let ph = first.amplitude(x);
        for (i, amp) in out.amplitudes().iter().enumerate() {
            let expected = if i >> 1 == x {
                if i & 1 == 0 {
                    ph * s
                } else {
                    -ph * s
                }
            } else {
                C64::new(0.0, 0.0)
            };
            worst = worst.max((amp - expected).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(f_a(&bs("11"), &bs("10")).unwrap(), 1);
        for x in 0..8 {
            assert_eq!(f_a(&bs("000"), &BitString::from_index(x, 3)).unwrap(), 0);
        }
        assert_eq!(f_a(&bs("101"), &bs("111")).unwrap(), 0);
        assert_eq!(
            f_a(&bs("10"), &bs("101")).unwrap_err(),
            BvError::LengthMismatch(2, 3)
        );
    }

    #[test]
    fn bitstring_parse_and_display() {
        assert_eq!(bs("0110").to_string(), "0110");
        assert!("".parse::<BitString>().is_err());
        assert!("012".parse::<BitString>().is_err());
        assert_eq!(bs("10").to_index(), 2);
        assert_eq!(BitString::from_index(5, 3), bs("101"));
    }

    #[test]
    fn phase_oracle_factors() {
        let id = QubitOperator::identity();
        let z = QubitOperator::pauli_z();
        assert_eq!(
            build_phase_oracle(&bs("00")).operator().factors(),
            &[id, id]
        );
        assert_eq!(build_phase_oracle(&bs("01")).operator().factors(), &[id, z]);
        assert_eq!(build_phase_oracle(&bs("11")).operator().factors(), &[z, z]);
    }

    #[test]
    fn phase_oracle_basis_action() {
        let a = bs("110");
        let op = build_phase_oracle(&a);
        for x in 0..8 {
            let xs = BitString::from_index(x, 3);
            let out = PureState::basis(3, x, 24)
                .unwrap()
                .apply_factored(op.operator())
                .unwrap();
            let expected = op.phase_of(&xs).unwrap();
            assert_eq!(out.amplitude(x), C64::new(expected, 0.0));
        }
    }

    #[test]
    fn bit_oracle_examples() {
        let o = build_bit_oracle(&bs("1"), 24).unwrap();
        assert_eq!(o.map_basis(0b10), 0b11);
        let o = build_bit_oracle(&bs("10"), 24).unwrap();
        assert_eq!(o.map_basis(0b010), 0b010);
        let o = build_bit_oracle(&bs("1011"), 24).unwrap();
        for i in 0..32 {
            assert_eq!(o.map_basis(o.map_basis(i)), i);
        }
        assert!(build_bit_oracle(&BitString::zeros(24), 24).is_err());
    }

    #[test]
    fn original_examples() {
        let mut o = ParityOracle::new(bs("10"));
        let run = run_original_bv(&mut o, &RunOptions::default()).unwrap();
        assert_eq!(run.answer, bs("10"));
        assert!(run.certain);
        assert_eq!(o.queries(), 1);

        let mut o = ParityOracle::new(bs("00000"));
        assert_eq!(
            run_original_bv(&mut o, &RunOptions::default())
                .unwrap()
                .answer,
            bs("00000")
        );
    }

    #[test]
    fn refined_examples() {
        for (a, backend) in [
            ("11", Backend::Dense),
            ("00", Backend::Dense),
            ("11", Backend::Product),
        ] {
            let mut o = ParityOracle::new(bs(a));
            let run = run_refined_bv(&mut o, backend, &RunOptions::default()).unwrap();
            assert_eq!(run.answer, bs(a));
            assert!(run.certain);
            assert_eq!(o.queries(), 1);
        }
    }

    #[test]
    fn refined_dense_guard() {
        let mut o = ParityOracle::new(BitString::zeros(25));
        let err = run_refined_bv(&mut o, Backend::Dense, &RunOptions::default()).unwrap_err();
        assert_eq!(
            err,
            BvError::Quantum(QuantumError::DenseLimit { n: 25, limit: 24 })
        );
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn classical_examples() {
        let mut o = ParityOracle::new(bs("01"));
        assert_eq!(classical_solve(&mut o).unwrap(), bs("01"));
        assert_eq!(o.queries(), 2);
        let mut o = ParityOracle::new(bs("00000000"));
        assert_eq!(classical_solve(&mut o).unwrap(), bs("00000000"));
        assert_eq!(o.queries(), 8);
    }

    #[test]
    fn trace_examples() {
        for a in ["10", "1111"] {
            let r = separability_trace(&bs(a), 24).unwrap();
            assert!(r.max() <= 1e-10, "{a}: {:?}", r.impurities);
        }
    }

    #[test]
    fn kickback_examples() {
        assert_eq!(kickback_equivalence(&bs("00"), 24).unwrap(), 0.0);
        assert!(kickback_equivalence(&bs("01"), 24).unwrap() <= 1e-12);
        assert!(kickback_equivalence(&bs("111"), 24).unwrap() <= 1e-12);
    }
}
