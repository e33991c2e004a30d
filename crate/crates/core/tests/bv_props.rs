use bvsim_core::bv::{
    build_bit_oracle, classical_solve, kickback_equivalence, run_original_bv, run_refined_bv,
    separability_trace, Backend, BitString, FinalState, ParityOracle, RunOptions,
};
use bvsim_core::quantum::PureState;
use proptest::prelude::*;

fn hidden(max_n: usize) -> impl Strategy<Value = BitString> {
    (1usize..=max_n)
        .prop_flat_map(|n| prop::collection::vec(0u8..=1, n))
        .prop_map(|bits| BitString::new(bits).unwrap())
}

fn dense_final(run: &bvsim_core::bv::BvRun) -> PureState {
    match &run.final_state {
        FinalState::Dense(s) => s.clone(),
        FinalState::Product(p) => p.expand(24).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refined_recovers_a_with_one_query(a in hidden(12), backend in prop_oneof![Just(Backend::Dense), Just(Backend::Product)]) {
        let mut oracle = ParityOracle::new(a.clone());
        let run = run_refined_bv(&mut oracle, backend, &RunOptions::default()).unwrap();
        prop_assert_eq!(&run.answer, &a);
        prop_assert!(run.certain);
        prop_assert_eq!(oracle.queries(), 1);
    }

    #[test]
    fn original_and_refined_agree(a in hidden(8)) {
        let mut o1 = ParityOracle::new(a.clone());
        let mut o2 = ParityOracle::new(a.clone());
        let orig = run_original_bv(&mut o1, &RunOptions::default()).unwrap();
        let refined = run_refined_bv(&mut o2, Backend::Dense, &RunOptions::default()).unwrap();
        prop_assert_eq!(&orig.answer, &refined.answer);
        prop_assert_eq!(o1.queries(), 1);
    }

    #[test]
    fn final_amplitude_is_delta(a in hidden(8)) {
        let mut oracle = ParityOracle::new(a.clone());
        let run = run_refined_bv(&mut oracle, Backend::Dense, &RunOptions::default()).unwrap();
        let psi = dense_final(&run);
        for (y, amp) in psi.amplitudes().iter().enumerate() {
            let want = if y == a.to_index() { 1.0 } else { 0.0 };
            prop_assert!((amp.re - want).abs() < 1e-12 && amp.im.abs() < 1e-12);
        }
    }

    #[test]
    fn backends_agree(a in hidden(10)) {
        let opts = RunOptions::default();
        let dense = run_refined_bv(&mut ParityOracle::new(a.clone()), Backend::Dense, &opts).unwrap();
        let product = run_refined_bv(&mut ParityOracle::new(a.clone()), Backend::Product, &opts).unwrap();
        let (d, p) = (dense_final(&dense), dense_final(&product));
        let diff = d.amplitudes().iter().zip(p.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12, "{diff}");
    }

    #[test]
    fn no_step_entangles(a in hidden(8)) {
        prop_assert!(separability_trace(&a, 24).unwrap().max() <= 1e-10);
    }

    #[test]
    fn classical_uses_n_queries(a in hidden(16)) {
        let mut oracle = ParityOracle::new(a.clone());
        prop_assert_eq!(classical_solve(&mut oracle).unwrap(), a.clone());
        prop_assert_eq!(oracle.queries(), a.len() as u64);
    }

    #[test]
    fn bit_oracle_is_an_involution(a in hidden(6), seed in 0usize..1 << 7) {
        let oracle = build_bit_oracle(&a, 24).unwrap();
        let dim = 1usize << (a.len() + 1);
        let i = seed % dim;
        prop_assert_eq!(oracle.map_basis(oracle.map_basis(i)), i);
        let state = PureState::basis(a.len() + 1, i, 24).unwrap();
        let twice = oracle.apply(oracle.apply(state.clone()).unwrap()).unwrap();
        prop_assert_eq!(twice.amplitudes(), state.amplitudes());
    }

    #[test]
    fn kickback_matches_phase_oracle(a in hidden(6)) {
        prop_assert!(kickback_equivalence(&a, 24).unwrap() <= 1e-12);
    }
}

#[test]
fn product_backend_scales_past_dense_limit() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let a = BitString::random(10_000, &mut rng);
    let mut oracle = ParityOracle::new(a.clone());
    let run = run_refined_bv(&mut oracle, Backend::Product, &RunOptions::default()).unwrap();
    assert_eq!(run.answer, a);
    assert!(run.certain);
    assert!(run_refined_bv(
        &mut ParityOracle::new(a),
        Backend::Dense,
        &RunOptions::default()
    )
    .is_err());
}

#[test]
fn refined_final_state_is_basis_a() {
    // equal as a state, not only in distribution
    let a: BitString = "1011".parse().unwrap();
    let mut oracle = ParityOracle::new(a.clone());
    let run = run_refined_bv(&mut oracle, Backend::Dense, &RunOptions::default()).unwrap();
    let target = PureState::basis(4, a.to_index(), 24).unwrap();
    assert!((dense_final(&run).inner(&target).unwrap().norm() - 1.0).abs() < 1e-12);
}
