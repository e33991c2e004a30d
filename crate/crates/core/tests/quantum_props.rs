use bvsim_core::quantum::{
    fidelity_up_to_global_phase, is_fully_separable, max_impurity, reduced_purity,
    FactoredOperator, ProductState, PureState, QuantumState, QubitOperator, QubitState,
};
use bvsim_core::C64;
use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;

const LIMIT: usize = 16;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn qubit() -> impl Strategy<Value = QubitState> {
    (c64(), c64())
        .prop_filter("non-degenerate", |(a, b)| {
            a.norm_sqr() + b.norm_sqr() > 1e-3
        })
        .prop_map(|(a, b)| {
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            QubitState::new(a / norm, b / norm).unwrap()
        })
}

/// `e^{iα} R_z(β) R_y(γ) R_z(δ)`: every 2×2 unitary.
fn unitary2() -> impl Strategy<Value = QubitOperator> {
    (0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64).prop_map(|(al, be, ga, de)| {
        let e = |x: f64| C64::from_polar(1.0, x);
        let (c, s) = ((ga / 2.0).cos(), (ga / 2.0).sin());
        let m = Matrix2::new(
            e(al - be / 2.0 - de / 2.0) * c,
            -e(al - be / 2.0 + de / 2.0) * s,
            e(al + be / 2.0 - de / 2.0) * s,
            e(al + be / 2.0 + de / 2.0) * c,
        );
        QubitOperator::new(m)
    })
}

fn random_pure(n: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(c64(), 1 << n)
        .prop_filter("non-zero", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(move |v| {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            PureState::from_amplitudes(n, v.into_iter().map(|z| z / norm).collect()).unwrap()
        })
}

/// Unitary from the QR decomposition of a random complex matrix.
fn random_unitary(d: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec(c64(), d * d)
        .prop_map(move |v| DMatrix::from_vec(d, d, v).qr().q())
        .prop_filter("full rank", move |q| {
            (q.adjoint() * q - DMatrix::identity(d, d)).norm() < 1e-9
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn factored_ops_preserve_norm(
        (state, ops) in (1usize..=8).prop_flat_map(|n| (random_pure(n), prop::collection::vec(unitary2(), n)))
    ) {
        let out = state.apply_factored(&FactoredOperator::new(ops)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_and_dense_apply_agree(
        (factors, ops) in (1usize..=8).prop_flat_map(|n| (
            prop::collection::vec(qubit(), n),
            prop::collection::vec(unitary2(), n),
        ))
    ) {
        let product = ProductState::new(factors).unwrap();
        let dense = product.expand(LIMIT).unwrap();
        let op = FactoredOperator::new(ops);
        let via_product = product.clone().apply_factored(&op).unwrap().expand(LIMIT).unwrap();
        let via_dense = dense.clone().apply_factored(&op).unwrap();
        for (x, y) in via_product.amplitudes().iter().zip(via_dense.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        // dense apply is the Kronecker matrix times the vector
        let mat = op.to_dense() * nalgebra::DVector::from_column_slice(dense.amplitudes());
        for (x, y) in mat.iter().zip(via_dense.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn purity_is_bounded(state in (1usize..=6).prop_flat_map(random_pure)) {
        for k in 0..state.amplitudes().len().trailing_zeros() as usize {
            let p = reduced_purity(&state, k).unwrap();
            prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p), "purity {p}");
        }
    }

    #[test]
    fn product_states_are_recovered(factors in (1usize..=6).prop_flat_map(|n| prop::collection::vec(qubit(), n))) {
        let product = ProductState::new(factors).unwrap();
        let dense = product.expand(LIMIT).unwrap();
        prop_assert!(max_impurity(&dense) < 1e-10);
        let sep = is_fully_separable(&dense, 1e-10);
        prop_assert!(sep.separable);
        let rebuilt = sep.factors.unwrap().expand(LIMIT).unwrap();
        let overlap = rebuilt.inner(&dense).unwrap().norm();
        prop_assert!((overlap - 1.0).abs() < 1e-9, "overlap {overlap}");
    }

    #[test]
    fn fidelity_ignores_global_phase(
        (u, phi) in ((1usize..=4).prop_flat_map(|k| random_unitary(1 << k)), 0.0..6.3f64)
    ) {
        let v = &u * C64::from_polar(1.0, phi);
        let f = fidelity_up_to_global_phase(&u, &v).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fidelity_separates_distinct_gates() {
    let x = FactoredOperator::new(vec![QubitOperator::pauli_x()]).to_dense();
    let z = FactoredOperator::new(vec![QubitOperator::pauli_z()]).to_dense();
    assert!(fidelity_up_to_global_phase(&x, &z).unwrap() < 1e-15);
}

#[test]
fn bell_state_is_flagged() {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let bell = PureState::from_amplitudes(2, vec![s, z, z, s]).unwrap();
    assert!((max_impurity(&bell) - 0.5).abs() <= 1e-12);
    assert!(!is_fully_separable(&bell, 1e-10).separable);
}
