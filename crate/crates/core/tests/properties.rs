use num_complex::Complex64;
use proptest::prelude::*;
use qclone::cloner::{
    analytic_reduced, clone_channel, predicted_f, reduced_single_qubit, shrink_fit,
};
use qclone::linalg::{
    partial_trace_matrix, tensor_product, validate_density, ComplexMatrix, Tolerances,
};
use qclone::states::{
    bloch_from_density, density_from_bloch, random_mixed_seeded, BlochVector, QubitDensity,
};

/// Random density `A A† / Tr(A A†)` on `n` dimensions.
fn density(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        let a = ComplexMatrix::new(
            n,
            n,
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap();
        let p = &a * &a.adjoint();
        let t = p.trace().re;
        p.scale(Complex64::new(1.0 / t, 0.0))
    })
}

fn qubit() -> impl Strategy<Value = QubitDensity> {
    (0.0f64..=1.0, -1.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, c, phi)| {
        let s = (1.0 - c * c).sqrt();
        let b = BlochVector::new(r * s * phi.cos(), r * s * phi.sin(), r * c).unwrap();
        density_from_bloch(&b).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_composes(m in density(12)) {
        // dims [2, 3, 2]: tracing 0 then 2 (now 1) equals keeping only 1
        let dims = [2, 3, 2];
        let (once, _) = partial_trace_matrix(&m, &dims, &[1]).unwrap();
        let (a, d) = partial_trace_matrix(&m, &dims, &[1, 2]).unwrap();
        let (a, _) = partial_trace_matrix(&a, &d, &[0]).unwrap();
        let (b, d) = partial_trace_matrix(&m, &dims, &[0, 1]).unwrap();
        let (b, _) = partial_trace_matrix(&b, &d, &[1]).unwrap();
        prop_assert!(once.max_abs_diff(&a) < 1e-12);
        prop_assert!(once.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity(m in density(8), keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..=3)) {
        let (r, _) = partial_trace_matrix(&m, &[2, 2, 2], &keep).unwrap();
        prop_assert!((r.trace() - m.trace()).norm() < 1e-12);
        prop_assert!(r.hermiticity_error() < 1e-12);
    }

    #[test]
    fn trace_out_second_factor(a in density(3), b in density(2), s in 0.1f64..3.0) {
        let b = b.scale(Complex64::new(s, 0.0));
        let ab = tensor_product(&a, &b).unwrap();
        let (r, _) = partial_trace_matrix(&ab, &[3, 2], &[0]).unwrap();
        prop_assert!(r.max_abs_diff(&a.scale(b.trace())) < 1e-12);
    }

    #[test]
    fn bloch_round_trip(rho in qubit()) {
        let back = density_from_bloch(&bloch_from_density(&rho)).unwrap();
        prop_assert!(back.to_matrix().max_abs_diff(&rho.to_matrix()) < 1e-14);
    }

    #[test]
    fn channel_outputs_validate(rho in qubit(), m in 2usize..=5) {
        let out = clone_channel(&rho, m).unwrap();
        prop_assert!(validate_density(out.matrix().clone(), out.dims(), &Tolerances::default()).is_ok());
    }

    #[test]
    fn marginal_purity_never_increases(rho in qubit(), m in 2usize..=8) {
        let r = analytic_reduced(&rho, m).unwrap();
        let purity = (&r * &r).trace().re;
        prop_assert!(purity <= rho.purity() + 1e-12);
        let strict = m > 2 && bloch_from_density(&rho).norm() > 1e-6;
        if strict {
            prop_assert!(purity < rho.purity());
        }
    }
}

#[test]
fn universality_on_random_states() {
    for m in 2..=8 {
        let want = predicted_f(m).unwrap();
        for seed in 0..100 {
            let rho = random_mixed_seeded(seed * 31 + m as u64, 1.0).unwrap();
            let r = reduced_single_qubit(&clone_channel(&rho, m).unwrap(), m - 1).unwrap();
            let fit = shrink_fit(&rho, r.matrix()).unwrap();
            assert!(fit.residual < 1e-10, "m={m} seed={seed}: {}", fit.residual);
            assert!((fit.f - want).abs() < 1e-9, "m={m} seed={seed}: {}", fit.f);
        }
    }
}

#[test]
fn oracle_equivalence_across_qubits() {
    for m in 2..=8 {
        for seed in 0..50 {
            let rho = random_mixed_seeded(10_000 + seed, 1.0).unwrap();
            let out = clone_channel(&rho, m).unwrap();
            let oracle = analytic_reduced(&rho, m).unwrap();
            for q in 0..m {
                let r = reduced_single_qubit(&out, q).unwrap();
                assert!(r.matrix().max_abs_diff(&oracle) < 1e-12, "m={m} q={q}");
            }
        }
    }
}

#[test]
fn purity_equality_cases() {
    let rho = density_from_bloch(&BlochVector::new(0.3, 0.1, -0.2).unwrap()).unwrap();
    let r = analytic_reduced(&rho, 2).unwrap();
    assert!(((&r * &r).trace().re - rho.purity()).abs() < 1e-12);
    let mixed = QubitDensity::maximally_mixed();
    let r = analytic_reduced(&mixed, 7).unwrap();
    assert!(((&r * &r).trace().re - 0.5).abs() < 1e-12);
}
