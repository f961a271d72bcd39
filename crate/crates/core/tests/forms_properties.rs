//! Property tests over randomized bidegrees, metrics and coefficients.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use daflab_core::forms::{
    hodge_star, lefschetz_l, lefschetz_lambda, trace_11, HermitianMetricPoint, MultiDegreeForm,
};

fn arb_dims() -> impl Strategy<Value = (u8, u8, u8)> {
    (2u8..=6).prop_flat_map(|n| (Just(n), 0..=n, 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_graded_commutativity((n, pa, qa) in arb_dims(), pb in 0u8..=3, qb in 0u8..=3, seed in any::<u64>()) {
        prop_assume!(pa + pb <= n && qa + qb <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = MultiDegreeForm::random(n, pa, qa, &mut rng).unwrap();
        let b = MultiDegreeForm::random(n, pb, qb, &mut rng).unwrap();
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if ((pa + qa) as u32 * (pb + qb) as u32) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ab.distance(&ba.scaled(Complex64::new(sign, 0.0))) < 1e-12 * (1.0 + ab.norm_max()));
    }

    #[test]
    fn conjugation_is_an_involution((n, p, q) in arb_dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
        prop_assert!(a.conj().conj().distance(&a) < 1e-14 * (1.0 + a.norm_max()));
    }

    #[test]
    fn realified_forms_satisfy_conjugation_symmetry(n in 2u8..=6, p in 0u8..=3, seed in any::<u64>()) {
        prop_assume!(p <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = MultiDegreeForm::random_real(n, p, &mut rng).unwrap();
        prop_assert!(a.is_real(1e-13));
    }

    #[test]
    fn star_preserves_the_gram_norm((n, p, q) in arb_dims(), seed in any::<u64>()) {
        prop_assume!(n >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = HermitianMetricPoint::random(n, &mut rng);
        let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
        // star is an isometry of the Gram inner product
        let s = hodge_star(&a, &m).unwrap();
        let na = m.norm_sq(&a);
        let ns = m.norm_sq(&s);
        prop_assert!((na - ns).abs() < 1e-9 * (1.0 + na));
    }

    #[test]
    fn trace_is_linear_and_matches_lambda(n in 2u8..=6, seed in any::<u64>(), c in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = HermitianMetricPoint::random(n, &mut rng);
        let a = MultiDegreeForm::random_real(n, 1, &mut rng).unwrap();
        let b = MultiDegreeForm::random_real(n, 1, &mut rng).unwrap();
        let combo = a.add(&b.scaled(Complex64::new(c, 0.0))).unwrap();
        let lhs = trace_11(&combo, &m).unwrap();
        let rhs = trace_11(&a, &m).unwrap() + c * trace_11(&b, &m).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        // Λ on a (1,1)-form is its trace
        let lam = lefschetz_lambda(&a, &m);
        prop_assert!((lam.coeffs()[0].re - trace_11(&a, &m).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn lefschetz_raises_degree_and_lambda_lowers_it(n in 3u8..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = HermitianMetricPoint::random(n, &mut rng);
        let a = MultiDegreeForm::random(n, 1, 1, &mut rng).unwrap();
        let up = lefschetz_l(&a, &m).unwrap();
        prop_assert_eq!((up.p(), up.q()), (2, 2));
        let down = lefschetz_lambda(&up, &m);
        prop_assert_eq!((down.p(), down.q()), (1, 1));
    }
}
