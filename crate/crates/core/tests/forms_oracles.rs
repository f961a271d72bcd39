//! Oracle-backed property suites for the exterior algebra layer: the star
//! involution sign, agreement of the primitive-form star formula with the
//! generic pairing-solve star, and the sl₂ commutation relations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use daflab_core::forms::reference::{lambda_by_gram_adjoint, PairingStarSolver};
use daflab_core::forms::{
    hodge_star, lefschetz_l, lefschetz_lambda, primitive_basis, primitive_decompose,
    primitive_star, weight_h, HermitianMetricPoint, MultiDegreeForm, PrimitiveProjector,
};

#[test]
fn star_involution_sign_all_bidegrees() {
    // *∘* = (−1)^{p+q} for every (p,q), random positive metrics
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for n in 3..=6u8 {
        for _ in 0..3 {
            let m = HermitianMetricPoint::random(n, &mut rng);
            for p in 0..=n {
                for q in 0..=n {
                    let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
                    let ss = hodge_star(&hodge_star(&a, &m).unwrap(), &m).unwrap();
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    let res = ss.distance(&a.scaled(Complex64::new(sign, 0.0)))
                        / (1.0 + a.norm_max());
                    assert!(res < 1e-10, "n={n} ({p},{q}) residual {res:.3e}");
                }
            }
        }
    }
}

#[test]
fn primitive_star_formula_vs_pairing_solve_200_seeds() {
    // the closed star formula for primitive forms against the generic
    // linear-solve star: 200 random primitive forms per (n,p,q)
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    for n in 3..=6u8 {
        for p in 0..=n {
            for q in 0..=n {
                if p + q == 0 || p + q > n {
                    continue;
                }
                let solver = PairingStarSolver::new(n, p, q).unwrap();
                // 200 random primitive forms: 40 random metrics x 5 forms
                for metric_idx in 0..40 {
                    let m = HermitianMetricPoint::random(n, &mut rng);
                    let projector = PrimitiveProjector::new(&m, p, q).unwrap();
                    for form_idx in 0..5 {
                        let raw = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
                        let (prim, _) = projector.split(&raw).unwrap();
                        assert!(
                            lefschetz_lambda(&prim, &m).norm_max()
                                < 1e-9 * (1.0 + prim.norm_max()),
                            "projection not primitive"
                        );
                        let by_formula = primitive_star(&prim, 0, &m).unwrap();
                        let by_solve = solver.star(&prim, &m).unwrap();
                        let res =
                            by_formula.distance(&by_solve) / (1.0 + by_solve.norm_max());
                        assert!(
                            res < 1e-10,
                            "n={n} ({p},{q}) metric {metric_idx} form {form_idx} residual {res:.3e}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn sl2_relations_on_random_forms() {
    // With H := [Λ,L] = (n − deg)·id the closed triple is
    // [Λ,L] = H, [H,L] = −2L, [H,Λ] = +2Λ (flipping the orientation of H
    // flips the latter two signs; no orientation gives +2L and −2Λ together
    // with [Λ,L] = H).
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    for n in 3..=6u8 {
        for _ in 0..10 {
            let m = HermitianMetricPoint::random(n, &mut rng);
            let p = rng.random_range(1..n);
            let q = rng.random_range(1..n);
            let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
            let scale = 1.0 + a.norm_max();

            let comm_ll = lefschetz_lambda(&lefschetz_l(&a, &m).unwrap(), &m)
                .sub(&lefschetz_l(&lefschetz_lambda(&a, &m), &m).unwrap())
                .unwrap();
            assert!(comm_ll.distance(&weight_h(&a)) / scale < 1e-10, "[Λ,L] n={n}");

            // [H,L] = −2L
            let la = lefschetz_l(&a, &m).unwrap();
            let hla = weight_h(&la);
            let lha = lefschetz_l(&weight_h(&a), &m).unwrap();
            let lhs = hla.sub(&lha).unwrap();
            assert!(
                lhs.distance(&la.scaled(Complex64::new(-2.0, 0.0))) / scale < 1e-10,
                "[H,L] n={n}"
            );

            // [H,Λ] = +2Λ
            let lam = lefschetz_lambda(&a, &m);
            let hlam = weight_h(&lam);
            let lamh = lefschetz_lambda(&weight_h(&a), &m);
            let lhs = hlam.sub(&lamh).unwrap();
            assert!(
                lhs.distance(&lam.scaled(Complex64::new(2.0, 0.0))) / scale < 1e-10,
                "[H,Λ] n={n}"
            );
        }
    }
}

#[test]
fn commutator_on_primitive_11_is_weight_times_identity() {
    // [Λ,L]P = (n − 2)P for a primitive (1,1)-form, both operator routes
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let n = 4u8;
    let m = HermitianMetricPoint::random(n, &mut rng);
    let basis = primitive_basis(n, 1, 1, &m).unwrap();
    let prim = &basis[rng.random_range(0..basis.len())];

    let fast = lefschetz_lambda(&lefschetz_l(prim, &m).unwrap(), &m);
    let slow = lambda_by_gram_adjoint(&lefschetz_l(prim, &m).unwrap(), &m).unwrap();
    let expect = prim.scaled(Complex64::new(2.0, 0.0)); // ΛP = 0, so [Λ,L]P = ΛLP
    assert!(fast.distance(&expect) < 1e-10);
    assert!(slow.distance(&expect) < 1e-9);
}

#[test]
fn wedge_graded_commutativity_randomized() {
    // a∧b − (−1)^{|a||b|} b∧a = 0 across degrees, seeded sweep
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let pa = rng.random_range(0..=n.min(3));
        let qa = rng.random_range(0..=n.min(3));
        let pb = rng.random_range(0..=(n - pa).min(3));
        let qb = rng.random_range(0..=(n - qa).min(3));
        let a = MultiDegreeForm::random(n, pa, qa, &mut rng).unwrap();
        let b = MultiDegreeForm::random(n, pb, qb, &mut rng).unwrap();
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if ((pa + qa) as usize * (pb + qb) as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let res = ab.distance(&ba.scaled(Complex64::new(sign, 0.0)));
        assert!(res < 1e-12 * (1.0 + ab.norm_max()), "n={n} ({pa},{qa})({pb},{qb})");
    }
}

#[test]
fn wedge_bilinearity_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    for _ in 0..50 {
        let n = 4u8;
        let a = MultiDegreeForm::random(n, 1, 1, &mut rng).unwrap();
        let b = MultiDegreeForm::random(n, 1, 1, &mut rng).unwrap();
        let c = MultiDegreeForm::random(n, 1, 0, &mut rng).unwrap();
        let s = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let lhs = a.add(&b.scaled(s)).unwrap().wedge(&c).unwrap();
        let rhs = a
            .wedge(&c)
            .unwrap()
            .add(&b.wedge(&c).unwrap().scaled(s))
            .unwrap();
        assert!(lhs.distance(&rhs) < 1e-12 * (1.0 + lhs.norm_max()));
    }
}

#[test]
fn lambda_ladder_under_repeated_contraction() {
    // ΛC through the decomposition at n ∈ {4,5,6}: the first-coefficient
    // pattern j(n−k−j+1) confirmed at dimensions where P⁴ survives
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    for n in 4..=6u8 {
        let m = HermitianMetricPoint::random(n, &mut rng);
        let a = MultiDegreeForm::random(n, 3, 3, &mut rng).unwrap();
        let d = primitive_decompose(&a, &m).unwrap();
        let lam = lefschetz_lambda(&a, &m);
        let mut expect = MultiDegreeForm::zero(n, 2, 2).unwrap();
        for (j, prim) in &d.components {
            if *j == 0 {
                continue;
            }
            let k = prim.degree() as f64;
            let coeff = *j as f64 * (n as f64 - k - *j as f64 + 1.0);
            if coeff == 0.0 {
                continue;
            }
            let mut term = prim.clone();
            for _ in 0..(*j - 1) {
                term = lefschetz_l(&term, &m).unwrap();
            }
            expect = expect.add(&term.scaled(Complex64::new(coeff, 0.0))).unwrap();
        }
        assert!(
            lam.distance(&expect) < 1e-9 * (1.0 + lam.norm_max()),
            "n={n}"
        );
    }
}
