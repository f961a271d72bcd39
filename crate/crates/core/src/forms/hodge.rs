//! Hodge star on (p,q)-forms, defined by the conjugate-linear pairing
//!
//!   b ∧ *(a) = ⟨b, conj(a)⟩ vol      for all b of bidegree (q,p),
//!
//! with vol = ω^n/n!. Equivalently a ∧ *(conj(b)) = ⟨a,b⟩ vol. The star maps
//! (p,q) to (n−q, n−p) and is ℂ-linear.
//!
//! In the increasing-index bases the wedge pairing against the top form is
//! diagonal (only complementary indices survive), so the defining relation
//! yields a direct formula; the linear-solve route lives in
//! [`super::reference`] and is used as an independent oracle.

use num_complex::Complex64;

use super::form::MultiDegreeForm;
use super::lefschetz::lefschetz_l;
use super::metric::HermitianMetricPoint;
use super::multi_index::{complement, index_sets, merge_sign, rank};
use super::FormsError;

/// Hodge star of a (p,q)-form.
pub fn hodge_star(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    if a.n() != m.n() {
        return Err(FormsError::ShapeMismatch {
            left: (a.n(), a.p(), a.q()),
            right: (m.n(), 0, 0),
        });
    }
    let n = a.n() as usize;
    let (p, q) = (a.p() as usize, a.q() as usize);
    let vol_coeff = m.volume_coeff();
    let a_bar = a.conj(); // (q,p)
    let mut out = MultiDegreeForm::zero(a.n(), (n - q) as u8, (n - p) as u8)?;

    let k_sets = index_sets(n, q); // dz-part of the probing basis (q,p)
    let l_sets = index_sets(n, p); // dz̄-part
    let p_q = m.gram_compound(q);
    let p_p = m.gram_compound(p);
    let ni_bar = a_bar.num_i();
    let nj_bar = a_bar.num_j();
    // sign from moving dz^{K^c} (n−q factors) past dz̄^L (p factors)
    let move_sign = if (p * (n - q)).is_multiple_of(2) { 1.0 } else { -1.0 };

    for (rk, k_set) in k_sets.iter().enumerate() {
        let kc = complement(n, k_set);
        let (_, sk) = merge_sign(k_set, &kc).expect("disjoint by construction");
        let out_ri = rank(n, &kc);
        for (rl, l_set) in l_sets.iter().enumerate() {
            let lc = complement(n, l_set);
            let (_, sl) = merge_sign(l_set, &lc).expect("disjoint by construction");
            let out_rj = rank(n, &lc);
            // ⟨e_{K,L}, conj(a)⟩
            let mut ip = Complex64::ZERO;
            for ri in 0..ni_bar {
                let w = p_q[(rk, ri)];
                if w == Complex64::ZERO {
                    continue;
                }
                for rj in 0..nj_bar {
                    let v = a_bar.get(ri, rj);
                    if v == Complex64::ZERO {
                        continue;
                    }
                    ip += w * v.conj() * p_p[(rl, rj)].conj();
                }
            }
            out.set(out_ri, out_rj, vol_coeff * ip / (move_sign * sk * sl));
        }
    }
    Ok(out)
}

/// Convenience: *(a ∧ ω^k).
pub fn star_of_wedge_power(
    a: &MultiDegreeForm,
    k: u8,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    let mut w = a.clone();
    for _ in 0..k {
        w = lefschetz_l(&w, m)?;
    }
    hodge_star(&w, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn star_of_one_is_volume_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5u8 {
            let m = HermitianMetricPoint::random(n, &mut rng);
            let s = hodge_star(&MultiDegreeForm::one(n), &m).unwrap();
            assert!(s.distance(&m.volume_form()) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn star_of_omega_power_identity() {
        // *(ω^{n−1}/(n−1)!) = ω, identity metric, n = 3..6
        for n in 3..=6u8 {
            let m = HermitianMetricPoint::identity(n);
            let mut fact = 1.0;
            for i in 2..n as u64 {
                fact *= i as f64;
            }
            let wn1 = m
                .omega()
                .wedge_pow(n - 1)
                .unwrap()
                .scaled(Complex64::new(1.0 / fact, 0.0));
            let s = hodge_star(&wn1, &m).unwrap();
            assert!(s.distance(&m.omega()) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn star_defining_pairing_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 3..=4u8 {
            let m = HermitianMetricPoint::random(n, &mut rng);
            for (p, q) in [(1u8, 1u8), (2, 1), (2, 2)] {
                let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
                let b = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
                // a ∧ *(conj b) = ⟨a,b⟩ vol
                let lhs = a.wedge(&hodge_star(&b.conj(), &m).unwrap()).unwrap();
                let rhs = m
                    .volume_form()
                    .scaled(m.inner_product(&a, &b).unwrap());
                assert!(lhs.distance(&rhs) < 1e-9, "n={n} ({p},{q})");
            }
        }
    }

    #[test]
    fn star_star_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 3..=5u8 {
            let m = HermitianMetricPoint::random(n, &mut rng);
            for p in 0..=n {
                for q in 0..=n {
                    let a = MultiDegreeForm::random(n, p, q, &mut rng).unwrap();
                    let ss = hodge_star(&hodge_star(&a, &m).unwrap(), &m).unwrap();
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    let expect = a.scaled(Complex64::new(sign, 0.0));
                    assert!(
                        ss.distance(&expect) < 1e-9 * (1.0 + a.norm_max()),
                        "n={n} ({p},{q})"
                    );
                }
            }
        }
    }
}
