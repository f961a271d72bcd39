//! The Lefschetz sl₂ triple {L, Λ, H}: wedging with ω, its metric adjoint,
//! and the counting operator H = (n − p − q)·id.

use num_complex::Complex64;

use super::form::MultiDegreeForm;
use super::metric::HermitianMetricPoint;
use super::multi_index::{index_sets, insert_sign, rank};
use super::FormsError;

/// L(a) = ω ∧ a.
pub fn lefschetz_l(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    m.omega().wedge(a)
}

/// Λ(a), the contraction with ω (metric adjoint of L):
///
///   (Λa)_{I,J} = −i (−1)^{p−1} Σ_{j,k} g^{jk̄} ε_I(j) ε_J(k) a_{I∪j, J∪k},
///
/// where ε is the insertion sign. Satisfies ⟨Λa, b⟩ = ⟨a, L b⟩ and the sl₂
/// relation [Λ, L] = (n − p − q)·id.
pub fn lefschetz_lambda(a: &MultiDegreeForm, m: &HermitianMetricPoint) -> MultiDegreeForm {
    let n = a.n() as usize;
    let (p, q) = (a.p(), a.q());
    if p == 0 || q == 0 {
        // Nothing to contract: Λ annihilates forms lacking a dz or dz̄ factor.
        return MultiDegreeForm::zero(a.n(), 0, 0).expect("valid degrees");
    }
    let mut out = MultiDegreeForm::zero(a.n(), p - 1, q - 1).expect("valid degrees");
    let prefactor = if (p as usize - 1).is_multiple_of(2) {
        -Complex64::I
    } else {
        Complex64::I
    };
    let i_sets = index_sets(n, p as usize - 1);
    let j_sets = index_sets(n, q as usize - 1);
    for (ri, i_set) in i_sets.iter().enumerate() {
        for (rj, j_set) in j_sets.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for j in 0..n as u8 {
                let Some((i_big, si)) = insert_sign(i_set, j) else {
                    continue;
                };
                let ri_big = rank(n, &i_big);
                for k in 0..n as u8 {
                    let Some((j_big, sj)) = insert_sign(j_set, k) else {
                        continue;
                    };
                    let v = a.get(ri_big, rank(n, &j_big));
                    if v == Complex64::ZERO {
                        continue;
                    }
                    acc += m.g_upper(j as usize, k as usize) * v * (si * sj);
                }
            }
            out.set(ri, rj, prefactor * acc);
        }
    }
    out
}

/// Λ applied k times.
pub fn lambda_pow(a: &MultiDegreeForm, m: &HermitianMetricPoint, k: u8) -> MultiDegreeForm {
    let mut out = a.clone();
    for _ in 0..k {
        out = lefschetz_lambda(&out, m);
    }
    out
}

/// H(a) = (n − p − q)·a, the sl₂ weight operator.
pub fn weight_h(a: &MultiDegreeForm) -> MultiDegreeForm {
    let w = a.n() as f64 - a.degree() as f64;
    a.scaled(Complex64::new(w, 0.0))
}

/// Scalar value of a (0,0)-form.
pub fn scalar_value(a: &MultiDegreeForm) -> Complex64 {
    debug_assert_eq!(a.degree(), 0);
    a.coeffs()[0]
}

/// Trace of a real (1,1)-form α = i α_{k̄j} dz^j ∧ dz̄^k:
/// tr α = g^{jk̄} α_{k̄j}, which also satisfies n α∧ω^{n−1} = (tr α) ω^n and
/// equals Λα.
pub fn trace_11(a: &MultiDegreeForm, m: &HermitianMetricPoint) -> Result<f64, FormsError> {
    if a.p() != 1 || a.q() != 1 {
        return Err(FormsError::ExpectedBidegree {
            expected: (1, 1),
            got: (a.p(), a.q()),
        });
    }
    if !a.is_real(1e-8 * (1.0 + a.norm_max())) {
        return Err(FormsError::NotReal);
    }
    let n = a.n() as usize;
    let mut tr = Complex64::ZERO;
    for j in 0..n {
        for k in 0..n {
            // α_{k̄j} = −i · coeff[(j),(k)]
            tr += m.g_upper(j, k) * (-Complex64::I) * a.get(j, k);
        }
    }
    Ok(tr.re)
}

/// ℂ-linear trace of any (1,1)-form (no realness requirement); used when the
/// trace identity is applied to complex solves.
pub fn trace_11_complex(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<Complex64, FormsError> {
    if a.p() != 1 || a.q() != 1 {
        return Err(FormsError::ExpectedBidegree {
            expected: (1, 1),
            got: (a.p(), a.q()),
        });
    }
    let n = a.n() as usize;
    let mut tr = Complex64::ZERO;
    for j in 0..n {
        for k in 0..n {
            tr += m.g_upper(j, k) * (-Complex64::I) * a.get(j, k);
        }
    }
    Ok(tr)
}
