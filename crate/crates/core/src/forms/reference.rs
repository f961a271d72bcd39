//! Brute-force reference implementations. These deliberately avoid the
//! shortcuts used by the primary operators (complementary-index star,
//! insertion-sign contraction) and go through generic dense linear algebra
//! instead, so tests can pit the two routes against each other.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::form::MultiDegreeForm;
use super::lefschetz::lefschetz_l;
use super::metric::HermitianMetricPoint;
use super::multi_index::binomial;
use super::FormsError;

fn space_dim(n: u8, p: u8, q: u8) -> usize {
    binomial(n as usize, p as usize) * binomial(n as usize, q as usize)
}

fn basis_form(n: u8, p: u8, q: u8, idx: usize) -> MultiDegreeForm {
    let mut e = MultiDegreeForm::zero(n, p, q).expect("valid");
    e.coeffs_mut()[idx] = Complex64::ONE;
    e
}

/// Dense Gram matrix Γ with ⟨a,b⟩ = Σ Γ[(KL),(IJ)] a_{IJ} conj(b_{KL}),
/// built entry by entry from the metric's inner product.
pub fn gram_matrix(n: u8, p: u8, q: u8, m: &HermitianMetricPoint) -> DMatrix<Complex64> {
    let dim = space_dim(n, p, q);
    let mut out = DMatrix::zeros(dim, dim);
    let pp = m.gram_compound(p as usize);
    let pq = m.gram_compound(q as usize);
    let ni = binomial(n as usize, p as usize);
    let nj = binomial(n as usize, q as usize);
    for i in 0..ni {
        for j in 0..nj {
            for k in 0..ni {
                for l in 0..nj {
                    // ⟨e_{I,J}, e_{K,L}⟩ = P_p[I][K]·conj(P_q[J][L])
                    out[(k * nj + l, i * nj + j)] = pp[(i, k)] * pq[(j, l)].conj();
                }
            }
        }
    }
    out
}

/// Brute-force Hodge star for one bidegree: the defining pairing
/// b ∧ x = ⟨b, conj(a)⟩ vol over all basis forms b of bidegree (q,p), solved
/// as a generic dense linear system. The pairing matrix is metric-free, so
/// its factorization is reused across seeds.
pub struct PairingStarSolver {
    n: u8,
    p: u8,
    q: u8,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl PairingStarSolver {
    pub fn new(n: u8, p: u8, q: u8) -> Result<Self, FormsError> {
        let probe_dim = space_dim(n, q, p);
        let target_dim = space_dim(n, n - q, n - p);
        let mut w = DMatrix::zeros(probe_dim, target_dim);
        for r in 0..probe_dim {
            let e = basis_form(n, q, p, r);
            for c in 0..target_dim {
                let f = basis_form(n, n - q, n - p, c);
                let top = e.wedge(&f)?;
                w[(r, c)] = top.coeffs()[0];
            }
        }
        Ok(PairingStarSolver {
            n,
            p,
            q,
            lu: w.lu(),
        })
    }

    pub fn star(
        &self,
        a: &MultiDegreeForm,
        m: &HermitianMetricPoint,
    ) -> Result<MultiDegreeForm, FormsError> {
        debug_assert_eq!((a.n(), a.p(), a.q()), (self.n, self.p, self.q));
        let (n, p, q) = (self.n, self.p, self.q);
        let a_bar = a.conj(); // (q,p)
        let vol_coeff = m.volume_coeff();
        // ⟨e_{K,L}, ā⟩ for all probe basis forms, with the Gram compounds
        // hoisted out of the row loop
        let gram_q = m.gram_compound(q as usize);
        let gram_p = m.gram_compound(p as usize);
        let ni = binomial(n as usize, q as usize);
        let nj = binomial(n as usize, p as usize);
        let mut rhs = DVector::zeros(ni * nj);
        for rk in 0..ni {
            for rl in 0..nj {
                let mut ip = Complex64::ZERO;
                for ri in 0..ni {
                    let w = gram_q[(rk, ri)];
                    if w == Complex64::ZERO {
                        continue;
                    }
                    for rj in 0..nj {
                        let v = a_bar.get(ri, rj);
                        if v == Complex64::ZERO {
                            continue;
                        }
                        ip += w * v.conj() * gram_p[(rl, rj)].conj();
                    }
                }
                rhs[rk * nj + rl] = ip * vol_coeff;
            }
        }
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or(FormsError::DecompositionFailed {
                reason: "wedge pairing matrix singular".into(),
            })?;
        let mut out = MultiDegreeForm::zero(n, n - q, n - p)?;
        out.coeffs_mut().copy_from_slice(sol.as_slice());
        Ok(out)
    }
}

/// One-shot wrapper over [`PairingStarSolver`].
pub fn star_by_pairing_solve(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    PairingStarSolver::new(a.n(), a.p(), a.q())?.star(a, m)
}

/// Λ via the adjoint characterization: solve ⟨x, b⟩ = ⟨a, ω ∧ b⟩ for all
/// basis forms b of bidegree (p−1, q−1) with dense Gram matrices.
pub fn lambda_by_gram_adjoint(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    let n = a.n();
    let (p, q) = (a.p(), a.q());
    if p == 0 || q == 0 {
        return MultiDegreeForm::zero(n, 0, 0);
    }
    let small_dim = space_dim(n, p - 1, q - 1);
    let big_dim = space_dim(n, p, q);
    // L-matrix: column c = coefficients of ω ∧ e_c
    let mut l_mat = DMatrix::zeros(big_dim, small_dim);
    for c in 0..small_dim {
        let img = lefschetz_l(&basis_form(n, p - 1, q - 1, c), m)?;
        for (r, v) in img.coeffs().iter().enumerate() {
            l_mat[(r, c)] = *v;
        }
    }
    let gram_big = gram_matrix(n, p, q, m);
    let gram_small = gram_matrix(n, p - 1, q - 1, m);
    let a_vec = DVector::from_column_slice(a.coeffs());
    let rhs = l_mat.adjoint() * (gram_big * a_vec);
    let sol = gram_small
        .lu()
        .solve(&rhs)
        .ok_or(FormsError::DecompositionFailed {
            reason: "Gram matrix singular (metric not positive?)".into(),
        })?;
    let mut out = MultiDegreeForm::zero(n, p - 1, q - 1)?;
    out.coeffs_mut().copy_from_slice(sol.as_slice());
    Ok(out)
}

/// Λ applied k times through the Gram-adjoint route.
pub fn lambda_pow_by_gram_adjoint(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
    k: u8,
) -> Result<MultiDegreeForm, FormsError> {
    let mut out = a.clone();
    for _ in 0..k {
        out = lambda_by_gram_adjoint(&out, m)?;
    }
    Ok(out)
}
