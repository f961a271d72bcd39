//! Primitive (Lefschetz) decomposition a = Σ_j ω^j ∧ P_j with Λ P_j = 0, and
//! the star formula for primitive forms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::form::MultiDegreeForm;
use super::lefschetz::{lefschetz_l, lefschetz_lambda};
use super::metric::HermitianMetricPoint;
use super::multi_index::binomial;
use super::FormsError;

/// Result of a primitive decomposition: `components[(j, P_j)]` with
/// reassembly a = Σ_j ω^j ∧ P_j.
#[derive(Clone, Debug)]
pub struct Sl2Decomposition {
    pub n: u8,
    pub p: u8,
    pub q: u8,
    pub components: Vec<(u8, MultiDegreeForm)>,
}

impl Sl2Decomposition {
    /// Reassemble Σ_j ω^j ∧ P_j.
    pub fn reassemble(&self, m: &HermitianMetricPoint) -> Result<MultiDegreeForm, FormsError> {
        let mut out = MultiDegreeForm::zero(self.n, self.p, self.q)?;
        for (j, prim) in &self.components {
            let mut term = prim.clone();
            for _ in 0..*j {
                term = lefschetz_l(&term, m)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Component with Lefschetz exponent j, if present.
    pub fn component(&self, j: u8) -> Option<&MultiDegreeForm> {
        self.components
            .iter()
            .find(|(e, _)| *e == j)
            .map(|(_, f)| f)
    }
}

/// Matrix of Λ from bidegree (p,q) to (p−1,q−1) in the increasing-index bases.
fn lambda_matrix(n: u8, p: u8, q: u8, m: &HermitianMetricPoint) -> DMatrix<Complex64> {
    let rows = binomial(n as usize, p as usize - 1) * binomial(n as usize, q as usize - 1);
    let cols = binomial(n as usize, p as usize) * binomial(n as usize, q as usize);
    let mut out = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        let mut e = MultiDegreeForm::zero(n, p, q).expect("valid");
        e.coeffs_mut()[c] = Complex64::ONE;
        let img = lefschetz_lambda(&e, m);
        for (r, v) in img.coeffs().iter().enumerate() {
            out[(r, c)] = *v;
        }
    }
    out
}

/// Orthonormal basis of the nullspace of `mat`, via the Hermitian
/// eigendecomposition of matᴴ·mat.
fn nullspace(mat: &DMatrix<Complex64>) -> Vec<DVector<Complex64>> {
    let mtm = mat.adjoint() * mat;
    let dim = mtm.nrows();
    let eig = SymmetricEigen::new(mtm);
    let max_ev = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = 1e-10 * max_ev;
    let mut out = Vec::new();
    for i in 0..dim {
        if eig.eigenvalues[i].abs() < tol {
            out.push(eig.eigenvectors.column(i).clone_owned());
        }
    }
    out
}

/// Basis of the primitive forms of bidegree (p,q) (kernel of Λ). All forms
/// are primitive when p = 0 or q = 0.
pub fn primitive_basis(
    n: u8,
    p: u8,
    q: u8,
    m: &HermitianMetricPoint,
) -> Result<Vec<MultiDegreeForm>, FormsError> {
    if p + q > n {
        // primitive forms of total degree above n vanish
        return Ok(Vec::new());
    }
    let dim = binomial(n as usize, p as usize) * binomial(n as usize, q as usize);
    if p == 0 || q == 0 {
        return (0..dim)
            .map(|c| {
                let mut e = MultiDegreeForm::zero(n, p, q)?;
                e.coeffs_mut()[c] = Complex64::ONE;
                Ok(e)
            })
            .collect();
    }
    let lam = lambda_matrix(n, p, q, m);
    let null = nullspace(&lam);
    let expected = dim
        - binomial(n as usize, p as usize - 1) * binomial(n as usize, q as usize - 1);
    if null.len() != expected {
        return Err(FormsError::DecompositionFailed {
            reason: format!(
                "primitive space of bidegree ({p},{q}) has dimension {} (expected {expected})",
                null.len()
            ),
        });
    }
    Ok(null
        .into_iter()
        .map(|v| {
            let mut f = MultiDegreeForm::zero(n, p, q).expect("valid");
            f.coeffs_mut().copy_from_slice(v.as_slice());
            f
        })
        .collect())
}

/// Primitive decomposition of an arbitrary (p,q)-form.
///
/// Below the middle degree the ladder is peeled level by level: the current
/// remainder splits as P_j + ω ∧ (rest) through one (ΛL)-solve on the lower
/// bidegree. Above the middle the Hodge star maps to degree 2n−k < n, the
/// star'd form is peeled, and the components are carried back through the
/// closed star formula for primitive forms.
pub fn primitive_decompose(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<Sl2Decomposition, FormsError> {
    let n = a.n();
    let (p, q) = (a.p(), a.q());
    let k_total = (p + q) as i16;
    let j_max = p.min(q);

    if k_total > n as i16 {
        return decompose_above_middle(a, m);
    }

    let mut components = Vec::new();
    let mut rem = a.clone();
    for j in 0..=j_max {
        if rem.p() == 0 || rem.q() == 0 {
            // nothing left to contract: the remainder is primitive
            components.push((j, rem));
            break;
        }
        let projector = PrimitiveProjector::new(m, rem.p(), rem.q())?;
        let (prim, rest) = projector.split(&rem)?;
        components.push((j, prim));
        rem = rest;
    }
    let decomp = Sl2Decomposition {
        n,
        p,
        q,
        components,
    };
    let residual = decomp.reassemble(m)?.distance(a);
    if residual > 1e-9 * (1.0 + a.norm_max()) {
        return Err(FormsError::DecompositionFailed {
            reason: format!("peeling reassembly residual {residual:.3e} above tolerance"),
        });
    }
    Ok(decomp)
}

/// a = (−1)^k ** a: decompose *a below the middle, then pull each component
/// back with *(ω^j ∧ Q) = (−1)^{k_Q(k_Q+1)/2} i^{a−b} j!/(n−k_Q−j)! ω^{n−k_Q−j} ∧ Q.
fn decompose_above_middle(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<Sl2Decomposition, FormsError> {
    use super::hodge::hodge_star;
    let n = a.n();
    let (p, q) = (a.p(), a.q());
    let k_total = (p + q) as i16;
    let j_max = p.min(q);
    let star = hodge_star(a, m)?;
    let dual_decomp = primitive_decompose(&star, m)?;
    let parity = if k_total % 2 == 0 { 1.0 } else { -1.0 };

    let mut components: Vec<(u8, MultiDegreeForm)> = Vec::new();
    for j in 0..=j_max {
        components.push((j, MultiDegreeForm::zero(n, p - j, q - j)?));
    }
    for (j, prim) in &dual_decomp.components {
        if prim.norm_max() == 0.0 {
            continue;
        }
        let (pa, pb) = (prim.p() as i16, prim.q() as i16);
        let k_q = pa + pb;
        let rem = n as i16 - k_q - *j as i16;
        if rem < 0 {
            continue;
        }
        // *(ω^j ∧ prim) = sign · i^{pa−pb} · j!/rem! · ω^{rem} ∧ prim
        let sign = if (k_q * (k_q + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let ipow = Complex64::I.powi((pa - pb) as i32);
        let mut factor = 1.0f64;
        for i in 2..=*j as u64 {
            factor *= i as f64;
        }
        for i in 2..=rem as u64 {
            factor /= i as f64;
        }
        let exponent = rem as u8;
        let scaled = prim.scaled(ipow * Complex64::new(parity * sign * factor, 0.0));
        let slot = components
            .iter_mut()
            .find(|(e, _)| *e == exponent)
            .ok_or(FormsError::DecompositionFailed {
                reason: format!("exponent {exponent} outside the ladder of ({p},{q})"),
            })?;
        slot.1 = slot.1.add(&scaled)?;
    }
    let decomp = Sl2Decomposition {
        n,
        p,
        q,
        components,
    };
    let residual = decomp.reassemble(m)?.distance(a);
    if residual > 1e-9 * (1.0 + a.norm_max()) {
        return Err(FormsError::DecompositionFailed {
            reason: format!("dualized reassembly residual {residual:.3e} above tolerance"),
        });
    }
    Ok(decomp)
}

/// General-position route: least squares over ω^j ∧ (explicit primitive
/// bases). Retained as the independent oracle the peeling route is checked
/// against.
#[cfg(test)]
fn decompose_by_basis(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<Sl2Decomposition, FormsError> {
    let n = a.n();
    let (p, q) = (a.p(), a.q());
    let j_max = p.min(q);
    let dim = a.coeffs().len();

    // columns: ω^j ∧ (primitive basis of (p−j, q−j)). Two degenerate cases
    // contribute zero components without columns, keeping the ladder
    // P^{k}, P^{k−2}, … complete: total degree above n (trivial primitive
    // space) and exponents with k − j > n, where L^j annihilates the whole
    // primitive space (the sl₂ string P, LP, …, L^{n−deg P}P is exhausted).
    let k_total = (p + q) as i16;
    let mut columns: Vec<DVector<Complex64>> = Vec::new();
    let mut labels: Vec<(u8, usize)> = Vec::new(); // (j, offset into that basis)
    let mut bases: Vec<(u8, Vec<MultiDegreeForm>)> = Vec::new();
    for j in 0..=j_max {
        let basis = if k_total - j as i16 > n as i16 {
            Vec::new()
        } else {
            primitive_basis(n, p - j, q - j, m)?
        };
        for (idx, b) in basis.iter().enumerate() {
            let mut term = b.clone();
            for _ in 0..j {
                term = lefschetz_l(&term, m)?;
            }
            columns.push(DVector::from_column_slice(term.coeffs()));
            labels.push((j, idx));
        }
        bases.push((j, basis));
    }
    if columns.is_empty() {
        return Err(FormsError::DecompositionFailed {
            reason: format!("no admissible Lefschetz exponents for bidegree ({p},{q}), n={n}"),
        });
    }
    let mut mat = DMatrix::zeros(dim, columns.len());
    for (c, col) in columns.iter().enumerate() {
        mat.set_column(c, col);
    }
    let rhs = DVector::from_column_slice(a.coeffs());
    // normal equations; the column set is linearly independent for positive g
    let mtm = mat.adjoint() * &mat;
    let mtb = mat.adjoint() * &rhs;
    let sol = mtm.lu().solve(&mtb).ok_or(FormsError::DecompositionFailed {
        reason: "normal equations singular (cannot occur for positive-definite g)".into(),
    })?;
    let residual = (&mat * &sol - &rhs).norm();
    if residual > 1e-9 * (1.0 + rhs.norm()) {
        return Err(FormsError::DecompositionFailed {
            reason: format!("reassembly residual {residual:.3e} above tolerance"),
        });
    }

    let mut components = Vec::new();
    let mut offset = 0usize;
    for (j, basis) in bases {
        let mut prim = MultiDegreeForm::zero(n, p - j, q - j)?;
        for b in &basis {
            let w = sol[offset];
            offset += 1;
            if w != Complex64::ZERO {
                prim = prim.add(&b.scaled(w))?;
            }
        }
        components.push((j, prim));
    }
    debug_assert_eq!(offset, labels.len());
    Ok(Sl2Decomposition {
        n,
        p,
        q,
        components,
    })
}

/// Splitter a = P + ω ∧ b with Λ P = 0 for forms of total degree p+q ≤ n+1,
/// solving (ΛL) b = Λ a on the lower bidegree; ΛL is invertible there since
/// L is injective below the middle degree. The factorization is tied to one
/// metric and reusable across forms.
pub struct PrimitiveProjector<'m> {
    m: &'m HermitianMetricPoint,
    p: u8,
    q: u8,
    lu: Option<nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl<'m> PrimitiveProjector<'m> {
    pub fn new(m: &'m HermitianMetricPoint, p: u8, q: u8) -> Result<Self, FormsError> {
        let n = m.n();
        if p == 0 || q == 0 {
            return Ok(PrimitiveProjector { m, p, q, lu: None });
        }
        if (p + q) as i16 > n as i16 + 1 {
            return Err(FormsError::DegreeOverflow {
                n,
                p: p as i16,
                q: q as i16,
            });
        }
        let small = binomial(n as usize, p as usize - 1) * binomial(n as usize, q as usize - 1);
        let mut t = DMatrix::zeros(small, small);
        for c in 0..small {
            let mut e = MultiDegreeForm::zero(n, p - 1, q - 1)?;
            e.coeffs_mut()[c] = Complex64::ONE;
            let img = lefschetz_lambda(&lefschetz_l(&e, m)?, m);
            for (r, v) in img.coeffs().iter().enumerate() {
                t[(r, c)] = *v;
            }
        }
        Ok(PrimitiveProjector {
            m,
            p,
            q,
            lu: Some(t.lu()),
        })
    }

    pub fn split(
        &self,
        a: &MultiDegreeForm,
    ) -> Result<(MultiDegreeForm, MultiDegreeForm), FormsError> {
        debug_assert_eq!((a.p(), a.q()), (self.p, self.q));
        let n = self.m.n();
        let Some(lu) = &self.lu else {
            let b = MultiDegreeForm::zero(n, self.p.saturating_sub(1), self.q.saturating_sub(1))?;
            return Ok((a.clone(), b));
        };
        let rhs = DVector::from_column_slice(lefschetz_lambda(a, self.m).coeffs());
        let sol = lu.solve(&rhs).ok_or(FormsError::DecompositionFailed {
            reason: "ΛL singular above the hard Lefschetz range".into(),
        })?;
        let mut b = MultiDegreeForm::zero(n, self.p - 1, self.q - 1)?;
        b.coeffs_mut().copy_from_slice(sol.as_slice());
        let prim = a.sub(&lefschetz_l(&b, self.m)?)?;
        Ok((prim, b))
    }
}

/// One-shot primitive/ω-divisible split.
pub fn primitive_projection(
    a: &MultiDegreeForm,
    m: &HermitianMetricPoint,
) -> Result<(MultiDegreeForm, MultiDegreeForm), FormsError> {
    PrimitiveProjector::new(m, a.p(), a.q())?.split(a)
}

/// Star of ω^j ∧ P for P primitive of bidegree (a,b), by the closed formula
///
///   *(ω^j ∧ P) = (−1)^{k(k+1)/2} i^{a−b} · j!/(n−k−j)! · ω^{n−k−j} ∧ P,
///
/// k = a + b. Returns the zero form of the correct bidegree when j > n − k.
pub fn primitive_star(
    prim: &MultiDegreeForm,
    j: u8,
    m: &HermitianMetricPoint,
) -> Result<MultiDegreeForm, FormsError> {
    let n = prim.n();
    let (a, b) = (prim.p(), prim.q());
    let k = (a + b) as i16;
    let out_p = n as i16 - b as i16 - j as i16;
    let out_q = n as i16 - a as i16 - j as i16;
    if out_p < 0 || out_q < 0 {
        return Err(FormsError::DegreeOverflow {
            n,
            p: out_p,
            q: out_q,
        });
    }
    let rem = n as i16 - k - j as i16;
    if rem < 0 {
        // ω^j ∧ P = 0 beyond the hard Lefschetz range
        return MultiDegreeForm::zero(n, out_p as u8, out_q as u8);
    }
    let sign = if (k * (k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let ipow = Complex64::I.powi(a as i32 - b as i32);
    let mut factor = 1.0f64;
    for i in 2..=j as u64 {
        factor *= i as f64;
    }
    for i in 2..=rem as u64 {
        factor /= i as f64;
    }
    let mut out = prim.clone();
    for _ in 0..rem {
        out = lefschetz_l(&out, m)?;
    }
    Ok(out.scaled(ipow * Complex64::new(sign * factor, 0.0)))
}
