//! Complex (p,q)-forms on an n-dimensional Hermitian vector space, stored as
//! dense coefficient tensors over strictly increasing multi-indices.

use num_complex::Complex64;
use rand::Rng;

use super::multi_index::{binomial, index_sets, merge_sign, rank};
use super::FormsError;

pub const MAX_DIM: u8 = 8;

/// A (p,q)-form: a = Σ a_{I,J} dz^I ∧ dz̄^J over increasing I (|I| = p) and
/// J (|J| = q). Coefficients are stored row-major: `coeffs[ri * nq + rj]`
/// where `ri`, `rj` are the lexicographic ranks of I and J.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiDegreeForm {
    n: u8,
    p: u8,
    q: u8,
    coeffs: Vec<Complex64>,
}

impl MultiDegreeForm {
    pub fn zero(n: u8, p: u8, q: u8) -> Result<Self, FormsError> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(FormsError::DimensionOutOfRange { n });
        }
        if p > n || q > n {
            return Err(FormsError::DegreeOverflow {
                n,
                p: p as i16,
                q: q as i16,
            });
        }
        let len = binomial(n as usize, p as usize) * binomial(n as usize, q as usize);
        Ok(MultiDegreeForm {
            n,
            p,
            q,
            coeffs: vec![Complex64::ZERO; len],
        })
    }

    /// The constant form 1 (bidegree (0,0)).
    pub fn one(n: u8) -> Self {
        let mut f = Self::zero(n, 0, 0).expect("valid");
        f.coeffs[0] = Complex64::ONE;
        f
    }

    /// Basis form dz^I ∧ dz̄^J with coefficient 1.
    pub fn basis(n: u8, i_set: &[u8], j_set: &[u8]) -> Result<Self, FormsError> {
        let mut f = Self::zero(n, i_set.len() as u8, j_set.len() as u8)?;
        let ri = rank(n as usize, i_set);
        let rj = rank(n as usize, j_set);
        let nq = binomial(n as usize, j_set.len());
        f.coeffs[ri * nq + rj] = Complex64::ONE;
        Ok(f)
    }

    pub fn n(&self) -> u8 {
        self.n
    }
    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn q(&self) -> u8 {
        self.q
    }
    /// Total degree p + q.
    pub fn degree(&self) -> u8 {
        self.p + self.q
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn num_i(&self) -> usize {
        binomial(self.n as usize, self.p as usize)
    }
    pub fn num_j(&self) -> usize {
        binomial(self.n as usize, self.q as usize)
    }

    pub fn get(&self, ri: usize, rj: usize) -> Complex64 {
        self.coeffs[ri * self.num_j() + rj]
    }
    pub fn set(&mut self, ri: usize, rj: usize, v: Complex64) {
        let nq = self.num_j();
        self.coeffs[ri * nq + rj] = v;
    }
    pub fn add_to(&mut self, ri: usize, rj: usize, v: Complex64) {
        let nq = self.num_j();
        self.coeffs[ri * nq + rj] += v;
    }

    /// Coefficient on dz^I ∧ dz̄^J by explicit multi-index.
    pub fn coeff(&self, i_set: &[u8], j_set: &[u8]) -> Complex64 {
        debug_assert_eq!(i_set.len(), self.p as usize);
        debug_assert_eq!(j_set.len(), self.q as usize);
        self.get(rank(self.n as usize, i_set), rank(self.n as usize, j_set))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormsError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormsError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), FormsError> {
        if self.n != other.n || self.p != other.p || self.q != other.q {
            return Err(FormsError::ShapeMismatch {
                left: (self.n, self.p, self.q),
                right: (other.n, other.p, other.q),
            });
        }
        Ok(())
    }

    /// Complex conjugate form: a (q,p)-form with
    /// conj(a)_{K,L} = (−1)^{pq} conj(a_{L,K}).
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.q, self.p).expect("valid");
        let sign = if (self.p as usize * self.q as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        for ri in 0..self.num_i() {
            for rj in 0..self.num_j() {
                out.set(rj, ri, sign * self.get(ri, rj).conj());
            }
        }
        out
    }

    /// A form is real when conj(a) = a (only possible for p = q).
    pub fn is_real(&self, tol: f64) -> bool {
        if self.p != self.q {
            return false;
        }
        self.conj().sub(self).is_ok_and(|d| d.norm_max() < tol)
    }

    /// Project onto the real part: (a + conj(a))/2. Requires p = q.
    pub fn realified(&self) -> Result<Self, FormsError> {
        if self.p != self.q {
            return Err(FormsError::NotSquareBidegree {
                p: self.p,
                q: self.q,
            });
        }
        Ok(self.add(&self.conj())?.scaled(Complex64::new(0.5, 0.0)))
    }

    /// Wedge product. Moving the dz-block of `other` past the dz̄-block of
    /// `self` contributes (−1)^{q_a · p_b}; the rest is index merging.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormsError> {
        if self.n != other.n {
            return Err(FormsError::ShapeMismatch {
                left: (self.n, self.p, self.q),
                right: (other.n, other.p, other.q),
            });
        }
        let (p, q) = (
            self.p as i16 + other.p as i16,
            self.q as i16 + other.q as i16,
        );
        if p > self.n as i16 || q > self.n as i16 {
            return Err(FormsError::DegreeOverflow { n: self.n, p, q });
        }
        let n = self.n as usize;
        let mut out = Self::zero(self.n, p as u8, q as u8).expect("checked");
        let swap_sign = if (self.q as usize * other.p as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let a_i = index_sets(n, self.p as usize);
        let a_j = index_sets(n, self.q as usize);
        let b_i = index_sets(n, other.p as usize);
        let b_j = index_sets(n, other.q as usize);
        let out_nq = out.num_j();
        for (ra, ia) in a_i.iter().enumerate() {
            for (rb, ib) in b_i.iter().enumerate() {
                let Some((mi, si)) = merge_sign(ia, ib) else {
                    continue;
                };
                let out_ri = rank(n, &mi);
                for (sa, ja) in a_j.iter().enumerate() {
                    let left = self.get(ra, sa);
                    if left == Complex64::ZERO {
                        continue;
                    }
                    for (sb, jb) in b_j.iter().enumerate() {
                        let right = other.get(rb, sb);
                        if right == Complex64::ZERO {
                            continue;
                        }
                        let Some((mj, sj)) = merge_sign(ja, jb) else {
                            continue;
                        };
                        let out_rj = rank(n, &mj);
                        out.coeffs[out_ri * out_nq + out_rj] +=
                            left * right * (swap_sign * si * sj);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Wedge power a^k (k ≥ 0); a^0 = 1.
    pub fn wedge_pow(&self, k: u8) -> Result<Self, FormsError> {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    pub fn norm_max(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of the coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).map(|d| d.norm_max()).unwrap_or(f64::INFINITY)
    }

    /// Random form with coefficients uniform in the complex unit square.
    pub fn random<R: Rng>(n: u8, p: u8, q: u8, rng: &mut R) -> Result<Self, FormsError> {
        let mut f = Self::zero(n, p, q)?;
        for c in &mut f.coeffs {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        Ok(f)
    }

    /// Random real form (p = q), built by realifying a random form.
    pub fn random_real<R: Rng>(n: u8, p: u8, rng: &mut R) -> Result<Self, FormsError> {
        Self::random(n, p, p, rng)?.realified()
    }
}
