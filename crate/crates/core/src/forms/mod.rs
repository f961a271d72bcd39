//! Exact pointwise exterior algebra of (p,q)-forms on a Hermitian complex
//! vector space: wedge products, the Lefschetz sl₂ triple, the Hodge star and
//! the primitive decomposition.
//!
//! # Sign and i-power conventions (frozen)
//!
//! Every identity in this crate is stated relative to one fixed set of
//! conventions; all of them are pinned by the test suite:
//!
//! | object | convention |
//! |--------|------------|
//! | metric form | ω = i g_{k̄j} dz^j ∧ dz̄^k, g Hermitian positive |
//! | real (1,1)-form | α = i α_{k̄j} dz^j ∧ dz̄^k with α_{k̄j} Hermitian |
//! | realness | conj(a)_{K,L} = (−1)^{pq} conj(a_{L,K}) equals a |
//! | inner product | ⟨dz^I ∧ dz̄^J, dz^K ∧ dz̄^L⟩ = det(g^{i k̄}) · conj(det(g^{j l̄})) |
//! | volume | vol = ω^n/n!; top coefficient i^n (−1)^{n(n−1)/2} det g |
//! | Hodge star | b ∧ *a = ⟨b, conj a⟩ vol, ℂ-linear, (p,q) → (n−q,n−p) |
//! | contraction | Λ = metric adjoint of L = ω ∧ ·; Λω = n |
//! | torsion form | T = ½ T_{k̄jl} dz^l ∧ dz^j ∧ dz̄^k, antisymmetric in (j,l) |
//! | torsion norm | ‖T‖² = T_{k̄st} conj(T_{j̄uv}) g^{jk̄} g^{sū} g^{tv̄} |
//! | codifferentials of ω | ∂̄*ω = −i τ, ∂*ω = i τ̄ with τ_l = g^{jk̄} T_{k̄jl} |
//!
//! With these choices the displayed primitive-star formulas come out with
//! the conventional signs, e.g. *(P ∧ ω^{n−2}) = −(n−2)! P for a primitive
//! (1,1)-form P.

mod form;
mod hodge;
mod lefschetz;
mod metric;
pub mod multi_index;
mod primitive;
pub mod reference;

pub use form::MultiDegreeForm;
pub use hodge::{hodge_star, star_of_wedge_power};
pub use lefschetz::{
    lambda_pow, lefschetz_l, lefschetz_lambda, scalar_value, trace_11, trace_11_complex, weight_h,
};
pub use metric::{coefficient_count, HermitianMetricPoint};
pub use primitive::{
    primitive_basis, primitive_decompose, primitive_projection, primitive_star,
    PrimitiveProjector, Sl2Decomposition,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("complex dimension {n} outside the supported range 1..=8")]
    DimensionOutOfRange { n: u8 },
    #[error("bidegree ({p},{q}) overflows dimension n={n}")]
    DegreeOverflow { n: u8, p: i16, q: i16 },
    #[error("form shapes (n,p,q) {left:?} and {right:?} are incompatible")]
    ShapeMismatch { left: (u8, u8, u8), right: (u8, u8, u8) },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("metric is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("expected a (p,q)=({},{}) form, got ({},{})", expected.0, expected.1, got.0, got.1)]
    ExpectedBidegree { expected: (u8, u8), got: (u8, u8) },
    #[error("form is not real under the fixed conjugation convention")]
    NotReal,
    #[error("bidegree ({p},{q}) is not square; realification undefined")]
    NotSquareBidegree { p: u8, q: u8 },
    #[error("primitive decomposition solve failed: {reason}")]
    DecompositionFailed { reason: String },
}
