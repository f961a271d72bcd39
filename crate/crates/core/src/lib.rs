//! Numerical laboratory for a dual pair of geometric flows on non-Kähler
//! Calabi-Yau geometry: exact pointwise Hermitian exterior algebra on one
//! side, reduced parabolic/ODE flows with monotonicity and conservation
//! monitors on the other.

pub mod forms;
pub mod grid;
pub mod identities;
pub mod functionals;
pub mod reductions;
pub mod semiflat;

pub use forms::{FormsError, HermitianMetricPoint, MultiDegreeForm};
