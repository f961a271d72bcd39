//! The reduced flows: the inverse Monge-Ampère potential flow, the
//! curvature-coupled and flat fibration equations ∂_t u = (u²/4)(Δu − 2κu),
//! the two scalar collapse ODEs, and the semi-flat metric-potential pair.

mod systems;

pub use systems::{
    CalabiGrayData, CalabiGrayFlow, InverseMaFlow, IwasawaFlow, ProductFlow, Reduction,
    ReductionKind, ReductionSpec, Sl2cFlow, SemiflatPotentialFlow,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error("invalid parameter for {kind:?}: {reason}")]
    BadParameter { kind: ReductionKind, reason: String },
}
