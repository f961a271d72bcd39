//! Uniform periodic grids, finite-difference operators, and the adaptive
//! explicit time-stepping engine shared by all flow reductions.

mod field;
mod ops;
mod stepper;

pub use field::PeriodicScalarField;
pub use ops::{
    derivative_axis, dirichlet_energy, hessian, hessian_det, hessian_det_shifted, laplacian,
    laplacian_new, second_derivative, StencilOrder,
};
pub use stepper::{
    detect_singularity, integrate, step_rk4, FlowSystem, FlowTrajectory, IntegrateOptions,
    RkWork, SingularityReport, SingularityType, StepController,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid shape: dims {dims:?}, lengths {lengths:?} (1–3 axes, positive sizes)")]
    BadShape { dims: Vec<usize>, lengths: Vec<f64> },
    #[error("fields have different shapes")]
    ShapeMismatch,
    #[error("convexity lost at grid index {index} (value {value:.3e})")]
    ConvexityLost { index: usize, value: f64 },
}
