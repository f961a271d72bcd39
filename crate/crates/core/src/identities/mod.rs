//! Pointwise torsion/curvature data and machine verification of the
//! displayed algebraic identities relating them.

mod checks;
mod point_data;

pub use checks::{
    check_codifferential_formula, check_flow_rewrite, check_flow_rewrite_composite,
    check_lambda_ladder_a, check_lambda_ladder_b_torsion, check_lambda_ladder_c2,
    check_lambda_ladder_c3, check_lambda_ladder_c_decomposition, check_prop_3_1,
    check_star_formula_a, check_star_formula_b, check_star_formula_c, check_star_trace_c,
    flow_rewrite_solve_route, flow_rewrite_star_route, run_identity_suite, IdentityOutcome,
    SuiteOptions, SuiteReport,
};
pub use point_data::{
    build_contractions, i_tau_wedge_taubar, lambda_scalar, min_eigenvalue_11, HermitianPointData,
    TorsionContractions, TorsionTensor,
};
