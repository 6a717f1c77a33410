//! Analytical coverage expressions and the traffic-load model.

pub mod coverage;
pub mod curve;
pub mod laplace;
pub mod load;

pub use coverage::{
    coverage_bound, coverage_bound_with, coverage_bounds, coverage_bounds_with, coverage_exact, coverage_exact_with,
    coverage_lower_tractable, coverage_lower_tractable_with, coverage_noise_limited, coverage_noise_limited_conditional,
    coverage_noise_limited_conditional_with, coverage_rayleigh_closed, default_approx_kappa, eta_upper_rayleigh,
    kappa_endpoints, BoundPair,
};
pub use curve::{
    analytic_curve, bound_curves, coverage_curve, db_to_linear, linear_to_db, threshold_grid_db, CoverageCurve,
    CoverageMethod,
};
pub use laplace::{laplace_derivatives, laplace_interference, laplace_interference_with, visibility_probability};
pub use load::{load_pmf, per_user_rate, LoadModel};
