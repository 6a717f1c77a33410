//! Quadrature, special functions and the interference-exponent integrals.

pub mod derivatives;
pub mod eta;
pub mod hypergeometric;
pub mod quadrature;
pub mod search;

pub use derivatives::exp_composite_derivatives;
pub use eta::{eta, eta_derivative_integrals, eta_upper, eta_upper_closed, eta_upper_hypergeometric, EtaArgs};
pub use hypergeometric::gauss_2f1;
pub use quadrature::{integrate, integrate_fallible, Integral, QuadratureSpec};
pub use search::{golden_section_max, linear_grid, log_grid};
