//! SARIMA specification, likelihood, simulation and estimation.

pub mod css;
pub mod fit;
pub mod kalman;
pub mod params;
pub mod poly;
pub mod simulate;
pub mod spec;

pub use css::css_objective;
pub use fit::{fit, fit_with, FitOptions, FittedModel};
pub use kalman::{concentrated_loglik, exact_loglik};
pub use poly::{check_stationary_invertible, expand_polynomials, ExpandedArma};
pub use simulate::simulate;
pub use spec::{CoefficientSet, ModelSpec};
