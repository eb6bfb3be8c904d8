//! Numerical toolkit for first-passage problems of risk processes with
//! state-dependent premium (affine and general drift, exponential and
//! phase-type claims).
//!
//! Five independent routes to the same quantities, cross-validated against
//! each other:
//!
//! * [`closed_form`] — hypergeometric closed forms for the affine model,
//! * [`asmussen`] — embedding of phase-type jumps into a linear ODE system,
//! * [`laplace`] — integrating-factor transforms plus real-axis inversion,
//! * [`volterra`] — renewal-equation solver for the scale derivative,
//! * [`monte_carlo`] — exact-event simulation with confidence intervals.

pub mod asmussen;
pub mod closed_form;
pub mod error;
pub mod factorization;
pub mod laplace;
pub mod levy;
pub mod methods;
pub mod model;
pub mod monte_carlo;
pub mod ode;
pub mod phase_type;
pub mod quad;
pub mod special;
pub mod volterra;

pub use error::{Error, Result};
pub use methods::{Method, MethodReport};
pub use model::{DriftSpec, ExitQuery, ModelParams};
pub use phase_type::PhaseType;
