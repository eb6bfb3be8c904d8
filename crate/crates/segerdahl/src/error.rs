//! Error type shared by all numerical routines in this crate.

use thiserror::Error;

/// Everything that can go wrong while evaluating a first-passage quantity.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the routine.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// A precondition linking several arguments is violated (orderings, tags).
    #[error("contract violation in {context}: {message}")]
    Contract { context: &'static str, message: String },

    /// A series or continued fraction failed to converge.
    #[error("evaluation of {function}({a}, {b}, {z}) did not converge")]
    EvalFailure { function: &'static str, a: f64, b: f64, z: f64 },

    /// Adaptive quadrature exhausted its panel budget.
    #[error("quadrature did not converge on [{lo}, {hi}] (best error {err:.3e})")]
    QuadratureFailure { lo: f64, hi: f64, err: f64 },

    /// Laplace inversion oscillation diagnostic exceeded its tolerance.
    #[error("Laplace inversion unstable at t={t}: estimates {estimate} vs {previous}")]
    InversionUnstable { t: f64, estimate: f64, previous: f64 },

    /// Boundary-value system too ill-conditioned to trust.
    #[error("boundary system ill-conditioned (cond ~ {cond:.3e}); split the domain")]
    Stiffness { cond: f64 },

    /// Grid self-refinement check failed: the step is too coarse.
    #[error("grid too coarse: halving h moved the endpoint by {delta:.3e} (> {tol:.3e}); coarse {coarse}, fine {fine}")]
    Refinement { delta: f64, tol: f64, coarse: f64, fine: f64 },

    /// A probability left [0,1] by more than the tolerated slack.
    #[error("probability {value} out of [0,1] beyond tolerance in {context}")]
    ProbabilityRange { context: &'static str, value: f64 },

    /// The deterministic flow reaches infinity in finite time.
    #[error("drift explodes in finite time (C(x) bounded by {bound})")]
    Explosion { bound: f64 },

    /// Monte Carlo could not meet the requested bias target.
    #[error("cannot reach bias target {target:.3e} within the truncation cap")]
    BiasTarget { target: f64 },

    /// The ODE integrator ran out of steps (or the step size collapsed).
    #[error("ODE integrator exceeded its budget at t = {t}")]
    OdeBudget { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain { context, message: message.into() }
    }

    pub(crate) fn contract(context: &'static str, message: impl Into<String>) -> Self {
        Error::Contract { context, message: message.into() }
    }
}
