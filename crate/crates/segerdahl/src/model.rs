//! Shared model types: the affine-premium risk model, first-passage queries,
//! and general premium functions for the state-dependent-drift extensions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Affine-premium risk model with exponential claims.
///
/// Premium at level x is `c + r·x` (r > 0), claims arrive at rate `lambda`
/// with exponential sizes of rate `mu`, and `q >= 0` is the killing
/// (discount) rate. The point `-c/r` is the absolute ruin level: below it
/// the drift can never bring the process back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
    pub r: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
}

impl ModelParams {
    pub fn new(c: f64, r: f64, lambda: f64, mu: f64, q: f64) -> Result<Self> {
        let p = ModelParams { c, r, lambda, mu, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0) {
            return Err(Error::domain("ModelParams", format!("premium intercept c = {} must be >= 0", self.c)));
        }
        if !(self.r > 0.0) {
            return Err(Error::domain("ModelParams", format!("interest rate r = {} must be > 0", self.r)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::domain("ModelParams", format!("claim intensity lambda = {} must be > 0", self.lambda)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::domain("ModelParams", format!("claim rate mu = {} must be > 0", self.mu)));
        }
        if !(self.q >= 0.0) {
            return Err(Error::domain("ModelParams", format!("killing rate q = {} must be >= 0", self.q)));
        }
        let n = self.n_exponent();
        if !n.is_finite() || !(n > 0.0) {
            return Err(Error::domain("ModelParams", format!("derived exponent n = {n} must be finite and positive")));
        }
        Ok(())
    }

    /// λ/r
    pub fn lambda_tilde(&self) -> f64 {
        self.lambda / self.r
    }

    /// q/r
    pub fn q_tilde(&self) -> f64 {
        self.q / self.r
    }

    /// c/r
    pub fn c_tilde(&self) -> f64 {
        self.c / self.r
    }

    /// n = q̃ + λ̃, the exponent of the monotone harmonic pair.
    pub fn n_exponent(&self) -> f64 {
        self.q_tilde() + self.lambda_tilde()
    }

    /// The absolute ruin level -c/r.
    pub fn absolute_ruin(&self) -> f64 {
        -self.c_tilde()
    }

    /// Premium rate at level x.
    pub fn premium(&self, x: f64) -> f64 {
        self.c + self.r * x
    }
}

/// Map a level to the dimensionless coordinate z = μ(x + c/r), the distance
/// above the absolute ruin point in claim-size units.
pub fn to_normalized(p: &ModelParams, x: f64) -> Result<f64> {
    let z = p.mu * (x + p.c_tilde());
    if z < -1e-12 * p.mu * (1.0 + p.c_tilde()) {
        return Err(Error::domain("to_normalized", format!("x = {x} lies below the absolute ruin level {}", p.absolute_ruin())));
    }
    Ok(z.max(0.0))
}

/// Inverse of [`to_normalized`].
pub fn from_normalized(p: &ModelParams, z: f64) -> f64 {
    z / p.mu - p.c_tilde()
}

/// A first-passage question: start at `x`, lower barrier `a`, upper barrier
/// `b` (`f64::INFINITY` for one-sided problems).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitQuery {
    pub x: f64,
    pub a: f64,
    pub b: f64,
}

impl ExitQuery {
    pub fn new(x: f64, a: f64, b: f64) -> Result<Self> {
        if !(a <= x && x <= b) {
            return Err(Error::contract("ExitQuery", format!("need a <= x <= b, got a={a}, x={x}, b={b}")));
        }
        Ok(ExitQuery { x, a, b })
    }

    pub fn is_one_sided(&self) -> bool {
        self.b.is_infinite()
    }
}

/// Clamp a computed probability into [0,1], but only when the violation is
/// within floating-point slack; anything larger signals a numerical failure
/// upstream and must not be papered over.
pub fn clamp_probability(v: f64, context: &'static str) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !((-SLACK..=1.0 + SLACK).contains(&v)) {
        return Err(Error::ProbabilityRange { context, value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

type PremiumFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A general premium function c(x) together with the antiderivative of its
/// reciprocal, C(x; x0) = ∫_{x0}^x du/c(u), which is the travel time of the
/// deterministic flow between levels.
#[derive(Clone)]
pub enum DriftSpec {
    /// c(x) = c + r·x (r = 0 gives the constant-premium baseline).
    Linear { c: f64, r: f64 },
    /// Arbitrary positive premium with a caller-supplied reciprocal
    /// antiderivative; both closures must be pure.
    General { premium: PremiumFn, travel_time: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> },
}

impl std::fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DriftSpec::Linear { c, r } => write!(f, "DriftSpec::Linear {{ c: {c}, r: {r} }}"),
            DriftSpec::General { .. } => write!(f, "DriftSpec::General {{ .. }}"),
        }
    }
}

impl DriftSpec {
    pub fn linear(c: f64, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !(c >= 0.0) || c + r <= 0.0 {
            return Err(Error::domain("DriftSpec", format!("linear drift needs c >= 0, r >= 0, not both zero (c={c}, r={r})")));
        }
        Ok(DriftSpec::Linear { c, r })
    }

    pub fn general<F, G>(premium: F, travel_time: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        DriftSpec::General { premium: Arc::new(premium), travel_time: Arc::new(travel_time) }
    }

    /// The quadratic-premium extension c(x) = c + r·x².
    pub fn quadratic(c: f64, r: f64) -> Result<Self> {
        if !(c > 0.0) || !(r > 0.0) {
            return Err(Error::domain("DriftSpec", format!("quadratic drift needs c > 0, r > 0 (c={c}, r={r})")));
        }
        let s = (r / c).sqrt();
        Ok(DriftSpec::general(
            move |x| c + r * x * x,
            // ∫ du/(c + r u²) = atan(u √(r/c)) / √(rc)
            move |x, x0| ((s * x).atan() - (s * x0).atan()) / (r * c).sqrt(),
        ))
    }

    /// Premium rate at level x.
    pub fn premium(&self, x: f64) -> f64 {
        match self {
            DriftSpec::Linear { c, r } => c + r * x,
            DriftSpec::General { premium, .. } => premium(x),
        }
    }

    /// C(x; x0) = ∫_{x0}^x du/c(u), the deterministic travel time from x0 up
    /// to x (x >= x0).
    pub fn travel_time(&self, x: f64, x0: f64) -> f64 {
        match self {
            DriftSpec::Linear { c, r } => {
                if *r == 0.0 {
                    (x - x0) / c
                } else {
                    let num = c + r * x;
                    let den = c + r * x0;
                    if den <= 0.0 {
                        f64::INFINITY
                    } else {
                        (num / den).ln() / r
                    }
                }
            }
            DriftSpec::General { travel_time, .. } => travel_time(x, x0),
        }
    }

    /// Deterministic inter-jump position after time `dt` starting from `x0`.
    ///
    /// Linear drift uses the exact exponential flow; general drift inverts
    /// the travel time by bracketed bisection to relative 1e-12.
    pub fn flow(&self, x0: f64, dt: f64) -> Result<f64> {
        if dt < 0.0 {
            return Err(Error::domain("flow", format!("dt = {dt} must be >= 0")));
        }
        if dt == 0.0 {
            return Ok(x0);
        }
        match self {
            DriftSpec::Linear { c, r } => {
                if *r == 0.0 {
                    return Ok(x0 + c * dt);
                }
                let ct = c / r;
                if x0 + ct <= 0.0 {
                    return Ok(x0); // at or below the absolute ruin level the flow is frozen
                }
                Ok((x0 + ct) * (r * dt).exp() - ct)
            }
            DriftSpec::General { .. } => {
                // expand an upper bracket, then bisect C(x; x0) = dt
                let mut hi = x0.abs().max(1.0);
                let mut guard = 0;
                while self.travel_time(hi, x0) < dt {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 200 || !hi.is_finite() {
                        return Err(Error::Explosion { bound: self.travel_time(hi, x0) });
                    }
                }
                let mut lo = x0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.travel_time(mid, x0) < dt {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo) <= 1e-12 * (1.0 + hi.abs()) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Time for the flow started at `x0` to reach `target` (INFINITY if it
    /// never does).
    pub fn time_to_reach(&self, x0: f64, target: f64) -> f64 {
        if x0 >= target {
            return 0.0;
        }
        let t = self.travel_time(target, x0);
        if t.is_nan() {
            f64::INFINITY
        } else {
            t
        }
    }

    /// Check the non-explosion condition C(x; x0) → ∞: the travel time to a
    /// large probe level must exceed `horizon`. Required before any
    /// infinite-upper-barrier computation; finite-barrier problems do not
    /// need it.
    pub fn require_nonexplosive(&self, probe: f64, horizon: f64) -> Result<()> {
        let t = self.travel_time(probe, 1.0);
        if t < horizon {
            return Err(Error::Explosion { bound: t });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_round_trip() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(to_normalized(&p, 0.0).unwrap(), 1.0);
        for x in [-0.99, 0.0, 0.5, 7.3] {
            let z = to_normalized(&p, x).unwrap();
            assert_relative_eq!(from_normalized(&p, z), x, epsilon = 1e-14);
        }
        assert!(to_normalized(&p, -1.5).is_err());
        // zero intercept: z = mu x
        let p0 = ModelParams::new(0.0, 1.0, 1.0, 2.5, 0.0).unwrap();
        assert_relative_eq!(to_normalized(&p0, 3.0).unwrap(), 7.5);
    }

    #[test]
    fn query_ordering() {
        assert!(ExitQuery::new(0.5, 0.0, 1.0).is_ok());
        assert!(ExitQuery::new(2.0, 0.0, 1.0).is_err());
        assert!(ExitQuery::new(0.5, 0.0, f64::INFINITY).unwrap().is_one_sided());
    }

    #[test]
    fn linear_flow_exact() {
        let d = DriftSpec::linear(1.0, 1.0).unwrap();
        // x0=0, dt=ln2: (0+1)e^{ln2} - 1 = 1
        assert_relative_eq!(d.flow(0.0, std::f64::consts::LN_2).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(d.flow(0.7, 0.0).unwrap(), 0.7);
        let const_d = DriftSpec::linear(2.0, 0.0).unwrap();
        assert_relative_eq!(const_d.flow(1.0, 3.0).unwrap(), 7.0);
    }

    #[test]
    fn general_flow_inverts_travel_time() {
        let d = DriftSpec::quadratic(1.0, 1.0).unwrap();
        for (x0, dt) in [(0.0, 0.3), (1.0, 0.2), (0.5, 0.5)] {
            let x = d.flow(x0, dt).unwrap();
            assert_relative_eq!(d.travel_time(x, x0), dt, max_relative = 1e-10);
        }
        // atan(x) < π/2: the quadratic drift explodes, probe must say so
        assert!(d.require_nonexplosive(1e9, 10.0).is_err());
        let lin = DriftSpec::linear(1.0, 1.0).unwrap();
        assert!(lin.require_nonexplosive(1e9, 10.0).is_ok());
    }

    #[test]
    fn clamp_checks_tolerance() {
        assert_eq!(clamp_probability(1.0 + 1e-12, "t").unwrap(), 1.0);
        assert_eq!(clamp_probability(-1e-12, "t").unwrap(), 0.0);
        assert!(clamp_probability(1.001, "t").is_err());
    }
}
