//! Assembly of two-sided exit laws from one-sided ingredients.
//!
//! With downward jumps only, the two-sided survival on [a, b] factorizes
//! through three one-sided functions: an increasing harmonic function H,
//! the creeping ruin probability (identically zero for pure-jump paths) and
//! the jump ruin probability. The assembled numerator
//!
//! `W(x, a) = H(x) - Ψ_C(x,a) H(a) - Ψ_J(x,a) · ∫_0^{a-l} (jump density)(y) H(a-y) dy`
//!
//! is the two-variable scale function up to one multiplicative constant.

use crate::error::{Error, Result};
use crate::model::clamp_probability;
use crate::phase_type::PhaseType;
use crate::quad;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
type BarrierFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;
type BarrierVecFn = Arc<dyn Fn(f64, f64) -> Result<Vec<f64>> + Send + Sync>;

/// One-sided ingredients feeding the two-sided assembly. The supplied
/// closures must be pure; the assembly is then safe to call concurrently.
#[derive(Clone)]
pub struct OneSidedIngredients {
    /// Increasing q-harmonic function of the level.
    pub h: ScalarFn,
    /// Killed ruin by creeping; identically zero without a diffusion part.
    pub psi_creep: BarrierFn,
    /// Killed ruin by jump, one entry per crossing phase (length 1 for
    /// exponential claims).
    pub psi_jump: BarrierVecFn,
}

impl OneSidedIngredients {
    /// Pure-jump ingredients with scalar (exponential-claim) jump ruin.
    pub fn pure_jump<H, J>(h: H, psi_jump: J) -> Self
    where
        H: Fn(f64) -> Result<f64> + Send + Sync + 'static,
        J: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        OneSidedIngredients {
            h: Arc::new(h),
            psi_creep: Arc::new(|_, _| Ok(0.0)),
            psi_jump: Arc::new(move |x, a| Ok(vec![psi_jump(x, a)?])),
        }
    }
}

const JUMP_INT_TOL: f64 = 1e-10;

/// `∫_0^{a-l} μ e^{-μy} H(a-y) dy` by adaptive Gauss-Kronrod panels.
fn exp_jump_integral(h: &ScalarFn, mu: f64, a: f64, l: f64) -> Result<f64> {
    if a <= l {
        return Ok(0.0);
    }
    quad::adaptive(&|y: f64| mu * (-mu * y).exp() * h(a - y).unwrap_or(f64::NAN), 0.0, a - l, JUMP_INT_TOL, 1e-12, 4000)
}

/// `∫_0^{a-l} e^{By} b H(a-y) dy`, one component per phase.
fn phase_jump_integral(h: &ScalarFn, pt: &PhaseType, a: f64, l: f64) -> Result<Vec<f64>> {
    let n = pt.n_phases();
    if a <= l {
        return Ok(vec![0.0; n]);
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let v = quad::adaptive(
            &|y: f64| {
                let col = pt.matrix_exp(y) * pt.exit_vector();
                col[k] * h(a - y).unwrap_or(f64::NAN)
            },
            0.0,
            a - l,
            JUMP_INT_TOL,
            1e-12,
            4000,
        )?;
        out.push(v);
    }
    Ok(out)
}

fn check_lower_limit(h: &ScalarFn, a: f64, l: f64) -> Result<()> {
    if (a - l).abs() < 1e-14 * (1.0 + a.abs()) {
        let hl = h(l)?;
        if hl.abs() > 1e-9 {
            return Err(Error::contract(
                "exit assembly",
                format!("a coincides with the domain boundary l = {l} but H(l) = {hl} != 0"),
            ));
        }
    }
    Ok(())
}

/// Scale numerator W(u, a) for exponential claims of rate `mu`.
pub fn scale_numerator_exponential(ing: &OneSidedIngredients, mu: f64, u: f64, a: f64, l: f64) -> Result<f64> {
    let jint = exp_jump_integral(&ing.h, mu, a, l)?;
    let psi = (ing.psi_jump)(u, a)?;
    if psi.len() != 1 {
        return Err(Error::contract("exit assembly", format!("expected scalar jump ruin, got {} phases", psi.len())));
    }
    Ok((ing.h)(u)? - (ing.psi_creep)(u, a)? * (ing.h)(a)? - psi[0] * jint)
}

/// Two-sided survival W(x,a)/W(b,a) for exponential claims; also returns
/// the numerator W(x,a) for consistency checks against closed forms.
pub fn assemble_two_sided_exponential(
    ing: &OneSidedIngredients,
    mu: f64,
    x: f64,
    a: f64,
    b: f64,
    l: f64,
) -> Result<(f64, f64)> {
    if !(l <= a && a <= x && x <= b) {
        return Err(Error::contract("exit assembly", format!("need l <= a <= x <= b (l={l}, a={a}, x={x}, b={b})")));
    }
    check_lower_limit(&ing.h, a, l)?;
    let wx = scale_numerator_exponential(ing, mu, x, a, l)?;
    let wb = scale_numerator_exponential(ing, mu, b, a, l)?;
    Ok((clamp_probability(wx / wb, "assemble_two_sided_exponential")?, wx))
}

/// Two-sided survival for phase-type claims: the jump correction couples
/// the per-phase ruin vector to the vector-valued integral `∫ e^{By} b H`.
pub fn assemble_two_sided_phasetype(
    ing: &OneSidedIngredients,
    pt: &PhaseType,
    x: f64,
    a: f64,
    b: f64,
    l: f64,
) -> Result<f64> {
    if !(l <= a && a <= x && x <= b) {
        return Err(Error::contract("exit assembly", format!("need l <= a <= x <= b (l={l}, a={a}, x={x}, b={b})")));
    }
    check_lower_limit(&ing.h, a, l)?;
    let jint = phase_jump_integral(&ing.h, pt, a, l)?;
    let numerator = |u: f64| -> Result<f64> {
        let psi = (ing.psi_jump)(u, a)?;
        if psi.len() != pt.n_phases() {
            return Err(Error::contract(
                "exit assembly",
                format!("jump-ruin vector has {} phases, claim law has {}", psi.len(), pt.n_phases()),
            ));
        }
        let dot: f64 = psi.iter().zip(&jint).map(|(p, j)| p * j).sum();
        Ok((ing.h)(u)? - (ing.psi_creep)(u, a)? * (ing.h)(a)? - dot)
    };
    clamp_probability(numerator(x)? / numerator(b)?, "assemble_two_sided_phasetype")
}

/// Shape of the deficit-at-ruin density below the barrier.
#[derive(Debug, Clone)]
pub enum DeficitShape {
    Exponential { mu: f64 },
    Phase(PhaseType),
}

/// Killed deficit law on [a, b]: per-phase weights
/// `Ψ_q(x,a) - (W(x,a)/W(b,a)) Ψ_q(b,a)` and the overshoot density shape.
#[derive(Debug, Clone)]
pub struct DeficitLaw {
    pub weights: Vec<f64>,
    pub shape: DeficitShape,
}

impl DeficitLaw {
    /// Total two-sided killed ruin mass.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Deficit density at depth y below the barrier.
    pub fn density(&self, y: f64) -> f64 {
        match &self.shape {
            DeficitShape::Exponential { mu } => self.weights[0] * mu * (-mu * y).exp(),
            DeficitShape::Phase(pt) => {
                let col = pt.matrix_exp(y) * pt.exit_vector();
                self.weights.iter().zip(col.iter()).map(|(w, c)| w * c).sum()
            }
        }
    }
}

/// Assemble the killed deficit law from one-sided ingredients.
pub fn killed_deficit_law(
    ing: &OneSidedIngredients,
    shape: DeficitShape,
    x: f64,
    a: f64,
    b: f64,
    l: f64,
) -> Result<DeficitLaw> {
    let survival = match &shape {
        DeficitShape::Exponential { mu } => assemble_two_sided_exponential(ing, *mu, x, a, b, l)?.0,
        DeficitShape::Phase(pt) => assemble_two_sided_phasetype(ing, pt, x, a, b, l)?,
    };
    let px = (ing.psi_jump)(x, a)?;
    let pb = (ing.psi_jump)(b, a)?;
    if px.len() != pb.len() {
        return Err(Error::contract("killed_deficit_law", "inconsistent jump-ruin vector lengths".to_string()));
    }
    let weights: Vec<f64> = px.iter().zip(&pb).map(|(x_, b_)| x_ - survival * b_).collect();
    Ok(DeficitLaw { weights, shape })
}

/// Two-sided killed ruin recovered from a survival ratio S = W(x,a)/W(b,a)
/// computed by any other method: `(H(x) - S·H(b)) / ∫_0^{a-l} μe^{-μy}H(a-y) dy`.
///
/// Algebraically identical to `Ψ(x,a) - S·Ψ(b,a)` but expressed through H,
/// so a survival ratio from the renewal solver yields the killed ruin
/// without ever evaluating a decreasing solution.
pub fn ruin_from_survival_ratio(
    h: &ScalarFn,
    mu: f64,
    x: f64,
    a: f64,
    b: f64,
    l: f64,
    survival_ratio: f64,
) -> Result<f64> {
    let jint = exp_jump_integral(h, mu, a, l)?;
    if jint <= 0.0 {
        return Err(Error::contract("ruin_from_survival_ratio", format!("jump integral {jint} must be positive (a={a}, l={l})")));
    }
    clamp_probability((h(x)? - survival_ratio * h(b)?) / jint, "ruin_from_survival_ratio")
}
