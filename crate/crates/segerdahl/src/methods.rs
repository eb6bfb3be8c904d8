//! Uniform front door over the five computational routes, producing tagged
//! reports that the command-line tool and the cross-validation suite share.

use crate::asmussen;
use crate::closed_form;
use crate::error::{Error, Result};
use crate::factorization;
use crate::laplace;
use crate::levy::CramerLundbergParams;
use crate::model::{DriftSpec, ExitQuery, ModelParams};
use crate::monte_carlo::{self, Claims, SimConfig, Truncation};
use crate::phase_type::PhaseType;
use crate::volterra::{self, VolterraGrid};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

/// The five computational routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Asmussen,
    LaplaceIf,
    Volterra,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ClosedForm,
        Method::Asmussen,
        Method::LaplaceIf,
        Method::Volterra,
        Method::MonteCarlo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Asmussen => "asmussen",
            Method::LaplaceIf => "laplace_if",
            Method::Volterra => "volterra",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Method::ClosedForm),
            "asmussen" => Ok(Method::Asmussen),
            "laplace_if" => Ok(Method::LaplaceIf),
            "volterra" => Ok(Method::Volterra),
            "monte_carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::contract("method", format!("unknown method `{other}`"))),
        }
    }
}

/// Which exit functional is being computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// E_x[e^{-q T_{a,-}}; T_a < T_b] (for b = ∞: the one-sided killed ruin).
    Ruin,
    /// E_x[e^{-q T_{b,+}}; T_b < T_a] for finite b; 1 - ruin for b = ∞.
    Survival,
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ruin" => Ok(Quantity::Ruin),
            "survival" => Ok(Quantity::Survival),
            other => Err(Error::contract("quantity", format!("unknown quantity `{other}`"))),
        }
    }
}

/// One computed value with its provenance and diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub value: f64,
    pub error_estimate: Option<f64>,
    /// Ordered map so serialized reports are byte-stable.
    pub diagnostics: BTreeMap<String, String>,
}

/// Everything a single computation needs; shared by the CLI and the
/// validation suites.
#[derive(Clone)]
pub struct MethodContext {
    pub params: ModelParams,
    pub drift: DriftSpec,
    pub claims: Claims,
    pub query: ExitQuery,
    pub quantity: Quantity,
    pub sim: SimConfig,
    /// Volterra grid step.
    pub volterra_h: f64,
    /// Gaver-Stehfest term count (even).
    pub gs_terms: usize,
    /// Barrier standing in for b = ∞ in the boundary-value solve.
    pub bvp_upper: f64,
}

impl MethodContext {
    /// Affine model with exponential claims and default numerical knobs.
    pub fn affine(params: ModelParams, query: ExitQuery) -> Self {
        MethodContext {
            params,
            drift: DriftSpec::Linear { c: params.c, r: params.r },
            claims: Claims::Exponential { mu: params.mu },
            query,
            quantity: Quantity::Ruin,
            sim: SimConfig::new(1_000_000, 1),
            volterra_h: 1e-3,
            gs_terms: 14,
            bvp_upper: 50.0,
        }
    }

    fn is_affine_exponential(&self) -> bool {
        matches!(self.drift, DriftSpec::Linear { .. }) && matches!(self.claims, Claims::Exponential { .. })
    }

    fn phase_claims(&self) -> Result<PhaseType> {
        match &self.claims {
            Claims::Exponential { mu } => PhaseType::exponential(*mu),
            Claims::Phase(pt) => Ok(pt.clone()),
        }
    }
}

fn report(method: Method, value: f64) -> MethodReport {
    MethodReport { method, value, error_estimate: None, diagnostics: BTreeMap::new() }
}

fn closed_form_report(ctx: &MethodContext) -> Result<MethodReport> {
    if !ctx.is_affine_exponential() {
        return Err(Error::contract("closed_form", "closed forms exist for the affine model with exponential claims only".to_string()));
    }
    let p = &ctx.params;
    let value = if ctx.query.b.is_finite() {
        let (surv, ruin) = closed_form::two_sided(p, &ctx.query)?;
        match ctx.quantity {
            Quantity::Ruin => ruin,
            Quantity::Survival => surv,
        }
    } else {
        let ruin = closed_form::ruin_psi(p, ctx.query.x, ctx.query.a)?;
        match ctx.quantity {
            Quantity::Ruin => ruin,
            Quantity::Survival => 1.0 - ruin,
        }
    };
    Ok(report(Method::ClosedForm, value))
}

fn asmussen_report(ctx: &MethodContext) -> Result<MethodReport> {
    let mut rep;
    let exponential_mu = match &ctx.claims {
        Claims::Exponential { mu } => Some(*mu),
        Claims::Phase(_) => None,
    };
    if ctx.params.q == 0.0 {
        if let Some(mu) = exponential_mu {
            let law = asmussen::exit_q0(&ctx.drift, ctx.params.lambda, mu, &ctx.query)?;
            rep = report(
                Method::Asmussen,
                match ctx.quantity {
                    Quantity::Ruin => law.ruin,
                    Quantity::Survival => law.survival,
                },
            );
            if law.ruin_certain {
                rep.diagnostics.insert("ruin".to_string(), "certain (non-integrable scale kernel)".to_string());
            }
            return Ok(rep);
        }
    }
    // killed or phase-type case: boundary-value solve on a finite interval
    let b_eff = if ctx.query.b.is_finite() { ctx.query.b } else { ctx.bvp_upper.max(ctx.query.x + 1.0) };
    let pt = ctx.phase_claims()?;
    let q2 = ExitQuery::new(ctx.query.x, ctx.query.a, b_eff)?;
    let (surv, ruin) = asmussen::exit_numeric(&ctx.drift, &pt, ctx.params.lambda, ctx.params.q, &q2)?;
    let value = match (ctx.quantity, ctx.query.b.is_finite()) {
        (Quantity::Ruin, _) => ruin,
        (Quantity::Survival, true) => surv,
        // one-sided survival convention: complement of the killed ruin
        (Quantity::Survival, false) => 1.0 - ruin,
    };
    rep = report(Method::Asmussen, value);
    if !ctx.query.b.is_finite() {
        rep.diagnostics.insert("upper_truncation".to_string(), format!("{b_eff}"));
    }
    Ok(rep)
}

fn laplace_report(ctx: &MethodContext) -> Result<MethodReport> {
    if !ctx.is_affine_exponential() {
        return Err(Error::contract("laplace_if", "the integrating-factor route needs the affine model with exponential claims".to_string()));
    }
    if ctx.query.b.is_finite() {
        return Err(Error::contract("laplace_if", "the transform route computes one-sided functionals (b = ∞)".to_string()));
    }
    // shift the lower barrier to the origin: intercept becomes c + r·a
    let p = &ctx.params;
    let shifted = ModelParams::new(p.c + p.r * ctx.query.a, p.r, p.lambda, p.mu, p.q)?;
    let x_rel = ctx.query.x - ctx.query.a;
    let mut diagnostics = BTreeMap::new();
    let (ruin, err) = if x_rel <= 1e-12 {
        (laplace::ruin_at_zero(&shifted)?, None)
    } else {
        let inv = laplace::ruin_via_inversion(&shifted, x_rel, ctx.gs_terms)?;
        diagnostics.insert("gs_terms".to_string(), format!("{}", inv.terms));
        (inv.value, Some(inv.convergence_gap))
    };
    let value = match ctx.quantity {
        Quantity::Ruin => ruin,
        Quantity::Survival => 1.0 - ruin,
    };
    Ok(MethodReport { method: Method::LaplaceIf, value, error_estimate: err, diagnostics })
}

fn volterra_report(ctx: &MethodContext) -> Result<MethodReport> {
    let mu = match &ctx.claims {
        Claims::Exponential { mu } => *mu,
        Claims::Phase(_) => {
            return Err(Error::contract("volterra", "the renewal solver is wired for exponential claims".to_string()));
        }
    };
    let a = ctx.query.a;
    let c_a = ctx.drift.premium(a);
    let base = CramerLundbergParams::new(c_a, ctx.params.lambda, mu)?;
    let b_eff = if ctx.query.b.is_finite() { ctx.query.b } else { (ctx.query.x + 8.0 / mu).max(a + 10.0 / mu) };
    let grid = VolterraGrid::new(a, b_eff, ctx.volterra_h)?;
    let sol = volterra::solve_scale_derivative(&ctx.drift, &base, ctx.params.q, &grid)?;
    let scale = sol.integrate_scale(1.0 / c_a);
    let idx = ((ctx.query.x - a) / ctx.volterra_h).round() as usize;
    let survival_ratio = scale[idx.min(scale.len() - 1)] / scale[scale.len() - 1];

    let mut diagnostics = BTreeMap::new();
    if ctx.drift.premium(b_eff) > c_a {
        diagnostics.insert(
            "kernel_regime".to_string(),
            "conjectured (renewal identity unproven for increasing premiums)".to_string(),
        );
    }
    diagnostics.insert("h".to_string(), format!("{}", ctx.volterra_h));

    let value = match ctx.quantity {
        Quantity::Survival if ctx.query.b.is_finite() => survival_ratio,
        _ => {
            // ruin (or one-sided survival complement) through the H-based
            // factorization of the survival ratio
            if !ctx.is_affine_exponential() {
                return Err(Error::contract("volterra", "the ruin assembly needs the affine harmonic function".to_string()));
            }
            let p = ctx.params;
            let h = Arc::new(move |u: f64| closed_form::harmonic_h(&p, u));
            let ruin = factorization::ruin_from_survival_ratio(
                &(h as Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>),
                mu,
                ctx.query.x,
                a,
                b_eff,
                ctx.params.absolute_ruin(),
                survival_ratio,
            )?;
            match ctx.quantity {
                Quantity::Ruin => ruin,
                Quantity::Survival => 1.0 - ruin,
            }
        }
    };
    Ok(MethodReport { method: Method::Volterra, value, error_estimate: None, diagnostics })
}

fn monte_carlo_report(ctx: &MethodContext) -> Result<MethodReport> {
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("seed".to_string(), format!("{}", ctx.sim.seed));
    diagnostics.insert("paths".to_string(), format!("{}", ctx.sim.n_paths));
    let (value, se) = if ctx.query.b.is_finite() {
        let est = monte_carlo::estimate_two_sided(&ctx.drift, &ctx.claims, ctx.params.lambda, ctx.params.q, &ctx.query, &ctx.sim)?;
        match ctx.quantity {
            Quantity::Ruin => (est.ruin, est.se_ruin),
            Quantity::Survival => (est.survival, est.se_survival),
        }
    } else {
        let trunc = match ctx.sim.upper_truncation {
            Some(level) => {
                let bias = if ctx.is_affine_exponential() {
                    closed_form::ruin_psi(&ctx.params, level, ctx.query.a)?
                } else {
                    return Err(Error::contract(
                        "monte_carlo",
                        "infinite-horizon truncation bias has no closed-form certificate for this model; supply a finite b".to_string(),
                    ));
                };
                Truncation::Fixed { level, bias_bound: bias }
            }
            None => {
                if !ctx.is_affine_exponential() {
                    return Err(Error::contract(
                        "monte_carlo",
                        "automatic truncation needs the affine model; set an explicit truncation level".to_string(),
                    ));
                }
                Truncation::Auto { params: ctx.params, bias: 1e-7 }
            }
        };
        let est = monte_carlo::estimate_ruin_infinite_horizon(
            &ctx.drift,
            &ctx.claims,
            ctx.params.lambda,
            ctx.params.q,
            ctx.query.x,
            ctx.query.a,
            &ctx.sim,
            &trunc,
        )?;
        diagnostics.insert("truncation_level".to_string(), format!("{}", est.truncation_level));
        diagnostics.insert("bias_bound".to_string(), format!("{:e}", est.bias_bound));
        match ctx.quantity {
            Quantity::Ruin => (est.estimate, est.stderr),
            Quantity::Survival => (1.0 - est.estimate, est.stderr),
        }
    };
    diagnostics.insert("stderr".to_string(), format!("{se:e}"));
    Ok(MethodReport { method: Method::MonteCarlo, value, error_estimate: Some(se), diagnostics })
}

/// Run one method on one context.
pub fn run_method(method: Method, ctx: &MethodContext) -> Result<MethodReport> {
    match method {
        Method::ClosedForm => closed_form_report(ctx),
        Method::Asmussen => asmussen_report(ctx),
        Method::LaplaceIf => laplace_report(ctx),
        Method::Volterra => volterra_report(ctx),
        Method::MonteCarlo => monte_carlo_report(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_ctx(q: f64, x: f64) -> MethodContext {
        let params = ModelParams::new(1.0, 1.0, 1.0, 1.0, q).unwrap();
        let query = ExitQuery::new(x, 0.0, f64::INFINITY).unwrap();
        let mut ctx = MethodContext::affine(params, query);
        ctx.sim.n_paths = 200_000;
        ctx
    }

    #[test]
    fn all_methods_cluster_on_canonical_ruin() {
        let ctx = canonical_ctx(0.0, 1.0);
        let want = 0.18393972058572117;
        for m in Method::ALL {
            let rep = run_method(m, &ctx).unwrap();
            let tol = match m {
                Method::MonteCarlo => 3.0 * rep.error_estimate.unwrap() + 1e-6,
                Method::LaplaceIf => 1e-4,
                _ => 1e-5,
            };
            assert!((rep.value - want).abs() < tol, "{m}: {} vs {want}", rep.value);
        }
    }

    #[test]
    fn volterra_flags_conjectured_regime() {
        let rep = run_method(Method::Volterra, &canonical_ctx(0.5, 1.0)).unwrap();
        assert!(rep.diagnostics.get("kernel_regime").unwrap().contains("conjectured"));
    }

    #[test]
    fn closed_form_rejects_general_drift() {
        let mut ctx = canonical_ctx(0.0, 1.0);
        ctx.drift = DriftSpec::quadratic(1.0, 1.0).unwrap();
        assert!(run_method(Method::ClosedForm, &ctx).is_err());
    }

    #[test]
    fn report_serialization_shape() {
        let rep = run_method(Method::MonteCarlo, &canonical_ctx(0.0, 1.0)).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"method\":\"monte_carlo\""));
        assert!(json.contains("error_estimate"));
        assert!(json.contains("diagnostics"));
    }
}
