//! Closed-form first-passage laws for the affine-premium model with
//! exponential claims.
//!
//! Everything is built from the monotone solution pair of the confluent
//! hypergeometric equation `z y'' + (z+1-n) y' - q̃ y = 0` in the
//! dimensionless coordinate z = μ(x + c/r):
//!
//! * `K₁(q̃,n,z) = zⁿ e^{-z} M(q̃+1, n+1, z)` increasing, K₁(0) = 0,
//! * `K₂(q̃,n,z) = zⁿ e^{-z} U(q̃+1, n+1, z)` decreasing to 0,
//!
//! with n = q̃ + λ̃. The killed ruin probability is proportional to K₂, the
//! harmonic function H to K₁, and the two-variable scale function is their
//! determinant combination.

use crate::error::{Error, Result};
use crate::model::{clamp_probability, to_normalized, ExitQuery, ModelParams};
use crate::special::{gamma, kummer_m, ln_gamma, tricomi_u, upper_incomplete_gamma};

fn check_above_ruin(p: &ModelParams, level: f64, what: &'static str) -> Result<()> {
    if level < p.absolute_ruin() - 1e-12 * (1.0 + p.c_tilde()) {
        return Err(Error::domain("closed_form", format!("{what} = {level} lies below the absolute ruin level {}", p.absolute_ruin())));
    }
    Ok(())
}

/// Increasing solution K₁(q̃, n, z) = zⁿ e^{-z} M(q̃+1, n+1, z), z >= 0.
pub fn k1(q_tilde: f64, n: f64, z: f64) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::domain("k1", format!("z = {z} must be >= 0")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(z.powf(n) * (-z).exp() * kummer_m(q_tilde + 1.0, n + 1.0, z)?)
}

/// Decreasing solution K₂(q̃, n, z) = zⁿ e^{-z} U(q̃+1, n+1, z), z > 0,
/// extended by its z→0 limit Γ(n)/Γ(q̃+1).
pub fn k2(q_tilde: f64, n: f64, z: f64) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::domain("k2", format!("z = {z} must be >= 0")));
    }
    if z == 0.0 {
        return Ok((ln_gamma(n) - ln_gamma(q_tilde + 1.0)).exp());
    }
    Ok(z.powf(n) * (-z).exp() * tricomi_u(q_tilde + 1.0, n + 1.0, z)?)
}

/// The increasing q-harmonic function H_q(x) = K₁(q̃, n, z(x)); zero at the
/// absolute ruin level, and the two-sided survival from the absolute-ruin
/// domain is H(x)/H(b).
pub fn harmonic_h(p: &ModelParams, x: f64) -> Result<f64> {
    check_above_ruin(p, x, "x")?;
    let z = to_normalized(p, x)?;
    k1(p.q_tilde(), p.n_exponent(), z)
}

/// Killed one-sided ruin probability Ψ_q(x, a) = E_x[e^{-q T_{a,-}}].
///
/// For a above the absolute ruin level this is λ̃ K₂(q̃,n,z(x)) / K₂(q̃,n+1,z(a));
/// at the absolute ruin level the denominator is replaced by its explicit
/// z→0 limit Γ(n+1)/Γ(q̃+1), avoiding a 0/0 evaluation.
pub fn ruin_psi(p: &ModelParams, x: f64, a: f64) -> Result<f64> {
    if x < a {
        return Err(Error::contract("ruin_psi", format!("need x >= a, got x={x}, a={a}")));
    }
    check_above_ruin(p, a, "a")?;
    let qt = p.q_tilde();
    let lt = p.lambda_tilde();
    let n = qt + lt;
    let z = to_normalized(p, x)?;
    let za = to_normalized(p, a)?;
    let eps = 1e-12 * (1.0 + p.mu * p.c_tilde());
    let v = if za < eps {
        if z < eps {
            // both start and barrier at absolute ruin: ruin happens at the
            // first claim, E[e^{-q τ}] with τ ~ Exp(λ)
            lt / n
        } else {
            lt * (ln_gamma(1.0 + qt) - ln_gamma(1.0 + n)).exp() * k2(qt, n, z)?
        }
    } else {
        lt * k2(qt, n, z)? / k2(qt, n + 1.0, za)?
    };
    clamp_probability(v, "ruin_psi")
}

/// Joint transform of killing time and deficit at ruin,
/// Ψ_q(x,a,θ) = Ψ_q(x,a) · μ/(μ+θ): exponential claims make the overshoot
/// independent of everything else.
pub fn deficit_transform(p: &ModelParams, x: f64, a: f64, theta: f64) -> Result<f64> {
    if theta <= -p.mu {
        return Err(Error::domain("deficit_transform", format!("theta = {theta} at or below the pole {}", -p.mu)));
    }
    Ok(ruin_psi(p, x, a)? * p.mu / (p.mu + theta))
}

/// Two-variable scale function W_q(x, a) in the determinant normalization
///
/// `W = zⁿe^{-z} [(n+1) M(q̃+1,n+1,z) U(q̃+1,n+2,z_a) - λ̃ U(q̃+1,n+1,z) M(q̃+1,n+2,z_a)]`.
///
/// Increasing in x; defined up to one multiplicative constant, so only
/// ratios are probabilistically meaningful. With `a` at the absolute ruin
/// level the K₂ component drops out and W reduces to K₁.
pub fn scale_w(p: &ModelParams, x: f64, a: f64) -> Result<f64> {
    if x < a {
        return Err(Error::contract("scale_w", format!("need x >= a, got x={x}, a={a}")));
    }
    check_above_ruin(p, a, "a")?;
    let qt = p.q_tilde();
    let lt = p.lambda_tilde();
    let n = qt + lt;
    let z = to_normalized(p, x)?;
    let za = to_normalized(p, a)?;
    let eps = 1e-12 * (1.0 + p.mu * p.c_tilde());
    if za < eps {
        return k1(qt, n, z);
    }
    let m1 = kummer_m(qt + 1.0, n + 1.0, z)?;
    let u1 = tricomi_u(qt + 1.0, n + 1.0, z)?;
    let ma = kummer_m(qt + 1.0, n + 2.0, za)?;
    let ua = tricomi_u(qt + 1.0, n + 2.0, za)?;
    Ok(z.powf(n) * (-z).exp() * ((n + 1.0) * m1 * ua - lt * u1 * ma))
}

/// Two-sided exit pair on [a, b]: killed survival W(x,a)/W(b,a) and killed
/// ruin Ψ_q(x,a) - survival · Ψ_q(b,a).
pub fn two_sided(p: &ModelParams, query: &ExitQuery) -> Result<(f64, f64)> {
    if query.b.is_infinite() {
        return Err(Error::contract("two_sided", "upper barrier must be finite".to_string()));
    }
    let survival = clamp_probability(scale_w(p, query.x, query.a)? / scale_w(p, query.b, query.a)?, "two_sided survival")?;
    let ruin = clamp_probability(
        ruin_psi(p, query.x, query.a)? - survival * ruin_psi(p, query.b, query.a)?,
        "two_sided ruin",
    )?;
    Ok((survival, ruin))
}

fn require_q_zero(p: &ModelParams, op: &'static str) -> Result<()> {
    if p.q != 0.0 {
        return Err(Error::contract(op, format!("q = {} but this formula is the q = 0 specialization", p.q)));
    }
    Ok(())
}

/// Eventual ruin probability (q = 0, lower level 0):
/// Ψ(x) = λ̃ Γ(λ̃, μ(c̃+x)) / Γ(λ̃+1, μc̃).
pub fn ruin_q0(p: &ModelParams, x: f64) -> Result<f64> {
    require_q_zero(p, "ruin_q0")?;
    if x < 0.0 {
        return Err(Error::domain("ruin_q0", format!("x = {x} must be >= 0")));
    }
    let lt = p.lambda_tilde();
    let v = lt * upper_incomplete_gamma(lt, p.mu * (p.c_tilde() + x))?
        / upper_incomplete_gamma(lt + 1.0, p.mu * p.c_tilde())?;
    clamp_probability(v, "ruin_q0")
}

/// Eventual survival probability (q = 0): 1 - Ψ(x).
pub fn survival_q0(p: &ModelParams, x: f64) -> Result<f64> {
    Ok(1.0 - ruin_q0(p, x)?)
}

/// Rate of ruin in the initial capital, ρ(x) = -Ψ'(x)
/// = λ̃ μ (μ(c̃+x))^{λ̃-1} e^{-μ(c̃+x)} / Γ(λ̃+1, μc̃).
pub fn ruin_density_q0(p: &ModelParams, x: f64) -> Result<f64> {
    require_q_zero(p, "ruin_density_q0")?;
    if x < 0.0 {
        return Err(Error::domain("ruin_density_q0", format!("x = {x} must be >= 0")));
    }
    let lt = p.lambda_tilde();
    let z = p.mu * (p.c_tilde() + x);
    Ok(lt * p.mu * z.powf(lt - 1.0) * (-z).exp() / upper_incomplete_gamma(lt + 1.0, p.mu * p.c_tilde())?)
}

/// Γ(n)/Γ(q̃+1), the z→0 limit of K₂(q̃, n-1, ·) used by the absolute-ruin
/// branches.
pub fn k2_origin_limit(q_tilde: f64, n: f64) -> f64 {
    gamma(n) / gamma(q_tilde + 1.0)
}
