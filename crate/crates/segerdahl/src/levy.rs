//! Constant-premium Cramér-Lundberg baseline: Laplace exponent, its roots,
//! and the two-exponential scale function for exponential claims. This is
//! the kernel of the Volterra renewal equation and the degenerate-case
//! oracle for everything with state-dependent drift.

use crate::error::{Error, Result};

/// Parameters of a Cramér-Lundberg process `ct - Σ C_i` with exponential
/// claims of rate `mu`, claim intensity `lambda`, and an optional Brownian
/// coefficient `alpha0` (kept in the Laplace exponent but not in any
/// validated scale-function path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CramerLundbergParams {
    pub c: f64,
    pub lambda: f64,
    pub mu: f64,
    pub alpha0: f64,
}

impl CramerLundbergParams {
    pub fn new(c: f64, lambda: f64, mu: f64) -> Result<Self> {
        let p = CramerLundbergParams { c, lambda, mu, alpha0: 0.0 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::domain("CramerLundbergParams", format!("premium c = {} must be > 0", self.c)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::domain("CramerLundbergParams", format!("claim intensity lambda = {} must be > 0", self.lambda)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::domain("CramerLundbergParams", format!("claim rate mu = {} must be > 0", self.mu)));
        }
        if self.alpha0 < 0.0 {
            return Err(Error::domain("CramerLundbergParams", format!("alpha0 = {} must be >= 0", self.alpha0)));
        }
        Ok(())
    }
}

/// Laplace exponent κ(θ) = α₀θ² + cθ + λ(μ/(μ+θ) - 1), defined for θ ≠ -μ.
pub fn laplace_exponent(p: &CramerLundbergParams, theta: f64) -> Result<f64> {
    if (theta + p.mu).abs() < 1e-14 * (1.0 + p.mu) {
        return Err(Error::domain("laplace_exponent", format!("pole at theta = {}", -p.mu)));
    }
    Ok(p.alpha0 * theta * theta + p.c * theta + p.lambda * (p.mu / (p.mu + theta) - 1.0))
}

/// The q-shifted symbol κ(θ) - q used wherever the killing rate is folded
/// into the exponent.
pub fn laplace_exponent_shifted(p: &CramerLundbergParams, q: f64, theta: f64) -> Result<f64> {
    Ok(laplace_exponent(p, theta)? - q)
}

/// The two real roots of κ(θ) = q on (-μ, ∞), from the explicit quadratic
/// `cθ² + (cμ - λ - q)θ - qμ = 0` in a cancellation-safe arrangement.
///
/// Returns `(phi_q, rho_q)` with `phi_q >= 0 >= rho_q`. At the exactly
/// critical corner `q = 0, cμ = λ` the two roots coalesce at 0.
pub fn cl_roots(p: &CramerLundbergParams, q: f64) -> Result<(f64, f64)> {
    if q < 0.0 {
        return Err(Error::domain("cl_roots", format!("q = {q} must be >= 0")));
    }
    if p.alpha0 != 0.0 {
        return Err(Error::domain("cl_roots", "roots implemented for alpha0 = 0 only".to_string()));
    }
    let b = p.c * p.mu - p.lambda - q;
    let disc = (b * b + 4.0 * p.c * q * p.mu).sqrt();
    // pick the root computed without subtraction first, recover the other
    // from the product -qμ/c
    let (r1, r2) = if b >= 0.0 {
        let lo = (-b - disc) / (2.0 * p.c);
        let hi = if lo == 0.0 { 0.0 } else { (-q * p.mu) / (p.c * lo) };
        (hi, lo)
    } else {
        let hi = (-b + disc) / (2.0 * p.c);
        let lo = if hi == 0.0 { 0.0 } else { (-q * p.mu) / (p.c * hi) };
        (hi, lo)
    };
    debug_assert!(r1 >= -1e-12 && r2 <= 1e-12);
    Ok((r1.max(0.0).max(r2), r2.min(0.0).min(r1)))
}

/// Precomputed scale function/derivative evaluator for exponential claims.
///
/// `W_q(x) = [(μ+φ)e^{φx} - (μ+ρ)e^{ρx}] / [c(φ-ρ)]`, with the confluent
/// limit `W(x) = (1+μx)/c` on the critical line q = 0, cμ = λ where the
/// roots coalesce.
#[derive(Debug, Clone, Copy)]
pub struct ScaleKernel {
    c: f64,
    mu: f64,
    phi: f64,
    rho: f64,
    degenerate: bool,
}

impl ScaleKernel {
    pub fn new(p: &CramerLundbergParams, q: f64) -> Result<Self> {
        let (phi, rho) = cl_roots(p, q)?;
        let degenerate = (phi - rho).abs() < 1e-9 * (1.0 + phi.abs() + rho.abs());
        Ok(ScaleKernel { c: p.c, mu: p.mu, phi, rho, degenerate })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// W_q(x)
    pub fn w_scale(&self, x: f64) -> f64 {
        if self.degenerate {
            let th = 0.5 * (self.phi + self.rho);
            return (th * x).exp() * (1.0 + (self.mu + th) * x) / self.c;
        }
        let den = self.c * (self.phi - self.rho);
        ((self.mu + self.phi) * (self.phi * x).exp() - (self.mu + self.rho) * (self.rho * x).exp()) / den
    }

    /// w_q(x) = W_q'(x)
    pub fn w_deriv(&self, x: f64) -> f64 {
        if self.degenerate {
            let th = 0.5 * (self.phi + self.rho);
            return (th * x).exp() * (th * (1.0 + (self.mu + th) * x) + self.mu + th) / self.c;
        }
        let den = self.c * (self.phi - self.rho);
        ((self.mu + self.phi) * self.phi * (self.phi * x).exp()
            - (self.mu + self.rho) * self.rho * (self.rho * x).exp())
            / den
    }
}

/// Scale function W_q(x) of the baseline process.
pub fn cl_scale_w_big(p: &CramerLundbergParams, q: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain("cl_scale_W", format!("x = {x} must be >= 0")));
    }
    Ok(ScaleKernel::new(p, q)?.w_scale(x))
}

/// Derivative w_q(x) = W_q'(x) of the baseline scale function.
pub fn cl_scale_w_small(p: &CramerLundbergParams, q: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain("cl_scale_w", format!("x = {x} must be >= 0")));
    }
    Ok(ScaleKernel::new(p, q)?.w_deriv(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(c: f64, lambda: f64, mu: f64) -> CramerLundbergParams {
        CramerLundbergParams::new(c, lambda, mu).unwrap()
    }

    #[test]
    fn exponent_values() {
        let pr = p(1.0, 0.5, 1.0);
        assert_eq!(laplace_exponent(&pr, 0.0).unwrap(), 0.0);
        // κ(θ) = θ(0.5+θ)/(1+θ) for these parameters
        assert_relative_eq!(laplace_exponent(&pr, 1.0).unwrap(), 0.75, max_relative = 1e-14);
        assert!(laplace_exponent(&pr, -1.0).is_err());
    }

    #[test]
    fn exponent_nonnegative_under_net_profit() {
        let pr = p(1.0, 0.5, 1.0); // cμ > λ
        for k in 0..50 {
            let th = 0.1 * k as f64;
            assert!(laplace_exponent(&pr, th).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn roots_examples() {
        let (phi, rho) = cl_roots(&p(1.0, 0.5, 1.0), 0.0).unwrap();
        assert_relative_eq!(phi, 0.0, epsilon = 1e-14);
        assert_relative_eq!(rho, -0.5, max_relative = 1e-14);

        let (phi, rho) = cl_roots(&p(1.0, 1.0, 1.0), 1.0).unwrap();
        assert_relative_eq!(phi, 1.6180339887498949, max_relative = 1e-14);
        assert_relative_eq!(rho, -0.6180339887498949, max_relative = 1e-14);
    }

    #[test]
    fn roots_satisfy_exponent() {
        for (c, lam, mu, q) in [(1.0, 0.5, 1.0, 0.3), (2.3, 1.7, 0.6, 1.1), (0.7, 0.2, 3.0, 0.0)] {
            let pr = p(c, lam, mu);
            let (phi, rho) = cl_roots(&pr, q).unwrap();
            assert!((laplace_exponent(&pr, phi).unwrap() - q).abs() < 1e-12);
            assert!((laplace_exponent(&pr, rho).unwrap() - q).abs() < 1e-12);
            assert!(phi > -mu && rho > -mu);
        }
    }

    #[test]
    fn scale_function_closed_form() {
        // c=1, λ=0.5, μ=1, q=0: W(x) = 2 - e^{-x/2}
        let pr = p(1.0, 0.5, 1.0);
        for x in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let w = cl_scale_w_big(&pr, 0.0, x).unwrap();
            assert_relative_eq!(w, 2.0 - (-0.5 * x).exp(), max_relative = 1e-13);
        }
        assert_relative_eq!(cl_scale_w_big(&pr, 0.0, 0.0).unwrap(), 1.0 / pr.c, max_relative = 1e-14);
        // survival from zero = W(0)/W(∞) = 1/2 at these parameters
        assert_relative_eq!(cl_scale_w_big(&pr, 0.0, 0.0).unwrap() / 2.0, 0.5, max_relative = 1e-13);
    }

    #[test]
    fn critical_corner_is_linear() {
        // q=0 with cμ=λ: W(x) = (1+μx)/c
        let pr = p(1.0, 1.0, 1.0);
        for x in [0.0, 0.3, 2.0] {
            assert_relative_eq!(cl_scale_w_big(&pr, 0.0, x).unwrap(), 1.0 + x, max_relative = 1e-12);
            assert_relative_eq!(cl_scale_w_small(&pr, 0.0, x).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let pr = p(1.3, 0.8, 1.9);
        let h = 1e-6;
        for q in [0.0, 0.7] {
            for x in [0.2, 1.0, 4.0] {
                let fd = (cl_scale_w_big(&pr, q, x + h).unwrap() - cl_scale_w_big(&pr, q, x - h).unwrap()) / (2.0 * h);
                let an = cl_scale_w_small(&pr, q, x).unwrap();
                assert_relative_eq!(an, fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn scale_function_increasing() {
        let pr = p(1.1, 0.9, 1.4);
        for q in [0.0, 0.5, 2.0] {
            let mut prev = cl_scale_w_big(&pr, q, 0.0).unwrap();
            let mut x = 0.01;
            while x < 20.0 {
                let v = cl_scale_w_big(&pr, q, x).unwrap();
                assert!(v > prev, "W_q must increase (q={q}, x={x})");
                prev = v;
                x += 0.01;
            }
        }
    }
}
