//! Exit problems via the embedding of phase-type jumps into unit-slope
//! segments: the Kolmogorov integro-differential equation becomes a linear
//! ODE system in the level variable,
//!
//! `(Ψ', A')ᵀ = [[(λ+q)/c(x), -(λ/c(x))β], [b, B]] (Ψ, A)ᵀ`,
//!
//! where `A_i` is the exit functional conditioned on moving down in jump
//! phase i. For q = 0 with exponential claims the system integrates in
//! closed form through `K(x) = exp(-μx + λ∫_0^x dv/c(v))`; otherwise a
//! superposition (fundamental-matrix) boundary-value solve does the work.

use crate::error::{Error, Result};
use crate::model::{clamp_probability, DriftSpec, ExitQuery};
use crate::ode::dopri5;
use crate::phase_type::PhaseType;
use crate::quad::adaptive_simpson;
use nalgebra::DMatrix;

/// K(x) = exp(-μx + λ C(x; 0)); K(0) = 1.
pub fn k_factor(d: &DriftSpec, lambda: f64, mu: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::domain("k_factor", format!("x = {x} must be >= 0")));
    }
    if d.premium(x) <= 0.0 || d.premium(0.0) <= 0.0 {
        return Err(Error::domain("k_factor", format!("premium must stay positive on [0, {x}]")));
    }
    Ok((-mu * x + lambda * d.travel_time(x, 0.0)).exp())
}

/// Scale function of the q = 0 exponential-claim problem,
/// 𝒲(x, a) = 1 + (1/K(a)) ∫_a^x λK(u)/c(u) du, normalized to 𝒲(a,a) = 1.
pub fn scale_w_q0(d: &DriftSpec, lambda: f64, mu: f64, x: f64, a: f64) -> Result<f64> {
    let ka = k_factor(d, lambda, mu, a)?;
    let integral = adaptive_simpson(&|u: f64| lambda * k_factor(d, lambda, mu, u).unwrap() / d.premium(u), a, x, 1e-12)?;
    Ok(1.0 + integral / ka)
}

/// Two-sided exit law at q = 0 for exponential claims.
#[derive(Debug, Clone, Copy)]
pub struct ExitLawQ0 {
    pub survival: f64,
    pub ruin: f64,
    /// Density of the ruin level: 𝐰(x)/(K(a) + ∫_a^b 𝐰).
    pub ruin_density: f64,
    /// True when the b = ∞ problem has non-integrable K, making eventual
    /// ruin certain.
    pub ruin_certain: bool,
}

/// ∫_a^∞ 𝐰(u) du with 𝐰 = λK/c, truncated where K has decayed below
/// 1e-16 K(a) and completed with the exponential-decay tail estimate.
fn w_integral_to_infinity(d: &DriftSpec, lambda: f64, mu: f64, a: f64) -> Result<Option<f64>> {
    let ka = k_factor(d, lambda, mu, a)?;
    let w = |u: f64| lambda * k_factor(d, lambda, mu, u).unwrap() / d.premium(u);
    let mut lo = a;
    let mut hi = a + 4.0 / mu;
    let mut total = 0.0;
    let mut k_prev = ka;
    for _ in 0..60 {
        let k_hi = k_factor(d, lambda, mu, hi)?;
        // non-decreasing K far out means ∫K diverges: ruin is certain
        if k_hi >= k_prev && hi - a > 8.0 / mu {
            return Ok(None);
        }
        k_prev = k_hi;
        total += adaptive_simpson(&w, lo, hi, 1e-13 * (1.0 + total))?;
        // local decay rate of K is μ - λ/c(hi); positive decay lets the
        // remaining tail be bounded by λK/(c(μ - λ/c))
        let decay = mu - lambda / d.premium(hi);
        if k_hi < 1e-16 * ka && decay > 0.0 {
            total += lambda * k_hi / (d.premium(hi) * decay);
            return Ok(Some(total));
        }
        lo = hi;
        hi = a + (hi - a) * 2.0;
    }
    Ok(None)
}

/// Closed-form exit law at q = 0 (general positive drift, exponential
/// claims). `query.b` may be infinite when the non-explosion condition
/// holds.
pub fn exit_q0(d: &DriftSpec, lambda: f64, mu: f64, query: &ExitQuery) -> Result<ExitLawQ0> {
    let (x, a, b) = (query.x, query.a, query.b);
    let ka = k_factor(d, lambda, mu, a)?;
    let w = |u: f64| lambda * k_factor(d, lambda, mu, u).unwrap() / d.premium(u);
    let num = 1.0 + adaptive_simpson(&w, a, x, 1e-12)? / ka;
    let denom = if b.is_finite() {
        1.0 + adaptive_simpson(&w, a, b, 1e-12)? / ka
    } else {
        d.require_nonexplosive(1e12, 1e6)?;
        match w_integral_to_infinity(d, lambda, mu, a)? {
            Some(total) => 1.0 + total / ka,
            None => {
                return Ok(ExitLawQ0 { survival: 0.0, ruin: 1.0, ruin_density: f64::NAN, ruin_certain: true });
            }
        }
    };
    let survival = clamp_probability(num / denom, "exit_q0 survival")?;
    let density = w(x) / (ka * denom);
    Ok(ExitLawQ0 { survival, ruin: 1.0 - survival, ruin_density: density, ruin_certain: false })
}

/// The linear system descriptor of the embedded process: state
/// (Ψ, A_1, …, A_n), derivative M(x)·state with
/// `M(x) = [[(λ+q)/c(x), -(λ/c(x))β], [b, B]]`.
pub struct OdeSystem {
    drift: DriftSpec,
    claims: PhaseType,
    lambda: f64,
    q: f64,
}

/// Build the state-derivative map of the embedded system.
pub fn build_ode_system(d: &DriftSpec, pt: &PhaseType, lambda: f64, q: f64) -> Result<OdeSystem> {
    if !(lambda > 0.0) || q < 0.0 {
        return Err(Error::domain("build_ode_system", format!("need lambda > 0, q >= 0 (got {lambda}, {q})")));
    }
    Ok(OdeSystem { drift: d.clone(), claims: pt.clone(), lambda, q })
}

impl OdeSystem {
    pub fn dim(&self) -> usize {
        self.claims.n_phases() + 1
    }

    /// The full coefficient matrix at level x (the A-block rows do not
    /// depend on x).
    pub fn matrix_at(&self, x: f64) -> DMatrix<f64> {
        let n = self.claims.n_phases();
        let c = self.drift.premium(x);
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(0, 0)] = (self.lambda + self.q) / c;
        for j in 0..n {
            m[(0, j + 1)] = -self.lambda / c * self.claims.beta()[j];
            m[(j + 1, 0)] = self.claims.exit_vector()[j];
            for i in 0..n {
                m[(j + 1, i + 1)] = self.claims.sub_generator()[(j, i)];
            }
        }
        m
    }

    fn apply(&self, x: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.claims.n_phases();
        let c = self.drift.premium(x);
        let mut s = 0.0;
        for j in 0..n {
            s += self.claims.beta()[j] * y[j + 1];
        }
        dy[0] = ((self.lambda + self.q) * y[0] - self.lambda * s) / c;
        for i in 0..n {
            let mut acc = self.claims.exit_vector()[i] * y[0];
            for j in 0..n {
                acc += self.claims.sub_generator()[(i, j)] * y[j + 1];
            }
            dy[i + 1] = acc;
        }
    }
}

/// Tolerances for the boundary-value solve.
#[derive(Debug, Clone, Copy)]
pub struct BvpOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Condition-number ceiling before the solve is declared too stiff.
    pub cond_limit: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions { rtol: 1e-10, atol: 1e-12, cond_limit: 1e12 }
    }
}

/// Killed two-sided exit pair (survival, ruin) on the finite interval
/// [a, b] by superposition: the fundamental matrix is integrated once from
/// a through x to b, then the boundary conditions — `A_i(a)` pinned at the
/// lower end, the Ψ component pinned at b — close a small linear system.
pub fn exit_numeric(d: &DriftSpec, pt: &PhaseType, lambda: f64, q: f64, query: &ExitQuery) -> Result<(f64, f64)> {
    exit_numeric_with(d, pt, lambda, q, query, BvpOptions::default())
}

pub fn exit_numeric_with(
    d: &DriftSpec,
    pt: &PhaseType,
    lambda: f64,
    q: f64,
    query: &ExitQuery,
    opts: BvpOptions,
) -> Result<(f64, f64)> {
    let (x, a, b) = (query.x, query.a, query.b);
    if !b.is_finite() {
        return Err(Error::contract("exit_numeric", "upper barrier must be finite; pick a truncation level".to_string()));
    }
    if d.premium(a) <= 0.0 {
        return Err(Error::domain("exit_numeric", format!("premium not positive at the lower barrier {a}")));
    }
    let sys = build_ode_system(d, pt, lambda, q)?;
    let m = sys.dim();

    // integrate the m x m fundamental matrix (columns = independent IVPs)
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        for col in 0..m {
            sys.apply(t, &y[col * m..(col + 1) * m], &mut dy[col * m..(col + 1) * m]);
        }
    };
    let mut id = vec![0.0; m * m];
    for i in 0..m {
        id[i * m + i] = 1.0;
    }
    let phi_x = dopri5(&rhs, a, x, &id, opts.rtol, opts.atol)?;
    let phi_b = dopri5(&rhs, x, b, &phi_x, opts.rtol, opts.atol)?;
    let at = |flat: &[f64], row: usize, col: usize| flat[col * m + row];

    // boundary matrix: rows 1..m pin the A_i(a) initial values, row 0 pins
    // the Psi component at b
    let mut bmat = DMatrix::zeros(m, m);
    for j in 0..m {
        bmat[(0, j)] = at(&phi_b, 0, j);
    }
    for i in 1..m {
        bmat[(i, i)] = 1.0;
    }
    let inv = bmat.clone().lu().try_inverse().ok_or(Error::Stiffness { cond: f64::INFINITY })?;
    let norm = |mm: &DMatrix<f64>| (0..m).map(|i| (0..m).map(|j| mm[(i, j)].abs()).sum::<f64>()).fold(0.0f64, f64::max);
    let cond = norm(&bmat) * norm(&inv);
    if cond > opts.cond_limit {
        return Err(Error::Stiffness { cond });
    }

    let solve_at_x = |value_at_b: f64, a_boundary: f64| -> f64 {
        // initial state (v, a_boundary, ..., a_boundary), v from the b-condition
        let mut rhs0 = value_at_b;
        for j in 1..m {
            rhs0 -= at(&phi_b, 0, j) * a_boundary;
        }
        let v = rhs0 / at(&phi_b, 0, 0);
        let mut out = at(&phi_x, 0, 0) * v;
        for j in 1..m {
            out += at(&phi_x, 0, j) * a_boundary;
        }
        out
    };

    let ruin = clamp_probability(solve_at_x(0.0, 1.0), "exit_numeric ruin")?;
    let survival = clamp_probability(solve_at_x(1.0, 0.0), "exit_numeric survival")?;
    Ok((survival, ruin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::model::ModelParams;
    use approx::assert_relative_eq;

    fn canonical_drift() -> DriftSpec {
        DriftSpec::linear(1.0, 1.0).unwrap()
    }

    #[test]
    fn k_factor_forms() {
        let d = canonical_drift();
        // linear drift: K(x) = e^{-x}(1+x) at canonical parameters
        for x in [0.0, 0.5, 2.0] {
            assert_relative_eq!(k_factor(&d, 1.0, 1.0, x).unwrap(), (-x).exp() * (1.0 + x), max_relative = 1e-13);
        }
        // constant drift: K(x) = e^{(λ/c - μ)x}
        let dc = DriftSpec::linear(2.0, 0.0).unwrap();
        assert_relative_eq!(k_factor(&dc, 1.0, 1.0, 3.0).unwrap(), (3.0f64 * (0.5 - 1.0)).exp(), max_relative = 1e-13);
        assert_relative_eq!(k_factor(&d, 0.7, 1.3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn canonical_scale_and_survival() {
        let d = canonical_drift();
        // 𝒲(x) = 2 - e^{-x}
        for x in [0.0, 1.0, 4.0] {
            assert_relative_eq!(scale_w_q0(&d, 1.0, 1.0, x, 0.0).unwrap(), 2.0 - (-x).exp(), max_relative = 1e-11);
        }
        let one_sided = exit_q0(&d, 1.0, 1.0, &ExitQuery::new(0.0, 0.0, f64::INFINITY).unwrap()).unwrap();
        assert_relative_eq!(one_sided.survival, 0.5, max_relative = 1e-10);
        let at_one = exit_q0(&d, 1.0, 1.0, &ExitQuery::new(1.0, 0.0, f64::INFINITY).unwrap()).unwrap();
        assert_relative_eq!(at_one.ruin, 0.5 * (-1.0f64).exp(), max_relative = 1e-10);
        // finite barrier b = 1 from x = 0
        let two = exit_q0(&d, 1.0, 1.0, &ExitQuery::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(two.survival, 0.61269983678028204, max_relative = 1e-10);
    }

    #[test]
    fn constant_drift_matches_cramer_lundberg() {
        let d = DriftSpec::linear(1.0, 0.0).unwrap();
        let law = exit_q0(&d, 0.5, 1.0, &ExitQuery::new(0.0, 0.0, f64::INFINITY).unwrap()).unwrap();
        assert_relative_eq!(law.survival, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn ruin_certain_when_k_diverges() {
        // constant drift with λ/c >= μ: no net profit, ∫K diverges
        let d = DriftSpec::linear(1.0, 0.0).unwrap();
        let law = exit_q0(&d, 2.0, 1.0, &ExitQuery::new(1.0, 0.0, f64::INFINITY).unwrap()).unwrap();
        assert!(law.ruin_certain);
        assert_eq!(law.survival, 0.0);
    }

    #[test]
    fn ruin_density_integrates_to_ruin() {
        let d = canonical_drift();
        let q = ExitQuery::new(1.0, 0.0, 5.0).unwrap();
        let total = crate::quad::adaptive(
            &|u: f64| exit_q0(&d, 1.0, 1.0, &ExitQuery::new(u, 0.0, 5.0).unwrap()).unwrap().ruin_density,
            0.0,
            5.0,
            1e-10,
            1e-10,
            400,
        )
        .unwrap();
        // ∫_a^b ρ = Ψ^b(a, a)·…: the density integrates to the ruin
        // probability started from the running level; spot-check the value
        // at x by the derivative identity instead
        let law = exit_q0(&d, 1.0, 1.0, &q).unwrap();
        let h = 1e-5;
        let up = exit_q0(&d, 1.0, 1.0, &ExitQuery::new(1.0 + h, 0.0, 5.0).unwrap()).unwrap().ruin;
        let dn = exit_q0(&d, 1.0, 1.0, &ExitQuery::new(1.0 - h, 0.0, 5.0).unwrap()).unwrap().ruin;
        assert_relative_eq!(law.ruin_density, -(up - dn) / (2.0 * h), max_relative = 1e-6);
        assert!(total > 0.0 && total < 1.0);
    }

    #[test]
    fn system_matrix_structure() {
        let d = canonical_drift();
        let pt = PhaseType::exponential(1.0).unwrap();
        let sys = build_ode_system(&d, &pt, 1.0, 0.5).unwrap();
        let m0 = sys.matrix_at(0.0);
        assert_relative_eq!(m0[(0, 0)], 1.5);
        assert_relative_eq!(m0[(0, 1)], -1.0);
        assert_relative_eq!(m0[(1, 0)], 1.0);
        assert_relative_eq!(m0[(1, 1)], -1.0);
        // A-block rows do not depend on x
        let m5 = sys.matrix_at(5.0);
        assert_eq!(m0[(1, 0)], m5[(1, 0)]);
        assert_eq!(m0[(1, 1)], m5[(1, 1)]);
    }

    #[test]
    fn constant_drift_eigenvalue_is_adjustment_coefficient() {
        // q=0, c(x)=c: eigenvalues of M are 0 and -(μ - λ/c)
        let d = DriftSpec::linear(2.0, 0.0).unwrap();
        let pt = PhaseType::exponential(1.0).unwrap();
        let sys = build_ode_system(&d, &pt, 1.0, 0.0).unwrap();
        let m = sys.matrix_at(3.0);
        // 2x2 eigenvalues from trace/determinant
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert_relative_eq!(det, 0.0, epsilon = 1e-14);
        assert_relative_eq!(tr, -(1.0 - 0.5), max_relative = 1e-13);
    }

    #[test]
    fn bvp_matches_q0_closed_form() {
        let d = canonical_drift();
        let pt = PhaseType::exponential(1.0).unwrap();
        for (x, b) in [(0.0, 1.0), (0.5, 2.0), (1.0, 6.0)] {
            let q = ExitQuery::new(x, 0.0, b).unwrap();
            let (s_num, r_num) = exit_numeric(&d, &pt, 1.0, 0.0, &q).unwrap();
            let law = exit_q0(&d, 1.0, 1.0, &q).unwrap();
            assert_relative_eq!(s_num, law.survival, max_relative = 1e-8);
            assert_relative_eq!(r_num, law.ruin, max_relative = 1e-8);
        }
    }

    #[test]
    fn bvp_matches_hypergeometric_at_positive_q() {
        let d = canonical_drift();
        let pt = PhaseType::exponential(1.0).unwrap();
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 0.7).unwrap();
        for (x, b) in [(0.5, 8.0), (2.0, 8.0)] {
            let q = ExitQuery::new(x, 0.0, b).unwrap();
            let (s_num, r_num) = exit_numeric(&d, &pt, 1.0, 0.7, &q).unwrap();
            let (s_cf, r_cf) = closed_form::two_sided(&p, &q).unwrap();
            assert!((s_num - s_cf).abs() < 1e-6, "survival {s_num} vs {s_cf}");
            assert!((r_num - r_cf).abs() < 1e-6, "ruin {r_num} vs {r_cf}");
        }
    }

    #[test]
    fn bvp_tolerance_stability() {
        let d = canonical_drift();
        let pt = PhaseType::exponential(1.0).unwrap();
        let q = ExitQuery::new(1.0, 0.0, 10.0).unwrap();
        let tight = BvpOptions { rtol: 5e-11, ..Default::default() };
        let (s1, r1) = exit_numeric(&d, &pt, 1.0, 0.5, &q).unwrap();
        let (s2, r2) = exit_numeric_with(&d, &pt, 1.0, 0.5, &q, tight).unwrap();
        assert!((s1 - s2).abs() < 1e-8 && (r1 - r2).abs() < 1e-8);
    }

    #[test]
    fn bvp_rejects_infinite_barrier() {
        let d = canonical_drift();
        let pt = PhaseType::exponential(1.0).unwrap();
        assert!(exit_numeric(&d, &pt, 1.0, 0.5, &ExitQuery::new(1.0, 0.0, f64::INFINITY).unwrap()).is_err());
    }
}
