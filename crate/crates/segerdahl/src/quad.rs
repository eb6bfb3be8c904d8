//! Adaptive quadrature kernels used throughout the crate.
//!
//! Three layers:
//! * a single Gauss-Kronrod G7/K15 panel,
//! * worst-panel-first adaptive refinement on a finite interval,
//! * [`tail_power_integral`], the half-line kernel
//!   `∫_s^∞ t^p e^{-αt} (1+t/β)^γ dt` shared by the Tricomi-U integral
//!   representation and the integrating-factor antiderivatives. The
//!   integrable endpoint singularity (`p ∈ (-1,0)`) is summed analytically
//!   on a short head interval and the exponential tail beyond the adaptive
//!   range is bounded and added in closed form.

use crate::error::{Error, Result};

// Kronrod-15 abscissae on [-1, 1] (symmetric; only the non-negative half stored).
const XK: [f64; 8] = [
    0.000000000000000000000000000000000e0,
    2.077849550078984676006894037732449e-1,
    4.058451513773971669066064120769615e-1,
    5.860872354676911302941448382587296e-1,
    7.415311855993944398638647732807884e-1,
    8.648644233597690727897127886409262e-1,
    9.491079123427585245261896840478513e-1,
    9.914553711208126392068546975263285e-1,
];
// Kronrod-15 weights matching `XK`.
const WK: [f64; 8] = [
    2.094821410847278280129991748917143e-1,
    2.044329400752988924141619992346491e-1,
    1.903505780647854099132564024210137e-1,
    1.690047266392679028265834265985503e-1,
    1.406532597155259187451895905102379e-1,
    1.047900103222501838398763225415180e-1,
    6.309209262997855329070066318920429e-2,
    2.293532201052922496373200805896959e-2,
];
// Gauss-7 weights for the odd Kronrod abscissae (XK[0], XK[2], XK[4], XK[6]).
const WG: [f64; 4] = [
    4.179591836734693877551020408163265e-1,
    3.818300505051189449503697754889751e-1,
    2.797053914892766679014677714237796e-1,
    1.294849661688696932706114326790820e-1,
];

/// One G7/K15 panel over [a, b]: returns (K15 value, |K15 - G7| error gauge).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let hal = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut res_k = WK[0] * fc;
    let mut res_g = WG[0] * fc;
    for j in 1..8 {
        let dx = hal * XK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        res_k += WK[j] * fsum;
        if j % 2 == 0 {
            res_g += WG[j / 2] * fsum;
        }
    }
    let value = res_k * hal;
    let err = ((res_k - res_g) * hal).abs();
    (value, err)
}

/// Adaptive G7/K15 on a finite interval, refining the worst panel first.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Panel(f64, f64, f64, f64); // lo, hi, value, err
    impl PartialEq for Panel {
        fn eq(&self, o: &Self) -> bool {
            self.3 == o.3
        }
    }
    impl Eq for Panel {}
    impl PartialOrd for Panel {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Panel {
        fn cmp(&self, o: &Self) -> Ordering {
            self.3.partial_cmp(&o.3).unwrap_or(Ordering::Equal)
        }
    }

    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel(a, b, v, e));
    let mut total_v = v;
    let mut total_e = e;
    let mut n = 1usize;
    while total_e > tol_abs.max(tol_rel * total_v.abs()) {
        let Panel(lo, hi, pv, pe) = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        // A panel narrower than a few ulps cannot be refined further.
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            total_e -= pe; // accept as is
            continue;
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        total_v += v1 + v2 - pv;
        total_e += e1 + e2 - pe;
        heap.push(Panel(lo, mid, v1, e1));
        heap.push(Panel(mid, hi, v2, e2));
        n += 1;
        if n > max_panels {
            return Err(Error::QuadratureFailure { lo: a, hi: b, err: total_e });
        }
    }
    Ok(total_v)
}

/// Adaptive Simpson with absolute tolerance, recursion by explicit stack.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    let mut stack = Vec::new();
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    stack.push((a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol));
    let mut total = 0.0;
    let mut work = 0usize;
    while let Some((a, b, fa, fm, fb, whole, tol)) = stack.pop() {
        work += 1;
        if work > 2_000_000 {
            return Err(Error::QuadratureFailure { lo: a, hi: b, err: tol });
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (a.abs() + b.abs() + 1.0) {
            total += left + right + delta / 15.0;
        } else {
            stack.push((a, m, fa, flm, fm, left, 0.5 * tol));
            stack.push((m, b, fm, frm, fb, right, 0.5 * tol));
        }
    }
    Ok(total)
}

/// `∫_s^∞ t^p e^{-αt} (1+t/β)^γ dt` with `α > 0`, `β > 0`.
///
/// Requires `p > -1` when the lower limit touches 0; a negative lower limit
/// (down to `-β`, exclusive) is accepted only for `p = 0`, which is the case
/// needed by damped transform evaluation.
pub fn tail_power_integral(p: f64, alpha: f64, beta: f64, gam: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::domain("tail_power_integral", format!("need alpha>0, beta>0 (got {alpha}, {beta})")));
    }
    if s < 0.0 && p != 0.0 {
        return Err(Error::domain("tail_power_integral", format!("negative lower limit {s} only allowed for p=0")));
    }
    if s <= -beta {
        return Err(Error::domain("tail_power_integral", format!("lower limit {s} at or below -beta={}", -beta)));
    }
    if s <= 0.0 && p <= -1.0 {
        return Err(Error::domain("tail_power_integral", format!("p={p} not integrable at 0")));
    }

    let f = |t: f64| t.powf(p) * (-alpha * t).exp() * (1.0 + t / beta).powf(gam);

    // Head [s, eps]: analytic term-by-term integration of the product series
    // of e^{-αt} and (1+t/β)^γ. Handles the t^p endpoint singularity exactly.
    let eps_head = (0.25 / alpha.max(1.0)).min(0.25 * beta).min(0.25);
    let mut total = 0.0;
    let mut lo = s.max(0.0);
    if s >= 0.0 && s < eps_head {
        let mut exp_c = [0.0f64; 48];
        let mut bin_c = [0.0f64; 48];
        exp_c[0] = 1.0;
        bin_c[0] = 1.0;
        for k in 1..48 {
            exp_c[k] = exp_c[k - 1] * (-alpha) / k as f64;
            bin_c[k] = bin_c[k - 1] * (gam - (k as f64 - 1.0)) / (k as f64 * beta);
        }
        let mut head = 0.0;
        for k in 0..48 {
            let mut ck = 0.0;
            for i in 0..=k {
                ck += exp_c[i] * bin_c[k - i];
            }
            let pk = p + k as f64 + 1.0;
            let term = ck * (eps_head.powf(pk) - s.powf(pk)) / pk;
            head += term;
            if k > 4 && term.abs() < 1e-17 * head.abs().max(1e-300) {
                break;
            }
        }
        total += head;
        lo = eps_head;
    } else if s < 0.0 {
        // p = 0 here; the integrand is smooth on (s, 0], integrate it directly.
        total += adaptive(&f, s, eps_head.min(1.0), 0.0, 1e-14, 4000)?;
        lo = eps_head.min(1.0);
    }

    // Locate the integrand's interior maximum to pace the sweep.
    let qb = p + gam - alpha * beta;
    let disc = qb * qb + 4.0 * alpha * p.max(0.0) * beta;
    let t_peak = if disc >= 0.0 { ((qb + disc.sqrt()) / (2.0 * alpha)).max(lo) } else { lo };

    // Sweep [lo, T] in doubling segments until both the latest segment and
    // the analytic tail bound are negligible against the running total.
    let mut hi = (t_peak + 8.0 / alpha).max(2.0 * lo.max(eps_head));
    let mut guard = 0;
    loop {
        total += adaptive(&f, lo, hi, 1e-300, 5e-15, 4000)?;
        let ftail = f(hi);
        // For αt well past the peak the integrand is dominated by e^{-αt},
        // so the remaining mass is at most ~ f(T)/α times a small factor.
        let slack = (p.abs() + gam.abs()) / (alpha * hi);
        let bound = if slack < 0.5 { ftail / alpha / (1.0 - slack) } else { f64::INFINITY };
        if bound < 1e-16 * total.abs().max(1e-300) {
            total += ftail / alpha; // closed-form remainder estimate
            break;
        }
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 80 {
            return Err(Error::QuadratureFailure { lo: s, hi, err: bound });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_polynomial_exact() {
        let v = adaptive(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-14, 1e-14, 100).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn simpson_smooth() {
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 - (-30.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn tail_integral_pure_exponential() {
        // ∫_0^∞ e^{-2t} dt = 1/2
        let v = tail_power_integral(0.0, 2.0, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-13);
    }

    #[test]
    fn tail_integral_singular_head() {
        // ∫_0^∞ t^{-1/2} e^{-t} dt = Γ(1/2) = √π
        let v = tail_power_integral(-0.5, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn tail_integral_binomial_weight() {
        // ∫_0^∞ e^{-y}(1+y) dy = 2 and from s=1: e^{-1}(2+1) = 3/e
        let v0 = tail_power_integral(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let v1 = tail_power_integral(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v0, 2.0, max_relative = 1e-13);
        assert_relative_eq!(v1, 3.0 * (-1.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn tail_integral_negative_lower_limit() {
        // p=0: ∫_{-1/2}^∞ e^{-y}(1+y) dy = e^{1/2}(2 - 1/2)
        let v = tail_power_integral(0.0, 1.0, 1.0, 1.0, -0.5).unwrap();
        assert_relative_eq!(v, 1.5 * (0.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn tail_integral_large_shift() {
        // large lower limit: ∫_s^∞ e^{-y}(1+y) dy = e^{-s}(2+s) at s=96
        let v = tail_power_integral(0.0, 1.0, 1.0, 1.0, 96.0).unwrap();
        assert_relative_eq!(v, (-96.0f64).exp() * 98.0, max_relative = 1e-12);
    }

    #[test]
    fn tail_integral_rejects_bad_domain() {
        assert!(tail_power_integral(-1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(tail_power_integral(0.5, 1.0, 1.0, 0.0, -0.1).is_err());
        assert!(tail_power_integral(0.0, -1.0, 1.0, 0.0, 0.0).is_err());
    }
}
