//! Phase-type claim distributions (β, B): absorption times of a transient
//! Markov chain. Dense in the distributions on (0,∞) and closed under the
//! operations the exit formulas need.
//!
//! Convention: B is a sub-generator (nonnegative off-diagonal, nonpositive
//! row sums, all phases transient), the survival function is
//! `F̄(x) = β e^{Bx} 1` and the density `f(x) = β e^{Bx} b` with
//! `b = (-B)·1`. Occasional references write the density with `e^{-Bx}`;
//! that only holds with the opposite sign convention for B, so this crate
//! consistently uses the sub-generator form.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseType {
    beta: DVector<f64>,
    b_mat: DMatrix<f64>,
    exit: DVector<f64>,
}

impl PhaseType {
    /// Validate and build a phase-type law from the initial row vector and
    /// the sub-generator (given as rows).
    pub fn new(beta: Vec<f64>, b_rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = beta.len();
        if n == 0 {
            return Err(Error::domain("PhaseType", "empty phase vector".to_string()));
        }
        if b_rows.len() != n || b_rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("PhaseType", format!("B must be {n}x{n} to match beta")));
        }
        let sum: f64 = beta.iter().sum();
        if beta.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-10 {
            return Err(Error::domain("PhaseType", format!("beta must be a probability vector (sum = {sum})")));
        }
        for (i, row) in b_rows.iter().enumerate() {
            let mut rowsum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if i != j && v < 0.0 {
                    return Err(Error::domain("PhaseType", format!("off-diagonal B[{i}][{j}] = {v} must be >= 0")));
                }
                if i == j && v >= 0.0 {
                    return Err(Error::domain("PhaseType", format!("diagonal B[{i}][{i}] = {v} must be < 0")));
                }
                rowsum += v;
            }
            if rowsum > 1e-10 {
                return Err(Error::domain("PhaseType", format!("row {i} of B sums to {rowsum} > 0")));
            }
        }
        let b_mat = DMatrix::from_fn(n, n, |i, j| b_rows[i][j]);
        if b_mat.clone().lu().try_inverse().is_none() {
            return Err(Error::domain("PhaseType", "B is singular: some phase is not transient".to_string()));
        }
        let exit = -(&b_mat * DVector::from_element(n, 1.0));
        if exit.iter().any(|&v| v < -1e-12) {
            return Err(Error::domain("PhaseType", "exit vector (-B)1 has a negative entry".to_string()));
        }
        Ok(PhaseType { beta: DVector::from_vec(beta), b_mat, exit })
    }

    /// Single exponential phase of rate mu.
    pub fn exponential(mu: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![vec![-mu]])
    }

    /// Erlang(k, mu): k sequential exponential phases.
    pub fn erlang(k: usize, mu: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("PhaseType", "Erlang needs k >= 1".to_string()));
        }
        let mut beta = vec![0.0; k];
        beta[0] = 1.0;
        let mut rows = vec![vec![0.0; k]; k];
        for i in 0..k {
            rows[i][i] = -mu;
            if i + 1 < k {
                rows[i][i + 1] = mu;
            }
        }
        Self::new(beta, rows)
    }

    pub fn n_phases(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn sub_generator(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    /// Exit rate vector b = (-B)·1.
    pub fn exit_vector(&self) -> &DVector<f64> {
        &self.exit
    }

    /// Mean claim size β(-B)^{-1}1.
    pub fn mean(&self) -> f64 {
        let inv = (-&self.b_mat).lu().solve(&DVector::from_element(self.n_phases(), 1.0)).expect("validated invertible");
        self.beta.dot(&inv)
    }

    /// e^{Bx}, by nalgebra's scaling-and-squaring Padé approximation.
    pub fn matrix_exp(&self, x: f64) -> DMatrix<f64> {
        (self.b_mat.clone() * x).exp()
    }

    /// Claim density f(x) = β e^{Bx} b, x >= 0.
    pub fn density(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain("phase_density", format!("x = {x} must be >= 0")));
        }
        Ok((self.beta.transpose() * self.matrix_exp(x) * &self.exit)[(0, 0)])
    }

    /// Survival function F̄(x) = β e^{Bx} 1.
    pub fn survival(&self, x: f64) -> f64 {
        (self.beta.transpose() * self.matrix_exp(x)).sum()
    }

    /// Laplace transform β (sI - B)^{-1} b.
    pub fn laplace_transform(&self, s: f64) -> Result<f64> {
        let n = self.n_phases();
        let m = DMatrix::identity(n, n) * s - &self.b_mat;
        let sol = m.lu().solve(&self.exit).ok_or_else(|| Error::domain("phase LT", format!("sI - B singular at s = {s}")))?;
        Ok(self.beta.dot(&sol))
    }

    /// Draw one claim by simulating the underlying chain.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.sample_with_crossing(rng, f64::INFINITY).0
    }

    /// Draw one claim; also report the phase active when the running claim
    /// depth first exceeds `depth` (None when the claim stays smaller).
    pub fn sample_with_crossing<R: Rng>(&self, rng: &mut R, depth: f64) -> (f64, Option<usize>) {
        let n = self.n_phases();
        // initial phase from beta
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut phase = n - 1;
        for i in 0..n {
            acc += self.beta[i];
            if u < acc {
                phase = i;
                break;
            }
        }
        let mut total = 0.0;
        let mut crossing = None;
        loop {
            let rate = -self.b_mat[(phase, phase)];
            let hold = -(1.0 - rng.gen::<f64>()).ln() / rate;
            if crossing.is_none() && total + hold > depth {
                crossing = Some(phase);
            }
            total += hold;
            // absorb with probability b_i / rate, else move within phases
            let v: f64 = rng.gen::<f64>() * rate;
            let mut acc = self.exit[phase];
            if v < acc {
                return (total, crossing);
            }
            let mut next = phase;
            for j in 0..n {
                if j == phase {
                    continue;
                }
                acc += self.b_mat[(phase, j)];
                if v < acc {
                    next = j;
                    break;
                }
            }
            phase = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn one_phase_is_exponential() {
        let pt = PhaseType::exponential(1.7).unwrap();
        for x in [0.0, 0.4, 2.0] {
            assert_relative_eq!(pt.density(x).unwrap(), 1.7 * (-1.7 * x).exp(), max_relative = 1e-12);
            assert_relative_eq!(pt.survival(x), (-1.7 * x).exp(), max_relative = 1e-12);
        }
        assert_relative_eq!(pt.mean(), 1.0 / 1.7, max_relative = 1e-13);
    }

    #[test]
    fn erlang_density() {
        // Erlang(2, mu): density mu^2 x e^{-mu x}; at x=1, mu=1: e^{-1}
        let pt = PhaseType::erlang(2, 1.0).unwrap();
        assert_relative_eq!(pt.density(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-11);
        assert_relative_eq!(pt.density(0.5).unwrap(), 0.5 * (-0.5f64).exp(), max_relative = 1e-11);
    }

    #[test]
    fn transform_total_mass() {
        let pt = PhaseType::erlang(3, 2.0).unwrap();
        assert_relative_eq!(pt.laplace_transform(0.0).unwrap(), 1.0, max_relative = 1e-12);
        // Erlang LT = (mu/(s+mu))^k
        assert_relative_eq!(pt.laplace_transform(1.0).unwrap(), (2.0f64 / 3.0).powi(3), max_relative = 1e-12);
    }

    #[test]
    fn density_integrates_to_one() {
        let pt = PhaseType::new(vec![0.4, 0.6], vec![vec![-2.0, 0.5], vec![0.3, -1.0]]).unwrap();
        let total = crate::quad::adaptive(&|x: f64| pt.density(x).unwrap(), 0.0, 80.0, 1e-11, 1e-11, 2000).unwrap();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PhaseType::new(vec![0.5, 0.4], vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).is_err()); // beta sum
        assert!(PhaseType::new(vec![1.0], vec![vec![1.0]]).is_err()); // positive diagonal
        assert!(PhaseType::new(vec![0.5, 0.5], vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).is_err()); // singular
    }

    #[test]
    fn sampling_matches_mean() {
        let pt = PhaseType::erlang(2, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| pt.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - pt.mean()).abs() < 0.01, "sampled mean {mean} vs {}", pt.mean());
    }

    #[test]
    fn crossing_phase_is_consistent() {
        let pt = PhaseType::erlang(2, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let depth = 0.8;
            let (total, crossing) = pt.sample_with_crossing(&mut rng, depth);
            match crossing {
                Some(k) => {
                    assert!(total > depth);
                    assert!(k < 2);
                }
                None => assert!(total <= depth),
            }
        }
    }
}
