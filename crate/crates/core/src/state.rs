//! Pure states on the `d^N`-dimensional joint space.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, sin, sqrt};
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::scenario::Scenario;

/// Inputs whose norm is within this distance of 1 are silently renormalized.
pub const RENORMALIZE_WINDOW: f64 = 1e-4;

/// Normalized amplitudes in the basis `|x_1 x_2 .. x_N>`, party 1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    scenario: Scenario,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(scenario: Scenario, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != scenario.joint_outcomes() {
            return Err(Error::domain(format!(
                "state needs {} amplitudes, got {}",
                scenario.joint_outcomes(),
                amplitudes.len()
            )));
        }
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > RENORMALIZE_WINDOW {
            return Err(Error::domain(format!("state norm {n} is not within {RENORMALIZE_WINDOW} of 1")));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / n).collect();
        Ok(StateVector { scenario, amplitudes })
    }

    /// Normalizes any nonzero vector. Used for eigenvectors and random draws.
    pub fn normalized(scenario: Scenario, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0 && n.is_finite()) || amplitudes.len() != scenario.joint_outcomes() {
            return Err(Error::domain("cannot normalize state"));
        }
        Ok(StateVector { scenario, amplitudes: amplitudes.into_iter().map(|a| a / n).collect() })
    }

    /// Real coefficients on the listed basis states, e.g. `[(&[0, 0, 0], 0.7), ..]`.
    pub fn from_terms(scenario: Scenario, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut amps = vec![Complex64::zero(); scenario.joint_outcomes()];
        for (digits, c) in terms {
            if digits.len() != scenario.parties() || digits.iter().any(|&x| x >= scenario.outcomes()) {
                return Err(Error::domain(format!("basis label {digits:?} does not fit the scenario")));
            }
            amps[scenario.outcome_index(digits)] += Complex64::new(*c, 0.0);
        }
        Self::new(scenario, amps)
    }

    pub fn basis(scenario: Scenario, digits: &[usize]) -> Result<Self> {
        Self::from_terms(scenario, &[(digits, 1.0)])
    }

    /// `cos(theta)|000> + sin(theta)|111>` for three qubits.
    pub fn ghz_qubit(theta: f64) -> Self {
        let s = Scenario::new(3, 2).expect("valid");
        Self::from_terms(s, &[(&[0, 0, 0], cos(theta)), (&[1, 1, 1], sin(theta))]).expect("unit norm")
    }

    /// `sin t1 sin t2 |000> + sin t1 cos t2 |111> + cos t1 |222>`.
    pub fn ghz_qutrit(theta1: f64, theta2: f64) -> Self {
        let s = Scenario::new(3, 3).expect("valid");
        Self::from_terms(
            s,
            &[
                (&[0, 0, 0], sin(theta1) * sin(theta2)),
                (&[1, 1, 1], sin(theta1) * cos(theta2)),
                (&[2, 2, 2], cos(theta1)),
            ],
        )
        .expect("unit norm")
    }

    /// `(1/sqrt d) sum_x |x..x>`.
    pub fn ghz_max(scenario: Scenario) -> Self {
        let c = 1.0 / sqrt(scenario.outcomes() as f64);
        let mut amps = vec![Complex64::zero(); scenario.joint_outcomes()];
        let mut digits = vec![0; scenario.parties()];
        for x in 0..scenario.outcomes() {
            digits.iter_mut().for_each(|v| *v = x);
            amps[scenario.outcome_index(&digits)] = Complex64::new(c, 0.0);
        }
        StateVector { scenario, amplitudes: amps }
    }

    /// `sin b sin x |001> + sin b cos x |010> + cos b |100>`.
    pub fn w_state(beta: f64, xi: f64) -> Self {
        let s = Scenario::new(3, 2).expect("valid");
        Self::from_terms(
            s,
            &[
                (&[0, 0, 1], sin(beta) * sin(xi)),
                (&[0, 1, 0], sin(beta) * cos(xi)),
                (&[1, 0, 0], cos(beta)),
            ],
        )
        .expect("unit norm")
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Relabel parties: party `j` of the result is party `perm[j]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let s = self.scenario;
        if perm.len() != s.parties() {
            return Err(Error::domain("not a permutation of the parties"));
        }
        let mut amps = vec![Complex64::zero(); self.amplitudes.len()];
        let mut src = vec![0; s.parties()];
        let mut dst = vec![0; s.parties()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            s.outcomes_at(k, &mut src);
            for (j, &p) in perm.iter().enumerate() {
                dst[j] = src[p];
            }
            amps[s.outcome_index(&dst)] = *a;
        }
        Ok(StateVector { scenario: s, amplitudes: amps })
    }
}
