//! Multiport beamsplitter measurements and the probabilities they produce.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use libm::sqrt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expression::BellExpression;
use crate::linalg::{apply_local, CMatrix};
use crate::scenario::{weight_numerator, Scenario, Setting};
use crate::state::StateVector;
use crate::table::ProbabilityTable;

/// `U_kl = alpha^{kl} e^{i phi_l} / sqrt(d)` with `alpha = e^{2 pi i/d}`;
/// row `k` is the outcome, column `l` the input basis state.
pub fn beamsplitter_unitary(phases: &[f64], d: usize) -> Result<CMatrix> {
    if phases.len() != d || d < 2 {
        return Err(Error::domain(format!("beamsplitter for d={d} needs {d} phases, got {}", phases.len())));
    }
    let scale = 1.0 / sqrt(d as f64);
    Ok(CMatrix::from_fn(d, |k, l| {
        let angle = TAU * ((k * l) % d) as f64 / d as f64 + phases[l];
        Complex64::from_polar(scale, angle)
    }))
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = libm::fmod(x, TAU);
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// One phase vector per (party, setting), stored at `2 party + (setting - 1)`.
///
/// Vectors are kept in the gauge `phi^0 = 0`; a common shift of a whole
/// vector only multiplies the beamsplitter by a global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfiguration {
    scenario: Scenario,
    vectors: Vec<Vec<f64>>,
}

impl PhaseConfiguration {
    /// `vectors[2 party + setting offset]`, each of length `d`; shifted to `phi^0 = 0`.
    pub fn new(scenario: Scenario, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.len() != 2 * scenario.parties() {
            return Err(Error::domain(format!(
                "need {} phase vectors, got {}",
                2 * scenario.parties(),
                vectors.len()
            )));
        }
        let mut out = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != scenario.outcomes() {
                return Err(Error::domain(format!(
                    "phase vector has {} entries, expected {}",
                    v.len(),
                    scenario.outcomes()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("phases must be finite"));
            }
            let base = v[0];
            out.push(v.into_iter().map(|x| x - base).collect());
        }
        Ok(PhaseConfiguration { scenario, vectors: out })
    }

    pub fn zeros(scenario: Scenario) -> Self {
        PhaseConfiguration { scenario, vectors: vec![vec![0.0; scenario.outcomes()]; 2 * scenario.parties()] }
    }

    /// Build from the `2N(d-1)` free phases `phi^1..phi^{d-1}` of every vector.
    pub fn from_free(scenario: Scenario, free: &[f64]) -> Result<Self> {
        let per = scenario.outcomes() - 1;
        if free.len() != 2 * scenario.parties() * per {
            return Err(Error::domain("wrong number of free phases"));
        }
        let vectors = free
            .chunks(per)
            .map(|c| core::iter::once(0.0).chain(c.iter().copied()).collect())
            .collect();
        Ok(PhaseConfiguration { scenario, vectors })
    }

    pub fn free_parameters(&self) -> Vec<f64> {
        self.vectors.iter().flat_map(|v| v[1..].iter().copied()).collect()
    }

    pub fn free_len(scenario: &Scenario) -> usize {
        2 * scenario.parties() * (scenario.outcomes() - 1)
    }

    /// Same configuration with every phase wrapped into `(-pi, pi]`.
    pub fn wrapped(&self) -> Self {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|&x| wrap_angle(x)).collect()).collect();
        PhaseConfiguration { scenario: self.scenario, vectors }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Phase vector of a 0-based party.
    pub fn vector(&self, party: usize, setting: Setting) -> &[f64] {
        &self.vectors[2 * party + setting.offset()]
    }

    /// Beamsplitters for every (party, setting), same layout as the vectors.
    pub fn unitaries(&self) -> Vec<CMatrix> {
        self.vectors
            .iter()
            .map(|v| beamsplitter_unitary(v, self.scenario.outcomes()).expect("validated length"))
            .collect()
    }

    /// Relabel parties: party `j` of the result is party `perm[j]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.scenario.parties() || perm.iter().any(|&p| p >= perm.len()) {
            return Err(Error::domain("not a permutation of the parties"));
        }
        let vectors = perm.iter().flat_map(|&p| [self.vectors[2 * p].clone(), self.vectors[2 * p + 1].clone()]).collect();
        Ok(PhaseConfiguration { scenario: self.scenario, vectors })
    }
}

/// Outcome probabilities of one settings tuple for explicit local unitaries.
pub fn block_probabilities_with(state: &StateVector, locals: &[&CMatrix]) -> Vec<f64> {
    let parties = state.scenario().parties();
    let mut amps = state.amplitudes().to_vec();
    for (j, u) in locals.iter().enumerate() {
        amps = apply_local(&amps, u, parties, j);
    }
    amps.iter().map(|z| z.norm_sqr()).collect()
}

fn block(state: &StateVector, unitaries: &[CMatrix], settings: &[Setting]) -> Vec<f64> {
    let locals: Vec<&CMatrix> = settings.iter().enumerate().map(|(j, s)| &unitaries[2 * j + s.offset()]).collect();
    block_probabilities_with(state, &locals)
}

fn check_scenarios(a: &Scenario, b: &Scenario) -> Result<()> {
    if a != b {
        return Err(Error::domain(format!(
            "scenario mismatch: N={}, d={} vs N={}, d={}",
            a.parties(),
            a.outcomes(),
            b.parties(),
            b.outcomes()
        )));
    }
    Ok(())
}

/// `P(x | settings) = |<x| (x)_j U(phi_{j, i_j}) |psi>|^2` for all `2^N` tuples.
pub fn joint_probabilities(state: &StateVector, config: &PhaseConfiguration) -> Result<ProbabilityTable<f64>> {
    check_scenarios(state.scenario(), config.scenario())?;
    let s = *state.scenario();
    let unitaries = config.unitaries();
    let mut data = Vec::with_capacity(s.joint_outcomes() * s.settings_tuples());
    for b in 0..s.settings_tuples() {
        data.extend(block(state, &unitaries, &s.settings_at(b)));
    }
    Ok(ProbabilityTable::from_raw(s, data))
}

/// Normalized weights `f/S` of each term, indexed by joint outcome.
#[derive(Debug, Clone)]
pub struct TermWeights {
    pub settings: Vec<Setting>,
    pub sign: f64,
    pub weights: Vec<f64>,
}

/// Precomputed per-term weights of an expression.
pub fn term_weights(expression: &BellExpression) -> Vec<TermWeights> {
    let s = expression.scenario();
    let d = s.outcomes();
    let mut xs = vec![0; s.parties()];
    expression
        .terms()
        .iter()
        .map(|t| {
            let weights = (0..s.joint_outcomes())
                .map(|idx| {
                    s.outcomes_at(idx, &mut xs);
                    let sum: i64 = xs.iter().map(|&x| x as i64).sum();
                    weight_numerator(t.sum_sign * sum, d) as f64 / (d - 1) as f64
                })
                .collect();
            TermWeights { settings: t.settings.clone(), sign: t.sign as f64, weights }
        })
        .collect()
}

/// Evaluates the quantum Bell value of many configurations for one expression.
#[derive(Debug, Clone)]
pub struct QuantumEvaluator {
    scenario: Scenario,
    terms: Vec<TermWeights>,
}

impl QuantumEvaluator {
    pub fn new(expression: &BellExpression) -> Self {
        QuantumEvaluator { scenario: *expression.scenario(), terms: term_weights(expression) }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Only the blocks the expression uses are computed.
    pub fn value(&self, state: &StateVector, config: &PhaseConfiguration) -> Result<f64> {
        check_scenarios(state.scenario(), &self.scenario)?;
        check_scenarios(config.scenario(), &self.scenario)?;
        Ok(self.value_unchecked(state, &config.unitaries()))
    }

    pub(crate) fn value_unchecked(&self, state: &StateVector, unitaries: &[CMatrix]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let p = block(state, unitaries, &t.settings);
                t.sign * p.iter().zip(&t.weights).map(|(p, w)| p * w).sum::<f64>()
            })
            .sum()
    }
}

/// `bell_value(expression, joint_probabilities(state, config))`.
pub fn quantum_bell_value(state: &StateVector, config: &PhaseConfiguration, expression: &BellExpression) -> Result<f64> {
    QuantumEvaluator::new(expression).value(state, config)
}
