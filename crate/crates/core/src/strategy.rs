//! Deterministic local strategies: one fixed outcome per (party, setting).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::expression::BellExpression;
use crate::scenario::{Rational, Scenario, Setting};
use crate::table::ProbabilityTable;

/// Upper limit on `d^{2N}` accepted by the enumerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget(pub u64);

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget(100_000_000)
    }
}

impl EnumerationBudget {
    /// Number of strategies `d^{2N}`, or a resource error if over budget.
    pub fn check(self, scenario: &Scenario) -> Result<u64> {
        let count = (scenario.outcomes() as u128).checked_pow(2 * scenario.parties() as u32);
        match count {
            Some(c) if c <= self.0 as u128 => Ok(c as u64),
            Some(c) => Err(Error::Resource { count: c, budget: self.0 }),
            None => Err(Error::Resource { count: u128::MAX, budget: self.0 }),
        }
    }
}

/// Outcome assignment stored at position `2 (party - 1) + (setting - 1)`;
/// the strategy index reads these positions as base-`d` digits, position 0
/// least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    scenario: Scenario,
    assignment: Vec<u16>,
}

impl DeterministicStrategy {
    pub fn from_index(scenario: Scenario, index: u64) -> Result<Self> {
        let count = EnumerationBudget(u64::MAX).check(&scenario)?;
        if index >= count {
            return Err(Error::domain(format!("strategy index {index} outside [0, {count})")));
        }
        let d = scenario.outcomes() as u64;
        let mut rest = index;
        let assignment = (0..2 * scenario.parties())
            .map(|_| {
                let digit = (rest % d) as u16;
                rest /= d;
                digit
            })
            .collect();
        Ok(DeterministicStrategy { scenario, assignment })
    }

    /// `outcomes[party][setting - 1]`, parties 0-based.
    pub fn from_outcomes(scenario: Scenario, outcomes: &[[usize; 2]]) -> Result<Self> {
        if outcomes.len() != scenario.parties() {
            return Err(Error::domain("one outcome pair per party required"));
        }
        let mut assignment = Vec::with_capacity(2 * outcomes.len());
        for pair in outcomes {
            for &x in pair {
                if x >= scenario.outcomes() {
                    return Err(Error::domain(format!("outcome {x} outside [0, {})", scenario.outcomes())));
                }
                assignment.push(x as u16);
            }
        }
        Ok(DeterministicStrategy { scenario, assignment })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn index(&self) -> u64 {
        let d = self.scenario.outcomes() as u64;
        self.assignment.iter().rev().fold(0, |acc, &a| acc * d + a as u64)
    }

    /// Outcome of a 0-based party for a setting.
    pub fn outcome(&self, party: usize, setting: Setting) -> usize {
        self.assignment[2 * party + setting.offset()] as usize
    }

    pub fn assignment(&self) -> &[u16] {
        &self.assignment
    }

    /// Probability 1 on the dictated outcome of every block.
    pub fn table(&self) -> ProbabilityTable<Rational> {
        let s = self.scenario;
        let block_len = s.joint_outcomes();
        let mut data = vec![Rational::from_integer(0); block_len * s.settings_tuples()];
        let mut xs = vec![0; s.parties()];
        for b in 0..s.settings_tuples() {
            let settings = s.settings_at(b);
            for (j, x) in xs.iter_mut().enumerate() {
                *x = self.outcome(j, settings[j]);
            }
            data[b * block_len + s.outcome_index(&xs)] = Rational::from_integer(1);
        }
        ProbabilityTable::from_raw(s, data)
    }

    /// `(d - 1) I` evaluated directly on the assignment.
    pub fn value_numerator(&self, expression: &BellExpression) -> i64 {
        value_numerator(&self.assignment, expression)
    }

    /// Bell value of the strategy without materializing its table.
    pub fn value(&self, expression: &BellExpression) -> Rational {
        Rational::new(self.value_numerator(expression), self.scenario.outcomes() as i64 - 1)
    }

    /// Collins–Gisin coordinates: tensor product over parties of
    /// `[1, P(0|1), .., P(d-2|1), P(0|2), .., P(d-2|2)]`, party 1 most significant.
    pub fn cg_vector(&self) -> Vec<i64> {
        let d = self.scenario.outcomes();
        let mut out = vec![1i64];
        for j in 0..self.scenario.parties() {
            let local = party_cg_vector(self.outcome(j, Setting::First), self.outcome(j, Setting::Second), d);
            out = out.iter().flat_map(|&a| local.iter().map(move |&b| a * b)).collect();
        }
        out
    }
}

/// Per-party Collins–Gisin block for outcomes `(a, b)` on settings `(1, 2)`.
pub fn party_cg_vector(a: usize, b: usize, d: usize) -> Vec<i64> {
    let mut v = vec![0i64; 2 * d - 1];
    v[0] = 1;
    if a < d - 1 {
        v[1 + a] = 1;
    }
    if b < d - 1 {
        v[d + b] = 1;
    }
    v
}

pub(crate) fn value_numerator(assignment: &[u16], expression: &BellExpression) -> i64 {
    let d = expression.scenario().outcomes();
    expression
        .terms()
        .iter()
        .map(|t| {
            let sum: i64 = t
                .settings
                .iter()
                .enumerate()
                .map(|(j, s)| assignment[2 * j + s.offset()] as i64)
                .sum();
            t.sign * t.weight_numerator(sum, d)
        })
        .sum()
}

/// Strategies with indices in `range`, in index order.
#[derive(Debug, Clone)]
pub struct StrategyRange {
    scenario: Scenario,
    digits: Vec<u16>,
    next: u64,
    end: u64,
    started: bool,
}

impl StrategyRange {
    pub fn new(scenario: Scenario, budget: EnumerationBudget, range: Range<u64>) -> Result<Self> {
        let count = budget.check(&scenario)?;
        let end = range.end.min(count);
        let start = range.start.min(end);
        let digits = if start < count {
            DeterministicStrategy::from_index(scenario, start)?.assignment
        } else {
            vec![0; 2 * scenario.parties()]
        };
        Ok(StrategyRange { scenario, digits, next: start, end, started: false })
    }

    /// Advance and return the raw assignment of the next strategy with its index.
    pub fn next_assignment(&mut self) -> Option<(u64, &[u16])> {
        if self.next >= self.end {
            return None;
        }
        if self.started {
            let d = self.scenario.outcomes() as u16;
            for digit in self.digits.iter_mut() {
                *digit += 1;
                if *digit < d {
                    break;
                }
                *digit = 0;
            }
        }
        self.started = true;
        let index = self.next;
        self.next += 1;
        Some((index, &self.digits))
    }
}

impl Iterator for StrategyRange {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        let scenario = self.scenario;
        self.next_assignment()
            .map(|(_, digits)| DeterministicStrategy { scenario, assignment: digits.to_vec() })
    }
}

/// All `d^{2N}` strategies in index order.
pub fn enumerate_strategies(scenario: Scenario, budget: EnumerationBudget) -> Result<StrategyRange> {
    StrategyRange::new(scenario, budget, 0..u64::MAX)
}
