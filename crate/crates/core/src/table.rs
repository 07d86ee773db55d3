//! Joint outcome probabilities, one block of `d^N` entries per settings tuple.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scenario::{Rational, Scenario, Setting};

/// Scalar a probability table can hold: exact rationals for deterministic
/// strategies, `f64` for quantum predictions.
pub trait Probability:
    Copy + Debug + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn scale(self, k: i64) -> Self;
    fn div_int(self, k: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Entry is a valid probability (allowing numerical slack for floats).
    fn admissible(self) -> bool;
    /// A block sum is 1 (within slack for floats).
    fn is_unit(self) -> bool;
}

/// Negative entries down to `-NEGATIVE_SLACK` are accepted in float tables.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Allowed deviation of a float block sum from 1.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

impl Probability for f64 {
    fn scale(self, k: i64) -> Self {
        self * k as f64
    }
    fn div_int(self, k: i64) -> Self {
        self / k as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn admissible(self) -> bool {
        self.is_finite() && self >= -NEGATIVE_SLACK
    }
    fn is_unit(self) -> bool {
        (self - 1.0).abs() <= NORMALIZATION_SLACK
    }
}

impl Probability for Rational {
    fn scale(self, k: i64) -> Self {
        self * Rational::from_integer(k)
    }
    fn div_int(self, k: i64) -> Self {
        self / Rational::from_integer(k)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn admissible(self) -> bool {
        self >= Rational::zero()
    }
    fn is_unit(self) -> bool {
        self.is_one()
    }
}

/// Dense table: blocks in settings order (party 1 most significant, first
/// setting = 0), entries within a block in mixed-radix outcome order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable<P> {
    scenario: Scenario,
    data: Vec<P>,
}

impl<P: Probability> ProbabilityTable<P> {
    /// Validates non-negativity and per-block normalization.
    pub fn from_data(scenario: Scenario, data: Vec<P>) -> Result<Self> {
        let block_len = scenario.joint_outcomes();
        let expected = block_len * scenario.settings_tuples();
        if data.len() != expected {
            return Err(Error::domain(format!("table needs {expected} entries, got {}", data.len())));
        }
        for (b, block) in data.chunks(block_len).enumerate() {
            if let Some(p) = block.iter().find(|p| !p.admissible()) {
                return Err(Error::domain(format!("block {b} has inadmissible entry {p:?}")));
            }
            let sum = block.iter().fold(P::zero(), |acc, &p| acc + p);
            if !sum.is_unit() {
                return Err(Error::domain(format!("block {b} sums to {sum:?}")));
            }
        }
        Ok(ProbabilityTable { scenario, data })
    }

    /// Every outcome tuple equally likely, `1/d^N`.
    pub fn uniform(scenario: Scenario) -> Self {
        let n = scenario.joint_outcomes();
        let p = P::from_ratio(1, n as i64);
        ProbabilityTable { scenario, data: vec![p; n * scenario.settings_tuples()] }
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &Self, weight: P) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::domain("cannot mix tables of different scenarios"));
        }
        let rest = P::one() - weight;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| weight * a + rest * b).collect();
        Ok(ProbabilityTable { scenario: self.scenario, data })
    }
}

impl<P> ProbabilityTable<P> {
    pub(crate) fn from_raw(scenario: Scenario, data: Vec<P>) -> Self {
        debug_assert_eq!(data.len(), scenario.joint_outcomes() * scenario.settings_tuples());
        ProbabilityTable { scenario, data }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn block(&self, settings: &[Setting]) -> Result<&[P]> {
        let b = self.scenario.block_index(settings)?;
        Ok(self.block_at(b))
    }

    pub fn block_at(&self, block: usize) -> &[P] {
        let n = self.scenario.joint_outcomes();
        &self.data[block * n..(block + 1) * n]
    }

    pub fn as_slice(&self) -> &[P] {
        &self.data
    }

    /// `(settings, outcomes, probability)` rows in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<Setting>, Vec<usize>, &P)> + '_ {
        let n = self.scenario.joint_outcomes();
        self.data.iter().enumerate().map(move |(k, p)| {
            let mut xs = vec![0; self.scenario.parties()];
            self.scenario.outcomes_at(k % n, &mut xs);
            (self.scenario.settings_at(k / n), xs, p)
        })
    }
}

impl ProbabilityTable<Rational> {
    pub fn to_f64(&self) -> ProbabilityTable<f64> {
        let data = self.data.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        ProbabilityTable { scenario: self.scenario, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::{BellExpression, Family};

    #[test]
    fn rejects_unnormalized_blocks() {
        let s = Scenario::new(2, 2).unwrap();
        let mut data = vec![0.25f64; 16];
        assert!(ProbabilityTable::from_data(s, data.clone()).is_ok());
        data[3] = 0.3;
        assert!(ProbabilityTable::from_data(s, data.clone()).is_err());
        data[3] = 0.25;
        data[0] = 0.25 + 1e-13;
        data[1] = 0.25 - 1e-13;
        assert!(ProbabilityTable::from_data(s, data.clone()).is_ok());
        data[0] = -1e-6;
        data[1] = 0.5 + 1e-6;
        assert!(ProbabilityTable::from_data(s, data).is_err());
        assert!(ProbabilityTable::<f64>::from_data(s, vec![0.25; 15]).is_err());
    }

    #[test]
    fn uniform_correlations_vanish_exactly() {
        for n in 2..=5usize {
            for d in 2..=7usize {
                let s = Scenario::new(n, d).unwrap();
                if s.joint_outcomes() > 20_000 {
                    continue;
                }
                let e = BellExpression::new(s, Family::Multipartite).unwrap();
                let t = ProbabilityTable::<Rational>::uniform(s);
                for b in 0..s.settings_tuples() {
                    assert_eq!(e.correlation(&t, &s.settings_at(b)).unwrap(), Rational::zero(), "N={n} d={d}");
                }
                assert_eq!(e.bell_value(&t).unwrap(), Rational::zero());
            }
        }
    }

    #[test]
    fn correlation_rejects_foreign_table() {
        let e = BellExpression::new(Scenario::new(3, 2).unwrap(), Family::Multipartite).unwrap();
        let t = ProbabilityTable::<f64>::uniform(Scenario::new(3, 3).unwrap());
        assert!(e.bell_value(&t).is_err());
        let t = ProbabilityTable::<f64>::uniform(Scenario::new(3, 2).unwrap());
        assert!(e.correlation(&t, &[Setting::First]).is_err());
    }

    #[test]
    fn rows_follow_storage_order() {
        let s = Scenario::new(2, 3).unwrap();
        let t = ProbabilityTable::<f64>::uniform(s);
        let rows: Vec<_> = t.rows().collect();
        assert_eq!(rows.len(), 36);
        assert_eq!(rows[0].0, vec![Setting::First, Setting::First]);
        assert_eq!(rows[5].1, vec![1, 2]);
        assert_eq!(rows[9].0, vec![Setting::First, Setting::Second]);
    }
}
