//! Exact classical maxima and facet certification over the local polytope.
//!
//! A scan over a contiguous range of strategy indices produces a
//! [`PolytopeScan`]; scans of adjacent ranges merge associatively, so callers
//! may partition the enumeration however they like and still get identical
//! reports.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::expression::{BellExpression, Family};
use crate::rank::IncrementalBasis;
use crate::scenario::Rational;
use crate::strategy::{value_numerator, DeterministicStrategy, EnumerationBudget, StrategyRange};

/// Maximum over all deterministic strategies with the full value spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSummary {
    pub max: Rational,
    /// Lowest-index strategy attaining the maximum.
    pub argmax: DeterministicStrategy,
    /// Exact value in lowest terms -> number of strategies attaining it.
    pub histogram: BTreeMap<Rational, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetReport {
    pub parties: usize,
    pub outcomes: usize,
    pub family: Family,
    /// `(2d - 1)^N - 1`.
    pub dimension: usize,
    pub classical_max: Rational,
    pub saturating_count: u64,
    pub affine_rank: usize,
    pub is_facet: bool,
}

/// Partial result over a range of strategy indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeScan {
    range: Range<u64>,
    denominator: i64,
    /// Counts indexed by `(d - 1) I + 4 (d - 1)`.
    counts: Vec<u64>,
    best: Option<(i64, u64)>,
    target: Option<i64>,
    saturating: Vec<u64>,
}

impl PolytopeScan {
    /// Scan strategies with indices in `range` (clamped to `[0, d^{2N})`).
    pub fn scan(expression: &BellExpression, budget: EnumerationBudget, range: Range<u64>) -> Result<Self> {
        let scenario = *expression.scenario();
        let denominator = scenario.outcomes() as i64 - 1;
        let bound = expression.bound() * Rational::from_integer(denominator);
        let target = bound.is_integer().then(|| bound.to_integer());
        let offset = 4 * denominator;
        let mut counts = vec![0u64; (2 * offset + 1) as usize];
        let mut best: Option<(i64, u64)> = None;
        let mut saturating = Vec::new();

        let mut strategies = StrategyRange::new(scenario, budget, range.clone())?;
        let mut clamped = range.start..range.start;
        while let Some((index, assignment)) = strategies.next_assignment() {
            if clamped.is_empty() {
                clamped.start = index;
            }
            clamped.end = index + 1;
            let value = value_numerator(assignment, expression);
            counts[(value + offset) as usize] += 1;
            if best.map_or(true, |(v, _)| value > v) {
                best = Some((value, index));
            }
            if Some(value) == target {
                saturating.push(index);
            }
        }
        Ok(PolytopeScan { range: clamped, denominator, counts, best, target, saturating })
    }

    /// Combine with the scan of the range immediately following this one.
    pub fn merge(mut self, next: PolytopeScan) -> Result<Self> {
        if self.denominator != next.denominator || self.target != next.target {
            return Err(Error::domain("scans of different expressions cannot be merged"));
        }
        if !self.range.is_empty() && !next.range.is_empty() && self.range.end != next.range.start {
            return Err(Error::domain("scans must cover adjacent index ranges"));
        }
        for (a, b) in self.counts.iter_mut().zip(&next.counts) {
            *a += b;
        }
        self.best = match (self.best, next.best) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        self.saturating.extend(next.saturating);
        self.range = match (self.range.is_empty(), next.range.is_empty()) {
            (true, _) => next.range,
            (false, true) => self.range,
            (false, false) => self.range.start..next.range.end,
        };
        Ok(self)
    }

    pub fn saturating(&self) -> &[u64] {
        &self.saturating
    }

    pub fn summary(&self, expression: &BellExpression) -> Result<ClassicalSummary> {
        let (best, index) = self.best.ok_or_else(|| Error::domain("empty scan"))?;
        let offset = 4 * self.denominator;
        let histogram = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (Rational::new(k as i64 - offset, self.denominator), c))
            .collect();
        Ok(ClassicalSummary {
            max: Rational::new(best, self.denominator),
            argmax: DeterministicStrategy::from_index(*expression.scenario(), index)?,
            histogram,
        })
    }

    /// Affine rank of the saturating vertices in Collins–Gisin coordinates,
    /// processed in index order and stopped once `D - 1` is reached.
    pub fn facet_report(&self, expression: &BellExpression) -> Result<FacetReport> {
        let scenario = *expression.scenario();
        let summary = self.summary(expression)?;
        let dimension = polytope_dimension(scenario.parties(), scenario.outcomes());
        let cap = dimension - 1;

        let mut vertices = self.saturating.iter().map(|&i| DeterministicStrategy::from_index(scenario, i));
        let mut affine_rank = 0;
        if let Some(origin) = vertices.next() {
            let origin = origin?.cg_vector();
            let mut basis = IncrementalBasis::new(origin.len());
            let mut diff = vec![0i64; origin.len()];
            for vertex in vertices {
                if basis.rank() >= cap {
                    break;
                }
                let v = vertex?.cg_vector();
                for ((dst, &x), &o) in diff.iter_mut().zip(&v).zip(&origin) {
                    *dst = x - o;
                }
                basis.insert(&diff);
            }
            affine_rank = basis.rank();
        }
        let attained = summary.max == expression.bound();
        Ok(FacetReport {
            parties: scenario.parties(),
            outcomes: scenario.outcomes(),
            family: expression.family(),
            dimension,
            classical_max: summary.max,
            saturating_count: self.saturating.len() as u64,
            affine_rank,
            is_facet: attained && affine_rank == cap,
        })
    }
}

/// `(2d - 1)^N - 1`: dimension of the local polytope in Collins–Gisin coordinates.
pub fn polytope_dimension(parties: usize, outcomes: usize) -> usize {
    (2 * outcomes - 1).pow(parties as u32) - 1
}

pub fn classical_maximum(expression: &BellExpression) -> Result<ClassicalSummary> {
    classical_maximum_with(expression, EnumerationBudget::default())
}

pub fn classical_maximum_with(expression: &BellExpression, budget: EnumerationBudget) -> Result<ClassicalSummary> {
    PolytopeScan::scan(expression, budget, 0..u64::MAX)?.summary(expression)
}

pub fn facet_check(expression: &BellExpression) -> Result<FacetReport> {
    facet_check_with(expression, EnumerationBudget::default())
}

pub fn facet_check_with(expression: &BellExpression, budget: EnumerationBudget) -> Result<FacetReport> {
    PolytopeScan::scan(expression, budget, 0..u64::MAX)?.facet_report(expression)
}
