//! Thread-pool drivers for the core crate's partitioned computations. Results
//! are assembled in task order, so they do not depend on the thread count.

use std::ops::Range;

use qudit_bell::polytope::PolytopeScan;
use qudit_bell::violation::MultiStart;
use qudit_bell::{BellExpression, EnumerationBudget, Result};
use rayon::prelude::*;

pub fn run_tasks<M>(search: &M) -> M::Output
where
    M: MultiStart + Sync,
{
    let runs = (0..search.tasks()).into_par_iter().map(|k| search.run(k)).collect();
    search.finish(runs)
}

/// Contiguous index ranges covering `0..total`.
fn chunks(total: u64, pieces: u64) -> Vec<Range<u64>> {
    let pieces = pieces.clamp(1, total.max(1));
    let size = total.div_ceil(pieces);
    (0..pieces).map(|k| (k * size).min(total)..((k + 1) * size).min(total)).filter(|r| !r.is_empty()).collect()
}

/// Enumerates every deterministic strategy in parallel chunks.
pub fn scan_polytope(expression: &BellExpression, budget: EnumerationBudget) -> Result<PolytopeScan> {
    let total = budget.check(expression.scenario())?;
    let ranges = chunks(total, 256);
    let scans: Vec<PolytopeScan> = ranges
        .into_par_iter()
        .map(|r| PolytopeScan::scan(expression, budget, r))
        .collect::<Result<_>>()?;
    let mut iter = scans.into_iter();
    let first = iter.next().expect("at least one strategy");
    iter.try_fold(first, PolytopeScan::merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_the_range() {
        for (total, pieces) in [(64, 256), (1000, 7), (1, 3), (4096, 256)] {
            let c = chunks(total, pieces);
            assert_eq!(c.first().unwrap().start, 0);
            assert_eq!(c.last().unwrap().end, total);
            assert!(c.windows(2).all(|w| w[0].end == w[1].start));
        }
    }
}
