//! Four-term Bell expressions `I = Q_a + Q_b + Q_c - Q_d <= 2`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::{bipartite_sum_sign, multipartite_sum_sign, weight_numerator, Rational, Scenario, Setting};
use crate::table::{Probability, ProbabilityTable};

/// Which correlation weight an expression uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Q_{1..1} + Q_{1212..} + Q_{2121..} - Q_{2..2}` with the multipartite weight.
    Multipartite,
    /// The two-party `Q_11 + Q_12 - Q_21 + Q_22` with the `epsilon(i - j)` weight.
    BipartiteLegacy,
    /// Three-party multipartite expression with party 3 clamped to outcome 0.
    Reduced,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Multipartite => "multipartite",
            Family::BipartiteLegacy => "bipartite-legacy",
            Family::Reduced => "reduced",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multipartite" => Ok(Family::Multipartite),
            "bipartite-legacy" | "bipartite" => Ok(Family::BipartiteLegacy),
            "reduced" => Ok(Family::Reduced),
            other => Err(Error::domain(format!("unknown family `{other}`"))),
        }
    }
}

/// One signed correlation `±Q_{settings}`.
///
/// `sum_sign` is the `±1` that multiplies the outcome sum inside `M[., d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub settings: Vec<Setting>,
    pub sign: i64,
    pub sum_sign: i64,
}

impl Term {
    /// Integer weight numerator `(d - 1) f/S` for an outcome sum.
    #[inline]
    pub fn weight_numerator(&self, outcome_sum: i64, d: usize) -> i64 {
        weight_numerator(self.sum_sign * outcome_sum, d)
    }

    /// Settings written as a digit string, e.g. `"121"`.
    pub fn label(&self) -> String {
        self.settings.iter().map(|s| char::from(b'0' + s.label())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellExpression {
    scenario: Scenario,
    family: Family,
    terms: Vec<Term>,
    bound: Rational,
}

fn alternating(parties: usize, first: Setting) -> Vec<Setting> {
    let other = if first == Setting::First { Setting::Second } else { Setting::First };
    (0..parties).map(|j| if j % 2 == 0 { first } else { other }).collect()
}

impl BellExpression {
    /// The expression of the requested family. `Reduced` is only reachable
    /// through [`BellExpression::reduce_to_bipartite`].
    pub fn new(scenario: Scenario, family: Family) -> Result<Self> {
        let n = scenario.parties();
        let terms = match family {
            Family::Multipartite => {
                let tuples = [
                    (vec![Setting::First; n], 1),
                    (alternating(n, Setting::First), 1),
                    (alternating(n, Setting::Second), 1),
                    (vec![Setting::Second; n], -1),
                ];
                tuples
                    .into_iter()
                    .map(|(settings, sign)| {
                        let sum_sign = multipartite_sum_sign(&settings);
                        Term { settings, sign, sum_sign }
                    })
                    .collect()
            }
            Family::BipartiteLegacy => {
                if n != 2 {
                    return Err(Error::FamilyMismatch(format!(
                        "the bipartite-legacy family needs 2 parties, got {n}"
                    )));
                }
                use Setting::{First as S1, Second as S2};
                [(S1, S1, 1), (S1, S2, 1), (S2, S1, -1), (S2, S2, 1)]
                    .into_iter()
                    .map(|(a, b, sign)| Term { settings: vec![a, b], sign, sum_sign: bipartite_sum_sign(a, b) })
                    .collect()
            }
            Family::Reduced => {
                return Err(Error::FamilyMismatch(
                    "reduced expressions come from reduce_to_bipartite".into(),
                ))
            }
        };
        Ok(BellExpression { scenario, family, terms, bound: Rational::from_integer(2) })
    }

    /// Clamp party 3 of a three-party multipartite expression to outcome 0.
    ///
    /// Each term keeps the sign of its outcome sum from the full three-party
    /// settings tuple; party 3 then contributes nothing to the sum.
    pub fn reduce_to_bipartite(&self) -> Result<Self> {
        if self.family != Family::Multipartite || self.scenario.parties() != 3 {
            return Err(Error::domain(format!(
                "reduction needs a three-party multipartite expression, got {} parties ({})",
                self.scenario.parties(),
                self.family
            )));
        }
        let scenario = Scenario::new(2, self.scenario.outcomes())?;
        let terms = self
            .terms
            .iter()
            .map(|t| Term { settings: t.settings[..2].to_vec(), sign: t.sign, sum_sign: t.sum_sign })
            .collect();
        Ok(BellExpression { scenario, family: Family::Reduced, terms, bound: self.bound })
    }

    /// Relabel parties: party `j` of the result is party `perm[j]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.scenario.parties();
        let mut seen = vec![false; n];
        if perm.len() != n || !perm.iter().all(|&p| p < n && !core::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("not a permutation of the parties"));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { settings: perm.iter().map(|&p| t.settings[p]).collect(), ..t.clone() })
            .collect();
        Ok(BellExpression { terms, ..self.clone() })
    }

    /// Same terms with a different local bound.
    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound = bound;
        self
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn bound(&self) -> Rational {
        self.bound
    }

    /// Sign of the outcome sum for an arbitrary settings tuple under this
    /// expression's weight rule.
    pub fn sum_sign(&self, settings: &[Setting]) -> i64 {
        match self.family {
            // Clamping keeps (i, j, i) from the parent terms, which is all-first
            // exactly when (i, j) is.
            Family::Multipartite | Family::Reduced => multipartite_sum_sign(settings),
            Family::BipartiteLegacy => bipartite_sum_sign(settings[0], settings[1]),
        }
    }

    /// `Q_settings`: weighted sum of one block of the table.
    pub fn correlation<P: Probability>(&self, table: &ProbabilityTable<P>, settings: &[Setting]) -> Result<P> {
        self.check_table(table)?;
        let sum_sign = self.sum_sign(settings);
        Ok(self.block_correlation(table.block(settings)?, sum_sign))
    }

    fn block_correlation<P: Probability>(&self, block: &[P], sum_sign: i64) -> P {
        let d = self.scenario.outcomes();
        let mut xs = vec![0usize; self.scenario.parties()];
        // Accumulate per weight numerator first so exact tables only divide once.
        let mut acc = P::zero();
        for (idx, &p) in block.iter().enumerate() {
            self.scenario.outcomes_at(idx, &mut xs);
            let sum: i64 = xs.iter().map(|&x| x as i64).sum();
            let w = weight_numerator(sum_sign * sum, d);
            acc = acc + p.scale(w);
        }
        acc.div_int(d as i64 - 1)
    }

    /// Signed sum of the four correlations.
    pub fn bell_value<P: Probability>(&self, table: &ProbabilityTable<P>) -> Result<P> {
        self.check_table(table)?;
        let mut total = P::zero();
        for term in &self.terms {
            let q = self.block_correlation(table.block(&term.settings)?, term.sum_sign);
            total = total + q.scale(term.sign);
        }
        Ok(total)
    }

    fn check_table<P>(&self, table: &ProbabilityTable<P>) -> Result<()> {
        if table.scenario() != &self.scenario {
            return Err(Error::domain(format!(
                "table is for N={}, d={} but the expression is for N={}, d={}",
                table.scenario().parties(),
                table.scenario().outcomes(),
                self.scenario.parties(),
                self.scenario.outcomes()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let sign = if t.sign < 0 { "-" } else if k == 0 { "" } else { "+" };
            write!(f, "{sign}Q{}", t.label())?;
        }
        write!(f, " <= {}", self.bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Setting::{First as S1, Second as S2};

    fn expr(n: usize, d: usize) -> BellExpression {
        BellExpression::new(Scenario::new(n, d).unwrap(), Family::Multipartite).unwrap()
    }

    fn signed(e: &BellExpression) -> Vec<(Vec<Setting>, i64)> {
        let mut v: Vec<_> = e.terms().iter().map(|t| (t.settings.clone(), t.sign)).collect();
        v.sort();
        v
    }

    #[test]
    fn three_party_terms() {
        let mut want = vec![
            (vec![S1, S1, S1], 1),
            (vec![S2, S2, S2], -1),
            (vec![S1, S2, S1], 1),
            (vec![S2, S1, S2], 1),
        ];
        want.sort();
        assert_eq!(signed(&expr(3, 3)), want);
        assert_eq!(expr(3, 3).to_string(), "Q111+Q121+Q212-Q222 <= 2");
    }

    #[test]
    fn four_and_five_party_terms() {
        assert_eq!(expr(4, 2).to_string(), "Q1111+Q1212+Q2121-Q2222 <= 2");
        assert_eq!(expr(5, 2).to_string(), "Q11111+Q12121+Q21212-Q22222 <= 2");
    }

    #[test]
    fn bipartite_legacy_only_for_two_parties() {
        let e = BellExpression::new(Scenario::new(2, 3).unwrap(), Family::BipartiteLegacy).unwrap();
        assert_eq!(e.to_string(), "Q11+Q12-Q21+Q22 <= 2");
        assert!(matches!(
            BellExpression::new(Scenario::new(3, 3).unwrap(), Family::BipartiteLegacy),
            Err(Error::FamilyMismatch(_))
        ));
    }

    #[test]
    fn terms_are_distinct() {
        for n in 2..=6 {
            let e = expr(n, 2);
            for a in 0..4 {
                for b in a + 1..4 {
                    assert_ne!(e.terms()[a].settings, e.terms()[b].settings);
                }
            }
        }
    }

    #[test]
    fn reduction_matches_two_party_multipartite() {
        for d in 2..=5 {
            let reduced = expr(3, d).reduce_to_bipartite().unwrap();
            assert_eq!(reduced.family(), Family::Reduced);
            let two = expr(2, d);
            let strip = |e: &BellExpression| {
                let mut v: Vec<_> = e.terms().iter().map(|t| (t.settings.clone(), t.sign, t.sum_sign)).collect();
                v.sort();
                v
            };
            assert_eq!(strip(&reduced), strip(&two));
        }
        assert!(expr(4, 2).reduce_to_bipartite().is_err());
    }
}
