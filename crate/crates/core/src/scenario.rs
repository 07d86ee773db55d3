//! Bell scenario and the correlation weights.
//!
//! Every weight has the form `f/S` with `S = (d-1)/2` and
//! `f = S - M[sigma * sum(x), d]`, `sigma = ±1`. Multiplying through by
//! `d - 1` gives the integer numerator `(d - 1) - 2 M[sigma * sum(x), d]`,
//! which is what the enumeration code works with.

use alloc::format;
use core::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational used for weights, spins and classical Bell values.
pub type Rational = Ratio<i64>;

/// One of the two measurement settings available to every party.
///
/// Settings are labelled 1 and 2 so that the product of setting labels
/// decides the sign of the outcome sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Setting {
    First = 1,
    Second = 2,
}

impl Setting {
    pub const BOTH: [Setting; 2] = [Setting::First, Setting::Second];

    pub fn label(self) -> u8 {
        self as u8
    }

    /// `0` for the first setting, `1` for the second.
    pub fn offset(self) -> usize {
        self as usize - 1
    }

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1 => Ok(Setting::First),
            2 => Ok(Setting::Second),
            other => Err(Error::domain(format!("setting label must be 1 or 2, got {other}"))),
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `N` parties, two settings each, `d` outcomes per setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    parties: usize,
    outcomes: usize,
}

impl Scenario {
    pub fn new(parties: usize, outcomes: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 parties, got {parties}")));
        }
        if outcomes < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 outcomes, got {outcomes}")));
        }
        Ok(Scenario { parties, outcomes })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// `S = (d - 1)/2`, half-integral for even `d`.
    pub fn spin(&self) -> Rational {
        Rational::new(self.outcomes as i64 - 1, 2)
    }

    /// `d^N`, the number of joint outcomes per settings tuple.
    pub fn joint_outcomes(&self) -> usize {
        self.outcomes.pow(self.parties as u32)
    }

    /// `2^N`, the number of settings tuples.
    pub fn settings_tuples(&self) -> usize {
        1 << self.parties
    }

    /// Settings tuple for a block index; party 1 is the most significant bit.
    pub fn settings_at(&self, block: usize) -> alloc::vec::Vec<Setting> {
        (0..self.parties)
            .map(|j| {
                if (block >> (self.parties - 1 - j)) & 1 == 0 {
                    Setting::First
                } else {
                    Setting::Second
                }
            })
            .collect()
    }

    pub fn block_index(&self, settings: &[Setting]) -> Result<usize> {
        if settings.len() != self.parties {
            return Err(Error::domain(format!(
                "settings tuple has {} entries, scenario has {} parties",
                settings.len(),
                self.parties
            )));
        }
        Ok(settings.iter().fold(0, |acc, s| (acc << 1) | s.offset()))
    }

    /// Mixed-radix decoding of a joint outcome index, party 1 most significant.
    pub fn outcomes_at(&self, index: usize, out: &mut [usize]) {
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.outcomes;
            rest /= self.outcomes;
        }
    }

    pub fn outcome_index(&self, outcomes: &[usize]) -> usize {
        outcomes.iter().fold(0, |acc, &x| acc * self.outcomes + x)
    }

    fn check_outcomes(&self, outcomes: &[usize]) -> Result<()> {
        if let Some(&x) = outcomes.iter().find(|&&x| x >= self.outcomes) {
            return Err(Error::domain(format!("outcome {x} outside [0, {})", self.outcomes)));
        }
        Ok(())
    }
}

/// `M(x, d)`: the representative of `x` in `[0, d)`.
pub fn euclid_mod(x: i64, d: i64) -> Result<i64> {
    if d < 2 {
        return Err(Error::InvalidScenario(format!("modulus must be at least 2, got {d}")));
    }
    Ok(x.rem_euclid(d))
}

/// `(d - 1) * f/S` for an outcome sum already multiplied by its sign.
#[inline]
pub(crate) fn weight_numerator(signed_sum: i64, d: usize) -> i64 {
    let d = d as i64;
    (d - 1) - 2 * signed_sum.rem_euclid(d)
}

/// Sign applied to the outcome sum by the multipartite weight: `(-1)^chi`
/// with `chi` the product of setting labels, so `-1` exactly when every
/// setting is the first one.
pub fn multipartite_sum_sign(settings: &[Setting]) -> i64 {
    if settings.iter().all(|&s| s == Setting::First) {
        -1
    } else {
        1
    }
}

/// Sign `epsilon(i - j)` of the two-party weight, with `epsilon(0) = +1`.
pub fn bipartite_sum_sign(first: Setting, second: Setting) -> i64 {
    if first.label() >= second.label() {
        1
    } else {
        -1
    }
}

/// Normalized multipartite weight `f/S` for one settings tuple and outcome tuple.
pub fn weight_multipartite(settings: &[Setting], outcomes: &[usize], scenario: &Scenario) -> Result<Rational> {
    if settings.len() != scenario.parties() || outcomes.len() != scenario.parties() {
        return Err(Error::domain("settings and outcomes must have one entry per party"));
    }
    scenario.check_outcomes(outcomes)?;
    let sum: i64 = outcomes.iter().map(|&x| x as i64).sum();
    let num = weight_numerator(multipartite_sum_sign(settings) * sum, scenario.outcomes());
    Ok(Rational::new(num, scenario.outcomes() as i64 - 1))
}

/// Normalized two-party weight of the legacy family.
pub fn weight_bipartite(first: Setting, second: Setting, m: usize, n: usize, scenario: &Scenario) -> Result<Rational> {
    if scenario.parties() != 2 {
        return Err(Error::FamilyMismatch(format!(
            "two-party weight requested for {} parties",
            scenario.parties()
        )));
    }
    scenario.check_outcomes(&[m, n])?;
    let num = weight_numerator(bipartite_sum_sign(first, second) * (m + n) as i64, scenario.outcomes());
    Ok(Rational::new(num, scenario.outcomes() as i64 - 1))
}
