//! General projective qubit measurements and the three-party Mermin inequality
//! `E112 + E121 + E211 - E222 <= 2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, sin};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{apply_local, inner, CMatrix};
use crate::scenario::Setting;
use crate::seed::task_rng;
use crate::simplex::maximize;
use crate::state::StateVector;
use crate::violation::{MultiStart, OptimizerConfig};

/// Unitary whose rows are `<n+|` and `<n-|` for the Bloch direction
/// `n = (sin t cos p, sin t sin p, cos t)`.
pub fn bloch_unitary(theta: f64, phi: f64) -> CMatrix {
    let (c, s) = (cos(theta / 2.0), sin(theta / 2.0));
    let e = Complex64::from_polar(1.0, phi);
    let plus = [Complex64::new(c, 0.0), e * s];
    let minus = [Complex64::new(s, 0.0), -e * c];
    CMatrix::from_fn(2, |r, k| if r == 0 { plus[k].conj() } else { minus[k].conj() })
}

/// `n . sigma`.
pub fn bloch_observable(theta: f64, phi: f64) -> CMatrix {
    let off = Complex64::from_polar(sin(theta), phi);
    let z = cos(theta);
    CMatrix::from_fn(2, |r, k| match (r, k) {
        (0, 0) => Complex64::new(z, 0.0),
        (1, 1) => Complex64::new(-z, 0.0),
        (0, 1) => off.conj(),
        _ => off,
    })
}

/// One Bloch direction `(theta, phi)` per (party, setting), indexed `2 * party + setting offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSettings {
    angles: Vec<[f64; 2]>,
}

impl BlochSettings {
    /// Flattened `(theta, phi)` pairs, two settings per party.
    pub fn from_angles(flat: &[f64]) -> Result<Self> {
        if flat.is_empty() || flat.len() % 4 != 0 {
            return Err(Error::domain("need (theta, phi) for two settings of every party"));
        }
        Ok(BlochSettings { angles: flat.chunks(2).map(|c| [c[0], c[1]]).collect() })
    }

    pub fn parties(&self) -> usize {
        self.angles.len() / 2
    }

    pub fn angles(&self) -> &[[f64; 2]] {
        &self.angles
    }

    pub fn direction(&self, party: usize, setting: Setting) -> [f64; 3] {
        let [t, p] = self.angles[2 * party + setting.offset()];
        [sin(t) * cos(p), sin(t) * sin(p), cos(t)]
    }

    /// Measurement unitaries in (party, setting) order.
    pub fn unitaries(&self) -> Vec<CMatrix> {
        self.angles.iter().map(|&[t, p]| bloch_unitary(t, p)).collect()
    }

    pub fn observable(&self, party: usize, setting: Setting) -> CMatrix {
        let [t, p] = self.angles[2 * party + setting.offset()];
        bloch_observable(t, p)
    }
}

const MERMIN_TERMS: [([Setting; 3], f64); 4] = [
    ([Setting::First, Setting::First, Setting::Second], 1.0),
    ([Setting::First, Setting::Second, Setting::First], 1.0),
    ([Setting::Second, Setting::First, Setting::First], 1.0),
    ([Setting::Second, Setting::Second, Setting::Second], -1.0),
];

fn check_state(state: &StateVector) -> Result<()> {
    let s = state.scenario();
    if s.parties() != 3 || s.outcomes() != 2 {
        return Err(Error::domain(format!("Mermin needs three qubits, got N={} d={}", s.parties(), s.outcomes())));
    }
    Ok(())
}

fn value_with(state: &StateVector, observables: &[CMatrix]) -> f64 {
    MERMIN_TERMS
        .iter()
        .map(|(settings, sign)| {
            let mut v = state.amplitudes().to_vec();
            for (party, st) in settings.iter().enumerate() {
                v = apply_local(&v, &observables[2 * party + st.offset()], 3, party);
            }
            sign * inner(state.amplitudes(), &v).re
        })
        .sum()
}

fn observables_from(flat: &[f64]) -> Vec<CMatrix> {
    flat.chunks(2).map(|a| bloch_observable(a[0], a[1])).collect()
}

pub fn mermin3_value(state: &StateVector, settings: &BlochSettings) -> Result<f64> {
    check_state(state)?;
    if settings.parties() != 3 {
        return Err(Error::domain("Mermin needs settings for three parties"));
    }
    let obs: Vec<CMatrix> = settings.angles.iter().map(|&[t, p]| bloch_observable(t, p)).collect();
    Ok(value_with(state, &obs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MerminResult {
    pub value: f64,
    pub settings: BlochSettings,
    pub converged: bool,
}

/// Multi-start simplex over the twelve Bloch angles.
#[derive(Debug, Clone)]
pub struct MerminSearch {
    state: StateVector,
    config: OptimizerConfig,
}

impl MerminSearch {
    pub fn new(state: &StateVector, config: &OptimizerConfig) -> Result<Self> {
        check_state(state)?;
        Ok(MerminSearch { state: state.clone(), config: *config })
    }
}

impl MultiStart for MerminSearch {
    type Run = MerminResult;
    type Output = MerminResult;

    fn tasks(&self) -> usize {
        self.config.starts.max(1)
    }

    fn run(&self, start: usize) -> MerminResult {
        let point: Vec<f64> = if start == 0 {
            vec![0.0; 12]
        } else {
            let mut rng = task_rng(self.config.seed, start as u64);
            (0..12).map(|_| rng.random_range(-PI..PI)).collect()
        };
        let options = crate::simplex::SimplexOptions {
            initial_step: self.config.initial_step,
            tolerance: self.config.tolerance,
            max_iterations: self.config.max_iterations,
        };
        let out = maximize(|x: &[f64]| value_with(&self.state, &observables_from(x)), &point, &options);
        MerminResult {
            value: out.value,
            settings: BlochSettings::from_angles(&out.point).expect("twelve angles"),
            converged: out.converged,
        }
    }

    fn finish(&self, runs: Vec<MerminResult>) -> MerminResult {
        let mut best = &runs[0];
        for r in &runs[1..] {
            if r.value > best.value {
                best = r;
            }
        }
        best.clone()
    }
}

/// Largest Mermin value of `state` over general projective qubit measurements.
pub fn mermin3_max(state: &StateVector, config: &OptimizerConfig) -> Result<MerminResult> {
    Ok(crate::violation::run_sequential(&MerminSearch::new(state, config)?))
}
