//! Bell operators and their dominant eigenpair.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expression::BellExpression;
use crate::linalg::{inner, kron, norm, CMatrix};
use crate::measurement::{term_weights, PhaseConfiguration};
use crate::state::StateVector;

/// Hermitian `B` with `<psi|B|psi>` equal to the quantum Bell value at fixed
/// measurements.
#[derive(Debug, Clone)]
pub struct BellOperator {
    matrix: CMatrix,
    expression: BellExpression,
    config: Option<PhaseConfiguration>,
}

impl BellOperator {
    /// `B = sum_t sign_t sum_x w_t(x) W_t^dagger |x><x| W_t`, with `W_t` the
    /// tensor product of the local measurement unitaries of term `t`.
    pub fn from_unitaries(expression: &BellExpression, unitaries: &[CMatrix]) -> Result<Self> {
        let s = expression.scenario();
        if unitaries.len() != 2 * s.parties() || unitaries.iter().any(|u| u.dim() != s.outcomes()) {
            return Err(Error::domain("need one d x d unitary per (party, setting)"));
        }
        let n = s.joint_outcomes();
        let mut matrix = CMatrix::zeros(n);
        for term in term_weights(expression) {
            let w = term
                .settings
                .iter()
                .enumerate()
                .map(|(j, st)| unitaries[2 * j + st.offset()].clone())
                .reduce(|a, b| kron(&a, &b))
                .expect("at least two parties");
            for (x, &weight) in term.weights.iter().enumerate() {
                let c = term.sign * weight;
                if c == 0.0 {
                    continue;
                }
                let row = w.row(x);
                for a in 0..n {
                    let left = row[a].conj() * c;
                    if left.is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        matrix[(a, b)] += left * row[b];
                    }
                }
            }
        }
        Ok(BellOperator { matrix, expression: expression.clone(), config: None })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn expression(&self) -> &BellExpression {
        &self.expression
    }

    pub fn config(&self) -> Option<&PhaseConfiguration> {
        self.config.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn expectation(&self, state: &StateVector) -> f64 {
        self.matrix.expectation(state.amplitudes())
    }
}

/// Bell operator for beamsplitter measurements with the given phases.
pub fn bell_operator(config: &PhaseConfiguration, expression: &BellExpression) -> Result<BellOperator> {
    if config.scenario() != expression.scenario() {
        return Err(Error::domain("phase configuration and expression disagree on the scenario"));
    }
    let mut op = BellOperator::from_unitaries(expression, &config.unitaries())?;
    op.config = Some(config.clone());
    Ok(op)
}

/// Largest operator dimension accepted by the dense engine.
pub const MAX_DIMENSION: usize = 10_000;
/// Target `|B v - lambda v| <= tol |lambda|`.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub state: StateVector,
    pub residual: f64,
    pub iterations: usize,
}

/// Dominant (most positive) eigenpair by power iteration on `B - l I`, with
/// `l` the Gershgorin lower bound so the shifted spectrum is non-negative.
///
/// Runs from the uniform vector and from one seeded random vector; the
/// second run guards against a start orthogonal to the top eigenspace.
pub fn max_eigenpair(operator: &BellOperator) -> Result<Eigenpair> {
    let n = operator.dim();
    if n > MAX_DIMENSION {
        return Err(Error::domain("operator dimension exceeds the dense engine cap"));
    }
    let m = &operator.matrix;
    let lower = (0..n)
        .map(|r| {
            let off: f64 = m.row(r).iter().enumerate().filter(|&(c, _)| c != r).map(|(_, z)| z.norm()).sum();
            m[(r, r)].re - off
        })
        .fold(f64::INFINITY, f64::min);
    let shift = lower.min(0.0);
    let cap = 200_000usize.min(20_000_000 / (n * n).max(1)).max(2_000);

    let uniform = vec![Complex64::new(1.0, 0.0); n];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_b311);
    let random: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();

    let first = power_iterate(m, shift, uniform, cap);
    let second = power_iterate(m, shift, random, cap);
    let best = match (first, second) {
        (Ok(a), Ok(b)) => {
            if b.0 > a.0 + 1e-12 {
                b
            } else {
                a
            }
        }
        (Ok(a), Err(_)) | (Err(_), Ok(a)) => a,
        (Err(e), Err(_)) => return Err(e),
    };
    let (value, vector, residual, iterations) = best;
    let state = StateVector::normalized(*operator.expression.scenario(), vector)?;
    Ok(Eigenpair { value, state, residual, iterations })
}

type PowerOutcome = (f64, Vec<Complex64>, f64, usize);

fn power_iterate(m: &CMatrix, shift: f64, mut v: Vec<Complex64>, cap: usize) -> Result<PowerOutcome> {
    let mut scale = norm(&v);
    v.iter_mut().for_each(|z| *z /= scale);
    let mut residual = f64::INFINITY;
    for it in 1..=cap {
        let bv = m.mul_vec(&v);
        if it % 8 == 0 || it == cap {
            let lambda = inner(&v, &bv).re;
            residual = norm(&bv.iter().zip(&v).map(|(a, b)| a - b * lambda).collect::<Vec<_>>());
            if residual <= EIGEN_TOLERANCE * lambda.abs().max(1e-300) || residual == 0.0 {
                return Ok((lambda, v, residual, it));
            }
        }
        let mut next: Vec<Complex64> = bv.iter().zip(&v).map(|(a, b)| a - b * shift).collect();
        scale = norm(&next);
        if scale == 0.0 {
            // v is in the kernel of B - shift, i.e. an eigenvector for `shift`.
            return Ok((shift, v, 0.0, it));
        }
        next.iter_mut().for_each(|z| *z /= scale);
        v = next;
    }
    Err(Error::Numeric { iterations: cap, residual })
}
