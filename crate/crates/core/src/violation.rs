//! Searches for large quantum Bell values.
//!
//! Every search is a [`MultiStart`]: a set of independent tasks, each driven
//! by its own seed derived from `(config.seed, task index)`, followed by a
//! reduction that keeps the best task (ties go to the lowest index). Running
//! the tasks sequentially ([`run_sequential`]) or on a thread pool yields the
//! same result.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::expression::BellExpression;
use crate::linalg::CMatrix;
use crate::measurement::{beamsplitter_unitary, wrap_angle, PhaseConfiguration, QuantumEvaluator};
use crate::mermin::{bloch_unitary, BlochSettings};
use crate::operator::{max_eigenpair, BellOperator};
use crate::scenario::Scenario;
use crate::seed::{task_rng, task_seed};
use crate::simplex::{maximize, SimplexOptions};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    /// Objective tolerance for the simplex and the see-saw stopping rule.
    pub tolerance: f64,
    /// Simplex iterations per start (per see-saw round for [`seesaw`]).
    pub max_iterations: usize,
    /// Initial simplex edge in radians.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { starts: 64, seed: 0, tolerance: 1e-9, max_iterations: 5000, initial_step: 0.3 }
    }
}

impl OptimizerConfig {
    fn simplex(&self) -> SimplexOptions {
        SimplexOptions { initial_step: self.initial_step, tolerance: self.tolerance, max_iterations: self.max_iterations }
    }
}

/// Measurements attached to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Measurements {
    Beamsplitter(PhaseConfiguration),
    Bloch(BlochSettings),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartSummary {
    pub start: usize,
    pub value: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Re-evaluated at the reported (wrapped) measurements and state.
    pub best_value: f64,
    pub measurements: Measurements,
    pub state: StateVector,
    /// Family angles when a state family was searched, wrapped into `(-pi, pi]`.
    pub family_parameters: Vec<f64>,
    pub starts: Vec<StartSummary>,
    pub converged: bool,
    /// See-saw objective after each half-step of the winning start.
    pub history: Vec<f64>,
    pub iterations: usize,
}

impl OptimizationResult {
    pub fn phases(&self) -> Option<&PhaseConfiguration> {
        match &self.measurements {
            Measurements::Beamsplitter(p) => Some(p),
            Measurements::Bloch(_) => None,
        }
    }
}

/// Independent tasks plus a deterministic reduction.
pub trait MultiStart {
    type Run: Send;
    type Output;

    fn tasks(&self) -> usize;
    fn run(&self, task: usize) -> Self::Run;
    /// `runs[k]` must be the run of task `k`.
    fn finish(&self, runs: Vec<Self::Run>) -> Self::Output;
}

pub fn run_sequential<M: MultiStart>(search: &M) -> M::Output {
    let runs = (0..search.tasks()).map(|k| search.run(k)).collect();
    search.finish(runs)
}

/// Outcome of one start.
#[derive(Debug, Clone)]
pub struct StartRun {
    pub start: usize,
    pub value: f64,
    pub point: Vec<f64>,
    pub state: Option<StateVector>,
    pub converged: bool,
    pub iterations: usize,
    pub history: Vec<f64>,
}

fn best_run(runs: &[StartRun]) -> &StartRun {
    let mut best = &runs[0];
    for r in &runs[1..] {
        if r.value > best.value {
            best = r;
        }
    }
    best
}

fn summaries(runs: &[StartRun]) -> Vec<StartSummary> {
    runs.iter().map(|r| StartSummary { start: r.start, value: r.value, converged: r.converged }).collect()
}

fn check_scenario(a: &Scenario, b: &Scenario, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::domain(format!("{what} does not match the expression's scenario")));
    }
    Ok(())
}

fn unitaries_from_free(scenario: &Scenario, free: &[f64]) -> Vec<CMatrix> {
    let d = scenario.outcomes();
    let mut phases = vec![0.0; d];
    free.chunks(d - 1)
        .map(|c| {
            phases[1..].copy_from_slice(c);
            beamsplitter_unitary(&phases, d).expect("length d")
        })
        .collect()
}

fn random_angles<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}

/// Multi-start simplex over the `2N(d-1)` free beamsplitter phases at a fixed state.
#[derive(Debug, Clone)]
pub struct PhaseSearch {
    evaluator: QuantumEvaluator,
    expression: BellExpression,
    state: StateVector,
    config: OptimizerConfig,
}

impl PhaseSearch {
    pub fn new(state: &StateVector, expression: &BellExpression, config: &OptimizerConfig) -> Result<Self> {
        check_scenario(state.scenario(), expression.scenario(), "state")?;
        Ok(PhaseSearch {
            evaluator: QuantumEvaluator::new(expression),
            expression: expression.clone(),
            state: state.clone(),
            config: *config,
        })
    }

    fn start_point(&self, start: usize) -> Vec<f64> {
        let n = PhaseConfiguration::free_len(self.expression.scenario());
        if start == 0 {
            vec![0.0; n]
        } else {
            random_angles(&mut task_rng(self.config.seed, start as u64), n)
        }
    }
}

impl MultiStart for PhaseSearch {
    type Run = StartRun;
    type Output = OptimizationResult;

    fn tasks(&self) -> usize {
        self.config.starts.max(1)
    }

    fn run(&self, start: usize) -> StartRun {
        let scenario = *self.expression.scenario();
        let objective = |x: &[f64]| self.evaluator.value_unchecked(&self.state, &unitaries_from_free(&scenario, x));
        let out = maximize(objective, &self.start_point(start), &self.config.simplex());
        StartRun {
            start,
            value: out.value,
            point: out.point,
            state: None,
            converged: out.converged,
            iterations: out.iterations,
            history: Vec::new(),
        }
    }

    fn finish(&self, runs: Vec<StartRun>) -> OptimizationResult {
        let best = best_run(&runs);
        let scenario = *self.expression.scenario();
        let phases = PhaseConfiguration::from_free(scenario, &best.point).expect("free length").wrapped();
        let best_value = self.evaluator.value(&self.state, &phases).expect("validated");
        OptimizationResult {
            best_value,
            measurements: Measurements::Beamsplitter(phases),
            state: self.state.clone(),
            family_parameters: Vec::new(),
            starts: summaries(&runs),
            converged: best.converged,
            history: Vec::new(),
            iterations: runs.iter().map(|r| r.iterations).sum(),
        }
    }
}

/// Best beamsplitter phases for a fixed state.
pub fn optimize_phases(
    state: &StateVector,
    expression: &BellExpression,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    Ok(run_sequential(&PhaseSearch::new(state, expression, config)?))
}

/// Alternates the dominant eigenvector of the Bell operator with a local
/// phase search, from `config.starts` starting configurations.
#[derive(Debug, Clone)]
pub struct SeesawSearch {
    evaluator: QuantumEvaluator,
    expression: BellExpression,
    config: OptimizerConfig,
    max_rounds: usize,
}

impl SeesawSearch {
    pub fn new(expression: &BellExpression, config: &OptimizerConfig) -> Result<Self> {
        if expression.scenario().joint_outcomes() > crate::operator::MAX_DIMENSION {
            return Err(Error::domain("d^N exceeds the dense engine cap"));
        }
        Ok(SeesawSearch {
            evaluator: QuantumEvaluator::new(expression),
            expression: expression.clone(),
            config: *config,
            max_rounds: 200,
        })
    }

    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = rounds.max(1);
        self
    }
}

impl MultiStart for SeesawSearch {
    type Run = StartRun;
    type Output = OptimizationResult;

    fn tasks(&self) -> usize {
        self.config.starts.max(1)
    }

    fn run(&self, start: usize) -> StartRun {
        let scenario = *self.expression.scenario();
        let n = PhaseConfiguration::free_len(&scenario);
        // Zero phases make every term's operator share symmetries that trap
        // the eigenvector step, so every start is random.
        let mut point = random_angles(&mut task_rng(self.config.seed, start as u64), n);
        let mut state: Option<StateVector> = None;
        let mut value = f64::NEG_INFINITY;
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut converged = false;
        for _ in 0..self.max_rounds {
            let before = value;
            let unitaries = unitaries_from_free(&scenario, &point);
            if let Ok(pair) = BellOperator::from_unitaries(&self.expression, &unitaries).and_then(|op| max_eigenpair(&op)) {
                let candidate = self.evaluator.value_unchecked(&pair.state, &unitaries);
                if candidate > value || state.is_none() {
                    state = Some(pair.state);
                    value = candidate;
                }
            }
            let current = state.get_or_insert_with(|| StateVector::ghz_max(scenario)).clone();
            if value == f64::NEG_INFINITY {
                value = self.evaluator.value_unchecked(&current, &unitaries);
            }
            history.push(value);
            let objective = |x: &[f64]| self.evaluator.value_unchecked(&current, &unitaries_from_free(&scenario, x));
            let out = maximize(objective, &point, &self.config.simplex());
            iterations += out.iterations;
            if out.value > value {
                value = out.value;
                point = out.point;
            }
            history.push(value);
            if value - before <= self.config.tolerance {
                converged = true;
                break;
            }
        }
        StartRun { start, value, point, state, converged, iterations, history }
    }

    fn finish(&self, runs: Vec<StartRun>) -> OptimizationResult {
        let best = best_run(&runs);
        let scenario = *self.expression.scenario();
        let phases = PhaseConfiguration::from_free(scenario, &best.point).expect("free length").wrapped();
        let state = best.state.clone().expect("every round sets a state");
        let best_value = self.evaluator.value(&state, &phases).expect("validated");
        OptimizationResult {
            best_value,
            measurements: Measurements::Beamsplitter(phases),
            state,
            family_parameters: Vec::new(),
            starts: summaries(&runs),
            converged: best.converged,
            history: best.history.clone(),
            iterations: runs.iter().map(|r| r.iterations).sum(),
        }
    }
}

/// Joint maximization over states and beamsplitter phases.
pub fn seesaw(expression: &BellExpression, config: &OptimizerConfig) -> Result<OptimizationResult> {
    Ok(run_sequential(&SeesawSearch::new(expression, config)?))
}

/// Parametrized three-party state families.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// `cos t |000> + sin t |111>`, one angle.
    GhzQubit,
    /// `sin t1 sin t2 |000> + sin t1 cos t2 |111> + cos t1 |222>`, two angles.
    GhzQutrit,
    /// `sin b sin x |001> + sin b cos x |010> + cos b |100>`, two angles.
    WState,
    /// A single state, no angles.
    Pinned(StateVector),
}

impl StateFamily {
    pub fn arity(&self) -> usize {
        match self {
            StateFamily::GhzQubit => 1,
            StateFamily::GhzQutrit | StateFamily::WState => 2,
            StateFamily::Pinned(_) => 0,
        }
    }

    pub fn scenario(&self) -> Scenario {
        match self {
            StateFamily::GhzQubit | StateFamily::WState => Scenario::new(3, 2).expect("valid"),
            StateFamily::GhzQutrit => Scenario::new(3, 3).expect("valid"),
            StateFamily::Pinned(s) => *s.scenario(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::GhzQubit => "ghz-qubit",
            StateFamily::GhzQutrit => "ghz-qutrit",
            StateFamily::WState => "w-state",
            StateFamily::Pinned(_) => "pinned",
        }
    }

    pub fn state(&self, angles: &[f64]) -> Result<StateVector> {
        if angles.len() != self.arity() {
            return Err(Error::domain(format!("{} takes {} angles, got {}", self.name(), self.arity(), angles.len())));
        }
        Ok(match self {
            StateFamily::GhzQubit => StateVector::ghz_qubit(angles[0]),
            StateFamily::GhzQutrit => StateVector::ghz_qutrit(angles[0], angles[1]),
            StateFamily::WState => StateVector::w_state(angles[0], angles[1]),
            StateFamily::Pinned(s) => s.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseMode {
    Free,
    Fixed(PhaseConfiguration),
    /// Free general projective measurements instead of beamsplitters (qubits only).
    Bloch,
}

/// Multi-start simplex over family angles and, when free, the phases.
///
/// The search vector is `[phases.., angles..]`; start `k` draws the phases
/// first so a family without angles reproduces [`PhaseSearch`] exactly.
#[derive(Debug, Clone)]
pub struct FamilySearch {
    evaluator: QuantumEvaluator,
    expression: BellExpression,
    family: StateFamily,
    mode: PhaseMode,
    config: OptimizerConfig,
}

impl FamilySearch {
    pub fn new(
        family: &StateFamily,
        expression: &BellExpression,
        config: &OptimizerConfig,
        mode: PhaseMode,
    ) -> Result<Self> {
        check_scenario(&family.scenario(), expression.scenario(), "state family")?;
        match &mode {
            PhaseMode::Fixed(p) => check_scenario(p.scenario(), expression.scenario(), "phase configuration")?,
            PhaseMode::Bloch if expression.scenario().outcomes() != 2 => {
                return Err(Error::domain("general observables are only searched for qubits"))
            }
            _ => {}
        }
        Ok(FamilySearch {
            evaluator: QuantumEvaluator::new(expression),
            expression: expression.clone(),
            family: family.clone(),
            mode,
            config: *config,
        })
    }

    fn phase_len(&self) -> usize {
        match self.mode {
            PhaseMode::Free => PhaseConfiguration::free_len(self.expression.scenario()),
            PhaseMode::Fixed(_) => 0,
            PhaseMode::Bloch => 4 * self.expression.scenario().parties(),
        }
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(self.phase_len())
    }

    fn unitaries(&self, free: &[f64]) -> Vec<CMatrix> {
        match &self.mode {
            PhaseMode::Free => unitaries_from_free(self.expression.scenario(), free),
            PhaseMode::Fixed(p) => p.unitaries(),
            PhaseMode::Bloch => QubitObservableSearch::unitaries(free),
        }
    }

    fn measurements(&self, free: &[f64]) -> Measurements {
        match &self.mode {
            PhaseMode::Free => Measurements::Beamsplitter(
                PhaseConfiguration::from_free(*self.expression.scenario(), free).expect("free length").wrapped(),
            ),
            PhaseMode::Fixed(p) => Measurements::Beamsplitter(p.clone()),
            PhaseMode::Bloch => {
                let wrapped: Vec<f64> = free.iter().map(|&a| wrap_angle(a)).collect();
                Measurements::Bloch(BlochSettings::from_angles(&wrapped).expect("even length"))
            }
        }
    }
}

impl MultiStart for FamilySearch {
    type Run = StartRun;
    type Output = OptimizationResult;

    fn tasks(&self) -> usize {
        self.config.starts.max(1)
    }

    fn run(&self, start: usize) -> StartRun {
        let (np, na) = (self.phase_len(), self.family.arity());
        let point = if start == 0 {
            let mut p = vec![0.0; np];
            p.extend(core::iter::repeat(FRAC_PI_4).take(na));
            p
        } else {
            random_angles(&mut task_rng(self.config.seed, start as u64), np + na)
        };
        let fixed_unitaries = match &self.mode {
            PhaseMode::Fixed(p) => Some(p.unitaries()),
            _ => None,
        };
        let objective = |x: &[f64]| {
            let (free, angles) = self.split(x);
            let state = self.family.state(angles).expect("arity");
            match &fixed_unitaries {
                Some(u) => self.evaluator.value_unchecked(&state, u),
                None => self.evaluator.value_unchecked(&state, &self.unitaries(free)),
            }
        };
        let out = maximize(objective, &point, &self.config.simplex());
        StartRun {
            start,
            value: out.value,
            point: out.point,
            state: None,
            converged: out.converged,
            iterations: out.iterations,
            history: Vec::new(),
        }
    }

    fn finish(&self, runs: Vec<StartRun>) -> OptimizationResult {
        let best = best_run(&runs);
        let (free, angles) = self.split(&best.point);
        let angles: Vec<f64> = angles.iter().map(|&a| wrap_angle(a)).collect();
        let state = self.family.state(&angles).expect("arity");
        let measurements = self.measurements(free);
        let unitaries = match &measurements {
            Measurements::Beamsplitter(p) => p.unitaries(),
            Measurements::Bloch(b) => b.unitaries(),
        };
        let best_value = self.evaluator.value_unchecked(&state, &unitaries);
        OptimizationResult {
            best_value,
            measurements,
            state,
            family_parameters: angles,
            starts: summaries(&runs),
            converged: best.converged,
            history: Vec::new(),
            iterations: runs.iter().map(|r| r.iterations).sum(),
        }
    }
}

pub fn optimize_state_family(
    family: &StateFamily,
    expression: &BellExpression,
    config: &OptimizerConfig,
    mode: PhaseMode,
) -> Result<OptimizationResult> {
    Ok(run_sequential(&FamilySearch::new(family, expression, config, mode)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameters: Vec<f64>,
    pub best_value: f64,
    pub converged: bool,
}

/// One [`optimize_phases`] per grid point; point `g` runs with seed
/// `task_seed(config.seed, g)`.
#[derive(Debug, Clone)]
pub struct SweepSearch {
    family: StateFamily,
    grid: Vec<Vec<f64>>,
    expression: BellExpression,
    config: OptimizerConfig,
}

impl SweepSearch {
    pub fn new(
        family: &StateFamily,
        grid: &[Vec<f64>],
        expression: &BellExpression,
        config: &OptimizerConfig,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::domain("sweep grid is empty"));
        }
        check_scenario(&family.scenario(), expression.scenario(), "state family")?;
        for point in grid {
            family.state(point)?;
        }
        Ok(SweepSearch { family: family.clone(), grid: grid.to_vec(), expression: expression.clone(), config: *config })
    }
}

impl MultiStart for SweepSearch {
    type Run = SweepRow;
    type Output = Vec<SweepRow>;

    fn tasks(&self) -> usize {
        self.grid.len()
    }

    fn run(&self, task: usize) -> SweepRow {
        let parameters = self.grid[task].clone();
        let state = self.family.state(&parameters).expect("validated");
        let config = OptimizerConfig { seed: task_seed(self.config.seed, task as u64), ..self.config };
        let result = optimize_phases(&state, &self.expression, &config).expect("validated");
        SweepRow { parameters, best_value: result.best_value, converged: result.converged }
    }

    fn finish(&self, runs: Vec<SweepRow>) -> Vec<SweepRow> {
        runs
    }
}

pub fn sweep(
    family: &StateFamily,
    grid: &[Vec<f64>],
    expression: &BellExpression,
    config: &OptimizerConfig,
) -> Result<Vec<SweepRow>> {
    Ok(run_sequential(&SweepSearch::new(family, grid, expression, config)?))
}

/// Multi-start simplex over arbitrary projective qubit measurements
/// (a Bloch direction per party and setting; outcome 0 is the `+1` eigenvector).
#[derive(Debug, Clone)]
pub struct QubitObservableSearch {
    evaluator: QuantumEvaluator,
    expression: BellExpression,
    state: StateVector,
    config: OptimizerConfig,
}

impl QubitObservableSearch {
    pub fn new(state: &StateVector, expression: &BellExpression, config: &OptimizerConfig) -> Result<Self> {
        check_scenario(state.scenario(), expression.scenario(), "state")?;
        if expression.scenario().outcomes() != 2 {
            return Err(Error::domain("general observables are only searched for qubits"));
        }
        Ok(QubitObservableSearch {
            evaluator: QuantumEvaluator::new(expression),
            expression: expression.clone(),
            state: state.clone(),
            config: *config,
        })
    }

    pub(crate) fn unitaries(x: &[f64]) -> Vec<CMatrix> {
        x.chunks(2).map(|a| bloch_unitary(a[0], a[1])).collect()
    }
}

impl MultiStart for QubitObservableSearch {
    type Run = StartRun;
    type Output = OptimizationResult;

    fn tasks(&self) -> usize {
        self.config.starts.max(1)
    }

    fn run(&self, start: usize) -> StartRun {
        let n = 4 * self.expression.scenario().parties();
        let point =
            if start == 0 { vec![0.0; n] } else { random_angles(&mut task_rng(self.config.seed, start as u64), n) };
        let objective = |x: &[f64]| self.evaluator.value_unchecked(&self.state, &Self::unitaries(x));
        let out = maximize(objective, &point, &self.config.simplex());
        StartRun {
            start,
            value: out.value,
            point: out.point,
            state: None,
            converged: out.converged,
            iterations: out.iterations,
            history: Vec::new(),
        }
    }

    fn finish(&self, runs: Vec<StartRun>) -> OptimizationResult {
        let best = best_run(&runs);
        let point: Vec<f64> = best.point.iter().map(|&a| wrap_angle(a)).collect();
        let best_value = self.evaluator.value_unchecked(&self.state, &Self::unitaries(&point));
        let settings = BlochSettings::from_angles(&point).expect("even length");
        OptimizationResult {
            best_value,
            measurements: Measurements::Bloch(settings),
            state: self.state.clone(),
            family_parameters: Vec::new(),
            starts: summaries(&runs),
            converged: best.converged,
            history: Vec::new(),
            iterations: runs.iter().map(|r| r.iterations).sum(),
        }
    }
}

/// Best value over general projective qubit measurements for a fixed state.
pub fn optimize_qubit_observables(
    state: &StateVector,
    expression: &BellExpression,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    Ok(run_sequential(&QubitObservableSearch::new(state, expression, config)?))
}
