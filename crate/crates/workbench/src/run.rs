//! Dispatch of a resolved [`RunSpec`] to the core crate and rendering of the
//! report document.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qudit_bell::measurement::quantum_bell_value;
use qudit_bell::mermin::MerminSearch;
use qudit_bell::polytope::PolytopeScan;
use qudit_bell::violation::{
    FamilySearch, Measurements, PhaseSearch, QubitObservableSearch, SeesawSearch, SweepRow, SweepSearch,
};
use qudit_bell::{
    noise_threshold, BellExpression, Complex64, EnumerationBudget, Family, OptimizationResult, PhaseConfiguration,
    PhaseMode, ProbabilityTable, Rational, Scenario, StateFamily, StateVector,
};
use serde_json::{json, Value};

use crate::error::{usage, RunError};
use crate::parallel::{run_tasks, scan_polytope};
use crate::spec::{CommandName, Format, PhaseModeName, PhaseSpec, RunSpec, StateSpec};

/// What a command produced, before it is wrapped into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: Value,
    /// Rows for CSV output, header first.
    pub table: Option<Vec<Vec<String>>>,
    pub iterations: u64,
}

/// Runs `spec` on a pool of `spec.run.threads` workers (all cores when unset)
/// and renders the report in the requested format.
pub fn run(spec: &RunSpec) -> Result<String, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = spec.run.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| RunError::Usage(e.to_string()))?;
    let started = Instant::now();
    let outcome = pool.install(|| execute(spec))?;
    render(spec, &outcome, started.elapsed().as_millis() as u64)
}

pub fn render(spec: &RunSpec, outcome: &Outcome, runtime_ms: u64) -> Result<String, RunError> {
    match spec.output.format {
        Format::Json => {
            let mut diagnostics = json!({ "iterations": outcome.iterations });
            if !spec.output.no_timestamp {
                let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                diagnostics["runtime_ms"] = json!(runtime_ms);
                diagnostics["timestamp"] = json!(now);
            }
            let mut embedded = spec.clone();
            if spec.output.no_timestamp {
                // Scheduling does not change results; keep reproducible reports identical.
                embedded.run.threads = None;
            }
            let report = json!({
                "spec": serde_json::to_value(&embedded).expect("run specs serialize"),
                "result": outcome.result,
                "diagnostics": diagnostics,
            });
            Ok(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n")
        }
        Format::Csv => {
            let Some(rows) = &outcome.table else {
                return usage(format!("{} has no CSV form; use --format json", spec.command.name()));
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.write_record(row).map_err(|e| RunError::Usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| RunError::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
        }
    }
}

/// Computes a command's result on the current thread pool.
pub fn execute(spec: &RunSpec) -> Result<Outcome, RunError> {
    match spec.command {
        CommandName::Classical => classical(spec),
        CommandName::Facet => facet(spec),
        CommandName::Violate => violate(spec),
        CommandName::Optimize => optimize(spec),
        CommandName::Seesaw => {
            let search = SeesawSearch::new(&expression(spec)?, &spec.optimizer.config())?;
            let r = run_tasks(&search);
            Ok(Outcome { iterations: r.iterations as u64, result: optimization_json(&r), table: None })
        }
        CommandName::Sweep => sweep(spec),
        CommandName::Threshold => {
            let Some(v) = spec.violation else { return usage("threshold needs --violation") };
            let f = noise_threshold(v)?;
            Ok(Outcome { result: json!({ "violation": v, "f_thr": f }), table: None, iterations: 0 })
        }
        CommandName::Reduce => reduce(spec),
        CommandName::Mermin => {
            let state = concrete_state(spec)?;
            let r = run_tasks(&MerminSearch::new(&state, &spec.optimizer.config())?);
            let result = json!({
                "inequality": "mermin3",
                "bound": 2.0,
                "value": r.value,
                "violates": r.value > 2.0,
                "converged": r.converged,
                "settings": r.settings.angles(),
                "state": state_json(&state),
            });
            Ok(Outcome { result, table: None, iterations: 0 })
        }
    }
}

fn scenario(spec: &RunSpec) -> Result<Scenario, RunError> {
    Ok(Scenario::new(spec.scenario.n, spec.scenario.d)?)
}

fn expression(spec: &RunSpec) -> Result<BellExpression, RunError> {
    if spec.scenario.family == Family::Reduced {
        return usage("the reduced family comes from the `reduce` command");
    }
    Ok(BellExpression::new(scenario(spec)?, spec.scenario.family)?)
}

fn budget(spec: &RunSpec) -> EnumerationBudget {
    EnumerationBudget(spec.run.budget)
}

fn family(state: &StateSpec) -> Option<StateFamily> {
    match state {
        StateSpec::GhzQubit { .. } => Some(StateFamily::GhzQubit),
        StateSpec::GhzQutrit { .. } => Some(StateFamily::GhzQutrit),
        StateSpec::WState { .. } => Some(StateFamily::WState),
        _ => None,
    }
}

fn amplitudes_state(scenario: Scenario, terms: &[crate::spec::AmplitudeTerm]) -> Result<StateVector, RunError> {
    let mut amps = vec![Complex64::new(0.0, 0.0); scenario.joint_outcomes()];
    for t in terms {
        let digits: Option<Vec<usize>> = t.basis.chars().map(|c| c.to_digit(36).map(|x| x as usize)).collect();
        match digits {
            Some(digits) if digits.len() == scenario.parties() && digits.iter().all(|&x| x < scenario.outcomes()) => {
                amps[scenario.outcome_index(&digits)] += Complex64::new(t.re, t.im);
            }
            _ => return usage(format!("basis label `{}` does not fit N={} d={}", t.basis, scenario.parties(), scenario.outcomes())),
        }
    }
    Ok(StateVector::new(scenario, amps)?)
}

/// The state of a command that needs a single state; defaults to GHZ.
fn concrete_state(spec: &RunSpec) -> Result<StateVector, RunError> {
    let s = scenario(spec)?;
    let state = match &spec.state {
        None | Some(StateSpec::GhzMax) => StateVector::ghz_max(s),
        Some(StateSpec::Amplitudes { terms }) => amplitudes_state(s, terms)?,
        Some(other) => {
            let Some(angles) = other.angles().map_err(RunError::Usage)? else {
                return usage(format!("{} needs its angles for `{}`", other.kind(), spec.command.name()));
            };
            let radians: Vec<f64> = angles.iter().map(|a| a.radians()).collect();
            family(other).expect("angled kinds are families").state(&radians)?
        }
    };
    if state.scenario() != &s {
        return usage(format!(
            "state is for N={} d={}, but the scenario is N={} d={}",
            state.scenario().parties(),
            state.scenario().outcomes(),
            s.parties(),
            s.outcomes()
        ));
    }
    Ok(state)
}

fn phase_vectors(spec: &RunSpec, vectors: &[Vec<crate::angle::Angle>]) -> Result<PhaseConfiguration, RunError> {
    let radians = vectors.iter().map(|v| v.iter().map(|a| a.radians()).collect()).collect();
    Ok(PhaseConfiguration::new(scenario(spec)?, radians)?)
}

fn rational(r: &Rational) -> String {
    r.to_string()
}

fn state_json(state: &StateVector) -> Value {
    let s = state.scenario();
    json!({
        "n": s.parties(),
        "d": s.outcomes(),
        "amplitudes": state.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    })
}

fn phases_json(p: &PhaseConfiguration) -> Value {
    json!(p.vectors())
}

fn optimization_json(r: &OptimizationResult) -> Value {
    let measurements = match &r.measurements {
        Measurements::Beamsplitter(p) => json!({ "kind": "beamsplitter", "phases": phases_json(p) }),
        Measurements::Bloch(b) => json!({ "kind": "bloch", "angles": b.angles() }),
    };
    json!({
        "best_value": r.best_value,
        "converged": r.converged,
        "measurements": measurements,
        "state": state_json(&r.state),
        "family_parameters": r.family_parameters,
        "starts": r.starts.iter().map(|s| json!({ "start": s.start, "value": s.value, "converged": s.converged })).collect::<Vec<_>>(),
        "history": r.history,
    })
}

fn summary_json(scan: &PolytopeScan, expression: &BellExpression) -> Result<Value, RunError> {
    let summary = scan.summary(expression)?;
    let outcomes: Vec<[usize; 2]> = (0..expression.scenario().parties())
        .map(|p| [summary.argmax.outcome(p, qudit_bell::Setting::First), summary.argmax.outcome(p, qudit_bell::Setting::Second)])
        .collect();
    Ok(json!({
        "expression": expression.to_string(),
        "max": rational(&summary.max),
        "argmax": { "index": summary.argmax.index(), "outcomes": outcomes },
        "histogram": summary.histogram.iter().map(|(v, c)| json!({ "value": rational(v), "count": c })).collect::<Vec<_>>(),
    }))
}

fn classical(spec: &RunSpec) -> Result<Outcome, RunError> {
    let e = expression(spec)?;
    let scan = scan_polytope(&e, budget(spec))?;
    let total = budget(spec).check(e.scenario())?;
    let mut result = summary_json(&scan, &e)?;
    result["strategies"] = json!(total);
    Ok(Outcome { result, table: None, iterations: total })
}

fn facet(spec: &RunSpec) -> Result<Outcome, RunError> {
    let e = expression(spec)?;
    let scan = scan_polytope(&e, budget(spec))?;
    let r = scan.facet_report(&e)?;
    let result = json!({
        "n": r.parties,
        "d": r.outcomes,
        "family": r.family.name(),
        "dimension": r.dimension,
        "classical_max": rational(&r.classical_max),
        "saturating_count": r.saturating_count,
        "affine_rank": r.affine_rank,
        "is_facet": r.is_facet,
    });
    Ok(Outcome { result, table: None, iterations: budget(spec).check(e.scenario())? })
}

fn table_rows(table: &ProbabilityTable<f64>) -> Vec<Vec<String>> {
    let join = |v: Vec<String>| v.join("-");
    let mut rows = vec![vec!["settings".to_string(), "outcomes".to_string(), "probability".to_string()]];
    for (settings, outcomes, p) in table.rows() {
        rows.push(vec![
            join(settings.iter().map(|s| s.label().to_string()).collect()),
            join(outcomes.iter().map(|x| x.to_string()).collect()),
            p.to_string(),
        ]);
    }
    rows
}

fn violate(spec: &RunSpec) -> Result<Outcome, RunError> {
    let e = expression(spec)?;
    let state = concrete_state(spec)?;
    let phases = match &spec.phases {
        Some(PhaseSpec::Vectors(v)) => phase_vectors(spec, v)?,
        _ => return usage("violate needs explicit --phases vectors"),
    };
    let value = quantum_bell_value(&state, &phases, &e)?;
    let table = qudit_bell::joint_probabilities(&state, &phases)?;
    let result = json!({
        "expression": e.to_string(),
        "value": value,
        "violates": value > 2.0,
        "phases": phases_json(&phases),
        "state": state_json(&state),
    });
    Ok(Outcome { result, table: Some(table_rows(&table)), iterations: 0 })
}

fn optimize(spec: &RunSpec) -> Result<Outcome, RunError> {
    let e = expression(spec)?;
    let config = spec.optimizer.config();
    let state_spec = spec.state.clone().unwrap_or(StateSpec::GhzMax);
    let free_family = match state_spec.angles().map_err(RunError::Usage)? {
        None => family(&state_spec),
        Some(_) => None,
    };
    let r = match (free_family, &spec.phases) {
        (Some(f), phases) => {
            let mode = match phases {
                None | Some(PhaseSpec::Mode(PhaseModeName::Optimize)) => PhaseMode::Free,
                Some(PhaseSpec::Mode(PhaseModeName::Bloch)) => PhaseMode::Bloch,
                Some(PhaseSpec::Vectors(v)) => PhaseMode::Fixed(phase_vectors(spec, v)?),
            };
            run_tasks(&FamilySearch::new(&f, &e, &config, mode)?)
        }
        (None, None | Some(PhaseSpec::Mode(PhaseModeName::Optimize))) => {
            run_tasks(&PhaseSearch::new(&concrete_state(spec)?, &e, &config)?)
        }
        (None, Some(PhaseSpec::Mode(PhaseModeName::Bloch))) => {
            run_tasks(&QubitObservableSearch::new(&concrete_state(spec)?, &e, &config)?)
        }
        (None, Some(PhaseSpec::Vectors(_))) => {
            return usage("state and phases are both fixed; use `violate` or leave the family angles free")
        }
    };
    Ok(Outcome { iterations: r.iterations as u64, result: optimization_json(&r), table: None })
}

fn parameter_names(f: &StateFamily) -> Vec<&'static str> {
    match f {
        StateFamily::GhzQubit => vec!["theta"],
        StateFamily::GhzQutrit => vec!["theta1", "theta2"],
        StateFamily::WState => vec!["beta", "xi"],
        StateFamily::Pinned(_) => vec![],
    }
}

fn sweep(spec: &RunSpec) -> Result<Outcome, RunError> {
    let e = expression(spec)?;
    let Some(f) = spec.state.as_ref().and_then(family) else {
        return usage("sweep needs a state family: ghz-qubit, ghz-qutrit or w-state");
    };
    let Some(grid) = &spec.grid else { return usage("sweep needs --grid") };
    let grid: Vec<Vec<f64>> = grid.iter().map(|p| p.iter().map(|a| a.radians()).collect()).collect();
    let rows: Vec<SweepRow> = run_tasks(&SweepSearch::new(&f, &grid, &e, &spec.optimizer.config())?);
    let names = parameter_names(&f);
    let mut table = vec![names.iter().map(|s| s.to_string()).chain(["best_value".into(), "converged".into()]).collect()];
    for r in &rows {
        table.push(
            r.parameters
                .iter()
                .map(f64::to_string)
                .chain([r.best_value.to_string(), r.converged.to_string()])
                .collect(),
        );
    }
    let result = json!({
        "family": f.name(),
        "parameters": names,
        "rows": rows.iter().map(|r| json!({ "parameters": r.parameters, "best_value": r.best_value, "converged": r.converged })).collect::<Vec<_>>(),
    });
    Ok(Outcome { result, table: Some(table), iterations: rows.len() as u64 })
}

fn reduce(spec: &RunSpec) -> Result<Outcome, RunError> {
    let reduced = expression(spec)?.reduce_to_bipartite()?;
    let scan = scan_polytope(&reduced, budget(spec))?;
    let classical = summary_json(&scan, &reduced)?;
    let r = run_tasks(&SeesawSearch::new(&reduced, &spec.optimizer.config())?);
    let result = json!({
        "expression": reduced.to_string(),
        "classical": classical,
        "quantum": optimization_json(&r),
    });
    Ok(Outcome { result, table: None, iterations: r.iterations as u64 })
}
