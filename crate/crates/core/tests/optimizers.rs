use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use qudit_bell::operator::bell_operator;
use qudit_bell::seed::task_seed;
use qudit_bell::*;

const TWO_ROOT_TWO: f64 = 2.0 * SQRT_2;

fn expr(n: usize, d: usize) -> BellExpression {
    BellExpression::new(Scenario::new(n, d).unwrap(), Family::Multipartite).unwrap()
}

fn config(starts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig { starts, seed, ..Default::default() }
}

fn relevance_state() -> StateVector {
    StateVector::from_terms(
        Scenario::new(3, 2).unwrap(),
        &[
            (&[0, 0, 0], 0.169414),
            (&[1, 0, 0], 0.0461131),
            (&[1, 0, 1], 0.161369),
            (&[1, 1, 0], 0.193624),
            (&[1, 1, 1], 0.951652),
        ],
    )
    .unwrap()
}

#[test]
fn ghz_phases_reach_two_root_two() {
    let e = expr(3, 2);
    let r = optimize_phases(&StateVector::ghz_qubit(FRAC_PI_4), &e, &config(16, 3)).unwrap();
    assert!(r.best_value >= 2.828427 - 1e-4);
    assert!(r.best_value <= TWO_ROOT_TWO + 1e-9);
    let phases = r.phases().unwrap();
    assert_abs_diff_eq!(quantum_bell_value(&r.state, phases, &e).unwrap(), r.best_value, epsilon = 1e-9);
    assert!(phases.vectors().iter().flatten().all(|&x| x > -PI && x <= PI));
    let top = max_eigenpair(&bell_operator(phases, &e).unwrap()).unwrap();
    assert!(r.best_value <= top.value + 1e-9);
    assert_eq!(r.starts.len(), 16);
    assert_eq!(r.starts[0].start, 0);
}

#[test]
fn identical_configs_give_identical_results() {
    let e = expr(3, 3);
    let st = StateVector::ghz_max(Scenario::new(3, 3).unwrap());
    let a = optimize_phases(&st, &e, &config(6, 42)).unwrap();
    let b = optimize_phases(&st, &e, &config(6, 42)).unwrap();
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    assert_eq!(a.measurements, b.measurements);
}

#[test]
fn more_starts_never_lose() {
    let e = expr(3, 2);
    let st = StateVector::ghz_qubit(0.6);
    let mut last = f64::NEG_INFINITY;
    for starts in [1, 2, 4, 8, 16] {
        let r = optimize_phases(&st, &e, &config(starts, 11)).unwrap();
        assert!(r.best_value >= last);
        // Starts are seeded per index, so the shorter run is a prefix.
        last = r.best_value;
    }
}

#[test]
fn non_violation_window() {
    let e = expr(3, 2);
    for theta in [PI / 16.0, PI / 8.0] {
        let r = optimize_phases(&StateVector::ghz_qubit(theta), &e, &config(256, 0)).unwrap();
        assert!(r.best_value <= 2.0 + 1e-3, "theta={theta}: {}", r.best_value);
    }
    let r = optimize_phases(&StateVector::ghz_qubit(PI / 6.0), &e, &config(64, 0)).unwrap();
    assert!(r.best_value > 2.01);
}

#[test]
fn seesaw_three_qubits_and_monotone_history() {
    let r = seesaw(&expr(3, 2), &config(8, 1)).unwrap();
    assert_abs_diff_eq!(r.best_value, 2.828427, epsilon = 1e-4);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert_abs_diff_eq!(quantum_bell_value(&r.state, r.phases().unwrap(), &expr(3, 2)).unwrap(), r.best_value, epsilon = 1e-9);
}

#[test]
fn seesaw_three_qutrits() {
    let e = expr(3, 3);
    let r = seesaw(&e, &config(16, 1)).unwrap();
    assert_abs_diff_eq!(r.best_value, 2.915, epsilon = 2e-3);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    let max_ent = optimize_phases(&StateVector::ghz_qutrit((1.0 / 3f64.sqrt()).acos(), FRAC_PI_4), &e, &config(32, 1))
        .unwrap();
    assert_abs_diff_eq!(max_ent.best_value, 2.873, epsilon = 2e-3);
    assert!(max_ent.best_value < r.best_value);
}

#[test]
fn seesaw_four_and_five_qubits_stay_at_two_root_two() {
    for n in [4, 5] {
        let r = seesaw(&expr(n, 2), &config(8, 2)).unwrap();
        assert_abs_diff_eq!(r.best_value, 2.828427, epsilon = 1e-3);
    }
}

#[test]
fn qutrit_family_optimum_beats_maximal_entanglement() {
    let r = optimize_state_family(&StateFamily::GhzQutrit, &expr(3, 3), &config(32, 4), PhaseMode::Free).unwrap();
    assert_abs_diff_eq!(r.best_value, 2.915, epsilon = 2e-3);
    assert_eq!(r.family_parameters.len(), 2);
    assert_abs_diff_eq!(
        quantum_bell_value(&r.state, r.phases().unwrap(), &expr(3, 3)).unwrap(),
        r.best_value,
        epsilon = 1e-9
    );
}

#[test]
fn pinned_family_is_a_phase_search() {
    let e = expr(3, 2);
    let ghz = StateVector::ghz_qubit(FRAC_PI_4);
    let a = optimize_state_family(&StateFamily::Pinned(ghz.clone()), &e, &config(8, 5), PhaseMode::Free).unwrap();
    let b = optimize_phases(&ghz, &e, &config(8, 5)).unwrap();
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    assert_eq!(a.measurements, b.measurements);
}

#[test]
fn fixed_phases_optimize_the_state_only() {
    let e = expr(3, 2);
    let phases = PhaseConfiguration::new(
        Scenario::new(3, 2).unwrap(),
        [-1.0 / 12.0, 0.25, -1.0 / 6.0, 1.0 / 3.0, 0.0, 1.0 / 6.0].iter().map(|x| vec![0.0, x * PI]).collect(),
    )
    .unwrap();
    let r = optimize_state_family(&StateFamily::GhzQubit, &e, &config(8, 0), PhaseMode::Fixed(phases.clone())).unwrap();
    assert_abs_diff_eq!(r.best_value, TWO_ROOT_TWO, epsilon = 1e-6);
    assert_eq!(r.phases().unwrap(), &phases);
}

#[test]
fn w_states_need_general_qubit_measurements() {
    let e = expr(3, 2);
    // Equatorial correlators of single-excitation states vanish.
    let bs = optimize_state_family(&StateFamily::WState, &e, &config(16, 0), PhaseMode::Free).unwrap();
    assert!(bs.best_value.abs() <= 1e-9);
    let general = optimize_state_family(&StateFamily::WState, &e, &config(32, 0), PhaseMode::Bloch).unwrap();
    assert_abs_diff_eq!(general.best_value, 2.828427, epsilon = 1e-2);
}

#[test]
fn sweep_rows_follow_the_grid() {
    let e = expr(3, 2);
    let grid: Vec<Vec<f64>> = [PI / 16.0, PI / 8.0, PI / 6.0, PI / 4.0].iter().map(|&t| vec![t]).collect();
    let rows = sweep(&StateFamily::GhzQubit, &grid, &e, &config(64, 9)).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].best_value <= 2.0 + 1e-3);
    assert!(rows[1].best_value <= 2.0 + 1e-3);
    assert!(rows[2].best_value > 2.0);
    assert_abs_diff_eq!(rows[3].best_value, TWO_ROOT_TWO, epsilon = 1e-4);
    for (row, point) in rows.iter().zip(&grid) {
        assert_eq!(&row.parameters, point);
    }

    let single = sweep(&StateFamily::GhzQubit, &grid[3..], &e, &config(8, 9)).unwrap();
    let direct = optimize_phases(&StateVector::ghz_qubit(PI / 4.0), &e, &config(8, task_seed(9, 0))).unwrap();
    assert_eq!(single[0].best_value.to_bits(), direct.best_value.to_bits());
    assert!(sweep(&StateFamily::GhzQubit, &[], &e, &config(8, 9)).is_err());
}

#[test]
fn relevance_state_by_measurement_class() {
    let e = expr(3, 2);
    let psi = relevance_state();
    let beamsplitter = optimize_phases(&psi, &e, &config(64, 0)).unwrap();
    // |psi> is close to |111>, and beamsplitters on qubits are equatorial measurements.
    assert!(beamsplitter.best_value < 1.0);
    let general = optimize_qubit_observables(&psi, &e, &config(64, 0)).unwrap();
    assert!(general.best_value >= 2.0028, "{}", general.best_value);
    let mermin = mermin3_max(&psi, &config(64, 0)).unwrap();
    assert!(mermin.value <= 2.0 + 1e-4);
}

#[test]
fn reduced_expression_optima() {
    let d2 = expr(3, 2).reduce_to_bipartite().unwrap();
    assert_abs_diff_eq!(seesaw(&d2, &config(8, 0)).unwrap().best_value, 2.828427, epsilon = 1e-4);
    let d3 = expr(3, 3).reduce_to_bipartite().unwrap();
    assert_abs_diff_eq!(seesaw(&d3, &config(8, 0)).unwrap().best_value, 2.9149, epsilon = 1e-3);
}

#[test]
fn optima_respect_the_algebraic_cap() {
    for (n, d) in [(3, 2), (3, 3), (2, 4)] {
        let r = seesaw(&expr(n, d), &config(4, 6)).unwrap();
        assert!(r.best_value <= 4.0);
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let e = expr(3, 3);
    assert!(optimize_phases(&StateVector::ghz_qubit(0.3), &e, &config(2, 0)).is_err());
    assert!(optimize_state_family(&StateFamily::WState, &e, &config(2, 0), PhaseMode::Free).is_err());
    assert!(optimize_state_family(&StateFamily::GhzQutrit, &e, &config(2, 0), PhaseMode::Bloch).is_err());
    assert!(optimize_qubit_observables(&StateVector::ghz_max(Scenario::new(3, 3).unwrap()), &e, &config(2, 0)).is_err());
}
