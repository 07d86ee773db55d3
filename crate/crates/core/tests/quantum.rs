use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use qudit_bell::linalg::CMatrix;
use qudit_bell::measurement::block_probabilities_with;
use qudit_bell::noise::noisy_table;
use qudit_bell::operator::bell_operator;
use qudit_bell::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Phase vectors given as multiples of pi, in (party, setting) order.
fn config(n: usize, d: usize, pi_multiples: &[&[f64]]) -> PhaseConfiguration {
    let vectors = pi_multiples.iter().map(|v| v.iter().map(|x| x * PI).collect()).collect();
    PhaseConfiguration::new(Scenario::new(n, d).unwrap(), vectors).unwrap()
}

fn expr(n: usize, d: usize) -> BellExpression {
    BellExpression::new(Scenario::new(n, d).unwrap(), Family::Multipartite).unwrap()
}

fn random_state(s: Scenario, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..s.joint_outcomes())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(s, amps).unwrap()
}

fn random_config(s: Scenario, rng: &mut ChaCha8Rng) -> PhaseConfiguration {
    let free: Vec<f64> = (0..PhaseConfiguration::free_len(&s)).map(|_| rng.random_range(-PI..PI)).collect();
    PhaseConfiguration::from_free(s, &free).unwrap()
}

fn three_qubit_phases() -> PhaseConfiguration {
    config(3, 2, &[&[0.0, -1.0 / 12.0], &[0.0, 0.25], &[0.0, -1.0 / 6.0], &[0.0, 1.0 / 3.0], &[0.0, 0.0], &[0.0, 1.0 / 6.0]])
}

#[test]
fn three_qubit_reported_setting() {
    let v = quantum_bell_value(&StateVector::ghz_qubit(FRAC_PI_4), &three_qubit_phases(), &expr(3, 2)).unwrap();
    assert_abs_diff_eq!(v, 2.0 * SQRT_2, epsilon = 1e-9);
}

#[test]
fn three_qutrit_reported_setting() {
    let phases = config(
        3,
        3,
        &[
            &[0.0, -0.2, 1.0 / 24.0],
            &[0.0, 1.0 / 24.0, -5.0 / 12.0],
            &[0.0, 0.0, 1.0 / 12.0],
            &[0.0, 1.0 / 3.0, -0.25],
            &[0.0, 1.0 / 30.0, 0.05],
            &[0.0, 0.125, 1.0 / 6.0],
        ],
    );
    let v = quantum_bell_value(&StateVector::ghz_qutrit(0.9066, 0.6663), &phases, &expr(3, 3)).unwrap();
    assert_abs_diff_eq!(v, 2.915, epsilon = 2e-3);
}

#[test]
fn four_and_five_qubit_reported_settings() {
    let four = config(
        4,
        2,
        &[&[0.0, 1.0 / 24.0], &[0.0, 1.0 / 12.0], &[0.0, -1.0 / 6.0], &[0.0, 1.0 / 3.0], &[0.0, -0.125], &[0.0, 1.0 / 3.0], &[0.0, 0.0], &[0.0, 0.0]],
    );
    let five = config(
        5,
        2,
        &[
            &[0.0, -1.0 / 12.0],
            &[0.0, 1.0 / 3.0],
            &[0.0, -1.0 / 6.0],
            &[0.0, 1.0 / 3.0],
            &[0.0, 0.0],
            &[0.0, 1.0 / 12.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
        ],
    );
    for (n, phases) in [(4, four), (5, five)] {
        let s = Scenario::new(n, 2).unwrap();
        let v = quantum_bell_value(&StateVector::ghz_max(s), &phases, &expr(n, 2)).unwrap();
        assert_abs_diff_eq!(v, 2.0 * SQRT_2, epsilon = 1e-3);
    }
}

#[test]
fn quantum_blocks_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let shapes = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4)];
    for k in 0..1000 {
        let (n, d) = shapes[k % shapes.len()];
        let s = Scenario::new(n, d).unwrap();
        let table = joint_probabilities(&random_state(s, &mut rng), &random_config(s, &mut rng)).unwrap();
        for b in 0..(1 << n) {
            let sum: f64 = table.block_at(b).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-10);
            assert!(table.block_at(b).iter().all(|&p| p >= -1e-15));
        }
    }
}

#[test]
fn bell_operator_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, d) in [(3, 2), (3, 3), (4, 2)] {
        let s = Scenario::new(n, d).unwrap();
        let e = expr(n, d);
        let cfg = random_config(s, &mut rng);
        let op = bell_operator(&cfg, &e).unwrap();
        assert!(op.matrix().hermiticity_defect() <= 1e-12);
        let top = max_eigenpair(&op).unwrap();
        for _ in 0..100 {
            let st = random_state(s, &mut rng);
            let direct = quantum_bell_value(&st, &cfg, &e).unwrap();
            assert_abs_diff_eq!(op.expectation(&st), direct, epsilon = 1e-10);
            assert!(direct <= top.value + 1e-10);
        }
    }
}

#[test]
fn reported_phases_give_top_eigenvalue_two_root_two() {
    let e = expr(3, 2);
    let op = bell_operator(&three_qubit_phases(), &e).unwrap();
    let top = max_eigenpair(&op).unwrap();
    assert!(top.value >= 2.828427 - 1e-6);
    assert!(top.residual <= 1e-9 * top.value.abs());
    let ghz = StateVector::ghz_max(Scenario::new(3, 2).unwrap());
    assert_abs_diff_eq!(op.expectation(&ghz), quantum_bell_value(&ghz, &three_qubit_phases(), &e).unwrap(), epsilon = 1e-10);
}

#[test]
fn phase_gauge_leaves_tables_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = Scenario::new(3, 3).unwrap();
    for _ in 0..20 {
        let st = random_state(s, &mut rng);
        let cfg = random_config(s, &mut rng);
        let mut vectors = cfg.vectors().to_vec();
        let shift = rng.random_range(-PI..PI);
        let which = rng.random_range(0..vectors.len());
        vectors[which].iter_mut().for_each(|x| *x += shift);
        // Build the shifted unitaries directly so the gauge fix in the constructor is bypassed.
        let shifted: Vec<CMatrix> = vectors.iter().map(|v| beamsplitter_unitary(v, 3).unwrap()).collect();
        let original = cfg.unitaries();
        for b in 0..8 {
            let settings = s.settings_at(b);
            let pick = |us: &[CMatrix]| -> Vec<CMatrix> {
                settings.iter().enumerate().map(|(j, st)| us[2 * j + st.offset()].clone()).collect()
            };
            let (u, v) = (pick(&original), pick(&shifted));
            let p = block_probabilities_with(&st, &u.iter().collect::<Vec<_>>());
            let q = block_probabilities_with(&st, &v.iter().collect::<Vec<_>>());
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn relabeling_state_and_phases_together() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = Scenario::new(3, 2).unwrap();
    let e = expr(3, 2);
    for _ in 0..20 {
        let st = random_state(s, &mut rng);
        let cfg = random_config(s, &mut rng);
        let base = quantum_bell_value(&st, &cfg, &e).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let moved = quantum_bell_value(
                &st.permute_parties(&perm).unwrap(),
                &cfg.permute_parties(&perm).unwrap(),
                &e.permute_parties(&perm).unwrap(),
            )
            .unwrap();
            assert_abs_diff_eq!(moved, base, epsilon = 1e-10);
        }
        // Reversal maps the expression onto itself.
        let rev = quantum_bell_value(&st.permute_parties(&[2, 1, 0]).unwrap(), &cfg.permute_parties(&[2, 1, 0]).unwrap(), &e)
            .unwrap();
        assert_abs_diff_eq!(rev, base, epsilon = 1e-10);
    }
}

#[test]
fn noise_thresholds() {
    assert_abs_diff_eq!(noise_threshold(2.0 * SQRT_2).unwrap(), 0.292893, epsilon = 1e-5);
    assert_abs_diff_eq!(noise_threshold(4.0).unwrap(), 0.5, epsilon = 1e-12);
    assert_eq!(noise_threshold(2.0).unwrap(), 0.0);
    assert_eq!(noise_threshold(1.5).unwrap(), 0.0);
    assert!(noise_threshold(0.0).is_err());
    assert!(noise_threshold(-1.0).is_err());
}

#[test]
fn mixed_table_crosses_the_bound_at_the_threshold() {
    let e = expr(3, 2);
    let table = joint_probabilities(&StateVector::ghz_qubit(FRAC_PI_4), &three_qubit_phases()).unwrap();
    let violation = e.bell_value(&table).unwrap();
    let f = noise_threshold(violation).unwrap();
    let at = e.bell_value(&noisy_table(&table, f).unwrap()).unwrap();
    assert_abs_diff_eq!(at, 2.0, epsilon = 1e-8);
    assert!(e.bell_value(&noisy_table(&table, f - 1e-3).unwrap()).unwrap() > 2.0);
    assert!(e.bell_value(&noisy_table(&table, f + 1e-3).unwrap()).unwrap() < 2.0);
}

#[test]
fn uniform_table_has_zero_correlations() {
    for n in 2..=5 {
        for d in 2..=7 {
            if (d as u64).pow(n as u32) > 20_000 {
                continue;
            }
            let s = Scenario::new(n, d).unwrap();
            let t = ProbabilityTable::<Rational>::uniform(s);
            let e = BellExpression::new(s, Family::Multipartite).unwrap();
            assert_eq!(e.bell_value(&t).unwrap(), Rational::from_integer(0), "N={n} d={d}");
        }
    }
}

#[test]
fn product_states_stay_classical() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, d) in [(3, 2), (3, 3)] {
        let s = Scenario::new(n, d).unwrap();
        let e = expr(n, d);
        for _ in 0..50 {
            let digits: Vec<usize> = (0..n).map(|_| rng.random_range(0..d)).collect();
            let st = StateVector::basis(s, &digits).unwrap();
            let v = quantum_bell_value(&st, &random_config(s, &mut rng), &e).unwrap();
            assert!(v <= 2.0 + 1e-12);
        }
    }
}
