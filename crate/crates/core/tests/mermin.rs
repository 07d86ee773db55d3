use std::f64::consts::{FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;
use qudit_bell::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(starts: usize) -> OptimizerConfig {
    OptimizerConfig { starts, ..Default::default() }
}

#[test]
fn product_state_along_z() {
    let s = Scenario::new(3, 2).unwrap();
    let zero = StateVector::basis(s, &[0, 0, 0]).unwrap();
    let along_z = BlochSettings::from_angles(&[0.0; 12]).unwrap();
    assert_abs_diff_eq!(mermin3_value(&zero, &along_z).unwrap(), 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(mermin3_max(&zero, &config(16)).unwrap().value, 2.0, epsilon = 1e-8);
}

#[test]
fn ghz_reaches_four() {
    let r = mermin3_max(&StateVector::ghz_qubit(FRAC_PI_4), &config(16)).unwrap();
    assert_abs_diff_eq!(r.value, 4.0, epsilon = 1e-6);
    assert_abs_diff_eq!(noise_threshold(r.value).unwrap(), 0.5, epsilon = 1e-6);
}

#[test]
fn directions_are_unit_and_values_capped() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = Scenario::new(3, 2).unwrap();
    for _ in 0..200 {
        let angles: Vec<f64> = (0..12).map(|_| rng.random_range(-PI..PI)).collect();
        let settings = BlochSettings::from_angles(&angles).unwrap();
        for party in 0..3 {
            for st in Setting::BOTH {
                let n = settings.direction(party, st);
                assert_abs_diff_eq!(n.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
        let amps = (0..8).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let st = StateVector::normalized(s, amps).unwrap();
        assert!(mermin3_value(&st, &settings).unwrap().abs() <= 4.0 + 1e-12);
    }
}

#[test]
fn flipping_one_party_negates_its_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let s = Scenario::new(3, 2).unwrap();
    let amps = (0..8).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let st = StateVector::normalized(s, amps).unwrap();
    let angles: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..PI)).collect();
    let mut flipped = angles.clone();
    // n -> -n is (t, p) -> (pi - t, p + pi); both settings of party 1.
    for k in [0, 2] {
        flipped[k] = PI - angles[k];
        flipped[k + 1] = angles[k + 1] + PI;
    }
    let a = mermin3_value(&st, &BlochSettings::from_angles(&angles).unwrap()).unwrap();
    let b = mermin3_value(&st, &BlochSettings::from_angles(&flipped).unwrap()).unwrap();
    // Every Mermin term contains party 1 exactly once.
    assert_abs_diff_eq!(a, -b, epsilon = 1e-12);
    // A bit flip on party 1 rotates its Bloch sphere, so the maximum is unchanged.
    let ghz = StateVector::ghz_qubit(0.5);
    let mut amps = ghz.amplitudes().to_vec();
    let (low, high) = amps.split_at_mut(4);
    low.swap_with_slice(high);
    let rotated = StateVector::new(s, amps).unwrap();
    let m1 = mermin3_max(&ghz, &config(16)).unwrap().value;
    assert_abs_diff_eq!(m1, mermin3_max(&rotated, &config(16)).unwrap().value, epsilon = 1e-8);
}

#[test]
fn wrong_scenarios_are_rejected() {
    let qutrits = StateVector::ghz_max(Scenario::new(3, 3).unwrap());
    assert!(mermin3_max(&qutrits, &config(2)).is_err());
    let four = StateVector::ghz_max(Scenario::new(4, 2).unwrap());
    assert!(mermin3_value(&four, &BlochSettings::from_angles(&[0.0; 12]).unwrap()).is_err());
    assert!(BlochSettings::from_angles(&[0.0; 6]).is_err());
}
