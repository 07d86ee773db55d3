//! Derivative-free local maximization (Nelder–Mead with dimension-adaptive
//! coefficients and restarts at the incumbent).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when the spread of objective values over the simplex drops below this.
    pub tolerance: f64,
    /// Iteration budget shared by all restarts.
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { initial_step: 0.3, tolerance: 1e-9, max_iterations: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximize `f` starting from `start`. The returned value is never below `f(start)`.
pub fn maximize<F>(mut f: F, start: &[f64], options: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best_point = start.to_vec();
    let mut best_value = f(start);
    if start.is_empty() {
        return SimplexOutcome { point: best_point, value: best_value, iterations: 0, converged: true };
    }
    let mut iterations = 0;
    let mut converged = false;
    let mut step = options.initial_step;
    while iterations < options.max_iterations {
        let run = nelder_mead(&mut f, &best_point, best_value, step, options, options.max_iterations - iterations);
        iterations += run.iterations;
        let gain = run.value - best_value;
        if run.value > best_value {
            best_value = run.value;
            best_point = run.point;
        }
        if run.converged && gain <= options.tolerance {
            converged = true;
            break;
        }
        // Restarts after the first use a smaller simplex around the incumbent.
        step = (step * 0.5).max(options.initial_step * 1e-3);
    }
    SimplexOutcome { point: best_point, value: best_value, iterations, converged }
}

fn nelder_mead<F>(
    f: &mut F,
    start: &[f64],
    start_value: f64,
    step: f64,
    options: &SimplexOptions,
    budget: usize,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let nf = n as f64;
    // Gao & Han coefficients; minimizing -f.
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let mut cost = |x: &[f64]| -f(x);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), -start_value));
    for k in 0..n {
        let mut x = start.to_vec();
        x[k] += step;
        let c = cost(&x);
        simplex.push((x, c));
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    while iterations < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread <= options.tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let toward = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };

        let reflected = toward(alpha);
        let fr = cost(&reflected);
        if fr < simplex[0].1 {
            let expanded = toward(alpha * gamma);
            let fe = cost(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[n].1 {
            let x = toward(alpha * rho);
            let c = cost(&x);
            (x, c)
        } else {
            let x = toward(-rho);
            let c = cost(&x);
            (x, c)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, c) in simplex[1..].iter_mut() {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *c = cost(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, c) = simplex.swap_remove(0);
    SimplexOutcome { point, value: -c, iterations, converged }
}
