//! Nelder-Mead simplex search with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n).

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Spread of simplex values below which the search stops.
const VALUE_TOL: f64 = 1e-13;

pub(crate) fn minimize<F>(mut f: F, x0: &[f64], step: f64, max_iterations: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evaluations)).collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] <= VALUE_TOL {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(alpha);
        let fr = eval(&reflected, &mut evaluations);
        if fr < values[0] {
            let expanded = along(alpha * beta);
            let fe = eval(&expanded, &mut evaluations);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }

        let (candidate, fc) = if fr < values[n] {
            let outside = along(alpha * gamma);
            let fo = eval(&outside, &mut evaluations);
            (outside, fo)
        } else {
            let inside = along(-gamma);
            let fi = eval(&inside, &mut evaluations);
            (inside, fi)
        };
        if fc < fr.min(values[n]) {
            simplex[n] = candidate;
            values[n] = fc;
            continue;
        }

        let best = simplex[0].clone();
        for i in 1..=n {
            let shrunk: Vec<f64> = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + delta * (x - b))
                .collect();
            values[i] = eval(&shrunk, &mut evaluations);
            simplex[i] = shrunk;
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        evaluations,
        iterations,
        converged,
    }
}

/// Re-seeds a fresh simplex around the incumbent each time the previous one
/// collapses, halving the step, until a restart stops improving or the
/// iteration budget runs out.
pub(crate) fn minimize_restarting<F>(mut f: F, x0: &[f64], step: f64, max_iterations: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = minimize(&mut f, x0, step, max_iterations);
    let mut used = best.iterations;
    let mut step = step;
    while best.converged && used < max_iterations {
        step = (step * 0.5).max(1e-4);
        let next = minimize(&mut f, &best.x, step, max_iterations - used);
        used += next.iterations;
        let improved = next.value < best.value - VALUE_TOL;
        let evaluations = best.evaluations + next.evaluations;
        if next.value <= best.value {
            best = Minimum { evaluations, ..next };
        } else {
            best.evaluations = evaluations;
            best.converged = next.converged;
        }
        if !improved {
            break;
        }
    }
    best.iterations = used;
    best
}
