//! (1+1) evolution strategy with the one-fifth success rule.

use rand::Rng;
use rand_distr::StandardNormal;

use super::nelder_mead::Minimum;

/// Step size below which the search stops.
const MIN_STEP: f64 = 1e-9;

/// Gaussian perturbations of the incumbent, kept when they do not increase the
/// value. The step grows after a success and shrinks after a failure so that
/// about one proposal in five succeeds.
pub(crate) fn polish<F, R>(mut f: F, start: Minimum, step: f64, max_evaluations: usize, rng: &mut R) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let n = start.x.len().max(1) as f64;
    let grow = (1.0 / n).exp();
    let shrink = (-0.25 / n).exp();
    let mut x = start.x;
    let mut value = start.value;
    let mut sigma = step;
    let mut evaluations = 0;
    while evaluations < max_evaluations && sigma > MIN_STEP {
        let trial: Vec<f64> = x
            .iter()
            .map(|xi| xi + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let v = f(&trial);
        evaluations += 1;
        if v <= value {
            x = trial;
            value = v;
            sigma *= grow;
        } else {
            sigma *= shrink;
        }
    }
    Minimum {
        x,
        value,
        evaluations: start.evaluations + evaluations,
        iterations: start.iterations,
        converged: start.converged || sigma <= MIN_STEP,
    }
}
