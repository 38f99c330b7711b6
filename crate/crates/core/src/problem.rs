//! The interface every solver consumes.

use crate::error::{ensure_finite, ensure_len, Result};
use crate::types::{DecisionVector, Jacobian, ObjectiveValues};

/// A multi-objective problem `min_θ (f_1(θ), …, f_m(θ))`.
///
/// Implementors provide the raw maths on slices of the right length; the
/// free functions [`evaluate`], [`gradient`] and [`stochastic_gradient`]
/// do the dimension and finiteness checks.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    /// Number of objectives m.
    fn num_objectives(&self) -> usize;

    /// Decision dimension d.
    fn dim(&self) -> usize;

    fn objectives(&self, theta: &[f64]) -> Vec<f64>;

    fn jacobian(&self, theta: &[f64]) -> Jacobian;

    /// Minibatch objectives and gradients for `(seed, round)`.
    ///
    /// Must be a deterministic function of its arguments. The default is the
    /// exact objectives and gradient.
    fn sampled(&self, theta: &[f64], _seed: u64, _round: u64) -> (Vec<f64>, Jacobian) {
        (self.objectives(theta), self.jacobian(theta))
    }

    fn is_stochastic(&self) -> bool {
        false
    }
}

pub fn evaluate(problem: &dyn Problem, theta: &DecisionVector) -> Result<ObjectiveValues> {
    ensure_len("evaluate", problem.dim(), theta.len())?;
    ObjectiveValues::new(problem.objectives(theta))
}

pub fn gradient(problem: &dyn Problem, theta: &DecisionVector) -> Result<Jacobian> {
    ensure_len("gradient", problem.dim(), theta.len())?;
    let j = problem.jacobian(theta);
    ensure_finite("gradient", j.as_slice())?;
    Ok(j)
}

pub fn stochastic_gradient(
    problem: &dyn Problem,
    theta: &DecisionVector,
    seed: u64,
    round: u64,
) -> Result<(ObjectiveValues, Jacobian)> {
    ensure_len("stochastic_gradient", problem.dim(), theta.len())?;
    let (f, j) = problem.sampled(theta, seed, round);
    ensure_finite("stochastic gradient", j.as_slice())?;
    Ok((ObjectiveValues::new(f)?, j))
}

/// Central finite-difference Jacobian of [`Problem::objectives`].
///
/// The step in coordinate k is `rel_step · max(1, ‖θ‖_∞)`.
pub fn finite_difference_jacobian(problem: &dyn Problem, theta: &[f64], rel_step: f64) -> Jacobian {
    let m = problem.num_objectives();
    let d = theta.len();
    let h = rel_step * theta.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let mut jac = Jacobian::zeros(m, d);
    let mut probe = theta.to_vec();
    for k in 0..d {
        probe[k] = theta[k] + h;
        let up = problem.objectives(&probe);
        probe[k] = theta[k] - h;
        let down = problem.objectives(&probe);
        probe[k] = theta[k];
        for i in 0..m {
            jac.row_mut(i)[k] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    jac
}

/// Largest relative discrepancy between two Jacobians, `|a-b| / max(1, |b|)` entrywise.
pub fn max_relative_error(analytic: &Jacobian, reference: &Jacobian) -> f64 {
    analytic
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}
