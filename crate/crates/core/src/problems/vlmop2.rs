use crate::error::{MooError, Result};
use crate::problem::Problem;
use crate::types::{DecisionVector, Jacobian};

/// Two Gaussian-well objectives centred at ±(1/√d)·1 with a non-convex front:
/// `f_1 = 1 − exp(−‖θ − a‖²)`, `f_2 = 1 − exp(−‖θ + a‖²)`, `a = (1/√d)·1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vlmop2 {
    d: usize,
    offset: f64,
}

impl Vlmop2 {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(MooError::invalid("VLMOP2 needs d >= 1"));
        }
        Ok(Vlmop2 {
            d,
            offset: 1.0 / (d as f64).sqrt(),
        })
    }

    fn sq_dists(&self, theta: &[f64]) -> (f64, f64) {
        theta.iter().fold((0.0, 0.0), |(a, b), x| {
            (a + (x - self.offset).powi(2), b + (x + self.offset).powi(2))
        })
    }
}

impl Problem for Vlmop2 {
    fn name(&self) -> &str {
        "vlmop2"
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn objectives(&self, theta: &[f64]) -> Vec<f64> {
        let (s1, s2) = self.sq_dists(theta);
        vec![1.0 - (-s1).exp(), 1.0 - (-s2).exp()]
    }

    fn jacobian(&self, theta: &[f64]) -> Jacobian {
        let (s1, s2) = self.sq_dists(theta);
        let (e1, e2) = (2.0 * (-s1).exp(), 2.0 * (-s2).exp());
        let mut data = Vec::with_capacity(2 * self.d);
        data.extend(theta.iter().map(|x| e1 * (x - self.offset)));
        data.extend(theta.iter().map(|x| e2 * (x + self.offset)));
        Jacobian::new(2, self.d, data).expect("finite by construction")
    }
}

/// `num_points` Pareto-optimal decisions, all coordinates equal to c with c
/// evenly spaced over [−1/√d, 1/√d].
pub fn vlmop2_pareto_set(problem: &Vlmop2, num_points: usize) -> Result<Vec<DecisionVector>> {
    if num_points < 2 {
        return Err(MooError::invalid("pareto set needs at least 2 points"));
    }
    let a = problem.offset;
    (0..num_points)
        .map(|k| {
            let c = -a + 2.0 * a * k as f64 / (num_points - 1) as f64;
            DecisionVector::new(vec![c; problem.d])
        })
        .collect()
}

/// Objective vectors of [`vlmop2_pareto_set`].
pub fn vlmop2_pareto_front(problem: &Vlmop2, num_points: usize) -> Result<Vec<[f64; 2]>> {
    Ok(vlmop2_pareto_set(problem, num_points)?
        .iter()
        .map(|theta| {
            let f = problem.objectives(theta);
            [f[0], f[1]]
        })
        .collect())
}
