//! Federated training over [`FedLogReg`] with λ-weighted aggregation.
//!
//! Per communication round every client takes `local_steps` gradient steps
//! from the global model on its own loss. The server moves the global model
//! by `Σ_i m·c_i·w_i·Δ_i` where Δ_i is the client's local change and `c` the
//! method's combination weights, so uniform `c` is plain averaging. The dual
//! weights λ are then updated from the clients' end-of-round losses.

use rayon::prelude::*;

use crate::archive::ParetoArchive;
use crate::error::{MooError, Result};
use crate::problems::{FedLogReg, Split};
use crate::scalarize::softmax;
use crate::solver::{eg_step, initial_theta, pgd_step, LambdaUpdate, Method};
use crate::types::{DecisionVector, ObjectiveValues};

#[derive(Debug, Clone, PartialEq)]
pub struct FedConfig {
    pub method: Method,
    pub rounds: usize,
    pub local_steps: usize,
    pub local_lr: f64,
    pub eta_lambda: f64,
    /// STCH temperature.
    pub mu: f64,
    pub init_scale: f64,
    pub seeds: Vec<u64>,
}

impl FedConfig {
    /// T = 300 rounds of τ = 10 local steps at rate 0.1; η_λ = 0.3.
    pub fn new(method: Method) -> Self {
        FedConfig {
            method,
            rounds: 300,
            local_steps: 10,
            local_lr: 0.1,
            eta_lambda: 0.3,
            mu: 0.1,
            init_scale: 0.1,
            seeds: vec![0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.local_steps == 0 {
            return Err(MooError::invalid("rounds and local steps must be >= 1"));
        }
        if !(self.local_lr.is_finite() && self.local_lr > 0.0) {
            return Err(MooError::invalid("local step size must be > 0"));
        }
        if !(self.eta_lambda.is_finite() && self.eta_lambda >= 0.0) {
            return Err(MooError::invalid("eta_lambda must be >= 0"));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(MooError::invalid("mu must be > 0"));
        }
        if self.seeds.is_empty() {
            return Err(MooError::invalid("need at least one seed"));
        }
        Ok(())
    }
}

/// Test-split metrics of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionMetrics {
    pub test_losses: Vec<f64>,
    pub test_accuracies: Vec<f64>,
    pub agnostic_loss: f64,
    pub accuracy_parity: f64,
    pub average_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FedMetrics {
    pub method: Method,
    pub seed: u64,
    /// Max client training loss of the global model after each round.
    pub worst_train_loss: Vec<f64>,
    /// Combination weights applied in each round.
    pub lambda_trace: Vec<Vec<f64>>,
    pub global_trace: Vec<DecisionVector>,
    pub bar: SolutionMetrics,
    pub tilde: Option<SolutionMetrics>,
    pub last: SolutionMetrics,
    /// Final archive size for adaptive methods.
    pub archive_size: Option<usize>,
}

impl FedMetrics {
    /// θ̃ metrics for adaptive methods, θ̄ otherwise.
    pub fn output(&self) -> &SolutionMetrics {
        self.tilde.as_ref().unwrap_or(&self.bar)
    }
}

/// Maximum entry.
pub fn agnostic_loss(client_losses: &[f64]) -> Result<f64> {
    if client_losses.is_empty() {
        return Err(MooError::invalid("agnostic loss of no clients"));
    }
    if client_losses.iter().any(|v| !v.is_finite()) {
        return Err(MooError::NonFinite("client losses".into()));
    }
    Ok(client_losses.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Population standard deviation (divides by m).
pub fn accuracy_parity(client_accuracies: &[f64]) -> Result<f64> {
    if client_accuracies.is_empty() {
        return Err(MooError::invalid("accuracy parity of no clients"));
    }
    if client_accuracies.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(MooError::invalid("accuracies must lie in [0, 1]"));
    }
    let n = client_accuracies.len() as f64;
    let mean = client_accuracies.iter().sum::<f64>() / n;
    Ok((client_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt())
}

pub fn solution_metrics(problem: &FedLogReg, theta: &[f64]) -> Result<SolutionMetrics> {
    let m = problem.num_clients();
    let test_losses: Vec<f64> = (0..m).map(|i| problem.client_loss(i, theta, Split::Test, None)).collect();
    let test_accuracies: Vec<f64> = (0..m).map(|i| problem.client_accuracy(i, theta, Split::Test)).collect();
    Ok(SolutionMetrics {
        agnostic_loss: agnostic_loss(&test_losses)?,
        accuracy_parity: accuracy_parity(&test_accuracies)?,
        average_accuracy: test_accuracies.iter().sum::<f64>() / m as f64,
        test_losses,
        test_accuracies,
    })
}

fn train_losses(problem: &FedLogReg, theta: &[f64]) -> Vec<f64> {
    (0..problem.num_clients())
        .map(|i| problem.client_loss(i, theta, Split::Train, None))
        .collect()
}

/// One simulation of `config.method` with the given seed.
pub fn run_federated(problem: &FedLogReg, config: &FedConfig, seed: u64) -> Result<FedMetrics> {
    config.validate()?;
    let m = problem.num_clients();
    let d = problem.spec().features + 1;
    let w = vec![1.0 / m as f64; m];
    let stochastic = problem.spec().batch_size.is_some();

    let mut theta = initial_theta(d, seed, config.init_scale, None).into_vec();
    let mut lambda = vec![1.0 / m as f64; m];
    let mut archive = config.method.is_adaptive().then(ParetoArchive::new);
    let mut global_losses = train_losses(problem, &theta);
    let mut theta_sum = vec![0.0; d];
    let mut worst_train_loss = Vec::with_capacity(config.rounds);
    let mut lambda_trace = Vec::with_capacity(config.rounds);
    let mut global_trace = Vec::with_capacity(config.rounds);

    for t in 0..config.rounds as u64 {
        let coeffs = match config.method {
            Method::Ls => vec![1.0 / m as f64; m],
            Method::Tch => {
                let mut best = 0;
                for i in 1..m {
                    if w[i] * global_losses[i] > w[best] * global_losses[best] {
                        best = i;
                    }
                }
                let mut c = vec![0.0; m];
                c[best] = 1.0;
                c
            }
            Method::Stch => {
                let scaled: Vec<f64> = global_losses.iter().zip(&w).map(|(f, wi)| wi * f / config.mu).collect();
                softmax(&scaled)
            }
            _ => lambda.clone(),
        };

        let local: Vec<(Vec<f64>, f64)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut local = theta.clone();
                let mut grad = vec![0.0; d];
                for s in 0..config.local_steps as u64 {
                    if stochastic {
                        problem.client_batch_loss(i, &local, seed, t * config.local_steps as u64 + s, &mut grad);
                    } else {
                        problem.client_loss(i, &local, Split::Train, Some(&mut grad));
                    }
                    local.iter_mut().zip(&grad).for_each(|(x, g)| *x -= config.local_lr * g);
                }
                let end_loss = problem.client_loss(i, &local, Split::Train, None);
                let delta = local.iter().zip(&theta).map(|(a, b)| a - b).collect();
                (delta, end_loss)
            })
            .collect();

        let mut next = theta.clone();
        for ((delta, _), (c, wi)) in local.iter().zip(coeffs.iter().zip(&w)) {
            let scale = m as f64 * c * wi;
            if scale != 0.0 {
                next.iter_mut().zip(delta).for_each(|(x, dx)| *x += scale * dx);
            }
        }
        if next.iter().any(|x| !x.is_finite()) {
            return Err(MooError::NonFinite(format!("global model at round {}", t + 1)));
        }

        if let (Some(rule), true) = (config.method.lambda_update(), m > 1) {
            let end_losses: Vec<f64> = local.iter().map(|(_, l)| *l).collect();
            lambda = match rule {
                LambdaUpdate::Pgd => pgd_step(&lambda, &end_losses, &w, config.eta_lambda)?,
                LambdaUpdate::Eg => eg_step(&lambda, &end_losses, &w, config.eta_lambda)?,
            }
            .into_vec();
        }

        theta = next;
        global_losses = train_losses(problem, &theta);
        worst_train_loss.push(agnostic_loss(&global_losses)?);
        lambda_trace.push(coeffs);
        theta_sum.iter_mut().zip(&theta).for_each(|(s, x)| *s += x);
        let theta_dv = DecisionVector::new(theta.clone())?;
        if let Some(a) = archive.as_mut() {
            a.insert(t + 1, theta_dv.clone(), ObjectiveValues::new(global_losses.clone())?)?;
        }
        global_trace.push(theta_dv);
    }

    let theta_bar: Vec<f64> = theta_sum.iter().map(|s| s / config.rounds as f64).collect();
    let tilde = match archive.as_ref() {
        Some(a) => Some(solution_metrics(problem, &a.output()?)?),
        None => None,
    };
    Ok(FedMetrics {
        method: config.method,
        seed,
        worst_train_loss,
        lambda_trace,
        global_trace,
        bar: solution_metrics(problem, &theta_bar)?,
        tilde,
        last: solution_metrics(problem, &theta)?,
        archive_size: archive.as_ref().map(ParetoArchive::len),
    })
}

/// Runs every seed in `config.seeds` in parallel, results in seed order.
///
/// The dataset is regenerated per seed by `make_problem`.
pub fn run_seeds<F>(config: &FedConfig, make_problem: F) -> Result<Vec<FedMetrics>>
where
    F: Fn(u64) -> Result<FedLogReg> + Sync,
{
    config.validate()?;
    config
        .seeds
        .par_iter()
        .map(|&seed| run_federated(&make_problem(seed)?, config, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{FedSpec, Heterogeneity};

    #[test]
    fn metric_examples() {
        assert_eq!(agnostic_loss(&[0.2, 0.5, 0.3]).unwrap(), 0.5);
        assert_eq!(agnostic_loss(&[0.7]).unwrap(), 0.7);
        assert_eq!(agnostic_loss(&[0.4; 5]).unwrap(), 0.4);
        assert!(agnostic_loss(&[]).is_err());

        assert_eq!(accuracy_parity(&[0.8; 4]).unwrap(), 0.0);
        assert!((accuracy_parity(&[0.9, 0.8, 0.7]).unwrap() - (0.02f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((accuracy_parity(&[0.9, 0.8, 0.7]).unwrap() - 0.081650).abs() < 1e-6);
        assert_eq!(accuracy_parity(&[1.0, 0.0]).unwrap(), 0.5);
        assert!(accuracy_parity(&[]).is_err());
        assert!(accuracy_parity(&[1.2]).is_err());
    }

    #[test]
    fn max_dominates_any_convex_combination() {
        let losses = [0.3, 0.9, 0.1, 0.4];
        for lam in [[0.25; 4], [0.1, 0.2, 0.3, 0.4], [0.0, 0.0, 1.0, 0.0]] {
            let avg: f64 = losses.iter().zip(lam).map(|(a, b)| a * b).sum();
            assert!(agnostic_loss(&[avg]).unwrap() <= agnostic_loss(&losses).unwrap());
        }
    }

    fn problem(het: Heterogeneity, clients: usize, batch: Option<usize>) -> FedLogReg {
        let mut spec = FedSpec::new(clients, het);
        spec.samples_per_client = 60;
        spec.batch_size = batch;
        FedLogReg::generate(spec, 3).unwrap()
    }

    #[test]
    fn single_client_is_plain_sgd() {
        let p = problem(Heterogeneity::Rotation { angles_deg: vec![0.0] }, 1, Some(16));
        let mut c = FedConfig::new(Method::OmdGd);
        c.rounds = 20;
        c.local_steps = 1;
        c.eta_lambda = 0.0;
        let r = run_federated(&p, &c, 7).unwrap();

        let mut theta = initial_theta(6, 7, 0.1, None).into_vec();
        let mut g = vec![0.0; 6];
        for t in 0..20u64 {
            p.client_batch_loss(0, &theta, 7, t, &mut g);
            theta.iter_mut().zip(&g).for_each(|(x, gi)| *x -= 0.1 * gi);
            assert_eq!(r.global_trace[t as usize].as_slice(), theta.as_slice());
        }
        assert_eq!(r.last.accuracy_parity, 0.0);
    }

    #[test]
    fn zero_dual_step_keeps_uniform_weights() {
        let p = problem(Heterogeneity::default_rotation(4), 4, None);
        let mut c = FedConfig::new(Method::AdaOmdEg);
        c.rounds = 30;
        c.eta_lambda = 0.0;
        let r = run_federated(&p, &c, 0).unwrap();
        assert!(r.lambda_trace.iter().all(|l| l.iter().all(|v| *v == 0.25)));

        let mut ls = c.clone();
        ls.method = Method::Ls;
        let base = run_federated(&p, &ls, 0).unwrap();
        assert_eq!(base.global_trace, r.global_trace);
    }

    #[test]
    fn repeated_runs_are_bitwise_identical() {
        let p = problem(Heterogeneity::PartialClass { classes: 2 }, 3, Some(10));
        let mut c = FedConfig::new(Method::AdaOmdGd);
        c.rounds = 15;
        let a = run_federated(&p, &c, 5).unwrap();
        let b = run_federated(&p, &c, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn homogeneous_clients_keep_lambda_near_uniform() {
        // iid clients; large sets keep the per-client loss gaps, which PGD
        // accumulates, down to sampling noise
        let mut spec = FedSpec::new(5, Heterogeneity::Rotation { angles_deg: vec![0.0; 5] });
        spec.samples_per_client = 20_000;
        let p = FedLogReg::generate(spec, 3).unwrap();
        let mut c = FedConfig::new(Method::OmdGd);
        c.rounds = 100;
        let r = run_federated(&p, &c, 1).unwrap();
        let dev = r
            .lambda_trace
            .iter()
            .flat_map(|l| l.iter().map(|v| (v - 0.2).abs()))
            .fold(0.0, f64::max);
        assert!(dev <= 0.05, "max deviation {dev}");
    }

    #[test]
    fn every_method_runs() {
        let p = problem(Heterogeneity::default_rotation(4), 4, None);
        for method in Method::ALL {
            let mut c = FedConfig::new(method);
            c.rounds = 5;
            let r = run_federated(&p, &c, 2).unwrap();
            assert_eq!(r.worst_train_loss.len(), 5);
            assert_eq!(r.tilde.is_some(), method.is_adaptive());
        }
    }
}
