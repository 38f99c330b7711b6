//! Online mirror descent for Tchebycheff scalarization, plus the LS / TCH /
//! STCH baselines driven through the same round loop.
//!
//! Each round evaluates f(θ^(t)) and its (stochastic) Jacobian once, then
//! updates λ (projected gradient ascent or exponentiated gradient) and θ
//! (gradient descent on Σ λ_i w_i f_i, optionally clipped to a box). The
//! θ step always uses the round-t weights, so the order of the two updates
//! does not change any value.

use std::fmt;
use std::str::FromStr;

use crate::archive::ParetoArchive;
use crate::error::{ensure_finite, ensure_len, MooError, Result};
use crate::problem::{evaluate, gradient, stochastic_gradient, Problem};
use crate::rng::{normal_vec, stream, Purpose};
use crate::scalarize::{composite_gradient, softmax, stch_weights, tch_subgradient_index, tch_value, NadirPoint, SmoothingScale};
use crate::simplex::project_simplex;
use crate::types::{DecisionVector, Jacobian, ObjectiveValues, PreferenceVector, SimplexWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ls,
    Tch,
    Stch,
    OmdGd,
    OmdEg,
    AdaOmdGd,
    AdaOmdEg,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Ls,
        Method::Tch,
        Method::Stch,
        Method::OmdGd,
        Method::OmdEg,
        Method::AdaOmdGd,
        Method::AdaOmdEg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ls => "ls",
            Method::Tch => "tch",
            Method::Stch => "stch",
            Method::OmdGd => "omd-gd",
            Method::OmdEg => "omd-eg",
            Method::AdaOmdGd => "adaomd-gd",
            Method::AdaOmdEg => "adaomd-eg",
        }
    }

    /// Methods that maintain the Pareto archive and report θ̃.
    pub fn is_adaptive(self) -> bool {
        matches!(self, Method::AdaOmdGd | Method::AdaOmdEg)
    }

    pub(crate) fn lambda_update(self) -> Option<LambdaUpdate> {
        match self {
            Method::OmdGd | Method::AdaOmdGd => Some(LambdaUpdate::Pgd),
            Method::OmdEg | Method::AdaOmdEg => Some(LambdaUpdate::Eg),
            _ => None,
        }
    }

    pub fn valid_names() -> String {
        Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = MooError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| MooError::invalid(format!("unknown method '{s}'; valid: {}", Method::valid_names())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LambdaUpdate {
    Pgd,
    Eg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub rounds: usize,
    pub eta_theta: f64,
    pub eta_lambda: f64,
    /// Only read by STCH.
    pub mu: f64,
    pub preference: PreferenceVector,
    pub nadir: Option<NadirPoint>,
    pub seed: u64,
    /// Optional ∞-norm box |θ_k| ≤ R.
    pub theta_box: Option<f64>,
    pub stochastic: bool,
    /// θ^(1) entries are N(0, init_scale²).
    pub init_scale: f64,
    /// Keep every (θ^(t), f(θ^(t))) in the result.
    pub record_iterates: bool,
    /// Fold candidates equal to an archive member into it.
    pub merge_duplicates: bool,
}

impl SolverConfig {
    /// Defaults: 5000 rounds, η_θ = 0.02, η_λ = 1.0, μ = 0.1, seed 0, init scale 0.1.
    pub fn new(method: Method, preference: PreferenceVector) -> Self {
        SolverConfig {
            method,
            rounds: 5000,
            eta_theta: 0.02,
            eta_lambda: 1.0,
            mu: 0.1,
            preference,
            nadir: None,
            seed: 0,
            theta_box: None,
            stochastic: false,
            init_scale: 0.1,
            record_iterates: false,
            merge_duplicates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(MooError::invalid("rounds must be >= 1"));
        }
        if !(self.eta_theta.is_finite() && self.eta_theta > 0.0) {
            return Err(MooError::invalid(format!("eta_theta must be > 0, got {}", self.eta_theta)));
        }
        if !(self.eta_lambda.is_finite() && self.eta_lambda >= 0.0) {
            return Err(MooError::invalid(format!("eta_lambda must be >= 0, got {}", self.eta_lambda)));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(MooError::invalid("init_scale must be >= 0"));
        }
        if let Some(r) = self.theta_box {
            if !(r.is_finite() && r > 0.0) {
                return Err(MooError::invalid("theta box must be > 0"));
            }
        }
        if self.method == Method::Stch {
            SmoothingScale::new(self.mu)?;
        }
        if let Some(z) = &self.nadir {
            ensure_len("nadir", self.preference.len(), z.as_slice().len())?;
        }
        Ok(())
    }
}

/// One row of the per-round trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub objectives: Vec<f64>,
    /// Combination weights applied to the gradients this round.
    pub lambda: Vec<f64>,
    pub tch_value: f64,
    /// Archive size after this round's insertion; 0 for non-adaptive methods.
    pub archive_size: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub method: Method,
    pub trace: Vec<RoundRecord>,
    pub theta_bar: DecisionVector,
    pub objectives_bar: ObjectiveValues,
    pub theta_tilde: Option<DecisionVector>,
    pub objectives_tilde: Option<ObjectiveValues>,
    pub theta_last: DecisionVector,
    pub archive: Option<ParetoArchive>,
    pub iterates: Option<Vec<(DecisionVector, ObjectiveValues)>>,
}

impl SolveResult {
    /// θ̃ for adaptive methods, θ̄ otherwise.
    pub fn output(&self) -> (&DecisionVector, &ObjectiveValues) {
        match (&self.theta_tilde, &self.objectives_tilde) {
            (Some(t), Some(f)) => (t, f),
            _ => (&self.theta_bar, &self.objectives_bar),
        }
    }
}

/// θ' = clip(θ − η_θ Σ λ_i w_i ∇f_i).
pub fn update_theta(
    theta: &DecisionVector,
    jac: &Jacobian,
    lambda: &SimplexWeights,
    w: &PreferenceVector,
    eta_theta: f64,
    theta_box: Option<f64>,
) -> Result<DecisionVector> {
    ensure_len("update_theta", theta.len(), jac.dim())?;
    let g = composite_gradient(jac, lambda, w)?;
    DecisionVector::new(step_theta(theta, &g, eta_theta, theta_box))
}

pub(crate) fn step_theta(theta: &[f64], g: &[f64], eta: f64, theta_box: Option<f64>) -> Vec<f64> {
    theta
        .iter()
        .zip(g)
        .map(|(t, gk)| {
            let v = t - eta * gk;
            match theta_box {
                Some(r) => v.clamp(-r, r),
                None => v,
            }
        })
        .collect()
}

/// λ' = Π_Δ(λ + η_λ (w ∘ f)).
pub fn update_lambda_pgd(
    lambda: &SimplexWeights,
    f: &[f64],
    w: &PreferenceVector,
    eta_lambda: f64,
) -> Result<SimplexWeights> {
    ensure_len("update_lambda_pgd", lambda.len(), f.len())?;
    ensure_len("update_lambda_pgd", lambda.len(), w.len())?;
    ensure_finite("update_lambda_pgd objectives", f)?;
    pgd_step(lambda, f, w, eta_lambda)
}

pub(crate) fn pgd_step(lambda: &[f64], f: &[f64], w: &[f64], eta: f64) -> Result<SimplexWeights> {
    if eta == 0.0 {
        return Ok(SimplexWeights::from_raw(lambda.to_vec()));
    }
    let v: Vec<f64> = lambda
        .iter()
        .zip(f)
        .zip(w)
        .map(|((l, fi), wi)| l + eta * wi * fi)
        .collect();
    project_simplex(&v)
}

/// λ'_i ∝ λ_i exp(η_λ w_i f_i), evaluated in log space.
///
/// λ must be strictly positive. Entries that would underflow are floored at
/// the smallest normal double so the result stays strictly positive.
pub fn update_lambda_eg(
    lambda: &SimplexWeights,
    f: &[f64],
    w: &PreferenceVector,
    eta_lambda: f64,
) -> Result<SimplexWeights> {
    ensure_len("update_lambda_eg", lambda.len(), f.len())?;
    ensure_len("update_lambda_eg", lambda.len(), w.len())?;
    ensure_finite("update_lambda_eg objectives", f)?;
    eg_step(lambda, f, w, eta_lambda)
}

pub(crate) fn eg_step(lambda: &[f64], f: &[f64], w: &[f64], eta: f64) -> Result<SimplexWeights> {
    if lambda.iter().any(|l| *l <= 0.0) {
        return Err(MooError::invalid("exponentiated gradient needs strictly positive weights"));
    }
    if eta == 0.0 {
        return Ok(SimplexWeights::from_raw(lambda.to_vec()));
    }
    let logits: Vec<f64> = lambda
        .iter()
        .zip(f)
        .zip(w)
        .map(|((l, fi), wi)| l.ln() + eta * wi * fi)
        .collect();
    let mut out = softmax(&logits);
    if out.iter().any(|v| *v < f64::MIN_POSITIVE) {
        out.iter_mut().for_each(|v| *v = v.max(f64::MIN_POSITIVE));
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= s);
    }
    Ok(SimplexWeights::from_raw(out))
}

/// θ^(1): i.i.d. normal entries scaled by `init_scale`, from the seeded init stream.
pub fn initial_theta(d: usize, seed: u64, init_scale: f64, theta_box: Option<f64>) -> DecisionVector {
    let mut rng = stream(seed, Purpose::Init, 0, 0);
    let mut theta = normal_vec(&mut rng, d, init_scale);
    if let Some(r) = theta_box {
        theta.iter_mut().for_each(|t| *t = t.clamp(-r, r));
    }
    DecisionVector::new(theta).expect("finite normal draws")
}

/// Runs `config.rounds` rounds of the configured method on `problem`.
pub fn run(problem: &dyn Problem, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let m = problem.num_objectives();
    let d = problem.dim();
    let w = &config.preference;
    ensure_len("preference vs problem objectives", m, w.len())?;
    let nadir = config.nadir.clone().unwrap_or_else(|| NadirPoint::zeros(m));

    let mut theta = initial_theta(d, config.seed, config.init_scale, config.theta_box);
    let mut lambda = SimplexWeights::uniform(m);
    let mut archive = config
        .method
        .is_adaptive()
        .then(|| ParetoArchive::with_duplicate_merging(config.merge_duplicates));
    let mut iterates = config.record_iterates.then(|| Vec::with_capacity(config.rounds));
    let mut trace = Vec::with_capacity(config.rounds);
    let mut theta_sum = vec![0.0; d];
    let mut theta_last = theta.clone();

    for t in 1..=config.rounds as u64 {
        let f = evaluate(problem, &theta)?;
        let (f_step, jac) = if config.stochastic && problem.is_stochastic() {
            let (fs, j) = stochastic_gradient(problem, &theta, config.seed, t - 1)?;
            (fs.into_vec(), j)
        } else {
            (f.as_slice().to_vec(), gradient(problem, &theta)?)
        };
        let tch = tch_value(&f, w, &nadir)?;

        let coeffs = match config.method {
            Method::Ls => SimplexWeights::uniform(m),
            Method::Tch => SimplexWeights::one_hot(m, tch_subgradient_index(&f_step, w, &nadir)?),
            Method::Stch => stch_weights(&f_step, w, SmoothingScale::new(config.mu)?)?,
            _ => lambda.clone(),
        };

        let archive_size = match archive.as_mut() {
            Some(a) => {
                a.insert(t, theta.clone(), f.clone())?;
                a.len()
            }
            None => 0,
        };

        theta_sum.iter_mut().zip(theta.iter()).for_each(|(s, x)| *s += x);

        if let Some(rule) = config.method.lambda_update() {
            lambda = match rule {
                LambdaUpdate::Pgd => pgd_step(&lambda, &f_step, w, config.eta_lambda)?,
                LambdaUpdate::Eg => eg_step(&lambda, &f_step, w, config.eta_lambda)?,
            };
        }
        let next = update_theta(&theta, &jac, &coeffs, w, config.eta_theta, config.theta_box)
            .map_err(|e| match e {
                MooError::NonFinite(_) => MooError::NonFinite(format!("theta at round {}", t + 1)),
                other => other,
            })?;

        trace.push(RoundRecord {
            round: t,
            objectives: f.as_slice().to_vec(),
            lambda: coeffs.into_vec(),
            tch_value: tch,
            archive_size,
        });
        let current = std::mem::replace(&mut theta, next);
        if let Some(it) = iterates.as_mut() {
            it.push((current.clone(), f));
        }
        theta_last = current;
    }

    let inv_t = 1.0 / config.rounds as f64;
    let theta_bar = DecisionVector::new(theta_sum.into_iter().map(|s| s * inv_t).collect())?;
    let objectives_bar = evaluate(problem, &theta_bar)?;
    let (theta_tilde, objectives_tilde) = match archive.as_ref() {
        Some(a) => {
            let tilde = a.output()?;
            let f = evaluate(problem, &tilde)?;
            (Some(tilde), Some(f))
        }
        None => (None, None),
    };

    Ok(SolveResult {
        method: config.method,
        trace,
        theta_bar,
        objectives_bar,
        theta_tilde,
        objectives_tilde,
        theta_last,
        archive,
        iterates,
    })
}
