//! Closed-form step sizes and suboptimality bounds for the PGD/PGD and
//! PGD/EG instantiations.

use std::fmt;
use std::str::FromStr;

use crate::error::{MooError, Result};

/// Mirror map used for λ (θ always uses projected gradient descent).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    PgdPgd,
    PgdEg,
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundVariant::PgdPgd => "pgd-pgd",
            BoundVariant::PgdEg => "pgd-eg",
        })
    }
}

impl FromStr for BoundVariant {
    type Err = MooError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgd-pgd" => Ok(BoundVariant::PgdPgd),
            "pgd-eg" => Ok(BoundVariant::PgdEg),
            other => Err(MooError::invalid(format!("unknown bound variant '{other}'; valid: pgd-pgd, pgd-eg"))),
        }
    }
}

/// Problem constants: objectives bounded by `u`, gradient ∞-norms by `l`,
/// decisions by the box `r_theta`, in dimension `d` with `m` objectives over `t` rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub u: f64,
    pub l: f64,
    pub r_theta: f64,
    pub d: usize,
    pub m: usize,
    pub t: usize,
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("U", self.u), ("L", self.l), ("R_theta", self.r_theta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(MooError::invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.d == 0 || self.t == 0 {
            return Err(MooError::invalid("d and T must be >= 1"));
        }
        if self.m < 2 {
            return Err(MooError::invalid(format!("m must be >= 2, got {}", self.m)));
        }
        Ok(())
    }
}

/// (η_θ, η_λ) minimizing the expected bound.
///
/// η_θ = √(8R²/(5TL²)) for both; η_λ = √(8/(5TmU²)) for PGD and
/// √(4 ln m/(5TU²)) for EG.
pub fn optimal_step_sizes(variant: BoundVariant, c: &BoundConstants) -> Result<(f64, f64)> {
    c.validate()?;
    let t = c.t as f64;
    let m = c.m as f64;
    let eta_theta = (8.0 * c.r_theta * c.r_theta / (5.0 * t * c.l * c.l)).sqrt();
    let eta_lambda = match variant {
        BoundVariant::PgdPgd => (8.0 / (5.0 * t * m * c.u * c.u)).sqrt(),
        BoundVariant::PgdEg => (4.0 * m.ln() / (5.0 * t * c.u * c.u)).sqrt(),
    };
    Ok((eta_theta, eta_lambda))
}

/// Individual terms of the suboptimality bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub theta: f64,
    pub lambda: f64,
    /// Azuma–Hoeffding deviation terms, zero for the in-expectation bound.
    pub high_prob: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.theta + self.lambda + self.high_prob
    }
}

/// λ-player term for a real-valued objective count; `m` only enters through √m or √ln m.
pub fn lambda_term(variant: BoundVariant, m: f64, u: f64, t: f64) -> f64 {
    match variant {
        BoundVariant::PgdPgd => 2.0 * 10f64.sqrt() * m.sqrt() * u / t.sqrt(),
        BoundVariant::PgdEg => 2.0 * 5f64.sqrt() * m.ln().sqrt() * u / t.sqrt(),
    }
}

/// Bound terms on E[TCH(θ̂)] − min TCH, or the bound holding with
/// probability ≥ 1 − γ when `gamma` is given.
pub fn convergence_bound_terms(
    variant: BoundVariant,
    c: &BoundConstants,
    gamma: Option<f64>,
) -> Result<BoundTerms> {
    c.validate()?;
    let t = c.t as f64;
    let drl = c.d as f64 * c.r_theta * c.l;
    let theta = 2.0 * 10f64.sqrt() * drl / t.sqrt();
    let lambda = lambda_term(variant, c.m as f64, c.u, t);
    let high_prob = match gamma {
        None => 0.0,
        Some(g) if g > 0.0 && g < 1.0 => {
            let dev = (2.0 / t * (1.0 / g).ln()).sqrt();
            4.0 * drl * dev + 4.0 * c.u * dev
        }
        Some(g) => return Err(MooError::invalid(format!("gamma must lie in (0, 1), got {g}"))),
    };
    Ok(BoundTerms { theta, lambda, high_prob })
}

pub fn convergence_bound(variant: BoundVariant, c: &BoundConstants, gamma: Option<f64>) -> Result<f64> {
    convergence_bound_terms(variant, c, gamma).map(|b| b.total())
}
