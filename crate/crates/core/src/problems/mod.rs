//! Bundled benchmark problems.

mod fedlogreg;
mod quadratic;
mod vlmop2;

pub use fedlogreg::{Client, FedLogReg, FedSpec, Heterogeneity, Split};
pub use quadratic::{quadratic_tch_optimum, QuadraticBiObjective};
pub use vlmop2::{vlmop2_pareto_front, vlmop2_pareto_set, Vlmop2};
