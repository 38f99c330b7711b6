//! Multi-objective optimization through Tchebycheff scalarization solved by
//! online mirror descent, with an adaptive Pareto-archive conversion of the
//! iterates into a final solution.
//!
//! ```
//! use omd_tch::{problems::Vlmop2, run, Method, PreferenceVector, SolverConfig};
//!
//! let problem = Vlmop2::new(10).unwrap();
//! let mut config = SolverConfig::new(Method::AdaOmdGd, PreferenceVector::new(vec![0.5, 0.5]).unwrap());
//! config.rounds = 200;
//! let result = run(&problem, &config).unwrap();
//! assert_eq!(result.trace.len(), 200);
//! ```

pub mod archive;
pub mod bounds;
pub mod cli;
pub mod dominance;
pub mod error;
pub mod fedsim;
pub mod harness;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod scalarize;
pub mod simplex;
pub mod solver;
pub mod types;

pub use archive::{check_lagrangian_bound, ArchiveEntry, InsertOutcome, ParetoArchive};
pub use bounds::{convergence_bound, optimal_step_sizes, BoundConstants, BoundVariant};
pub use dominance::{dominates, DominanceRelation};
pub use error::{MooError, Result};
pub use problem::{evaluate, gradient, stochastic_gradient, Problem};
pub use scalarize::{
    composite_gradient, ls_value, stch_value, stch_weights, tch_subgradient_index, tch_value, NadirPoint,
    SmoothingScale,
};
pub use simplex::project_simplex;
pub use solver::{run, update_lambda_eg, update_lambda_pgd, update_theta, Method, SolveResult, SolverConfig};
pub use types::{DecisionVector, Jacobian, ObjectiveValues, PreferenceVector, SimplexWeights};
