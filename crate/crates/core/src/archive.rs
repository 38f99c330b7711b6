//! Adaptive online-to-batch conversion.
//!
//! The archive keeps the iterates that no other iterate weakly dominates.
//! Every inserted iterate carries one unit of weight: a dominated candidate
//! splits its unit equally among the members dominating it, and a candidate
//! that dominates members absorbs their accumulated weight when they are
//! evicted. The weights therefore always sum to the number of insertions,
//! and [`ParetoArchive::output`] is a convex combination of members.

use crate::dominance::{relation_unchecked, weakly_dominates, DominanceRelation};
use crate::error::{ensure_finite, MooError, Result};
use crate::problem::{evaluate, Problem};
use crate::types::{DecisionVector, ObjectiveValues, PreferenceVector, SimplexWeights};

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    /// 1-based round at which the iterate was produced.
    pub round: u64,
    pub theta: DecisionVector,
    pub objectives: ObjectiveValues,
    /// Own unit weight plus everything inherited so far; always ≥ 1.
    pub weight: f64,
}

/// What happened to the candidate passed to [`ParetoArchive::insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// Dominated by `dominators` members, each of which received 1/dominators.
    Discarded { dominators: usize },
    /// Added; `evicted` members were dominated by it and folded into its weight.
    Added { evicted: usize },
    /// Equal to an existing member and folded into it (only with duplicate merging on).
    Merged,
}

#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    inserted: u64,
    merge_duplicates: bool,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exactly-equal objective vectors are kept as separate members by
    /// default. With merging on, a candidate equal to a member hands its unit
    /// weight to that member instead.
    pub fn with_duplicate_merging(merge: bool) -> Self {
        ParetoArchive {
            merge_duplicates: merge,
            ..Self::default()
        }
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of candidates seen so far (t).
    pub fn inserted_count(&self) -> u64 {
        self.inserted
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Offers the round-`round` iterate to the archive. `round` must be
    /// exactly one more than the previous insertion.
    pub fn insert(
        &mut self,
        round: u64,
        theta: DecisionVector,
        objectives: ObjectiveValues,
    ) -> Result<InsertOutcome> {
        if round != self.inserted + 1 {
            return Err(MooError::Archive(format!(
                "out-of-order insertion: expected round {}, got {round}",
                self.inserted + 1
            )));
        }
        ensure_finite("archive objectives", &objectives)?;
        if let Some(first) = self.entries.first() {
            if first.objectives.len() != objectives.len() {
                return Err(MooError::dim("archive objectives", first.objectives.len(), objectives.len()));
            }
            if first.theta.len() != theta.len() {
                return Err(MooError::dim("archive theta", first.theta.len(), theta.len()));
            }
        }
        self.inserted = round;

        if self.merge_duplicates {
            if let Some(twin) = self
                .entries
                .iter_mut()
                .find(|e| relation_unchecked(&e.objectives, &objectives) == DominanceRelation::Equal)
            {
                twin.weight += 1.0;
                return Ok(InsertOutcome::Merged);
            }
        }

        let dominators: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| weakly_dominates(&e.objectives, &objectives))
            .map(|(i, _)| i)
            .collect();
        if !dominators.is_empty() {
            let share = 1.0 / dominators.len() as f64;
            for &i in &dominators {
                self.entries[i].weight += share;
            }
            return Ok(InsertOutcome::Discarded {
                dominators: dominators.len(),
            });
        }

        let mut weight = 1.0;
        let before = self.entries.len();
        self.entries.retain(|e| {
            if weakly_dominates(&objectives, &e.objectives) {
                weight += e.weight;
                false
            } else {
                true
            }
        });
        let evicted = before - self.entries.len();
        self.entries.push(ArchiveEntry {
            round,
            theta,
            objectives,
            weight,
        });
        Ok(InsertOutcome::Added { evicted })
    }

    /// θ̃ = (1/t) Σ γ_τ θ^(τ) over current members.
    pub fn output(&self) -> Result<DecisionVector> {
        if self.inserted == 0 || self.entries.is_empty() {
            return Err(MooError::Archive("output of an empty archive".into()));
        }
        let d = self.entries[0].theta.len();
        let t = self.inserted as f64;
        let mut out = vec![0.0; d];
        for e in &self.entries {
            let scale = e.weight / t;
            out.iter_mut().zip(e.theta.iter()).for_each(|(o, x)| *o += scale * x);
        }
        DecisionVector::new(out)
    }
}

/// Σ_i λ_i w_i f_i, the Lagrangian of the min-max reformulation.
pub fn lagrangian(f: &[f64], lambda: &[f64], w: &[f64]) -> f64 {
    f.iter().zip(lambda).zip(w).map(|((fi, li), wi)| li * wi * fi).sum()
}

/// Checks `L(θ̃, λ; w) ≤ (1/T) Σ_t L(θ^(t), λ; w) + 1e-9` for every supplied λ,
/// re-evaluating the problem at θ̃.
///
/// `iterates` must list every `(θ^(t), f(θ^(t)))` fed to the archive, in order.
/// The inequality is guaranteed only for convex objectives.
pub fn check_lagrangian_bound(
    archive: &ParetoArchive,
    problem: &dyn Problem,
    iterates: &[(DecisionVector, ObjectiveValues)],
    lambdas: &[SimplexWeights],
    w: &PreferenceVector,
) -> Result<bool> {
    const SLACK: f64 = 1e-9;
    if iterates.len() as u64 != archive.inserted_count() {
        return Err(MooError::dim(
            "lagrangian check iterates",
            archive.inserted_count() as usize,
            iterates.len(),
        ));
    }
    let m = w.len();
    if let Some((_, f)) = iterates.iter().find(|(_, f)| f.len() != m) {
        return Err(MooError::dim("lagrangian check objectives", m, f.len()));
    }
    if let Some(l) = lambdas.iter().find(|l| l.len() != m) {
        return Err(MooError::dim("lagrangian check lambda", m, l.len()));
    }
    let tilde = archive.output()?;
    let f_tilde = evaluate(problem, &tilde)?;
    let t = iterates.len() as f64;
    Ok(lambdas.iter().all(|lambda| {
        let lhs = lagrangian(&f_tilde, lambda, w);
        let rhs = iterates
            .iter()
            .map(|(_, f)| lagrangian(f, lambda, w))
            .sum::<f64>()
            / t;
        lhs <= rhs + SLACK
    }))
}
