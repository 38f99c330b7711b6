//! Pareto dominance under exact IEEE comparison.

use crate::error::{ensure_finite, ensure_len, Result};

/// Relation of `a` to `b` under minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DominanceRelation {
    /// `a ≤ b` componentwise with at least one strict, but not all strict.
    DominatesWeak,
    DominatedWeak,
    /// `a < b` in every component.
    StrictDominates,
    StrictDominated,
    Incomparable,
    Equal,
}

impl DominanceRelation {
    /// True when `a ⪯ b` (weak or strict dominance of `a` over `b`).
    pub fn is_dominating(self) -> bool {
        matches!(self, Self::DominatesWeak | Self::StrictDominates)
    }

    pub fn is_dominated(self) -> bool {
        matches!(self, Self::DominatedWeak | Self::StrictDominated)
    }

    pub fn flip(self) -> Self {
        match self {
            Self::DominatesWeak => Self::DominatedWeak,
            Self::DominatedWeak => Self::DominatesWeak,
            Self::StrictDominates => Self::StrictDominated,
            Self::StrictDominated => Self::StrictDominates,
            other => other,
        }
    }
}

/// Compares two objective vectors.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<DominanceRelation> {
    ensure_len("dominates", a.len(), b.len())?;
    ensure_finite("dominates lhs", a)?;
    ensure_finite("dominates rhs", b)?;
    Ok(relation_unchecked(a, b))
}

/// `dominates` without validation; callers guarantee equal lengths and finite entries.
pub(crate) fn relation_unchecked(a: &[f64], b: &[f64]) -> DominanceRelation {
    let (mut less, mut greater) = (0usize, 0usize);
    for (x, y) in a.iter().zip(b) {
        if x < y {
            less += 1;
        } else if x > y {
            greater += 1;
        }
    }
    let n = a.len();
    match (less, greater) {
        (0, 0) => DominanceRelation::Equal,
        (l, 0) if l == n => DominanceRelation::StrictDominates,
        (_, 0) => DominanceRelation::DominatesWeak,
        (0, g) if g == n => DominanceRelation::StrictDominated,
        (0, _) => DominanceRelation::DominatedWeak,
        _ => DominanceRelation::Incomparable,
    }
}

/// `a ⪯ b`: no worse anywhere and strictly better somewhere.
pub(crate) fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    relation_unchecked(a, b).is_dominating()
}
