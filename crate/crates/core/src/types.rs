//! Vector newtypes shared by all solvers.

use std::ops::Deref;

use crate::error::{ensure_finite, MooError, Result};

/// Sum deviations up to this size are renormalized away; larger ones are rejected.
pub const NORMALIZE_TOLERANCE: f64 = 1e-6;

fn normalized_simplex(what: &str, mut v: Vec<f64>) -> Result<Vec<f64>> {
    ensure_finite(what, &v)?;
    if let Some(x) = v.iter().find(|x| **x < 0.0) {
        return Err(MooError::invalid(format!("{what} has negative entry {x}")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZE_TOLERANCE {
        return Err(MooError::invalid(format!(
            "{what} entries sum to {sum}, expected 1"
        )));
    }
    if sum != 1.0 {
        v.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(v)
}

/// User preference `w` on the m-simplex, m ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceVector(Vec<f64>);

impl PreferenceVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.len() < 2 {
            return Err(MooError::invalid(format!(
                "preference needs at least 2 objectives, got {}",
                w.len()
            )));
        }
        normalized_simplex("preference", w).map(PreferenceVector)
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    /// `k`-th of `count` preferences evenly spaced from (1,0) to (0,1), `k` zero-based.
    pub fn evenly_spaced(count: usize, k: usize) -> Result<Self> {
        if count < 2 || k >= count {
            return Err(MooError::invalid(format!(
                "evenly spaced preference {k} of {count}"
            )));
        }
        let denom = (count - 1) as f64;
        let w2 = k as f64 / denom;
        let w1 = (count - 1 - k) as f64 / denom;
        Self::new(vec![w1, w2])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for PreferenceVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Adversarial weights λ on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(MooError::invalid("simplex weights must be nonempty"));
        }
        normalized_simplex("simplex weights", lambda).map(SimplexWeights)
    }

    pub fn uniform(m: usize) -> Self {
        SimplexWeights(vec![1.0 / m as f64; m])
    }

    pub fn one_hot(m: usize, index: usize) -> Self {
        let mut v = vec![0.0; m];
        v[index] = 1.0;
        SimplexWeights(v)
    }

    /// Wraps a vector the caller has already placed on the simplex.
    pub(crate) fn from_raw(v: Vec<f64>) -> Self {
        debug_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        SimplexWeights(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SimplexWeights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Objective vector f(θ) ∈ R^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValues(Vec<f64>);

impl ObjectiveValues {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        ensure_finite("objective values", &f)?;
        Ok(ObjectiveValues(f))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveValues {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Decision variable θ ∈ R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        ensure_finite("decision vector", &theta)?;
        Ok(DecisionVector(theta))
    }

    pub fn zeros(d: usize) -> Self {
        DecisionVector(vec![0.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

impl Deref for DecisionVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Row-major m×d matrix whose row i is the (stochastic) gradient of f_i.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    m: usize,
    d: usize,
    data: Vec<f64>,
}

impl Jacobian {
    pub fn new(m: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * d {
            return Err(MooError::dim("jacobian", m * d, data.len()));
        }
        ensure_finite("jacobian", &data)?;
        Ok(Jacobian { m, d, data })
    }

    pub fn zeros(m: usize, d: usize) -> Self {
        Jacobian {
            m,
            d,
            data: vec![0.0; m * d],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * d);
        for row in rows {
            if row.len() != d {
                return Err(MooError::dim("jacobian row", d, row.len()));
            }
            data.extend(row);
        }
        Self::new(m, d, data)
    }

    pub fn num_objectives(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a d = 0 matrix has m empty rows
        (0..self.m).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preference_normalizes_small_drift() {
        let w = PreferenceVector::new(vec![0.3, 0.7 + 5e-7]).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn preference_rejects_large_drift_and_negatives() {
        assert!(PreferenceVector::new(vec![0.3, 0.8]).is_err());
        assert!(PreferenceVector::new(vec![-0.1, 1.1]).is_err());
        assert!(PreferenceVector::new(vec![1.0]).is_err());
        assert!(PreferenceVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn evenly_spaced_endpoints() {
        assert_eq!(PreferenceVector::evenly_spaced(2, 0).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(PreferenceVector::evenly_spaced(2, 1).unwrap().as_slice(), &[0.0, 1.0]);
        let w = PreferenceVector::evenly_spaced(10, 3).unwrap();
        assert!((w[0] - 6.0 / 9.0).abs() < 1e-15 && (w[1] - 3.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_shape_checks() {
        assert!(Jacobian::new(2, 3, vec![0.0; 5]).is_err());
        assert!(Jacobian::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        let j = Jacobian::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(j.row(1), &[3.0, 4.0]);
        assert_eq!(j.rows().count(), 2);
    }

    #[test]
    fn objective_values_reject_nan() {
        assert!(ObjectiveValues::new(vec![1.0, f64::INFINITY]).is_err());
    }
}
