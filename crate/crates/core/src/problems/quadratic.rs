use crate::error::{ensure_len, MooError, Result};
use crate::problem::Problem;
use crate::rng::{normal_vec, stream, Purpose};
use crate::types::{DecisionVector, Jacobian, PreferenceVector};

/// `f_i(θ) = s_i ‖θ − a_i‖²` for two anchors. Convex, nonnegative, and its
/// Tchebycheff optimum lies on the segment between the anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticBiObjective {
    anchors: [Vec<f64>; 2],
    scales: [f64; 2],
}

impl QuadraticBiObjective {
    pub fn new(a1: Vec<f64>, a2: Vec<f64>, s1: f64, s2: f64) -> Result<Self> {
        ensure_len("quadratic anchors", a1.len(), a2.len())?;
        if a1.is_empty() {
            return Err(MooError::invalid("quadratic problem needs d >= 1"));
        }
        if a1 == a2 {
            return Err(MooError::invalid("quadratic anchors must differ"));
        }
        if !(s1 > 0.0 && s2 > 0.0 && s1.is_finite() && s2.is_finite()) {
            return Err(MooError::invalid("quadratic scales must be positive"));
        }
        if a1.iter().chain(&a2).any(|x| !x.is_finite()) {
            return Err(MooError::NonFinite("quadratic anchors".into()));
        }
        Ok(QuadraticBiObjective {
            anchors: [a1, a2],
            scales: [s1, s2],
        })
    }

    /// A seeded instance: anchors i.i.d. N(0,1), scales uniform in [0.5, 2].
    pub fn random(d: usize, seed: u64) -> Result<Self> {
        use rand::Rng;
        let mut rng = stream(seed, Purpose::Data, 0, 0);
        let a1 = normal_vec(&mut rng, d, 1.0);
        let a2 = normal_vec(&mut rng, d, 1.0);
        let s1 = rng.random_range(0.5..2.0);
        let s2 = rng.random_range(0.5..2.0);
        Self::new(a1, a2, s1, s2)
    }

    pub fn anchor(&self, i: usize) -> &[f64] {
        &self.anchors[i]
    }

    pub fn scale(&self, i: usize) -> f64 {
        self.scales[i]
    }
}

impl Problem for QuadraticBiObjective {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        self.anchors[0].len()
    }

    fn objectives(&self, theta: &[f64]) -> Vec<f64> {
        (0..2)
            .map(|i| {
                self.scales[i]
                    * theta
                        .iter()
                        .zip(&self.anchors[i])
                        .map(|(x, a)| (x - a).powi(2))
                        .sum::<f64>()
            })
            .collect()
    }

    fn jacobian(&self, theta: &[f64]) -> Jacobian {
        let mut data = Vec::with_capacity(2 * theta.len());
        for i in 0..2 {
            let s = 2.0 * self.scales[i];
            data.extend(theta.iter().zip(&self.anchors[i]).map(|(x, a)| s * (x - a)));
        }
        Jacobian::new(2, theta.len(), data).expect("finite by construction")
    }
}

/// Minimizer and minimum of `max_i w_i f_i` via golden-section search along
/// the anchor segment, to a bracket width of 1e-10.
pub fn quadratic_tch_optimum(
    problem: &QuadraticBiObjective,
    w: &PreferenceVector,
) -> Result<(DecisionVector, f64)> {
    ensure_len("quadratic preference", 2, w.len())?;
    let point = |t: f64| -> Vec<f64> {
        problem.anchors[0]
            .iter()
            .zip(&problem.anchors[1])
            .map(|(a, b)| a + t * (b - a))
            .collect()
    };
    let value = |t: f64| -> f64 {
        let f = problem.objectives(&point(t));
        (w[0] * f[0]).max(w[1] * f[1])
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut v1, mut v2) = (value(x1), value(x2));
    while hi - lo > 1e-10 {
        if v1 <= v2 {
            hi = x2;
            x2 = x1;
            v2 = v1;
            x1 = hi - inv_phi * (hi - lo);
            v1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            v1 = v2;
            x2 = lo + inv_phi * (hi - lo);
            v2 = value(x2);
        }
    }
    // the bracket endpoints are candidates too (degenerate preferences sit at t = 0 or 1)
    let best = [lo, 0.5 * (lo + hi), hi, 0.0, 1.0]
        .into_iter()
        .min_by(|a, b| value(*a).total_cmp(&value(*b)))
        .expect("nonempty");
    Ok((DecisionVector::new(point(best))?, value(best)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{finite_difference_jacobian, max_relative_error};

    #[test]
    fn minimizers() {
        let p = QuadraticBiObjective::new(vec![1.0, 0.0], vec![0.0, 1.0], 1.0, 2.0).unwrap();
        assert_eq!(p.objectives(&[1.0, 0.0])[0], 0.0);
        assert!(p.jacobian(&[0.0, 1.0]).row(1).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn rejects_degenerate_instances() {
        assert!(QuadraticBiObjective::new(vec![1.0], vec![1.0], 1.0, 1.0).is_err());
        assert!(QuadraticBiObjective::new(vec![1.0], vec![0.0], 0.0, 1.0).is_err());
        assert!(QuadraticBiObjective::new(vec![1.0], vec![0.0, 1.0], 1.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_optimum_is_midpoint() {
        let p = QuadraticBiObjective::new(vec![-1.0, 2.0], vec![3.0, 0.0], 1.5, 1.5).unwrap();
        let (theta, v) = quadratic_tch_optimum(&p, &PreferenceVector::uniform(2).unwrap()).unwrap();
        assert!((theta[0] - 1.0).abs() < 1e-9 && (theta[1] - 1.0).abs() < 1e-9);
        assert!((v - 0.5 * 1.5 * 5.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_preference_hits_anchor() {
        let p = QuadraticBiObjective::random(3, 1).unwrap();
        let (theta, v) = quadratic_tch_optimum(&p, &PreferenceVector::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(theta.as_slice(), p.anchor(0));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = QuadraticBiObjective::random(5, 3).unwrap();
        let theta = [0.3, -0.1, 0.7, 1.2, -2.0];
        let fd = finite_difference_jacobian(&p, &theta, 1e-6);
        assert!(max_relative_error(&p.jacobian(&theta), &fd) < 1e-5);
    }
}
