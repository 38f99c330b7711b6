//! Scalarizing functions and the simplex weights their (sub)gradients induce.
//!
//! All functions take plain slices for `f` so they can be used on raw
//! minibatch losses as well as on validated [`ObjectiveValues`](crate::ObjectiveValues).

use crate::error::{ensure_finite, ensure_len, MooError, Result};
use crate::types::{Jacobian, PreferenceVector, SimplexWeights};

/// Reference point z with `z ⪯ f(θ)` for every evaluated θ. Defaults to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NadirPoint(Vec<f64>);

impl NadirPoint {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        ensure_finite("nadir point", &z)?;
        Ok(NadirPoint(z))
    }

    pub fn zeros(m: usize) -> Self {
        NadirPoint(vec![0.0; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Log-sum-exp temperature μ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingScale(f64);

impl SmoothingScale {
    pub fn new(mu: f64) -> Result<Self> {
        if mu.is_finite() && mu > 0.0 {
            Ok(SmoothingScale(mu))
        } else {
            Err(MooError::invalid(format!("smoothing scale must be > 0, got {mu}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Σ w_i f_i.
pub fn ls_value(f: &[f64], w: &PreferenceVector) -> Result<f64> {
    ensure_len("ls_value", w.len(), f.len())?;
    Ok(w.iter().zip(f).map(|(wi, fi)| wi * fi).sum())
}

fn shifted_weighted(f: &[f64], w: &PreferenceVector, z: &NadirPoint) -> Result<Vec<f64>> {
    ensure_len("tch objectives", w.len(), f.len())?;
    ensure_len("tch nadir", w.len(), z.0.len())?;
    ensure_finite("tch objectives", f)?;
    f.iter()
        .zip(&z.0)
        .zip(w.iter())
        .enumerate()
        .map(|(i, ((&fi, &zi), &wi))| {
            if fi < zi {
                Err(MooError::NadirViolation {
                    index: i,
                    value: fi,
                    nadir: zi,
                })
            } else {
                Ok(wi * (fi - zi))
            }
        })
        .collect()
}

/// max_i w_i (f_i − z_i).
pub fn tch_value(f: &[f64], w: &PreferenceVector, z: &NadirPoint) -> Result<f64> {
    let s = shifted_weighted(f, w, z)?;
    Ok(s.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// argmax_i w_i (f_i − z_i), ties resolved to the lowest index.
pub fn tch_subgradient_index(f: &[f64], w: &PreferenceVector, z: &NadirPoint) -> Result<usize> {
    let s = shifted_weighted(f, w, z)?;
    let mut best = 0;
    for (i, v) in s.iter().enumerate().skip(1) {
        if *v > s[best] {
            best = i;
        }
    }
    Ok(best)
}

/// μ · log Σ_i exp(w_i f_i / μ), shifted by the max for overflow safety.
pub fn stch_value(f: &[f64], w: &PreferenceVector, mu: SmoothingScale) -> Result<f64> {
    ensure_len("stch_value", w.len(), f.len())?;
    ensure_finite("stch objectives", f)?;
    let mu = mu.get();
    let scaled: Vec<f64> = w.iter().zip(f).map(|(wi, fi)| wi * fi / mu).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = scaled.iter().map(|s| (s - max).exp()).sum();
    Ok(mu * (max + sum.ln()))
}

/// α = softmax(w ∘ f / μ), the combination weights of the STCH gradient.
pub fn stch_weights(f: &[f64], w: &PreferenceVector, mu: SmoothingScale) -> Result<SimplexWeights> {
    ensure_len("stch_weights", w.len(), f.len())?;
    ensure_finite("stch objectives", f)?;
    let mu = mu.get();
    let scaled: Vec<f64> = w.iter().zip(f).map(|(wi, fi)| wi * fi / mu).collect();
    Ok(SimplexWeights::from_raw(softmax(&scaled)))
}

pub(crate) fn softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut e: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v /= sum);
    e
}

/// Σ_i coeffs_i · w_i · ∇f_i: the direction of the θ step.
pub fn composite_gradient(jac: &Jacobian, coeffs: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    ensure_len("composite_gradient coeffs", jac.num_objectives(), coeffs.len())?;
    ensure_len("composite_gradient preference", jac.num_objectives(), w.len())?;
    let mut g = vec![0.0; jac.dim()];
    for ((row, c), wi) in jac.rows().zip(coeffs).zip(w) {
        let scale = c * wi;
        if scale == 0.0 {
            continue;
        }
        g.iter_mut().zip(row).for_each(|(gk, rk)| *gk += scale * rk);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pref(w: &[f64]) -> PreferenceVector {
        PreferenceVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn ls_examples() {
        assert_eq!(ls_value(&[2.0, 4.0], &pref(&[0.5, 0.5])).unwrap(), 3.0);
        assert_eq!(ls_value(&[2.0, 4.0], &pref(&[1.0, 0.0])).unwrap(), 2.0);
        assert!((ls_value(&[2.0, 1.0], &pref(&[0.3, 0.7])).unwrap() - 1.3).abs() < 1e-15);
        assert!(ls_value(&[2.0], &pref(&[0.3, 0.7])).is_err());
    }

    #[test]
    fn tch_examples() {
        let z = NadirPoint::zeros(2);
        let w = pref(&[0.3, 0.7]);
        assert!((tch_value(&[2.0, 1.0], &w, &z).unwrap() - 0.7).abs() < 1e-15);
        for c in [0.0, 0.5, 3.0] {
            assert_eq!(tch_value(&[c, c], &pref(&[0.5, 0.5]), &z).unwrap(), 0.5 * c);
        }
        let z1 = NadirPoint::new(vec![1.0, 0.0]).unwrap();
        assert!((tch_value(&[2.0, 1.0], &w, &z1).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn tch_rejects_nadir_violation() {
        let z = NadirPoint::new(vec![1.0, 0.0]).unwrap();
        let err = tch_value(&[0.5, 1.0], &pref(&[0.5, 0.5]), &z).unwrap_err();
        assert!(matches!(err, MooError::NadirViolation { index: 0, .. }));
        assert!(tch_subgradient_index(&[0.5, 1.0], &pref(&[0.5, 0.5]), &z).is_err());
    }

    #[test]
    fn subgradient_index_examples() {
        let z = NadirPoint::zeros(2);
        assert_eq!(tch_subgradient_index(&[2.0, 1.0], &pref(&[0.3, 0.7]), &z).unwrap(), 1);
        assert_eq!(tch_subgradient_index(&[1.0, 1.0], &pref(&[0.5, 0.5]), &z).unwrap(), 0);
        let mut f = vec![1.0; 10];
        f[2] = 5.0;
        let idx = tch_subgradient_index(&f, &PreferenceVector::uniform(10).unwrap(), &NadirPoint::zeros(10)).unwrap();
        assert_eq!(idx, 2);
    }

    #[test]
    fn stch_examples() {
        let mu1 = SmoothingScale::new(1.0).unwrap();
        let v = stch_value(&[1.0, 1.0], &pref(&[0.5, 0.5]), mu1).unwrap();
        assert!((v - (0.5 + 2f64.ln())).abs() < 1e-14);
        let mu = SmoothingScale::new(0.5).unwrap();
        let v = stch_value(&[2.0, 1.0], &pref(&[0.3, 0.7]), mu).unwrap();
        let expected = 0.5 * (1.2f64.exp() + 1.4f64.exp()).ln();
        assert!((v - expected).abs() < 1e-14);
        assert!(SmoothingScale::new(0.0).is_err());
    }

    #[test]
    fn stch_small_mu_does_not_overflow() {
        let mu = SmoothingScale::new(1e-6).unwrap();
        let w = pref(&[0.5, 0.5]);
        let v = stch_value(&[3.0, 1.0], &w, mu).unwrap();
        assert!((v - 1.5).abs() < 1e-5);
        let a = stch_weights(&[3.0, 1.0], &w, mu).unwrap();
        assert!(a[0] >= 1.0 - 1e-6);
    }

    #[test]
    fn stch_weight_examples() {
        let mu = SmoothingScale::new(1.0).unwrap();
        let a = stch_weights(&[2.0, 2.0, 2.0], &PreferenceVector::uniform(3).unwrap(), mu).unwrap();
        assert!(a.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let a = stch_weights(&[2.0 * 3f64.ln(), 0.0], &pref(&[0.5, 0.5]), mu).unwrap();
        assert!((a[0] - 0.75).abs() < 1e-14 && (a[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn composite_examples() {
        let j = Jacobian::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = composite_gradient(&j, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(g, vec![0.25, 0.25]);
        let j = Jacobian::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = composite_gradient(&j, &[0.0, 1.0, 0.0], &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(g, vec![0.3 * 3.0, 0.3 * 4.0]);
        let g = composite_gradient(&j, &[1.0 / 3.0; 3], &[0.0, 0.0, 1.0]).unwrap();
        assert!((g[0] - 5.0 / 3.0).abs() < 1e-15 && (g[1] - 2.0).abs() < 1e-15);
        assert!(composite_gradient(&j, &[0.5, 0.5], &[0.5, 0.5]).is_err());
    }

    fn simplex_strategy(m: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, m).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn stch_sandwich(f in prop::collection::vec(0.0f64..10.0, 4), w in simplex_strategy(4), mu in 0.001f64..5.0) {
            let w = PreferenceVector::new(w).unwrap();
            let mu = SmoothingScale::new(mu).unwrap();
            let t = tch_value(&f, &w, &NadirPoint::zeros(4)).unwrap();
            let s = stch_value(&f, &w, mu).unwrap();
            prop_assert!(t <= s + 1e-12);
            prop_assert!(s <= t + mu.get() * 4f64.ln() + 1e-12);
        }

        #[test]
        fn stch_gradient_wrt_f_is_alpha_times_w(f in prop::collection::vec(0.0f64..3.0, 3), w in simplex_strategy(3), mu in 0.2f64..2.0) {
            let w = PreferenceVector::new(w).unwrap();
            let mu = SmoothingScale::new(mu).unwrap();
            let alpha = stch_weights(&f, &w, mu).unwrap();
            prop_assert!((alpha.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let h = 1e-6;
            for i in 0..3 {
                let mut up = f.clone();
                up[i] += h;
                let mut down = f.clone();
                down[i] -= h;
                let fd = (stch_value(&up, &w, mu).unwrap() - stch_value(&down, &w, mu).unwrap()) / (2.0 * h);
                prop_assert!((fd - alpha[i] * w[i]).abs() < 1e-6);
            }
        }

        #[test]
        fn argmax_invariant_under_positive_rescaling(f in prop::collection::vec(0.0f64..10.0, 5), w in simplex_strategy(5), c in 0.01f64..100.0) {
            let w = PreferenceVector::new(w).unwrap();
            let z = NadirPoint::zeros(5);
            let scaled: Vec<f64> = f.iter().map(|x| x * c).collect();
            let t = tch_value(&f, &w, &z).unwrap();
            let exact = w.iter().zip(&f).map(|(a, b)| a * b).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(t, exact);
            let i = tch_subgradient_index(&f, &w, &z).unwrap();
            let j = tch_subgradient_index(&scaled, &w, &z).unwrap();
            // rescaling can only reorder exact ties, which are measure zero here
            prop_assert_eq!(i, j);
        }

        #[test]
        fn composite_is_linear_in_jacobian(a in prop::collection::vec(-3.0f64..3.0, 6), b in prop::collection::vec(-3.0f64..3.0, 6), c in simplex_strategy(2), w in simplex_strategy(2), s in -2.0f64..2.0) {
            let ja = Jacobian::new(2, 3, a.clone()).unwrap();
            let jb = Jacobian::new(2, 3, b.clone()).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
            let jsum = Jacobian::new(2, 3, sum).unwrap();
            let ga = composite_gradient(&ja, &c, &w).unwrap();
            let gb = composite_gradient(&jb, &c, &w).unwrap();
            let gs = composite_gradient(&jsum, &c, &w).unwrap();
            for k in 0..3 {
                prop_assert!((gs[k] - (ga[k] + s * gb[k])).abs() < 1e-12);
            }
            // and in coeffs / w by symmetry of the bilinear form
            let c2: Vec<f64> = c.iter().map(|x| 2.0 * x).collect();
            let g2 = composite_gradient(&ja, &c2, &w).unwrap();
            let w2: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
            let g3 = composite_gradient(&ja, &c, &w2).unwrap();
            for k in 0..3 {
                prop_assert!((g2[k] - 2.0 * ga[k]).abs() < 1e-12);
                prop_assert!((g3[k] - 2.0 * ga[k]).abs() < 1e-12);
            }
        }
    }
}
