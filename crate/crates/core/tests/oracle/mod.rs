//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the simplex (normalized exponentials).
pub fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Euclidean simplex projection by enumerating supports: for each nonempty
/// support S the KKT candidate is x_S = v_S - (Σ_S v - 1)/|S|, zero elsewhere;
/// keep feasible candidates and return the nearest one.
pub fn project_simplex_brute(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let tau = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut x = vec![0.0; n];
        let mut feasible = true;
        for &i in &support {
            x[i] = v[i] - tau;
            if x[i] < -1e-15 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        let dist: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, x));
        }
    }
    best.expect("some support is always feasible").1
}

/// λ_i exp(η w_i f_i) / Σ_j λ_j exp(η w_j f_j), computed directly.
pub fn eg_softmax(lambda: &[f64], f: &[f64], w: &[f64], eta: f64) -> Vec<f64> {
    let z: Vec<f64> = (0..lambda.len()).map(|i| lambda[i] * (eta * w[i] * f[i]).exp()).collect();
    let s: f64 = z.iter().sum();
    z.into_iter().map(|x| x / s).collect()
}

fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Plain re-implementation of the adaptive conversion archive.
#[derive(Default)]
pub struct BruteArchive {
    /// (round, objectives, weight)
    pub members: Vec<(u64, Vec<f64>, f64)>,
}

impl BruteArchive {
    pub fn insert(&mut self, round: u64, f: Vec<f64>) {
        let a: Vec<usize> = (0..self.members.len()).filter(|&j| weakly_dominates(&self.members[j].1, &f)).collect();
        if !a.is_empty() {
            for &j in &a {
                self.members[j].2 += 1.0 / a.len() as f64;
            }
            return;
        }
        let mut gamma = 1.0;
        let mut kept = Vec::new();
        for (r, g, wgt) in self.members.drain(..) {
            if weakly_dominates(&f, &g) {
                gamma += wgt;
            } else {
                kept.push((r, g, wgt));
            }
        }
        kept.push((round, f, gamma));
        self.members = kept;
    }
}

/// Central differences with step h in every coordinate.
pub fn fd_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = f(x).len();
    let mut jac = vec![vec![0.0; x.len()]; m];
    let mut p = x.to_vec();
    for k in 0..x.len() {
        p[k] = x[k] + h;
        let up = f(&p);
        p[k] = x[k] - h;
        let down = f(&p);
        p[k] = x[k];
        for i in 0..m {
            jac[i][k] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    jac
}

/// Minimum of a convex function over a square by repeated grid zooming:
/// an n×n grid over the current square, then a square of ±2 cells around
/// the best node.
pub fn grid_minimize_2d(g: &dyn Fn(f64, f64) -> f64, centre: (f64, f64), half: f64, n: usize, levels: usize) -> (f64, (f64, f64)) {
    let (mut cx, mut cy, mut h) = (centre.0, centre.1, half);
    let mut best = (f64::INFINITY, (cx, cy));
    for _ in 0..levels {
        let step = 2.0 * h / (n - 1) as f64;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (cx - h + i as f64 * step, cy - h + j as f64 * step);
                let v = g(x, y);
                if v < best.0 {
                    best = (v, (x, y));
                }
            }
        }
        cx = best.1 .0;
        cy = best.1 .1;
        h = 2.0 * step;
    }
    best
}
