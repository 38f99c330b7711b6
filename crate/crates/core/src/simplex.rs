//! Euclidean projection onto the probability simplex.

use crate::error::{ensure_finite, MooError, Result};
use crate::types::SimplexWeights;

/// Projects `v` onto Δ_m = {x ≥ 0, Σx = 1} in the l2 sense.
///
/// Sort-based O(m log m): find the largest k with
/// `u_k - (Σ_{j≤k} u_j - 1)/k > 0` over the descending sort `u`,
/// then shift by that threshold and clip at zero.
pub fn project_simplex(v: &[f64]) -> Result<SimplexWeights> {
    if v.is_empty() {
        return Err(MooError::invalid("cannot project an empty vector"));
    }
    ensure_finite("projection input", v)?;

    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            threshold = t;
        } else {
            break;
        }
    }

    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - threshold).max(0.0)).collect();
    // rounding can leave the sum a few ulps off 1
    let sum: f64 = x.iter().sum();
    x.iter_mut().for_each(|xi| *xi /= sum);
    Ok(SimplexWeights::from_raw(x))
}
