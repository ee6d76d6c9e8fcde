//! Binomial series for the circle average and its bounds.

use serde::{Deserialize, Serialize};

use super::{check_alpha, eval_stilde_quadrature_detail, Circle};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// `binom(−x, k)` by the product recurrence.
pub fn binomial_neg(x: f64, k: usize) -> f64 {
    let mut b = 1.0;
    for j in 1..=k {
        b *= (-x - j as f64 + 1.0) / j as f64;
    }
    b
}

/// Upper bound `x (k/2)^{x−1}` on `|binom(−x, k)|` for `x ∈ (0, 1)`, `k ≥ 1`.
pub fn binomial_tail_bound(x: f64, k: usize) -> f64 {
    x * (k as f64 / 2.0).powf(x - 1.0)
}

/// Explicit upper bound `2^{1−α} α² (3−α)/(2−α)` on the series sum.
pub fn series_sum_bound(alpha: f64) -> f64 {
    2f64.powf(1.0 - alpha) * alpha * alpha * (3.0 - alpha) / (2.0 - alpha)
}

/// The resulting bound `−(α/4)(8−2α+α²)/(2−α) + ((2+α)/2) α² ((3−α)/(2−α)) 2^{−α}` on
/// the circle average.
pub fn negativity_bound(alpha: f64) -> f64 {
    -(alpha / 4.0) * (8.0 - 2.0 * alpha + alpha * alpha) / (2.0 - alpha)
        + 0.5 * (2.0 + alpha) * alpha * alpha * (3.0 - alpha) / (2.0 - alpha) * 2f64.powf(-alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    /// Extrapolated value of the circle average.
    pub value: f64,
    /// Value with the series cut after `truncation_order` terms.
    pub raw_partial_sum: f64,
    /// Rigorous bound on the neglected part of the raw partial sum.
    pub truncation_bound: f64,
    /// Extrapolated `Σ_{k≥1}` of the series terms alone.
    pub series_sum: f64,
    pub truncation_order: usize,
}

fn term(alpha: f64, k: usize, b: f64) -> f64 {
    let kf = k as f64;
    let a = alpha / 2.0 + kf;
    b * b / (kf + (2.0 + alpha) / 4.0) * (a * a / ((1.0 + kf) * (1.0 + kf)) + 1.0)
}

/// Partial sums of `Σ_{k=1}^N` at each requested `N` (ascending).
fn partial_sums(alpha: f64, cuts: &[usize]) -> Vec<f64> {
    let x = alpha / 2.0;
    let mut out = Vec::with_capacity(cuts.len());
    let (mut b, mut sum) = (1.0, 0.0);
    let mut next = 0;
    let last = *cuts.last().unwrap_or(&0);
    // Kahan summation; the terms are positive and decreasing.
    let mut comp = 0.0;
    for k in 1..=last {
        b *= (-x - k as f64 + 1.0) / k as f64;
        let y = term(alpha, k, b) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        while next < cuts.len() && cuts[next] == k {
            out.push(sum);
            next += 1;
        }
    }
    out
}

fn closed_part(alpha: f64) -> f64 {
    alpha * alpha / 4.0 + 1.0 - (2.0 + alpha) / (2.0 - alpha)
}

/// The circle average of `S(ξ, ·)` for `ξ` on a unit circle, from the binomial series.
///
/// The neglected part of the series behaves like `c₁N^{α−2} + c₂N^{α−3} + …`;
/// the partial sums at `K, 2K, 4K, 8K` are combined by three Richardson steps.
pub fn stilde_series(alpha: f64, truncation: usize) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    if truncation == 0 {
        return Err(Error::InvalidArgument("truncation order must be ≥ 1".into()));
    }
    let k = truncation;
    let mut level = partial_sums(alpha, &[k, 2 * k, 4 * k, 8 * k]);
    let raw = level[0];
    for step in 0..3 {
        let r = 2f64.powf(alpha - 2.0 - step as f64);
        level = level.windows(2).map(|w| (w[1] - r * w[0]) / (1.0 - r)).collect();
    }
    let sum = level[0];
    let w = (2.0 + alpha) / 4.0;
    // term_k < (α²/4)(k/2)^{α−3}, and Σ_{k>K} k^{α−3} ≤ K^{α−2}/(2−α).
    let tail = alpha * alpha / 4.0 * 2f64.powf(3.0 - alpha) * (k as f64).powf(alpha - 2.0) / (2.0 - alpha);
    Ok(SeriesValue {
        value: closed_part(alpha) + w * sum,
        raw_partial_sum: closed_part(alpha) + w * raw,
        truncation_bound: w * tail,
        series_sum: sum,
        truncation_order: k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingResult {
    pub alpha: f64,
    pub value_series: f64,
    pub value_quadrature: f64,
    pub discrepancy: f64,
    pub raw_partial_sum: f64,
    pub truncation_bound: f64,
    /// The explicit upper bound on the average.
    pub bound: f64,
    /// Series value below the bound (with margin `1e−9`) and bound negative.
    pub bound_holds: bool,
    /// Number of `S` evaluations used by the quadrature route.
    pub sample_count: usize,
    pub truncation_order: usize,
}

/// Series and quadrature routes for the unit circle with `ξ` on it.
pub fn eval_stilde_series(alpha: f64, truncation: usize) -> Result<AveragingResult> {
    let s = stilde_series(alpha, truncation)?;
    let (q, evals) = eval_stilde_quadrature_detail(&[1.0, 0.0, 0.0], &Circle::unit_xy(3), alpha)?;
    let bound = negativity_bound(alpha);
    Ok(AveragingResult {
        alpha,
        value_series: s.value,
        value_quadrature: q,
        discrepancy: (s.value - q).abs(),
        raw_partial_sum: s.raw_partial_sum,
        truncation_bound: s.truncation_bound,
        bound,
        bound_holds: s.value < bound - 1e-9 && bound < 0.0,
        sample_count: evals,
        truncation_order: s.truncation_order,
    })
}

/// `(1/2π) ∫ |1 + x e^{iθ}|^{−α} dθ` from the binomial series.
pub fn fourier_average_check(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "x must be a non-negative number, got {x}"
        )));
    }
    if x == 1.0 {
        return Err(Error::InvalidArgument("the series diverges at x = 1".into()));
    }
    if x > 1.0 {
        return Ok(x.powf(-alpha) * fourier_average_check(1.0 / x, alpha)?);
    }
    let h = alpha / 2.0;
    let x2 = x * x;
    let (mut b, mut pow, mut sum) = (1.0, 1.0, 1.0);
    for k in 1..10_000_000usize {
        b *= (-h - k as f64 + 1.0) / k as f64;
        pow *= x2;
        let t = b * b * pow;
        sum += t;
        // Later terms shrink at least geometrically with ratio x².
        if t < 1e-18 * sum * (1.0 - x2) {
            break;
        }
    }
    Ok(sum)
}

/// The same average by adaptive quadrature in `θ`.
pub fn fourier_average_quadrature(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let f = |th: f64| (1.0 + 2.0 * x * th.cos() + x * x).powf(-alpha / 2.0);
    let pi = std::f64::consts::PI;
    let r = integrate(f, 0.0, pi, Tolerance::new(1e-14, 1e-14));
    Ok(r.value / pi)
}
