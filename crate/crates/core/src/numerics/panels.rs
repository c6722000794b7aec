//! Composite Gauss–Legendre expectations for integrands whose structure
//! sits at a fixed point of the argument rather than at the Gaussian's
//! centre.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Real;

const POINTS: usize = 16;
/// Gaussian mass beyond `|u| > 12` is below 1e-32.
const SPAN: f64 = 12.0;
const COARSE_STEP: f64 = 1.5;
/// Refined panels cover `|w| ≤ 12` in steps of 2 in the argument `w`.
const FINE_HALF_WIDTH: f64 = 12.0;
const FINE_STEP: f64 = 2.0;

/// Positive nodes and weights of the 16-point Gauss–Legendre rule.
fn legendre() -> &'static [(f64, f64); POINTS / 2] {
    static RULE: OnceLock<[(f64, f64); POINTS / 2]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = POINTS as f64;
        let mut out = [(0.0, 0.0); POINTS / 2];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=POINTS {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// `E[f(mean + sd·u)]` for standard normal `u`, where `f` may vary on the
/// unit scale near argument 0 (e.g. `tanh`, `ln cosh`).
///
/// Panels of width 1.5 in `u` cover `[-12, 12]`, refined to width 2 in
/// the argument around the point where it crosses zero, so the result
/// does not degrade as `sd` grows.
pub fn expect_affine<T: Real, F: Fn(T) -> T>(mean: T, sd: T, f: F) -> Result<T> {
    if !mean.is_finite() || !sd.is_finite() {
        return Err(Error::domain(
            "expect_affine",
            format!("mean {mean} and sd {sd} must be finite"),
        ));
    }
    let (m, s) = (mean.as_f64(), sd.as_f64().abs());
    let mut cuts: Vec<f64> = (0..=(2.0 * SPAN / COARSE_STEP) as usize)
        .map(|k| -SPAN + COARSE_STEP * k as f64)
        .collect();
    if s > 0.0 {
        let u0 = -m / s;
        let steps = (FINE_HALF_WIDTH / FINE_STEP) as i32;
        cuts.extend(
            (-steps..=steps)
                .map(|k| u0 + f64::from(k) * FINE_STEP / s)
                .filter(|u| u.abs() < SPAN),
        );
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = T::zero();
    for w in cuts.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for &(x, wt) in legendre() {
            for u in [c - h * x, c + h * x] {
                let ut = T::lit(u);
                let v = f(mean + sd * ut);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: u, value: v.as_f64() });
                }
                acc += T::lit(wt * h * norm * (-0.5 * u * u).exp()) * v;
            }
        }
    }
    Ok(acc)
}
