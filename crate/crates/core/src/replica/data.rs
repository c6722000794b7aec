use serde::{Deserialize, Serialize};

use super::receiver::{receiver_free_energy, receiver_rhs, receiver_roots, select_min};
use super::{check_nonnegative, check_tol};
use crate::error::{Error, Result};
use crate::numerics::{expect_affine, ln_cosh, q_log_q, QuadratureRule};
use crate::scalar::Real;

const DAMPING: f64 = 0.5;
const MAX_ITER: usize = 10_000;
const STARTS: [f64; 3] = [0.01, 0.5, 0.99];

/// Data-phase overlap `(q_x, q̂_x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataOverlap<T> {
    pub q_x: T,
    pub q_x_hat: T,
    /// Free energy at the solution.
    pub f2_value: T,
    /// `A = √(snr/(1 + snr·(1 − q_x)))`.
    pub a_coeff: T,
}

impl<T: Real> DataOverlap<T> {
    fn at(q_x: T, q_x_hat: T, f2_value: T, snr: T) -> Self {
        Self {
            q_x,
            q_x_hat,
            f2_value,
            a_coeff: (snr / (T::one() + snr * (T::one() - q_x))).sqrt(),
        }
    }

    fn zero(alpha: T) -> Self {
        Self {
            q_x: T::zero(),
            q_x_hat: T::zero(),
            f2_value: T::lit(2.0) * alpha * T::LN_2(),
            a_coeff: T::zero(),
        }
    }
}

/// Data free energy for Gaussian inputs.
pub fn f2_linear<T: Real>(r: T, r_hat: T, alpha: T, snr: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(r >= T::zero() && r < T::one()) {
        return Err(Error::domain("f2_linear", format!("r = {r} outside [0, 1)")));
    }
    check_nonnegative("f2_linear", "r_hat", r_hat)?;
    check_nonnegative("f2_linear", "snr", snr)?;
    receiver_free_energy(r, r_hat, snr, alpha, rule)
}

/// Data free energy for QPSK inputs.
pub fn f2_onebit<T: Real>(r: T, r_hat: T, alpha: T, snr: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(Error::domain("f2_onebit", format!("r = {r} outside [0, 1]")));
    }
    check_nonnegative("f2_onebit", "r_hat", r_hat)?;
    check_nonnegative("f2_onebit", "snr", snr)?;
    let c = (snr * r / (snr * (T::one() - r) + T::one())).sqrt();
    let e_q = rule.expect_scaled(c, q_log_q)?;
    let e_c = expect_affine(r_hat, r_hat.sqrt(), ln_cosh)?;
    let two = T::lit(2.0);
    Ok(-T::lit(4.0) * alpha * e_q + r_hat - two * e_c + r * r_hat)
}

/// `q` implied by `q̂` for QPSK inputs, `E[2 tanh(w) − tanh²(w)]` with
/// `w = q̂ + √q̂·u`.
///
/// Gaussian integration by parts turns `E[tanh(w)(2 + u/√q̂)] − 1` into
/// this form, which has no `0·∞` at `q̂ = 0`. The integrand turns over
/// where `w` crosses zero, a feature of width `1/√q̂` in `u`, so it is
/// integrated on panels rather than with a Gauss–Hermite rule.
pub fn onebit_overlap_map<T: Real>(q_hat: T) -> Result<T> {
    check_nonnegative("onebit_overlap_map", "q_hat", q_hat)?;
    let two = T::lit(2.0);
    expect_affine(q_hat, q_hat.sqrt(), |w| {
        let t = w.tanh();
        two * t - t * t
    })
}

/// Data overlap for Gaussian inputs at effective SNR `snr`.
pub fn solve_qx_linear<T: Real>(
    snr: T,
    alpha: T,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<DataOverlap<T>> {
    check_nonnegative("solve_qx_linear", "snr", snr)?;
    check_nonnegative("solve_qx_linear", "alpha", alpha)?;
    check_tol("solve_qx_linear", tol)?;
    if snr == T::zero() || alpha == T::zero() {
        return Ok(DataOverlap::zero(alpha));
    }
    let roots = receiver_roots("data overlap q_x (linear)", snr, alpha, rule, tol)?;
    let best = select_min(&roots);
    Ok(DataOverlap::at(best.q, best.q_hat, best.free_energy, snr))
}

/// Data overlap for QPSK inputs: damped alternation between the two
/// fixed-point equations from several starts, keeping the solution of
/// minimal free energy.
pub fn solve_qx_onebit<T: Real>(
    snr: T,
    alpha: T,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<DataOverlap<T>> {
    check_nonnegative("solve_qx_onebit", "snr", snr)?;
    check_nonnegative("solve_qx_onebit", "alpha", alpha)?;
    check_tol("solve_qx_onebit", tol)?;
    if snr == T::zero() || alpha == T::zero() {
        return Ok(DataOverlap::zero(alpha));
    }
    let damping = T::lit(DAMPING);
    let mut best: Option<DataOverlap<T>> = None;
    let mut failures = Vec::new();
    for &start in &STARTS {
        let mut q = T::lit(start);
        let mut converged = None;
        let mut last_step = T::infinity();
        for _ in 0..MAX_ITER {
            let q_hat = receiver_rhs(q, snr, alpha, rule)?;
            let q_new = onebit_overlap_map(q_hat)?;
            last_step = (q_new - q).abs();
            if last_step <= tol {
                converged = Some((q, q_hat));
                break;
            }
            q += damping * (q_new - q);
        }
        match converged {
            Some((q, q_hat)) => {
                let f = f2_onebit(q, q_hat, alpha, snr, rule)?;
                if best.is_none_or(|b| f < b.f2_value) {
                    best = Some(DataOverlap::at(q, q_hat, f, snr));
                }
            }
            None => failures.push((start, last_step.as_f64())),
        }
    }
    best.ok_or_else(|| Error::NoConvergence {
        what: "data overlap q_x (one-bit)",
        detail: format!(
            "snr {snr}, alpha {alpha}: no start converged (start, last step) = {failures:?}"
        ),
        brackets: Vec::new(),
    })
}
