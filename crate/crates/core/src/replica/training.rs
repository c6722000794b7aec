use serde::{Deserialize, Serialize};

use super::receiver::{receiver_free_energy, receiver_roots, select_min, ReceiverRoot};
use super::{check_nonnegative, check_tol};
use crate::error::{Error, Result};
use crate::numerics::QuadratureRule;
use crate::scalar::Real;

/// Training-phase overlap and the effective channel it induces.
///
/// The trained system behaves like a known channel with gain variance
/// `q_h` and noise `1 + (1 − q_h)·rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOverlap<T> {
    pub beta_t: T,
    pub q_h: T,
    pub q_h_hat: T,
    pub rho_eff: T,
    pub sigma_eff_sq: T,
    pub snr_eff: T,
}

impl<T: Real> ChannelOverlap<T> {
    /// Fills in the effective channel for a given overlap.
    pub fn from_qh(rho: T, beta_t: T, q_h: T) -> Self {
        let sigma_eff_sq = T::one() + (T::one() - q_h) * rho;
        Self {
            beta_t,
            q_h,
            q_h_hat: q_h / (T::one() - q_h),
            rho_eff: q_h * rho,
            sigma_eff_sq,
            snr_eff: effective_snr(rho, q_h),
        }
    }

    /// Perfect receiver channel knowledge (`q_h = 1`, so `q̂_h = ∞`).
    pub fn perfect(rho: T) -> Self {
        Self::from_qh(rho, T::infinity(), T::one())
    }
}

/// `rho·q_h / (1 + rho·(1 − q_h))`.
pub fn effective_snr<T: Real>(rho: T, q_h: T) -> T {
    rho * q_h / (T::one() + rho * (T::one() - q_h))
}

/// Training free energy `F1(q, q̂)`.
pub fn f1_value<T: Real>(q: T, q_hat: T, rho: T, beta_t: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(q >= T::zero() && q < T::one()) {
        return Err(Error::domain("f1_value", format!("q = {q} outside [0, 1)")));
    }
    check_nonnegative("f1_value", "q_hat", q_hat)?;
    check_nonnegative("f1_value", "rho", rho)?;
    check_nonnegative("f1_value", "beta_t", beta_t)?;
    receiver_free_energy(q, q_hat, rho, beta_t, rule)
}

/// Every solution of the training fixed point, ordered by `q_h`, each with
/// its `F1` value.
pub fn qh_candidates<T: Real>(
    rho: T,
    beta_t: T,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<Vec<(ChannelOverlap<T>, T)>> {
    check_inputs(rho, beta_t, tol)?;
    let roots = receiver_roots("training overlap q_h", rho, beta_t, rule, tol)?;
    Ok(roots
        .iter()
        .map(|r| (ChannelOverlap::from_qh(rho, beta_t, r.q), r.free_energy))
        .collect())
}

/// Training overlap `q_h`; among several solutions the one minimizing `F1`.
pub fn solve_qh<T: Real>(
    rho: T,
    beta_t: T,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<ChannelOverlap<T>> {
    check_inputs(rho, beta_t, tol)?;
    if rho == T::zero() || beta_t == T::zero() {
        return Ok(ChannelOverlap::from_qh(rho, beta_t, T::zero()));
    }
    let roots: Vec<ReceiverRoot<T>> =
        receiver_roots("training overlap q_h", rho, beta_t, rule, tol)?;
    let best = select_min(&roots);
    Ok(ChannelOverlap::from_qh(rho, beta_t, best.q))
}

fn check_inputs<T: Real>(rho: T, beta_t: T, tol: T) -> Result<()> {
    check_nonnegative("solve_qh", "rho", rho)?;
    check_nonnegative("solve_qh", "beta_t", beta_t)?;
    check_tol("solve_qh", tol)
}
