use super::data::{solve_qx_linear, solve_qx_onebit, DataOverlap};
use super::training::ChannelOverlap;
use super::{check_nonnegative, SystemParams, TxType};
use crate::error::Result;
use crate::numerics::{q_entropy_bits, q_log_q, QuadratureRule};
use crate::scalar::Real;

/// Rate in bits per transmitter from the data free energy at `snr`.
fn rate_from<T: Real>(data: &DataOverlap<T>, alpha: T, snr: T, rule: &QuadratureRule<T>) -> Result<T> {
    if snr == T::zero() {
        return Ok(T::zero());
    }
    let e = rule.expect_scaled(snr.sqrt(), q_log_q)?;
    let r = (data.f2_value + T::lit(4.0) * alpha * e) / T::LN_2();
    Ok(clamp_roundoff(r, alpha))
}

fn roundoff_slack<T: Real>(alpha: T) -> T {
    T::lit(64.0) * T::epsilon() * (T::one() + alpha)
}

/// Values that are negative only by accumulated rounding are reported as 0.
fn clamp_roundoff<T: Real>(r: T, alpha: T) -> T {
    if r < T::zero() && r > -roundoff_slack(alpha) {
        T::zero()
    } else {
        r
    }
}

/// Effective rate for Gaussian inputs over the trained channel.
pub fn reff_linear<T: Real>(
    params: &SystemParams<T>,
    overlap: &ChannelOverlap<T>,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<T> {
    params.validate()?;
    let snr = overlap.snr_eff;
    let data = solve_qx_linear(snr, params.alpha, rule, tol)?;
    rate_from(&data, params.alpha, snr, rule)
}

/// Effective rate for QPSK inputs over the trained channel.
pub fn reff_onebit<T: Real>(
    params: &SystemParams<T>,
    overlap: &ChannelOverlap<T>,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<T> {
    params.validate()?;
    let snr = overlap.snr_eff;
    let data = solve_qx_onebit(snr, params.alpha, rule, tol)?;
    let r = rate_from(&data, params.alpha, snr, rule)?;
    // a QPSK symbol carries 2 bits; only rounding can push the value above
    let two = T::lit(2.0);
    if r > two && r - two < roundoff_slack(params.alpha) {
        Ok(two)
    } else {
        Ok(r)
    }
}

/// Dispatches on `params.tx`.
pub fn reff<T: Real>(
    params: &SystemParams<T>,
    overlap: &ChannelOverlap<T>,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<T> {
    match params.tx {
        TxType::Linear => reff_linear(params, overlap, rule, tol),
        TxType::OneBit => reff_onebit(params, overlap, rule, tol),
    }
}

/// Rate with perfect receiver channel knowledge and Gaussian inputs.
pub fn csir_rate<T: Real>(alpha: T, rho: T, rule: &QuadratureRule<T>, tol: T) -> Result<T> {
    check_nonnegative("csir_rate", "rho", rho)?;
    let d = solve_qx_linear(rho, alpha, rule, tol)?;
    let full = rule.expect_scaled(rho.sqrt(), q_log_q)?;
    let part = rule.expect_scaled(d.a_coeff * d.q_x.sqrt(), q_log_q)?;
    let r = (T::lit(4.0) * alpha * (full - part) + d.q_x_hat.ln_1p() - d.q_x_hat
        + d.q_x * d.q_x_hat)
        / T::LN_2();
    Ok(clamp_roundoff(r, alpha))
}

/// Capacity of one pair of one-bit transceivers, `2(1 − E[H_b(Q(√rho z))])`
/// bits.
pub fn single_pair_capacity<T: Real>(rho: T, rule: &QuadratureRule<T>) -> Result<T> {
    check_nonnegative("single_pair_capacity", "rho", rho)
        .or_else(|e| if rho == T::infinity() { Ok(()) } else { Err(e) })?;
    let two = T::lit(2.0);
    if rho == T::infinity() {
        return Ok(two);
    }
    if rho == T::zero() {
        return Ok(T::zero());
    }
    let h = rule.expect_scaled(rho.sqrt(), q_entropy_bits)?;
    Ok((two * (T::one() - h)).max(T::zero()).min(two))
}
