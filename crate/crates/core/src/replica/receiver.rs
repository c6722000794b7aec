//! The one-bit receiver saddle point shared by the training phase
//! (gain `rho`, load `beta_t`) and the data phase (gain `snr_eff`,
//! load `alpha`).

use crate::error::{Error, Result};
use crate::numerics::{exp_ratio, q_log_q, QuadratureRule};
use crate::roots::{bisect, scan_brackets};
use crate::scalar::Real;

/// `(load·B²/π)·E[exp(−B²q u²)/Q(B√q u)]` with `B² = gain/(1 + gain(1−q))`:
/// the conjugate overlap implied by `q`.
pub fn receiver_rhs<T: Real>(q: T, gain: T, load: T, rule: &QuadratureRule<T>) -> Result<T> {
    let b2 = gain / (T::one() + gain * (T::one() - q));
    let e = rule.expect_scaled((b2 * q).sqrt(), exp_ratio)?;
    Ok(load * b2 / T::PI() * e)
}

/// `−4·load·E[Q(c u) ln Q(c u)] + q q̂ + ln(1+q̂) − q̂`, `c² = gain·q/(gain(1−q)+1)`.
pub(crate) fn receiver_free_energy<T: Real>(
    q: T,
    q_hat: T,
    gain: T,
    load: T,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    let c = (gain * q / (gain * (T::one() - q) + T::one())).sqrt();
    let e = rule.expect_scaled(c, q_log_q)?;
    Ok(-T::lit(4.0) * load * e + q * q_hat + q_hat.ln_1p() - q_hat)
}

/// Stationary point `(q, q̂)` with its free energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ReceiverRoot<T> {
    pub q: T,
    pub q_hat: T,
    pub free_energy: T,
}

/// Residual `q − (1−q)·rhs(q)`: the same roots as `q/(1−q) = rhs(q)` but
/// with a bounded slope as `q → 1`.
pub(crate) fn residual<T: Real>(q: T, gain: T, load: T, rule: &QuadratureRule<T>) -> Result<T> {
    Ok(q - (T::one() - q) * receiver_rhs(q, gain, load, rule)?)
}

/// Scan grid on `[0, 1)`: zero, 31 points log-spaced up to ½ and 32 points
/// whose distance to one is log-spaced down to 1e-9.
fn scan_grid<T: Real>() -> Vec<T> {
    let mut g = vec![T::zero()];
    let log_span = |a: f64, b: f64, n: usize, i: usize| {
        (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()
    };
    for i in 0..31 {
        g.push(T::lit(log_span(1e-12, 0.5, 31, i)));
    }
    for i in 1..33 {
        g.push(T::lit(1.0 - log_span(0.5, 1e-9, 33, i)));
    }
    g.dedup();
    g
}

/// All stationary points, ordered by `q`.
pub(crate) fn receiver_roots<T: Real>(
    what: &'static str,
    gain: T,
    load: T,
    rule: &QuadratureRule<T>,
    tol: T,
) -> Result<Vec<ReceiverRoot<T>>> {
    let f = |q: T| residual(q, gain, load, rule);
    let brackets = scan_brackets(f, &scan_grid())?;
    if brackets.is_empty() {
        return Err(Error::NoConvergence {
            what,
            detail: format!("no sign change for gain {gain}, load {load}"),
            brackets: Vec::new(),
        });
    }
    let mut out = Vec::with_capacity(brackets.len());
    for b in &brackets {
        let q = bisect(f, *b, tol)?;
        let q_hat = q / (T::one() - q);
        let free_energy = receiver_free_energy(q, q_hat, gain, load, rule)?;
        out.push(ReceiverRoot {
            q,
            q_hat,
            free_energy,
        });
    }
    Ok(out)
}

/// The stationary point of minimal free energy (first one on ties).
pub(crate) fn select_min<T: Real>(roots: &[ReceiverRoot<T>]) -> ReceiverRoot<T> {
    let mut best = roots[0];
    for r in &roots[1..] {
        if r.free_energy < best.free_energy {
            best = *r;
        }
    }
    best
}
