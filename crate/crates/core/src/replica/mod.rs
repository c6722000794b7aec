//! Large-system closed forms: training and data fixed points, free
//! energies and per-transmitter rates.
//!
//! Noise power is normalized to one, so `rho` is the per-receiver SNR.

mod data;
mod rate;
mod receiver;
mod training;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use data::{
    f2_linear, f2_onebit, onebit_overlap_map, solve_qx_linear, solve_qx_onebit, DataOverlap,
};
pub use rate::{csir_rate, reff, reff_linear, reff_onebit, single_pair_capacity};
pub use receiver::receiver_rhs;
pub use training::{effective_snr, f1_value, qh_candidates, solve_qh, ChannelOverlap};

/// Default residual tolerance of the fixed-point solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Transmit alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TxType {
    /// Circularly symmetric Gaussian inputs.
    Linear,
    /// QPSK inputs `(±1 ± j)/√2`.
    #[serde(alias = "one-bit")]
    OneBit,
}

impl std::fmt::Display for TxType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TxType::Linear => "linear",
            TxType::OneBit => "onebit",
        })
    }
}

impl std::str::FromStr for TxType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(TxType::Linear),
            "onebit" | "one-bit" => Ok(TxType::OneBit),
            other => Err(Error::InvalidParameter(format!("unknown transmitter type {other:?}"))),
        }
    }
}

/// Normalized system description: `alpha = N/M`, `beta = T/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    pub alpha: T,
    pub beta: T,
    pub rho: T,
    pub tx: TxType,
}

impl<T: Real> SystemParams<T> {
    pub fn new(alpha: T, beta: T, rho: T, tx: TxType) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            rho,
            tx,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {} must be positive", self.beta)));
        }
        if !(self.rho >= T::zero() && self.rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho = {} must be nonnegative", self.rho)));
        }
        Ok(())
    }
}

pub(crate) fn check_nonnegative<T: Real>(op: &'static str, name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {v} must be finite and nonnegative")))
    }
}

pub(crate) fn check_tol<T: Real>(op: &'static str, tol: T) -> Result<()> {
    if tol > T::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("tolerance {tol} must be positive")))
    }
}
