//! Exact rates of tiny one-bit systems (QPSK inputs, sign receivers) by
//! full enumeration of the training and data alphabets.
//!
//! The channel expectation is the only approximate step; it uses either a
//! tensor Gauss–Hermite rule or seeded Monte Carlo. Enumeration always runs
//! in `f64`.

mod channel;
mod direct;
mod model;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::ComplexSample;

pub use direct::mi_direct;
pub use model::{c_bound_exact, reff_exact, ExactModel, TrainingOutcome};

pub const MAX_ANTENNAS: usize = 2;
pub const MAX_BLOCK: usize = 5;
/// Limit on `4^(M·T_t)·4^(N·T_t)`.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;
pub const DEFAULT_TENSOR_ORDER: usize = 24;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
/// Monte Carlo estimates are averaged over this many independent batches;
/// their spread gives the standard error.
pub const MC_BATCHES: usize = 10;

/// How `E_h[·]` over the Rayleigh channel row is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ChannelIntegration {
    /// Gauss–Hermite with `order` nodes per real dimension (`order^(2M)`
    /// nodes in total).
    TensorQuadrature { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for ChannelIntegration {
    fn default() -> Self {
        ChannelIntegration::TensorQuadrature {
            order: DEFAULT_TENSOR_ORDER,
        }
    }
}

/// An `M × N` link with block length `T` at SNR `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallSystem {
    pub m: usize,
    pub n: usize,
    pub t_total: usize,
    pub rho: f64,
    pub integration: ChannelIntegration,
}

impl SmallSystem {
    pub fn new(m: usize, n: usize, t_total: usize, rho: f64, integration: ChannelIntegration) -> Result<Self> {
        let s = Self {
            m,
            n,
            t_total,
            rho,
            integration,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.t_total < 2 {
            return Err(Error::InvalidParameter(format!(
                "need M, N >= 1 and T >= 2 (got M = {}, N = {}, T = {})",
                self.m, self.n, self.t_total
            )));
        }
        if self.m > MAX_ANTENNAS || self.n > MAX_ANTENNAS || self.t_total > MAX_BLOCK {
            return Err(Error::SystemTooLarge {
                m: self.m,
                n: self.n,
                t: self.t_total,
                max_antennas: MAX_ANTENNAS,
                max_block: MAX_BLOCK,
            });
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho = {} must be nonnegative", self.rho)));
        }
        match self.integration {
            ChannelIntegration::TensorQuadrature { order: 0 } => {
                Err(Error::InvalidParameter("tensor quadrature order must be positive".into()))
            }
            ChannelIntegration::MonteCarlo { samples, .. } if samples < MC_BATCHES => Err(
                Error::InvalidParameter(format!("need at least {MC_BATCHES} Monte Carlo samples")),
            ),
            _ => Ok(()),
        }
    }

    /// `4^(M·t_t)·4^(N·t_t)`, the number of training outcomes.
    pub fn enumeration_terms(&self, t_t: usize) -> u128 {
        4u128.saturating_pow(((self.m + self.n) * t_t) as u32)
    }

    pub(crate) fn check_training(&self, t_t: usize) -> Result<()> {
        self.validate()?;
        if t_t == 0 || t_t >= self.t_total {
            return Err(Error::InvalidParameter(format!(
                "training length {t_t} outside 1..{}",
                self.t_total
            )));
        }
        let terms = self.enumeration_terms(t_t);
        if terms > ENUMERATION_LIMIT {
            return Err(Error::BudgetExceeded {
                terms,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }
}

/// A Monte Carlo (or exact, with zero error) estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub(crate) fn from_batches(values: &[f64]) -> Self {
        let b = values.len() as f64;
        let mean = values.iter().sum::<f64>() / b;
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
            (var / b).sqrt()
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error,
        }
    }

    /// Whether two estimates agree within `k` combined standard errors,
    /// with an absolute floor `abs_tol`.
    pub fn agrees_with(&self, other: &Estimate, k: f64, abs_tol: f64) -> bool {
        let se = self.std_error.hypot(other.std_error);
        (self.value - other.value).abs() <= (k * se).max(abs_tol)
    }
}

/// QPSK symbol `k` (`e^{j(2k+1)π/4}`): `(1+j)/√2, (−1+j)/√2, (−1−j)/√2, (1−j)/√2`.
pub fn qpsk_symbol(k: usize) -> ComplexSample<f64> {
    let y = output_symbol(k);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexSample::new(y.re * s, y.im * s)
}

/// Quantizer output `l` (`√2·e^{j(2l+1)π/4}`), same ordering as
/// [`qpsk_symbol`].
pub fn output_symbol(l: usize) -> ComplexSample<f64> {
    match l % 4 {
        0 => ComplexSample::new(1.0, 1.0),
        1 => ComplexSample::new(-1.0, 1.0),
        2 => ComplexSample::new(-1.0, -1.0),
        _ => ComplexSample::new(1.0, -1.0),
    }
}

fn quadrant(v: ComplexSample<f64>, scale: f64, alphabet: &'static str) -> Result<usize> {
    for k in 0..4 {
        let s = output_symbol(k);
        if (v.re - s.re * scale).abs() <= 1e-12 && (v.im - s.im * scale).abs() <= 1e-12 {
            return Ok(k);
        }
    }
    Err(Error::InvalidSymbol {
        re: v.re,
        im: v.im,
        alphabet,
    })
}

/// Index of a QPSK input symbol.
pub fn qpsk_index(x: ComplexSample<f64>) -> Result<usize> {
    quadrant(x, std::f64::consts::FRAC_1_SQRT_2, "QPSK input")
}

/// Index of a quantizer output.
pub fn output_index(y: ComplexSample<f64>) -> Result<usize> {
    quadrant(y, 1.0, "one-bit QPSK")
}
