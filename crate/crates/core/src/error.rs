use thiserror::Error;

/// Errors raised by the bound computations.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type so
/// that one error type serves every instantiation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrand is not finite ({value}) at node u = {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },

    #[error("output symbol {re}{im:+}j is not in the {alphabet} alphabet")]
    InvalidSymbol {
        re: f64,
        im: f64,
        alphabet: &'static str,
    },

    #[error("{what} did not converge ({detail}); brackets: {brackets:?}")]
    NoConvergence {
        what: &'static str,
        detail: String,
        brackets: Vec<(f64, f64)>,
    },

    #[error("empty training grid: beta = {beta} is not larger than grid step {step}")]
    EmptyGrid { beta: f64, step: f64 },

    #[error("{op} is only defined for linear transmitters")]
    UnsupportedTransmitter { op: &'static str },

    #[error("enumeration budget exceeded: {terms} terms (limit {limit})")]
    BudgetExceeded { terms: u128, limit: u128 },

    #[error("exact enumeration supports M, N <= {max_antennas} and T <= {max_block}; got M = {m}, N = {n}, T = {t}")]
    SystemTooLarge {
        m: usize,
        n: usize,
        t: usize,
        max_antennas: usize,
        max_block: usize,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for the fixed-point solver failures (the CLI maps these to a
    /// dedicated exit code).
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
