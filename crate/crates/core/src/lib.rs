//! Training-based achievable-rate lower bounds for multi-antenna links with
//! one-bit (sign-quantized) transmitters and receivers.
//!
//! Two families of results are provided:
//!
//! * large-system closed forms obtained from replica-symmetric fixed points
//!   ([`replica`], [`bound`]),
//! * exact enumeration for tiny systems ([`exact`]), used as a reference.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the usual double-precision instantiation.

// `!(x >= y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bound;
pub mod error;
pub mod exact;
pub mod likelihood;
pub mod numerics;
pub mod replica;
pub mod roots;
pub mod scalar;

pub use bound::{BoundResult, Method, OptimizerOptions, RateCurve, ReplicaSettings};
pub use error::{Error, Result};
pub use exact::{ChannelIntegration, Estimate, ExactModel, SmallSystem};
pub use likelihood::{ComplexSample, Nonlinearity, OutputAlphabet};
pub use replica::{ChannelOverlap, DataOverlap, SystemParams, TxType};
pub use scalar::Real;

pub type QuadratureRule64 = numerics::QuadratureRule<f64>;
pub type ComplexSample64 = ComplexSample<f64>;
pub type SystemParams64 = SystemParams<f64>;
pub type ChannelOverlap64 = ChannelOverlap<f64>;
pub type DataOverlap64 = DataOverlap<f64>;
pub type BoundResult64 = BoundResult<f64>;
pub type RateCurve64 = RateCurve<f64>;
pub type ReplicaSettings64 = ReplicaSettings<f64>;
