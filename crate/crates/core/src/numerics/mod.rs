//! Scalar special functions and standard-normal expectations.

mod panels;
mod quadrature;
mod special;

pub use panels::expect_affine;
pub use quadrature::{expect_normal, QuadratureRule, DEFAULT_ORDER, MAX_ORDER};
pub use special::{
    binary_entropy, erfcx, exp_ratio, ln_cosh, log_q_function, q_entropy_bits, q_function,
    q_log_q,
};
