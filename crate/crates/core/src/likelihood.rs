//! Elementwise receiver nonlinearity and its conditional output law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{log_q_function, q_function};
use crate::scalar::Real;

/// A complex number as a pair of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexSample<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ComplexSample<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: Real> std::ops::Neg for ComplexSample<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// Output alphabet of a nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputAlphabet {
    /// `{±1 ± j}`
    OneBitQpsk,
    ContinuousComplex,
}

/// Elementwise map applied to `z + v`, `v ~ CN(0, σ₀²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// Complex sign: `sign(re) + j·sign(im)`, with `sign(0) = +1`.
    SignQuantizer,
    Identity,
}

impl Nonlinearity {
    pub fn output_alphabet(self) -> OutputAlphabet {
        match self {
            Nonlinearity::SignQuantizer => OutputAlphabet::OneBitQpsk,
            Nonlinearity::Identity => OutputAlphabet::ContinuousComplex,
        }
    }

    pub fn apply<T: Real>(self, z: ComplexSample<T>) -> ComplexSample<T> {
        match self {
            Nonlinearity::SignQuantizer => ComplexSample::new(sign(z.re), sign(z.im)),
            Nonlinearity::Identity => z,
        }
    }

    /// `P(f(z + v) = y)` for the quantizer, or the density of `y` for the
    /// identity map.
    pub fn likelihood<T: Real>(
        self,
        z: ComplexSample<T>,
        y: ComplexSample<T>,
        sigma0_sq: T,
    ) -> Result<T> {
        let sigma0 = check_variance(sigma0_sq)?;
        match self {
            Nonlinearity::SignQuantizer => {
                check_one_bit(y)?;
                let (a, b) = quantizer_arguments(z, y, sigma0);
                Ok(q_function(a) * q_function(b))
            }
            Nonlinearity::Identity => Ok(self.log_likelihood(z, y, sigma0_sq)?.exp()),
        }
    }

    /// Natural log of [`Nonlinearity::likelihood`], computed without
    /// forming the (possibly underflowing) probability.
    pub fn log_likelihood<T: Real>(
        self,
        z: ComplexSample<T>,
        y: ComplexSample<T>,
        sigma0_sq: T,
    ) -> Result<T> {
        let sigma0 = check_variance(sigma0_sq)?;
        match self {
            Nonlinearity::SignQuantizer => {
                check_one_bit(y)?;
                let (a, b) = quantizer_arguments(z, y, sigma0);
                Ok(log_q_function(a) + log_q_function(b))
            }
            Nonlinearity::Identity => {
                let dr = y.re - z.re;
                let di = y.im - z.im;
                Ok(-(dr * dr + di * di) / sigma0_sq - (T::PI() * sigma0_sq).ln())
            }
        }
    }
}

/// The four quantizer outputs, ordered `1+j, −1+j, −1−j, 1−j`.
pub fn one_bit_outputs<T: Real>() -> [ComplexSample<T>; 4] {
    let (p, m) = (T::one(), -T::one());
    [
        ComplexSample::new(p, p),
        ComplexSample::new(m, p),
        ComplexSample::new(m, m),
        ComplexSample::new(p, m),
    ]
}

fn sign<T: Real>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn quantizer_arguments<T: Real>(z: ComplexSample<T>, y: ComplexSample<T>, sigma0: T) -> (T, T) {
    let k = -T::SQRT_2() / sigma0;
    (k * z.re * y.re, k * z.im * y.im)
}

fn check_variance<T: Real>(sigma0_sq: T) -> Result<T> {
    if !(sigma0_sq > T::zero()) || !sigma0_sq.is_finite() {
        return Err(Error::domain(
            "likelihood",
            format!("noise variance {sigma0_sq} must be positive"),
        ));
    }
    Ok(sigma0_sq.sqrt())
}

fn check_one_bit<T: Real>(y: ComplexSample<T>) -> Result<()> {
    let ok = |v: T| v == T::one() || v == -T::one();
    if ok(y.re) && ok(y.im) {
        Ok(())
    } else {
        Err(Error::InvalidSymbol {
            re: y.re.as_f64(),
            im: y.im.as_f64(),
            alphabet: "one-bit QPSK",
        })
    }
}
