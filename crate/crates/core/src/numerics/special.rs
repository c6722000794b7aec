use crate::error::{Error, Result};
use crate::scalar::Real;

/// Above this argument `erfcx` switches from `exp(x²)·erfc(x)` to the
/// continued fraction.
const ERFCX_CF_THRESHOLD: f64 = 4.0;
const ERFCX_CF_MAX_TERMS: usize = 500;
/// `log_q_function` uses the asymptotic tail series from here on.
const LOG_Q_ASYMPTOTIC_FROM: f64 = 30.0;

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Finite for every `x ≥ −26` (beyond that `exp(x²)` overflows, as does
/// the true value).
pub fn erfcx<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        let two = T::lit(2.0);
        return two * (x * x).exp() - erfcx(-x);
    }
    if x == T::infinity() {
        return T::zero();
    }
    if x < T::lit(ERFCX_CF_THRESHOLD) {
        return (x * x).exp() * x.erfc();
    }
    erfcx_continued_fraction(x)
}

/// `erfc(x) = exp(−x²)/√π · 1/(x + ½/(x + 1/(x + 3/2/(x + …))))`, evaluated
/// with the modified Lentz algorithm.
fn erfcx_continued_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let eps = T::epsilon();
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for i in 1..ERFCX_CF_MAX_TERMS {
        let a = T::lit(i as f64 * 0.5);
        d = x + a * d;
        if d == T::zero() {
            d = tiny;
        }
        c = x + a / c;
        if c == T::zero() {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).abs() <= eps {
            break;
        }
    }
    (T::PI().sqrt() * f).recip()
}

/// Standard Gaussian tail probability `Q(x) = P(Z > x)`, `Z ~ N(0,1)`.
pub fn q_function<T: Real>(x: T) -> T {
    T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}

/// `ln Q(x)` without forming `Q(x)` where it would underflow.
pub fn log_q_function<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::infinity() {
        return T::neg_infinity();
    }
    if x < T::zero() {
        // Q(x) = 1 − Q(−x), and Q(−x) is computed without cancellation.
        return (-q_function(-x)).ln_1p();
    }
    if x < T::lit(LOG_Q_ASYMPTOTIC_FROM) {
        let half = T::lit(0.5);
        return half.ln() + erfcx(x * T::FRAC_1_SQRT_2()).ln() - half * x * x;
    }
    // Q(x) = φ(x)/x · (1 − 1/x² + 3/x⁴ − 15/x⁶ + …)
    let inv_x2 = (x * x).recip();
    let mut term = T::one();
    let mut series = T::zero();
    for k in 1..=8 {
        term = term * (-T::lit((2 * k - 1) as f64)) * inv_x2;
        series += term;
    }
    -T::lit(0.5) * x * x - (x * T::TAU().sqrt()).ln() + series.ln_1p()
}

/// `exp(−x²)/Q(x)`, the recurring integrand of the one-bit fixed points.
///
/// For `x > 0` this is evaluated as `2·exp(−x²/2)/erfcx(x/√2)`, which stays
/// accurate long after both `exp(−x²)` and `Q(x)` have underflowed.
pub fn exp_ratio<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x.is_infinite() {
        return T::zero();
    }
    if x <= T::zero() {
        return (-x * x).exp() / q_function(x);
    }
    let half = T::lit(0.5);
    T::lit(2.0) * (-half * x * x).exp() / erfcx(x * T::FRAC_1_SQRT_2())
}

/// `Q(x)·ln Q(x)` (natural log), zero in both limits.
pub fn q_log_q<T: Real>(x: T) -> T {
    let lq = log_q_function(x);
    if lq == T::neg_infinity() {
        return T::zero();
    }
    lq.exp() * lq
}

/// `H_b(Q(x))` in bits, stable for large `|x|`.
pub fn q_entropy_bits<T: Real>(x: T) -> T {
    let a = x.abs();
    if a.is_infinite() {
        return T::zero();
    }
    let lp = log_q_function(a);
    let p = lp.exp();
    let lq = (-p).ln_1p();
    -(p * lp + (T::one() - p) * lq) / T::LN_2()
}

/// Binary entropy in bits with the `0·log 0 = 0` convention.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::domain(
            "binary_entropy",
            format!("probability {p} outside [0, 1]"),
        ));
    }
    if p == T::zero() || p == T::one() {
        return Ok(T::zero());
    }
    let h = -(p * p.ln() + (T::one() - p) * (-p).ln_1p()) / T::LN_2();
    Ok(h)
}

/// `ln cosh(x)` without overflow.
pub fn ln_cosh<T: Real>(x: T) -> T {
    let a = x.abs();
    a + (T::lit(-2.0) * a).exp().ln_1p() - T::LN_2()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn q_function_limits_and_symmetry() {
        assert_eq!(q_function(0.0_f64), 0.5);
        assert_eq!(q_function(f64::INFINITY), 0.0);
        assert_eq!(q_function(f64::NEG_INFINITY), 1.0);
        assert_relative_eq!(q_function(1.0_f64), 0.158_655_253_931_457_05, max_relative = 1e-15);
    }

    #[test]
    fn q_function_saturates_without_nan() {
        assert_eq!(q_function(1e6_f64), 0.0);
        assert_eq!(q_function(-1e6_f64), 1.0);
        assert!(q_function(40.0_f64) >= 0.0);
    }

    #[test]
    fn log_q_reference_values() {
        // mpmath, 40 digits
        assert_relative_eq!(log_q_function(0.0_f64), 0.5_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_q_function(3.0_f64), -6.607_726_221_510_349_5, max_relative = 1e-14);
        assert_relative_eq!(log_q_function(10.0_f64), -53.231_285_150_512_470_6, max_relative = 1e-14);
        assert_relative_eq!(log_q_function(40.0_f64), -804.608_442_013_753_788, max_relative = 1e-14);
        assert_relative_eq!(log_q_function(-5.0_f64), -2.866_516_129_637_636e-7, max_relative = 1e-12);
        assert_eq!(log_q_function(f64::NEG_INFINITY), 0.0);
        assert!(log_q_function(-60.0_f64).abs() < 1e-300);
    }

    #[test]
    fn log_q_is_continuous_at_asymptotic_switch() {
        let x = 30.0_f64;
        let via_erfcx = 0.5_f64.ln() + erfcx(x * std::f64::consts::FRAC_1_SQRT_2).ln() - 0.5 * x * x;
        assert_relative_eq!(log_q_function(x), via_erfcx, max_relative = 1e-14);
    }

    #[test]
    fn erfcx_reference_values() {
        assert_relative_eq!(erfcx(0.3_f64), 0.734_599_334_567_655_14, max_relative = 1e-14);
        assert_relative_eq!(erfcx(5.0_f64), 0.110_704_637_733_068_63, max_relative = 1e-14);
        assert_relative_eq!(erfcx(30.0_f64), 0.018_795_888_861_416_751, max_relative = 1e-14);
        // both sides of the continued-fraction switch
        assert_relative_eq!(erfcx(4.0_f64 - 1e-9), 0.136_999_457_657_444_90, max_relative = 1e-14);
        assert_relative_eq!(erfcx(4.0_f64), 0.136_999_457_625_061_39, max_relative = 1e-14);
    }

    #[test]
    fn exp_ratio_examples() {
        assert_eq!(exp_ratio(0.0_f64), 2.0);
        assert_relative_eq!(exp_ratio(-5.0_f64), (-25.0_f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(exp_ratio(-5.0_f64), 1.388_794_784_596_610_1e-11, max_relative = 1e-14);
        assert_relative_eq!(exp_ratio(3.0_f64), 0.091_421_574_959_742_508, max_relative = 1e-14);
        assert_relative_eq!(exp_ratio(30.0_f64), 2.780_837_099_175_915e-194, max_relative = 1e-13);
        assert!(exp_ratio(1e200_f64) == 0.0);
    }

    #[test]
    fn exp_ratio_tail_asymptote() {
        for &x in &[50.0_f64, 200.0, 1e4] {
            let asym = x * (2.0 * std::f64::consts::PI).sqrt();
            let scaled = exp_ratio(x) / (-0.5 * x * x).exp();
            if scaled.is_finite() {
                assert_relative_eq!(scaled, asym, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5_f64).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0_f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0_f64).unwrap(), 0.0);
        assert_relative_eq!(
            binary_entropy(0.11_f64).unwrap(),
            0.499_915_958_164_527_996,
            max_relative = 1e-14
        );
        assert!(binary_entropy(1.5_f64).is_err());
        assert!(binary_entropy(-0.1_f64).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn q_entropy_matches_direct_formula() {
        for &x in &[-3.0_f64, -0.2, 0.0, 0.7, 4.0] {
            let direct = binary_entropy(q_function(x)).unwrap();
            assert_relative_eq!(q_entropy_bits(x), direct, max_relative = 1e-12);
        }
        assert_eq!(q_entropy_bits(f64::INFINITY), 0.0);
    }

    #[test]
    fn ln_cosh_large_arguments() {
        assert_relative_eq!(ln_cosh(1.3_f64), 1.3_f64.cosh().ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_cosh(-1000.0_f64), 1000.0 - 2.0_f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn single_precision_instantiation() {
        assert!((q_function(1.0_f32) - 0.158_655_25).abs() < 1e-6);
        assert!((exp_ratio(3.0_f32) - 0.091_421_58).abs() < 1e-6);
        assert!(log_q_function(40.0_f32).is_finite());
    }
}
