//! Independent reference computations for integration tests: adaptive
//! Gauss–Kronrod integration and brute-force formulations that share no
//! code path with the Gauss–Hermite machinery under test.
#![allow(dead_code)]

use onebit_train::numerics::{log_q_function, q_function};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let d = h * XGK[i];
        let s = f(c - d) + f(c + d);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, abs_tol, 40)
}

/// `E[f(u)]` for standard normal `u`, integrated over unit panels on
/// `[-12, 12]` (the tails carry less than 1e-32).
pub fn normal_expect(f: impl Fn(f64) -> f64, abs_tol: f64) -> f64 {
    let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let g = |u: f64| c * (-0.5 * u * u).exp() * f(u);
    (-12..12)
        .map(|k| integrate(g, f64::from(k), f64::from(k + 1), abs_tol / 24.0))
        .sum()
}

pub fn q_log_q(x: f64) -> f64 {
    let q = q_function(x);
    if q == 0.0 {
        0.0
    } else {
        q * log_q_function(x)
    }
}

/// `E[f(c u)]` by direct integration.
pub fn scaled_expect(c: f64, f: impl Fn(f64) -> f64) -> f64 {
    normal_expect(|u| f(c * u), 1e-15)
}

/// Conjugate overlap of the receiver saddle point by direct integration.
pub fn rhs(q: f64, gain: f64, load: f64) -> f64 {
    let b2 = gain / (1.0 + gain * (1.0 - q));
    let c = (b2 * q).sqrt();
    let e = normal_expect(|u| (-(c * u).powi(2) - log_q_function(c * u)).exp(), 1e-15);
    load * b2 / std::f64::consts::PI * e
}

pub fn free_energy(q: f64, q_hat: f64, gain: f64, load: f64) -> f64 {
    let c = (gain * q / (gain * (1.0 - q) + 1.0)).sqrt();
    -4.0 * load * scaled_expect(c, q_log_q) + q * q_hat + q_hat.ln_1p() - q_hat
}

/// Root of `g` on `[lo, hi]` with a sign change, by bisection to
/// machine precision.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of `g` on a uniform grid of `n` cells in `[lo, hi]`,
/// each refined by bisection.
pub fn all_roots(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        if vals[i] == 0.0 {
            out.push(xs[i]);
        } else if (vals[i] > 0.0) != (vals[i + 1] > 0.0) {
            out.push(bisect(&g, xs[i], xs[i + 1]));
        }
    }
    out
}

/// `P(outs | cols)` for one receiver of a single-transmitter link, by
/// polar integration over the Rayleigh gain `h = r e^{jθ}`. Symbols use
/// the QPSK and output orderings of the crate (index `k` at angle
/// `(2k+1)π/4`).
pub fn single_link_prob(cols: &[usize], outs: &[usize], rho: f64) -> f64 {
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
    let amp = rho.sqrt() * SQRT_2;
    let integrand_r = |theta: f64| {
        move |r: f64| {
            let mut p = 2.0 * r * (-r * r).exp();
            for (&c, &o) in cols.iter().zip(outs) {
                let phase = theta + f64::from(2 * c as u32 + 1) * FRAC_PI_4;
                let (zr, zi) = (amp * r * phase.cos(), amp * r * phase.sin());
                let yo = f64::from(2 * o as u32 + 1) * FRAC_PI_4;
                let (yr, yi) = (yo.cos().signum(), yo.sin().signum());
                p *= q_function(-zr * yr) * q_function(-zi * yi);
            }
            p
        }
    };
    let over_theta = |theta: f64| {
        (0..8)
            .map(|k| integrate(integrand_r(theta), f64::from(k), f64::from(k + 1), 1e-16))
            .sum::<f64>()
    };
    (0..8)
        .map(|k| {
            let a = f64::from(k) * PI / 4.0;
            integrate(over_theta, a, a + PI / 4.0, 1e-15)
        })
        .sum::<f64>()
        / (2.0 * PI)
}
