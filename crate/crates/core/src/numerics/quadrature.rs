use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of Gauss–Hermite nodes.
pub const DEFAULT_ORDER: usize = 128;
/// Largest supported order.
pub const MAX_ORDER: usize = 2000;

const NEWTON_MAX_ITER: usize = 100;
const RESCALE: f64 = 1e150;

/// Gauss–Hermite rule for `E[f(u)]`, `u ~ N(0, 1)`.
///
/// Nodes are sorted ascending and the weights form a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    log_weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    /// Builds the `order`-point rule. Nodes are computed in `f64` by Newton
    /// iteration on the orthonormal Hermite recurrence and then converted.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "quadrature order {order} outside 1..={MAX_ORDER}"
            )));
        }
        let (x, log_w) = physicists_rule(order)?;
        // u = √2·x, probability weight w/√π
        let shift = 0.5 * std::f64::consts::PI.ln();
        let mut pairs: Vec<(f64, f64)> = x
            .iter()
            .zip(&log_w)
            .map(|(&xi, &lw)| (std::f64::consts::SQRT_2 * xi, lw - shift))
            .collect();
        let lse = log_sum_exp(pairs.iter().map(|p| p.1));
        for p in &mut pairs {
            p.1 -= lse;
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes = pairs.iter().map(|p| T::lit(p.0)).collect();
        let log_weights: Vec<T> = pairs.iter().map(|p| T::lit(p.1)).collect();
        let weights = pairs.iter().map(|p| T::lit(p.1.exp())).collect();
        Ok(Self {
            nodes,
            weights,
            log_weights,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[T] {
        &self.log_weights
    }

    /// `Σ wᵢ f(uᵢ)`. Fails on the first non-finite contribution.
    pub fn expect<F: Fn(T) -> T>(&self, f: F) -> Result<T> {
        let mut acc = T::zero();
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(u);
            if !v.is_finite() {
                return Err(non_finite(u, v));
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// `E[f(c·u)]` for an arbitrary scale `c`.
    ///
    /// For `|c| > 1` the Gaussian is rescaled onto the nodes
    /// (`v = c·u`, so `f` is sampled at the nodes themselves with adjusted
    /// weights). This keeps the rule accurate when `f` has structure on the
    /// unit scale but `c` is large, e.g. `Q(c·u)·ln Q(c·u)`.
    pub fn expect_scaled<F: Fn(T) -> T>(&self, scale: T, f: F) -> Result<T> {
        let c = scale.abs();
        if !c.is_finite() {
            return Err(Error::domain("expect_scaled", format!("scale {scale}")));
        }
        if c <= T::one() {
            return self.expect(|u| f(c * u));
        }
        let half = T::lit(0.5);
        let shrink = half * (T::one() - (c * c).recip());
        let ln_c = c.ln();
        let mut acc = T::zero();
        for (&v, &lw) in self.nodes.iter().zip(&self.log_weights) {
            let fv = f(v);
            if !fv.is_finite() {
                return Err(non_finite(v, fv));
            }
            acc += (lw + shrink * v * v - ln_c).exp() * fv;
        }
        Ok(acc)
    }
}

/// Free-function form of [`QuadratureRule::expect`].
pub fn expect_normal<T: Real, F: Fn(T) -> T>(f: F, rule: &QuadratureRule<T>) -> Result<T> {
    rule.expect(f)
}

fn non_finite<T: Real>(node: T, value: T) -> Error {
    Error::NonFiniteIntegrand {
        node: node.as_f64(),
        value: value.as_f64(),
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Nodes and log-weights for the weight `exp(−x²)`.
///
/// Initial nodes are the eigenvalues of the Jacobi matrix (implicit QL);
/// each is then polished by Newton steps on the orthonormal recurrence,
/// which also yields the weight.
fn physicists_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    let mut log_w = vec![0.0; n];
    for (i, z) in diag.iter_mut().enumerate() {
        let mut converged = false;
        let mut log_pp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p1, pp, lp) = hermite_orthonormal(n, *z);
            log_pp = lp;
            let step = p1 / pp;
            *z -= step;
            if step.abs() <= 3.0e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !log_pp.is_finite() {
            return Err(Error::NoConvergence {
                what: "Gauss-Hermite node",
                detail: format!("order {n}, node {i}"),
                brackets: Vec::new(),
            });
        }
        log_w[i] = std::f64::consts::LN_2 - 2.0 * log_pp;
    }
    // Enforce exact symmetry.
    for i in 0..n / 2 {
        let z = 0.5 * (diag[n - 1 - i] - diag[i]);
        diag[i] = -z;
        diag[n - 1 - i] = z;
        let lw = 0.5 * (log_w[i] + log_w[n - 1 - i]);
        log_w[i] = lw;
        log_w[n - 1 - i] = lw;
    }
    if n % 2 == 1 {
        diag[n / 2] = 0.0;
    }
    Ok((diag, log_w))
}

/// Orthonormal Hermite value `p_n(z)` and derivative `√(2n)·p_{n−1}(z)`,
/// both divided by a common factor `exp(s)`; returns `(p, p', ln|p'| + s)`.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64, f64) {
    let mut p1 = std::f64::consts::PI.powf(-0.25);
    let mut p2 = 0.0;
    let mut log_scale = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        if p1.abs() > RESCALE {
            p1 /= RESCALE;
            p2 /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    let pp = (2.0 * n as f64).sqrt() * p2;
    (p1, pp, pp.abs().ln() + log_scale)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
/// `e[i]` couples rows `i` and `i + 1`; `e` is destroyed and `d` receives
/// the eigenvalues (unsorted).
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    what: "Jacobi matrix eigenvalues",
                    detail: format!("order {n}, row {l}"),
                    brackets: Vec::new(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
