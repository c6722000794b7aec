//! Training-length optimization and the comparison bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::QuadratureRule;
use crate::replica::{csir_rate, reff, single_pair_capacity, solve_qh, SystemParams, TxType};
use crate::scalar::Real;

/// Default spacing of the training grid.
pub const DEFAULT_GRID_STEP: f64 = 0.1;

const GOLDEN_MAX_ITER: usize = 200;

/// How the training fraction is searched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions<T> {
    pub grid_step: T,
    /// Golden-section refinement within one grid step of the grid optimum.
    pub refine: bool,
}

impl<T: Real> Default for OptimizerOptions<T> {
    fn default() -> Self {
        Self {
            grid_step: T::lit(DEFAULT_GRID_STEP),
            refine: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub beta_t: T,
    pub r_eff: T,
    /// `((beta − beta_t)/beta)·r_eff`
    pub objective: T,
}

/// Sampled rate and objective on the interior training grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve<T> {
    pub beta: T,
    pub grid_step: T,
    pub points: Vec<CurvePoint<T>>,
}

/// Which bound a [`BoundResult`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ReplicaLinear,
    ReplicaOnebit,
    Bussgang,
    Exact,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ReplicaLinear => "replica-linear",
            Method::ReplicaOnebit => "replica-onebit",
            Method::Bussgang => "bussgang",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult<T> {
    pub beta_t_opt: T,
    pub c_bound: T,
    pub method: Method,
    pub params: SystemParams<T>,
}

/// Outcome of [`optimize_training`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingOptimum<T> {
    pub beta_t_opt: T,
    pub r_eff: T,
    pub c_bound: T,
}

/// Interior grid `{step, 2·step, …}` strictly below `beta`.
pub fn training_grid<T: Real>(beta: T, grid_step: T) -> Result<Vec<T>> {
    if !(grid_step > T::zero()) || !(beta > grid_step) || !beta.is_finite() {
        return Err(Error::EmptyGrid {
            beta: beta.as_f64(),
            step: grid_step.as_f64(),
        });
    }
    let limit = beta * (T::one() - T::lit(1e-9));
    let mut grid = Vec::new();
    let mut k = 1usize;
    loop {
        let b = T::lit(k as f64) * grid_step;
        if b >= limit {
            break;
        }
        grid.push(b);
        k += 1;
    }
    Ok(grid)
}

/// Maximizes `((beta − beta_t)/beta)·reff(beta_t)` over the training grid.
///
/// Grid points are evaluated in parallel and reduced in grid order; ties
/// go to the smaller `beta_t`.
pub fn optimize_training<T, F>(
    reff: F,
    beta: T,
    opts: &OptimizerOptions<T>,
) -> Result<(TrainingOptimum<T>, RateCurve<T>)>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    let grid = training_grid(beta, opts.grid_step)?;
    let objective = |bt: T, r: T| (beta - bt) / beta * r;
    let rates: Vec<Result<T>> = grid.par_iter().map(|&bt| reff(bt)).collect();
    let mut points = Vec::with_capacity(grid.len());
    for (&bt, r) in grid.iter().zip(rates) {
        let r = r?;
        points.push(CurvePoint {
            beta_t: bt,
            r_eff: r,
            objective: objective(bt, r),
        });
    }
    let mut best = points[0];
    for p in &points[1..] {
        if p.objective > best.objective {
            best = *p;
        }
    }
    if opts.refine {
        let lo = (best.beta_t - opts.grid_step).max(opts.grid_step * T::lit(1e-3));
        let hi = (best.beta_t + opts.grid_step).min(beta - opts.grid_step * T::lit(1e-3));
        let refined = golden_section_max(|bt| Ok(objective(bt, reff(bt)?)), lo, hi, beta)?;
        let r = reff(refined)?;
        let obj = objective(refined, r);
        if obj > best.objective {
            best = CurvePoint {
                beta_t: refined,
                r_eff: r,
                objective: obj,
            };
        }
    }
    let curve = RateCurve {
        beta,
        grid_step: opts.grid_step,
        points,
    };
    Ok((
        TrainingOptimum {
            beta_t_opt: best.beta_t,
            r_eff: best.r_eff,
            c_bound: best.objective,
        },
        curve,
    ))
}

fn golden_section_max<T: Real, F: Fn(T) -> Result<T>>(f: F, mut a: T, mut b: T, scale: T) -> Result<T> {
    let inv_phi = T::lit((5.0_f64.sqrt() - 1.0) / 2.0);
    let tol = T::lit(1e-7) * scale.max(T::one());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..GOLDEN_MAX_ITER {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(T::lit(0.5) * (a + b))
}

/// Shared numerical settings of the large-system bounds.
#[derive(Debug, Clone)]
pub struct ReplicaSettings<T> {
    pub rule: QuadratureRule<T>,
    pub tol: T,
    pub optimizer: OptimizerOptions<T>,
}

impl<T: Real> ReplicaSettings<T> {
    pub fn new(quad_nodes: usize, tol: T, optimizer: OptimizerOptions<T>) -> Result<Self> {
        Ok(Self {
            rule: QuadratureRule::gauss_hermite(quad_nodes)?,
            tol,
            optimizer,
        })
    }
}

impl<T: Real> Default for ReplicaSettings<T> {
    fn default() -> Self {
        Self::new(
            crate::numerics::DEFAULT_ORDER,
            T::lit(crate::replica::DEFAULT_TOL),
            OptimizerOptions::default(),
        )
        .expect("default quadrature order is valid")
    }
}

/// Effective rate at training fraction `beta_t`.
pub fn replica_rate<T: Real>(params: &SystemParams<T>, beta_t: T, s: &ReplicaSettings<T>) -> Result<T> {
    let overlap = solve_qh(params.rho, beta_t, &s.rule, s.tol)?;
    reff(params, &overlap, &s.rule, s.tol)
}

/// Large-system bound optimized over the training fraction.
pub fn replica_bound<T: Real>(
    params: &SystemParams<T>,
    s: &ReplicaSettings<T>,
) -> Result<(BoundResult<T>, RateCurve<T>)> {
    params.validate()?;
    let (opt, curve) = optimize_training(|bt| replica_rate(params, bt, s), params.beta, &s.optimizer)?;
    let method = match params.tx {
        TxType::Linear => Method::ReplicaLinear,
        TxType::OneBit => Method::ReplicaOnebit,
    };
    Ok((
        BoundResult {
            beta_t_opt: opt.beta_t_opt,
            c_bound: opt.c_bound,
            method,
            params: *params,
        },
        curve,
    ))
}

/// `log₂(1 + 2α·snr/(π(1 + snr)))`.
pub fn bussgang_rate<T: Real>(alpha: T, snr: T) -> T {
    if snr == T::infinity() {
        return (T::one() + T::lit(2.0) * alpha / T::PI()).log2();
    }
    (T::one() + T::lit(2.0) * alpha * snr / (T::PI() * (T::one() + snr))).log2()
}

/// Bussgang-decomposition bound over the same trained channel (Gaussian
/// inputs only).
pub fn bussgang_bound<T: Real>(
    params: &SystemParams<T>,
    s: &ReplicaSettings<T>,
) -> Result<(BoundResult<T>, RateCurve<T>)> {
    params.validate()?;
    if params.tx != TxType::Linear {
        return Err(Error::UnsupportedTransmitter { op: "bussgang_bound" });
    }
    let rate = |bt: T| -> Result<T> {
        let o = solve_qh(params.rho, bt, &s.rule, s.tol)?;
        Ok(bussgang_rate(params.alpha, o.snr_eff))
    };
    let (opt, curve) = optimize_training(rate, params.beta, &s.optimizer)?;
    Ok((
        BoundResult {
            beta_t_opt: opt.beta_t_opt,
            c_bound: opt.c_bound,
            method: Method::Bussgang,
            params: *params,
        },
        curve,
    ))
}

/// Power ratio for a value in dB, `10^(db/10)`.
pub fn db_to_power<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Linear-input bounds and the CSIR rate at one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow<T> {
    pub rho_db: T,
    pub alpha: T,
    pub beta: T,
    pub c_bound_replica: T,
    pub c_bound_bussgang: T,
    pub r_csir: T,
}

/// Replica bound, Bussgang bound and CSIR rate for Gaussian inputs at
/// `rho_db`.
pub fn compare_point<T: Real>(alpha: T, beta: T, rho_db: T, s: &ReplicaSettings<T>) -> Result<CompareRow<T>> {
    let p = SystemParams::new(alpha, beta, db_to_power(rho_db), TxType::Linear)?;
    let (rep, _) = replica_bound(&p, s)?;
    let (bus, _) = bussgang_bound(&p, s)?;
    let csir = csir_rate(alpha, p.rho, &s.rule, s.tol)?;
    Ok(CompareRow {
        rho_db,
        alpha,
        beta,
        c_bound_replica: rep.c_bound,
        c_bound_bussgang: bus.c_bound,
        r_csir: csir,
    })
}

/// Closed-form low-SNR optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowSnrApproximation<T> {
    pub beta_t_opt: T,
    pub c_bound: T,
}

/// `beta_t ≈ beta/2` and `C ≈ α·β·ρ²/(π² ln 2)`, identical for both
/// transmitter types.
pub fn low_snr_asymptotics<T: Real>(params: &SystemParams<T>) -> LowSnrApproximation<T> {
    let pi = T::PI();
    LowSnrApproximation {
        beta_t_opt: params.beta / T::lit(2.0),
        c_bound: params.alpha * params.beta * params.rho * params.rho / (pi * pi * T::LN_2()),
    }
}

/// Small-`alpha` approximation `alpha·c(snr)` of the QPSK rate.
pub fn small_alpha_rate<T: Real>(alpha: T, snr: T, rule: &QuadratureRule<T>) -> Result<T> {
    if alpha == T::zero() {
        return Ok(T::zero());
    }
    Ok(alpha * single_pair_capacity(snr, rule)?)
}
