//! Reproduction checks shared by the `acceptance` test target and the
//! command-line `selftest`.

use std::time::{Duration, Instant};

use crate::bound::{
    compare_point, low_snr_asymptotics, replica_bound, CompareRow, OptimizerOptions,
    ReplicaSettings,
};
use crate::error::Result;
use crate::exact::{
    mi_direct, reff_exact, ChannelIntegration, ExactModel, SmallSystem, DEFAULT_MC_SAMPLES,
};
use crate::likelihood::{one_bit_outputs, ComplexSample, Nonlinearity};
use crate::numerics::{q_function, QuadratureRule};
use crate::replica::{
    csir_rate, f1_value, f2_linear, f2_onebit, onebit_overlap_map, receiver_rhs, reff_linear,
    solve_qh, solve_qx_linear, solve_qx_onebit, ChannelOverlap, SystemParams, TxType,
};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {} [{}] {} ({:.1} s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Runs criteria in order, calling `on_report` as each finishes. Criteria
/// 3–4 and 5–6 share one sweep each.
pub fn run_all(mut on_report: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    let mut out = Vec::new();
    let mut push = |r: CriterionReport| {
        on_report(&r);
        out.push(r);
    };
    push(low_snr_law());
    push(qh_asymptotics());
    let (c3, c4) = bussgang_and_csir();
    push(c3);
    push(c4);
    let (c5, c6) = saturation_and_shrinkage();
    push(c5);
    push(c6);
    push(csir_reduction());
    push(oracle_equivalence());
    push(property_suite());
    out
}

fn report(id: u8, title: &'static str, start: Instant, outcome: Result<(bool, String)>) -> CriterionReport {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// rho = 0.01, alpha = 1, beta = 10: bound within 10% of the quadratic
/// law and half of the block spent on training, for both input types.
pub fn low_snr_law() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let s = ReplicaSettings::<f64>::default();
        let mut ok = true;
        let mut parts = Vec::new();
        for tx in [TxType::Linear, TxType::OneBit] {
            let p = SystemParams::new(1.0, 10.0, 0.01, tx)?;
            let (b, _) = replica_bound(&p, &s)?;
            let approx = low_snr_asymptotics(&p);
            let ratio = b.c_bound / approx.c_bound;
            ok &= (ratio - 1.0).abs() <= 0.1 && (b.beta_t_opt - 5.0).abs() <= 0.1;
            parts.push(format!(
                "{tx}: C = {:.5e} (law {:.5e}, ratio {ratio:.4}), beta_t = {:.2}",
                b.c_bound, approx.c_bound, b.beta_t_opt
            ));
        }
        let fast = start.elapsed() < Duration::from_secs(10);
        Ok((ok && fast, parts.join("; ")))
    })();
    report(1, "low-SNR law", start, outcome)
}

/// q_h within 5% of 2·beta_t·rho/pi for small rho.
pub fn qh_asymptotics() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let rule = QuadratureRule::<f64>::gauss_hermite(128)?;
        let mut worst = 0.0_f64;
        for &rho in &[0.001, 0.01] {
            for &bt in &[0.5, 1.0, 2.0] {
                let o = solve_qh(rho, bt, &rule, 1e-10)?;
                let law = 2.0 * bt * rho / std::f64::consts::PI;
                worst = worst.max((o.q_h / law - 1.0).abs());
            }
        }
        let fast = start.elapsed() < Duration::from_secs(1);
        Ok((worst <= 0.05 && fast, format!("max relative deviation {worst:.4}")))
    })();
    report(2, "q_h low-SNR asymptotics", start, outcome)
}

/// Criteria 3 and 4 over alpha in {1, 2}, beta = 20, −10..20 dB, plus −40
/// and −30 dB for the low-SNR merge.
pub fn bussgang_and_csir() -> (CriterionReport, CriterionReport) {
    let start = Instant::now();
    let s = ReplicaSettings::<f64>::default();
    let rows: Result<Vec<CompareRow<f64>>> = (|| {
        let mut rows = Vec::new();
        for &alpha in &[1.0, 2.0] {
            let dbs = [-40.0, -30.0].into_iter().chain((-10..=20).map(f64::from));
            for d in dbs {
                rows.push(compare_point(alpha, 20.0, d, &s)?);
            }
        }
        Ok(rows)
    })();
    let elapsed_ok = start.elapsed() < Duration::from_secs(120);
    let c3 = rows.as_ref().map_err(Clone::clone).map(|rows| {
        let violations: Vec<String> = rows
            .iter()
            .filter(|r| r.c_bound_bussgang > r.c_bound_replica)
            .map(|r| format!("alpha {} at {} dB", r.alpha, r.rho_db))
            .collect();
        let min_ratio = rows
            .iter()
            .filter(|r| r.rho_db <= -30.0)
            .map(|r| r.c_bound_bussgang / r.c_bound_replica)
            .fold(f64::INFINITY, f64::min);
        (
            violations.is_empty() && min_ratio >= 0.99 && elapsed_ok,
            format!(
                "{} rows, {} dominance violations {:?}, min Bussgang/replica ratio at <= -30 dB {min_ratio:.5}",
                rows.len(),
                violations.len(),
                violations
            ),
        )
    });
    let c4 = rows.as_ref().map_err(Clone::clone).map(|rows| {
        let worst = rows
            .iter()
            .map(|r| r.c_bound_replica - r.r_csir)
            .fold(f64::NEG_INFINITY, f64::max);
        (
            worst <= 0.0,
            format!("max(c_replica − r_csir) = {worst:.3e} over {} rows", rows.len()),
        )
    });
    (
        report(3, "Bussgang dominance and low-SNR merge", start, c3),
        report(4, "CSIR ceiling", start, c4),
    )
}

/// `(alpha, optimum, curve)` for one load.
pub type SweepPoint = (f64, crate::bound::BoundResult<f64>, crate::bound::RateCurve<f64>);

/// One-bit sweep alpha = 1, 2, …, 256 at beta = 8, rho = 10 with golden
/// refinement of the training fraction.
pub fn onebit_alpha_sweep(refine: bool) -> Result<Vec<SweepPoint>> {
    let s = ReplicaSettings::new(
        crate::numerics::DEFAULT_ORDER,
        crate::replica::DEFAULT_TOL,
        OptimizerOptions {
            grid_step: 0.1,
            refine,
        },
    )?;
    (0..=8)
        .map(|k| {
            let alpha = f64::from(1u32 << k);
            let p = SystemParams::new(alpha, 8.0, 10.0, TxType::OneBit)?;
            let (b, c) = replica_bound(&p, &s)?;
            Ok((alpha, b, c))
        })
        .collect()
}

pub fn saturation_and_shrinkage() -> (CriterionReport, CriterionReport) {
    let start = Instant::now();
    let sweep = onebit_alpha_sweep(true);
    let elapsed_ok = start.elapsed() < Duration::from_secs(120);
    let c5 = sweep.as_ref().map_err(Clone::clone).map(|rows| {
        let max_r = rows
            .iter()
            .flat_map(|(_, _, c)| c.points.iter().map(|p| p.r_eff))
            .fold(f64::NEG_INFINITY, f64::max);
        let max_c = rows.iter().map(|(_, b, _)| b.c_bound).fold(f64::NEG_INFINITY, f64::max);
        let monotone = rows.windows(2).all(|w| w[1].1.c_bound >= w[0].1.c_bound);
        let list: Vec<String> = rows.iter().map(|(a, b, _)| format!("{a}:{:.4}", b.c_bound)).collect();
        (
            max_r <= 2.0 && max_c < 2.0 && monotone && elapsed_ok,
            format!(
                "max R_eff {max_r:.5}, max C_bound {max_c:.5}, nondecreasing {monotone}; C by alpha [{}]",
                list.join(", ")
            ),
        )
    });
    let c6 = sweep.as_ref().map_err(Clone::clone).map(|rows| {
        let mut ok = true;
        let mut ratios = Vec::new();
        for w in rows.windows(2) {
            if w[0].0 >= 16.0 {
                let r = w[1].1.beta_t_opt / w[0].1.beta_t_opt;
                ok &= (0.58..=0.68).contains(&r);
                ratios.push(format!("{}->{}: {r:.3}", w[0].0, w[1].0));
            }
        }
        let last = rows.last().map(|r| r.1.beta_t_opt).unwrap_or(f64::NAN);
        ok &= last < 1.0;
        let bts: Vec<String> = rows.iter().map(|(a, b, _)| format!("{a}:{:.4}", b.beta_t_opt)).collect();
        (
            ok,
            format!(
                "doubling ratios [{}]; beta_t_opt at largest alpha {last:.4}; beta_t_opt by alpha [{}]",
                ratios.join(", "),
                bts.join(", ")
            ),
        )
    });
    (
        report(5, "saturation below 2 bits", start, c5),
        report(6, "training shrinkage per doubling of alpha (rho = 10 assumed)", start, c6),
    )
}

/// Linear rate with perfect channel knowledge equals the CSIR rate.
pub fn csir_reduction() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let rule = QuadratureRule::<f64>::gauss_hermite(128)?;
        let mut worst = 0.0_f64;
        for &alpha in &[0.5, 1.0, 4.0] {
            for &rho in &[0.1, 1.0, 10.0] {
                let p = SystemParams::new(alpha, 10.0, rho, TxType::Linear)?;
                let a = reff_linear(&p, &ChannelOverlap::perfect(rho), &rule, 1e-12)?;
                let b = csir_rate(alpha, rho, &rule, 1e-12)?;
                worst = worst.max(((a - b) / b).abs());
            }
        }
        Ok((worst <= 1e-8, format!("max relative difference {worst:.3e} over 9 points")))
    })();
    report(7, "CSIR reduction identity", start, outcome)
}

/// d1–d4 pipeline against the direct mutual information.
pub fn oracle_equivalence() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut ok = true;
        let mut worst = 0.0_f64;
        for &t in &[2usize, 3, 4] {
            for &rho in &[1.0, 10.0] {
                let sys = SmallSystem::new(1, 1, t, rho, ChannelIntegration::default())?;
                for tt in 1..t {
                    let a = reff_exact(tt, &sys)?;
                    let b = mi_direct(tt, &sys)?;
                    let d = (a.value - b.value).abs();
                    worst = worst.max(d);
                    ok &= d < 1e-6;
                }
            }
        }
        let mc = ChannelIntegration::MonteCarlo {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        };
        let sys = SmallSystem::new(2, 2, 3, 10.0, mc)?;
        let mut mc_parts = Vec::new();
        for tt in 1..3 {
            let a = reff_exact(tt, &sys)?;
            let b = mi_direct(tt, &sys)?;
            let se = a.std_error.hypot(b.std_error);
            let agree = (a.value - b.value).abs() < 4.0 * se;
            ok &= agree;
            mc_parts.push(format!(
                "T_t={tt}: {:.5} vs {:.5} (|diff| {:.2e}, 4 se {:.2e})",
                a.value,
                b.value,
                (a.value - b.value).abs(),
                4.0 * se
            ));
        }
        let fast = start.elapsed() < Duration::from_secs(600);
        Ok((
            ok && fast,
            format!(
                "M=N=1 max |diff| {worst:.2e}; M=N=2 Monte Carlo {}",
                mc_parts.join(", ")
            ),
        ))
    })();
    report(8, "exact pipeline vs direct mutual information", start, outcome)
}

/// Normalization, fixed-point residuals, stationarity and quadrature
/// checks on fixed grids.
pub fn property_suite() -> CriterionReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut failures: Vec<String> = Vec::new();
        let mut check = |name: &str, ok: bool| {
            if !ok {
                failures.push(name.to_string());
            }
        };
        let rule = QuadratureRule::<f64>::gauss_hermite(128)?;
        let tol = 1e-10;

        // likelihood normalization
        let sign = Nonlinearity::SignQuantizer;
        let mut worst_g = 0.0_f64;
        for i in -8..=8 {
            for j in -8..=8 {
                let z = ComplexSample::new(0.7 * f64::from(i), 0.45 * f64::from(j));
                let mut s = 0.0;
                for y in one_bit_outputs() {
                    s += sign.likelihood(z, y, 0.8)?;
                }
                worst_g = worst_g.max((s - 1.0).abs());
            }
        }
        check("likelihood normalization", worst_g <= 1e-12);

        // d2 / d3 normalization
        let sys = SmallSystem::new(1, 1, 3, 10.0, ChannelIntegration::default())?;
        let model = ExactModel::new(&sys, 2)?;
        let mut worst_d = 0.0_f64;
        for xc in 0..16usize {
            let x_t = [xc & 3, xc >> 2];
            let outcomes = model.training_outcomes(2, &x_t)?;
            let total: f64 = outcomes.iter().map(|o| o.weight).sum();
            worst_d = worst_d.max((total - 1.0).abs());
            for o in outcomes.iter().take(4) {
                for xd in 0..4 {
                    let s: f64 = (0..4)
                        .map(|yd| model.d3(2, &[xd], &[yd], &x_t, &o.y_t))
                        .sum::<Result<f64>>()?;
                    worst_d = worst_d.max((s - 1.0).abs());
                }
            }
        }
        check("d2/d3 normalization", worst_d <= 1e-8);

        // fixed-point residuals and stationarity
        let h = 1e-5;
        let mut worst_res = 0.0_f64;
        let mut worst_grad = 0.0_f64;
        for &(rho, bt) in &[(0.1, 1.0), (1.0, 0.5), (10.0, 2.0), (100.0, 5.0)] {
            let o = solve_qh(rho, bt, &rule, tol)?;
            let rhs = receiver_rhs(o.q_h, rho, bt, &rule)?;
            worst_res = worst_res.max((o.q_h - (1.0 - o.q_h) * rhs).abs());
            let f = |q: f64, qh: f64| f1_value(q, qh, rho, bt, &rule);
            let gq = (f(o.q_h + h, o.q_h_hat)? - f(o.q_h - h, o.q_h_hat)?) / (2.0 * h);
            let gh = (f(o.q_h, o.q_h_hat + h)? - f(o.q_h, o.q_h_hat - h)?) / (2.0 * h);
            worst_grad = worst_grad.max(gq.abs()).max(gh.abs());
        }
        for &(snr, alpha) in &[(0.5, 1.0), (1.0, 2.0), (10.0, 4.0), (3.0, 16.0)] {
            let d = solve_qx_linear(snr, alpha, &rule, tol)?;
            let rhs = receiver_rhs(d.q_x, snr, alpha, &rule)?;
            worst_res = worst_res.max((d.q_x - (1.0 - d.q_x) * rhs).abs());
            let f = |r: f64, rh: f64| f2_linear(r, rh, alpha, snr, &rule);
            let gq = (f(d.q_x + h, d.q_x_hat)? - f(d.q_x - h, d.q_x_hat)?) / (2.0 * h);
            let gh = (f(d.q_x, d.q_x_hat + h)? - f(d.q_x, d.q_x_hat - h)?) / (2.0 * h);
            worst_grad = worst_grad.max(gq.abs()).max(gh.abs());

            let d = solve_qx_onebit(snr, alpha, &rule, tol)?;
            let r1 = (d.q_x_hat - receiver_rhs(d.q_x, snr, alpha, &rule)?).abs();
            let r2 = (d.q_x - onebit_overlap_map(d.q_x_hat)?).abs();
            worst_res = worst_res.max(r1).max(r2);
            let f = |r: f64, rh: f64| f2_onebit(r, rh, alpha, snr, &rule);
            let gq = (f(d.q_x + h, d.q_x_hat)? - f(d.q_x - h, d.q_x_hat)?) / (2.0 * h);
            let gh = (f(d.q_x, d.q_x_hat + h)? - f(d.q_x, d.q_x_hat - h)?) / (2.0 * h);
            worst_grad = worst_grad.max(gq.abs()).max(gh.abs());
        }
        check("fixed-point residuals", worst_res <= tol);
        check("free-energy stationarity", worst_grad <= 1e-6);

        // Q reflection and quadrature exactness
        let worst_q = (-800..=800)
            .map(|i| {
                let x = f64::from(i) * 0.01;
                (q_function(x) + q_function(-x) - 1.0).abs()
            })
            .fold(0.0, f64::max);
        check("Q reflection", worst_q <= 1e-15);
        let mut worst_m = 0.0_f64;
        for k in 0..=8 {
            let m = rule.expect(|u| u.powi(k))?;
            let exact = if k % 2 == 1 {
                0.0
            } else {
                (1..k).step_by(2).map(f64::from).product::<f64>()
            };
            worst_m = worst_m.max((m - exact).abs() / exact.max(1.0));
        }
        check("quadrature exactness", worst_m <= 1e-9);

        Ok((
            failures.is_empty(),
            format!(
                "g {worst_g:.1e}, d2/d3 {worst_d:.1e}, residual {worst_res:.1e}, gradient {worst_grad:.1e}, \
                 reflection {worst_q:.1e}, moments {worst_m:.1e}; failed: {failures:?}"
            ),
        ))
    })();
    report(9, "property suite", start, outcome)
}
