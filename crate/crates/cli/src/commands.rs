//! One function per subcommand. Grid points are evaluated in parallel and
//! collected in order, so output bytes do not depend on scheduling.

use onebit_train::acceptance::run_all;
use onebit_train::bound::{
    compare_point, low_snr_asymptotics, replica_bound, small_alpha_rate, CompareRow,
};
use onebit_train::exact::{c_bound_exact, mi_direct, DEFAULT_TENSOR_ORDER};
use onebit_train::replica::single_pair_capacity;
use onebit_train::{BoundResult, ChannelIntegration, Estimate, RateCurve, SmallSystem, SystemParams, TxType};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{require, Settings};
use crate::output::{emit, flag, num, Table};
use crate::CliError;

pub fn bound(s: &Settings) -> Result<(), CliError> {
    let params = SystemParams::new(
        require(s.alpha, "alpha")?,
        require(s.beta, "beta")?,
        s.require_rho()?,
        s.tx.unwrap_or(TxType::OneBit),
    )?;
    let (result, curve) = replica_bound(&params, &s.replica()?)?;
    let mut table = Table::new(&["method", "alpha", "beta", "rho", "beta_t", "r_eff", "objective", "is_opt"]);
    let row = |bt: f64, r: f64, obj: f64, opt: bool| {
        vec![
            result.method.as_str().to_string(),
            num(params.alpha),
            num(params.beta),
            num(params.rho),
            num(bt),
            num(r),
            num(obj),
            flag(opt),
        ]
    };
    let on_grid = curve.points.iter().any(|p| p.beta_t == result.beta_t_opt);
    let mut refined_pending = !on_grid;
    for p in &curve.points {
        if refined_pending && p.beta_t > result.beta_t_opt {
            table.push(refined_row(&result, &row));
            refined_pending = false;
        }
        table.push(row(p.beta_t, p.r_eff, p.objective, p.beta_t == result.beta_t_opt));
    }
    if refined_pending {
        table.push(refined_row(&result, &row));
    }

    #[derive(Serialize)]
    struct Json<'a> {
        result: &'a BoundResult<f64>,
        curve: &'a RateCurve<f64>,
    }
    emit(&table, &Json { result: &result, curve: &curve }, s.format(), s.out.as_deref())
}

/// Row for an optimum found off the grid by refinement.
fn refined_row(result: &BoundResult<f64>, row: &impl Fn(f64, f64, f64, bool) -> Vec<String>) -> Vec<String> {
    let (b, bt) = (result.params.beta, result.beta_t_opt);
    row(bt, result.c_bound * b / (b - bt), result.c_bound, true)
}

const COMPARE_HEADER: [&str; 6] = ["rho_db", "alpha", "beta", "c_bound_replica", "c_bound_bussgang", "r_csir"];

fn sweep_db(s: &Settings) -> Result<Vec<f64>, CliError> {
    let start = s.rho_db_start.unwrap_or(-10.0);
    let stop = s.rho_db_stop.unwrap_or(20.0);
    let step = s.rho_db_step.unwrap_or(1.0);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Usage(format!(
            "empty SNR sweep: start {start} dB, stop {stop} dB, step {step} dB"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn compare_rows(alphas: &[f64], betas: &[f64], s: &Settings) -> Result<Vec<CompareRow<f64>>, CliError> {
    let settings = s.replica()?;
    let dbs = &sweep_db(s)?;
    let jobs: Vec<(f64, f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().flat_map(move |&b| dbs.iter().map(move |&d| (a, b, d))))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(a, b, d)| compare_point(a, b, d, &settings))
        .collect::<onebit_train::Result<Vec<_>>>()?;
    for w in rows.windows(2).filter(|w| w[0].alpha == w[1].alpha && w[0].beta == w[1].beta) {
        let columns = [
            ("c_bound_replica", w[0].c_bound_replica, w[1].c_bound_replica),
            ("c_bound_bussgang", w[0].c_bound_bussgang, w[1].c_bound_bussgang),
            ("r_csir", w[0].r_csir, w[1].r_csir),
        ];
        for (name, a, b) in columns {
            if b < a {
                eprintln!(
                    "warning: {name} decreases from {a} to {b} between {} and {} dB (alpha {})",
                    w[0].rho_db, w[1].rho_db, w[0].alpha
                );
            }
        }
    }
    Ok(rows)
}

fn emit_compare(rows: &[CompareRow<f64>], s: &Settings) -> Result<(), CliError> {
    let mut table = Table::new(&COMPARE_HEADER);
    for r in rows {
        table.push(vec![
            num(r.rho_db),
            num(r.alpha),
            num(r.beta),
            num(r.c_bound_replica),
            num(r.c_bound_bussgang),
            num(r.r_csir),
        ]);
    }
    emit(&table, &rows, s.format(), s.out.as_deref())
}

pub fn compare(s: &Settings) -> Result<(), CliError> {
    let rows = compare_rows(&[require(s.alpha, "alpha")?], &[require(s.beta, "beta")?], s)?;
    emit_compare(&rows, s)
}

#[derive(Serialize)]
struct AlphaRow {
    alpha: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_t_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_bound_onebit: Option<f64>,
}

/// Coherence times swept by figure 1 unless `--beta` is given.
const FIGURE1_BETAS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

pub fn figure(which: u8, s: &Settings) -> Result<(), CliError> {
    if which == 1 {
        let betas = s.beta.map_or(FIGURE1_BETAS.to_vec(), |b| vec![b]);
        let rows = compare_rows(&[1.0, 2.0], &betas, s)?;
        return emit_compare(&rows, s);
    }
    let beta = s.beta.unwrap_or(8.0);
    let rho = s.rho().unwrap_or(10.0);
    let alpha_max = s.alpha_max.unwrap_or(256.0);
    if !(alpha_max >= 1.0) {
        return Err(CliError::Usage(format!("alpha_max = {alpha_max} must be at least 1")));
    }
    let alphas: Vec<f64> = (0..)
        .map(|k| 2f64.powi(k))
        .take_while(|&a| a <= alpha_max)
        .collect();
    let settings = s.replica()?;
    let results = alphas
        .par_iter()
        .map(|&a| {
            let p = SystemParams::new(a, beta, rho, TxType::OneBit)?;
            replica_bound(&p, &settings).map(|r| r.0)
        })
        .collect::<onebit_train::Result<Vec<_>>>()?;
    let (header, rows): ([&'static str; 3], Vec<AlphaRow>) = if which == 2 {
        (
            ["alpha", "beta", "beta_t_opt"],
            results
                .iter()
                .map(|r| AlphaRow { alpha: r.params.alpha, beta, beta_t_opt: Some(r.beta_t_opt), c_bound_onebit: None })
                .collect(),
        )
    } else {
        for r in results.iter().filter(|r| r.c_bound >= 2.0) {
            eprintln!("warning: bound {} at alpha {} is not below 2 bits", r.c_bound, r.params.alpha);
        }
        (
            ["alpha", "beta", "c_bound_onebit"],
            results
                .iter()
                .map(|r| AlphaRow { alpha: r.params.alpha, beta, beta_t_opt: None, c_bound_onebit: Some(r.c_bound) })
                .collect(),
        )
    };
    let mut table = Table::new(&header);
    for r in &rows {
        let v = r.beta_t_opt.or(r.c_bound_onebit).unwrap_or(f64::NAN);
        table.push(vec![num(r.alpha), num(r.beta), num(v)]);
    }
    emit(&table, &rows, s.format(), s.out.as_deref())
}

pub fn exact(s: &Settings) -> Result<(), CliError> {
    let integration = match s.mc_samples {
        Some(samples) => ChannelIntegration::MonteCarlo {
            samples,
            seed: s.seed.unwrap_or(0),
        },
        None => ChannelIntegration::TensorQuadrature {
            order: s.channel_order.unwrap_or(DEFAULT_TENSOR_ORDER),
        },
    };
    let sys = SmallSystem::new(
        s.m.unwrap_or(1),
        s.n.unwrap_or(1),
        s.t.unwrap_or(3),
        s.require_rho()?,
        integration,
    )?;
    let (result, rates) = c_bound_exact(&sys)?;
    let direct = (1..sys.t_total)
        .map(|tt| mi_direct(tt, &sys))
        .collect::<onebit_train::Result<Vec<_>>>()?;

    #[derive(Serialize)]
    struct Row {
        t_t: usize,
        reff_exact: Estimate,
        mi_direct: Estimate,
        abs_diff: f64,
        objective: f64,
        is_opt: bool,
    }
    let t = sys.t_total;
    let best_tt = (result.beta_t_opt * sys.m as f64).round() as usize;
    let rows: Vec<Row> = rates
        .iter()
        .zip(&direct)
        .enumerate()
        .map(|(i, (r, d))| Row {
            t_t: i + 1,
            reff_exact: *r,
            mi_direct: *d,
            abs_diff: (r.value - d.value).abs(),
            objective: (t - i - 1) as f64 / t as f64 * r.value,
            is_opt: i + 1 == best_tt,
        })
        .collect();
    let mut table = Table::new(&[
        "m", "n", "t", "rho", "t_t", "reff_exact", "reff_exact_se", "mi_direct", "mi_direct_se",
        "abs_diff", "objective", "is_opt",
    ]);
    for r in &rows {
        table.push(vec![
            sys.m.to_string(),
            sys.n.to_string(),
            t.to_string(),
            num(sys.rho),
            r.t_t.to_string(),
            num(r.reff_exact.value),
            num(r.reff_exact.std_error),
            num(r.mi_direct.value),
            num(r.mi_direct.std_error),
            num(r.abs_diff),
            num(r.objective),
            flag(r.is_opt),
        ]);
    }

    #[derive(Serialize)]
    struct Json<'a> {
        result: &'a BoundResult<f64>,
        rows: &'a [Row],
    }
    emit(&table, &Json { result: &result, rows: &rows }, s.format(), s.out.as_deref())
}

pub fn asymptotics(s: &Settings) -> Result<(), CliError> {
    let params = SystemParams::new(
        require(s.alpha, "alpha")?,
        require(s.beta, "beta")?,
        s.require_rho()?,
        s.tx.unwrap_or(TxType::OneBit),
    )?;
    let settings = s.replica()?;
    let low = low_snr_asymptotics(&params);
    let c1 = single_pair_capacity(params.rho, &settings.rule)?;
    let small = small_alpha_rate(params.alpha, params.rho, &settings.rule)?;

    #[derive(Serialize)]
    struct Json {
        alpha: f64,
        beta: f64,
        rho: f64,
        beta_t_opt_low_snr: f64,
        c_bound_low_snr: f64,
        single_pair_capacity: f64,
        small_alpha_rate: f64,
    }
    let j = Json {
        alpha: params.alpha,
        beta: params.beta,
        rho: params.rho,
        beta_t_opt_low_snr: low.beta_t_opt,
        c_bound_low_snr: low.c_bound,
        single_pair_capacity: c1,
        small_alpha_rate: small,
    };
    let mut table = Table::new(&[
        "alpha", "beta", "rho", "beta_t_opt_low_snr", "c_bound_low_snr", "single_pair_capacity",
        "small_alpha_rate",
    ]);
    table.push(
        [j.alpha, j.beta, j.rho, j.beta_t_opt_low_snr, j.c_bound_low_snr, j.single_pair_capacity, j.small_alpha_rate]
            .into_iter()
            .map(num)
            .collect(),
    );
    emit(&table, &j, s.format(), s.out.as_deref())
}

/// Returns whether every criterion passed.
pub fn selftest() -> bool {
    let reports = run_all(|r| println!("{r}"));
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    passed == reports.len()
}
