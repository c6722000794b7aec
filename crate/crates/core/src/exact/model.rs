use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::channel_batches;
use super::table::ReceiverTable;
use super::{Estimate, SmallSystem};
use crate::bound::{BoundResult, Method};
use crate::error::{Error, Result};
use crate::replica::{SystemParams, TxType};

/// One training outcome and its probability `d2 = P(Y_t | X_t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingOutcome {
    /// Column-major `M × T_t` symbol indices.
    pub x_t: Vec<usize>,
    /// Column-major `N × T_t` output indices.
    pub y_t: Vec<usize>,
    pub weight: f64,
}

/// Channel-averaged per-receiver laws for training lengths up to
/// `max_training`, for every integration batch.
///
/// Symbol matrices are passed column-major: `x_t[p·M + m]` is the symbol
/// index sent by transmitter `m` in training slot `p`, `y_t[p·N + k]` the
/// output index at receiver `k`. Indices follow [`super::qpsk_symbol`] and
/// [`super::output_symbol`].
#[derive(Debug, Clone)]
pub struct ExactModel {
    sys: SmallSystem,
    max_training: usize,
    /// `tables[b][l − 1]` holds the law of `l` columns for batch `b`.
    tables: Vec<Vec<ReceiverTable>>,
    pooled: Vec<ReceiverTable>,
}

impl ExactModel {
    pub fn new(sys: &SmallSystem, max_training: usize) -> Result<Self> {
        Self::with_stream(sys, max_training, 0)
    }

    pub(crate) fn with_stream(sys: &SmallSystem, max_training: usize, stream: u64) -> Result<Self> {
        sys.check_training(max_training)?;
        let batches = channel_batches(sys, stream)?;
        let len = max_training + 1;
        let full: Vec<ReceiverTable> = batches
            .iter()
            .map(|b| ReceiverTable::build(b, sys.rho, len))
            .collect();
        let masses: Vec<f64> = batches.iter().map(|b| b.weights.iter().sum()).collect();
        let pooled_full = ReceiverTable::pooled(&full, &masses);
        let marginals = |t: &ReceiverTable| (1..=len).map(|l| t.marginal(l)).collect::<Vec<_>>();
        Ok(Self {
            sys: *sys,
            max_training,
            pooled: marginals(&pooled_full),
            tables: full.iter().map(marginals).collect(),
        })
    }

    pub fn system(&self) -> &SmallSystem {
        &self.sys
    }

    pub(crate) fn batch_tables(&self) -> &[Vec<ReceiverTable>] {
        &self.tables
    }

    fn check(&self, t_t: usize, x_t: &[usize], y_t: &[usize]) -> Result<()> {
        if t_t == 0 || t_t > self.max_training {
            return Err(Error::InvalidParameter(format!(
                "training length {t_t} outside 1..={}",
                self.max_training
            )));
        }
        let (m, n) = (self.sys.m, self.sys.n);
        if x_t.len() != m * t_t || y_t.len() != n * t_t {
            return Err(Error::InvalidParameter(format!(
                "training matrices must have {} and {} entries",
                m * t_t,
                n * t_t
            )));
        }
        check_indices(x_t)?;
        check_indices(y_t)
    }

    /// `ln d2 = ln P(Y_t | X_t)`.
    pub fn log_d2(&self, t_t: usize, x_t: &[usize], y_t: &[usize]) -> Result<f64> {
        self.check(t_t, x_t, y_t)?;
        let cols = pack_columns(x_t, self.sys.m, t_t);
        let table = &self.pooled[t_t - 1];
        Ok((0..self.sys.n)
            .map(|k| table.log_prob(&cols, &receiver_row(y_t, self.sys.n, k)))
            .sum())
    }

    /// `ln d1 = ln P(y_d, Y_t | x_d, X_t)`.
    pub fn log_d1(
        &self,
        t_t: usize,
        x_d: &[usize],
        y_d: &[usize],
        x_t: &[usize],
        y_t: &[usize],
    ) -> Result<f64> {
        self.check(t_t, x_t, y_t)?;
        let (m, n) = (self.sys.m, self.sys.n);
        if x_d.len() != m || y_d.len() != n {
            return Err(Error::InvalidParameter(format!(
                "data symbols must have {m} and {n} entries"
            )));
        }
        check_indices(x_d)?;
        check_indices(y_d)?;
        let mut cols = pack_columns(x_t, m, t_t);
        cols.push(pack_columns(x_d, m, 1)[0]);
        let table = &self.pooled[t_t];
        Ok((0..n)
            .map(|k| {
                let mut outs = receiver_row(y_t, n, k);
                outs.push(y_d[k]);
                table.log_prob(&cols, &outs)
            })
            .sum())
    }

    pub fn d1(&self, t_t: usize, x_d: &[usize], y_d: &[usize], x_t: &[usize], y_t: &[usize]) -> Result<f64> {
        Ok(self.log_d1(t_t, x_d, y_d, x_t, y_t)?.exp())
    }

    pub fn d2(&self, t_t: usize, x_t: &[usize], y_t: &[usize]) -> Result<f64> {
        Ok(self.log_d2(t_t, x_t, y_t)?.exp())
    }

    /// `d3 = d1/d2 = P(y_d | x_d, X_t, Y_t)`, formed in the log domain.
    pub fn d3(&self, t_t: usize, x_d: &[usize], y_d: &[usize], x_t: &[usize], y_t: &[usize]) -> Result<f64> {
        Ok((self.log_d1(t_t, x_d, y_d, x_t, y_t)? - self.log_d2(t_t, x_t, y_t)?).exp())
    }

    /// `d4 = I(x_d; y_d | X_t, Y_t)` in nats for one training outcome.
    pub fn d4(&self, t_t: usize, x_t: &[usize], y_t: &[usize]) -> Result<f64> {
        self.check(t_t, x_t, y_t)?;
        let (m, n) = (self.sys.m, self.sys.n);
        let cols = pack_columns(x_t, m, t_t);
        let rows: Vec<Vec<usize>> = (0..n).map(|k| receiver_row(y_t, n, k)).collect();
        let cond = conditional_laws(&self.pooled[t_t - 1], &self.pooled[t_t], &cols, &rows, m);
        Ok(outcome_information(&cond, m, n))
    }

    /// Every `Y_t` with its probability for a fixed `X_t`.
    pub fn training_outcomes(&self, t_t: usize, x_t: &[usize]) -> Result<Vec<TrainingOutcome>> {
        let n = self.sys.n;
        let count = 4usize.pow((n * t_t) as u32);
        (0..count)
            .map(|code| {
                let y_t = digits(code, n * t_t);
                let weight = self.d2(t_t, x_t, &y_t)?;
                Ok(TrainingOutcome {
                    x_t: x_t.to_vec(),
                    y_t,
                    weight,
                })
            })
            .collect()
    }

    /// Effective rate in bits per transmitter, averaged over batches.
    pub fn reff(&self, t_t: usize) -> Result<Estimate> {
        if t_t == 0 || t_t > self.max_training {
            return Err(Error::InvalidParameter(format!(
                "training length {t_t} outside 1..={}",
                self.max_training
            )));
        }
        if self.sys.rho == 0.0 {
            return Ok(Estimate::from_batches(&[0.0]));
        }
        let values: Vec<f64> = self
            .tables
            .iter()
            .map(|t| rate_from_tables(&t[t_t - 1], &t[t_t], self.sys.m, self.sys.n, t_t))
            .collect();
        Ok(Estimate::from_batches(&values))
    }
}

fn check_indices(v: &[usize]) -> Result<()> {
    match v.iter().find(|&&s| s > 3) {
        Some(&s) => Err(Error::InvalidParameter(format!("symbol index {s} is not in 0..4"))),
        None => Ok(()),
    }
}

/// Base-4 digits, least significant first.
pub(crate) fn digits(mut code: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = code & 3;
            code >>= 2;
            d
        })
        .collect()
}

/// Packs a column-major `M × len` symbol matrix into per-column codes.
pub(crate) fn pack_columns(x: &[usize], m: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|p| (0..m).fold(0, |acc, t| acc | (x[p * m + t] << (2 * t))))
        .collect()
}

pub(crate) fn receiver_row(y: &[usize], n: usize, k: usize) -> Vec<usize> {
    (0..y.len() / n).map(|p| y[p * n + k]).collect()
}

/// Per receiver: `ln P(Y_t row)` and `P(y | x_d, X_t, Y_t row)` for all
/// `x_d` (outer) and `y` (inner).
struct ConditionalLaws {
    log_train: Vec<f64>,
    cond: Vec<Vec<f64>>,
}

fn conditional_laws(
    train: &ReceiverTable,
    joint: &ReceiverTable,
    cols: &[usize],
    rows: &[Vec<usize>],
    m: usize,
) -> ConditionalLaws {
    let nx = 4usize.pow(m as u32);
    let mut log_train = Vec::with_capacity(rows.len());
    let mut cond = Vec::with_capacity(rows.len());
    let mut jcols = cols.to_vec();
    jcols.push(0);
    for row in rows {
        let lt = train.log_prob(cols, row);
        let mut outs = row.clone();
        outs.push(0);
        let mut c = vec![0.0; nx * 4];
        for xd in 0..nx {
            *jcols.last_mut().unwrap() = xd;
            for y in 0..4 {
                *outs.last_mut().unwrap() = y;
                c[xd * 4 + y] = (joint.log_prob(&jcols, &outs) - lt).exp();
            }
        }
        log_train.push(lt);
        cond.push(c);
    }
    ConditionalLaws { log_train, cond }
}

/// `Σ_x p(x) Σ_y d3 ln(d3 / Σ_x' p(x') d3')` with uniform `p`.
fn outcome_information(laws: &ConditionalLaws, m: usize, n: usize) -> f64 {
    let nx = 4usize.pow(m as u32);
    let ny = 4usize.pow(n as u32);
    let px = 1.0 / nx as f64;
    let mut d3 = vec![0.0; nx];
    let mut info = 0.0;
    for yd in 0..ny {
        let mut mix = 0.0;
        for (xd, slot) in d3.iter_mut().enumerate() {
            let mut v = 1.0;
            for (k, c) in laws.cond.iter().enumerate() {
                v *= c[xd * 4 + ((yd >> (2 * k)) & 3)];
            }
            *slot = v;
            mix += px * v;
        }
        if mix > 0.0 {
            for &v in &d3 {
                if v > 0.0 {
                    info += px * v * (v / mix).ln();
                }
            }
        }
    }
    info.max(0.0)
}

/// `(1/M)·Σ_{X_t,Y_t} p(X_t)·d2·d4 / ln 2`. Training matrices are summed
/// over representatives whose first column is all symbol 0; the other
/// `4^M − 1` rotations give identical terms.
fn rate_from_tables(train: &ReceiverTable, joint: &ReceiverTable, m: usize, n: usize, t_t: usize) -> f64 {
    let nx = 4usize.pow(m as u32);
    let reps = nx.pow(t_t as u32 - 1);
    let rows_per_rx = 4usize.pow(t_t as u32);
    let outcomes = rows_per_rx.pow(n as u32);
    let per_rep: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut cols = vec![0usize];
            cols.extend(digits(r, m * (t_t - 1)).chunks(m).map(|c| {
                c.iter().enumerate().fold(0, |acc, (t, &s)| acc | (s << (2 * t)))
            }));
            let mut acc = 0.0;
            for code in 0..outcomes {
                let rows: Vec<Vec<usize>> = (0..n)
                    .map(|k| digits((code / rows_per_rx.pow(k as u32)) % rows_per_rx, t_t))
                    .collect();
                let laws = conditional_laws(train, joint, &cols, &rows, m);
                let d2 = laws.log_train.iter().sum::<f64>().exp();
                if d2 > 0.0 {
                    acc += d2 * outcome_information(&laws, m, n);
                }
            }
            acc
        })
        .collect();
    let total: f64 = per_rep.iter().sum();
    let p_rep = 1.0 / reps as f64;
    (p_rep * total / (m as f64 * std::f64::consts::LN_2)).max(0.0)
}

/// Effective rate with training length `t_t`.
pub fn reff_exact(t_t: usize, sys: &SmallSystem) -> Result<Estimate> {
    ExactModel::new(sys, t_t)?.reff(t_t)
}

/// Best training length over `1..T`, ties toward less training. Returns the
/// bound (with `beta_t_opt = T_t,opt/M`) and the rate for every `T_t`.
pub fn c_bound_exact(sys: &SmallSystem) -> Result<(BoundResult<f64>, Vec<Estimate>)> {
    sys.validate()?;
    let t = sys.t_total;
    let model = ExactModel::new(sys, t - 1)?;
    let rates: Vec<Estimate> = (1..t).map(|tt| model.reff(tt)).collect::<Result<_>>()?;
    let mut best = (1usize, f64::NEG_INFINITY);
    for (i, r) in rates.iter().enumerate() {
        let tt = i + 1;
        let obj = (t - tt) as f64 / t as f64 * r.value;
        if obj > best.1 {
            best = (tt, obj);
        }
    }
    let m = sys.m as f64;
    let params = SystemParams {
        alpha: sys.n as f64 / m,
        beta: t as f64 / m,
        rho: sys.rho,
        tx: TxType::OneBit,
    };
    Ok((
        BoundResult {
            beta_t_opt: best.0 as f64 / m,
            c_bound: best.1,
            method: Method::Exact,
            params,
        },
        rates,
    ))
}
