use rayon::prelude::*;

use super::model::{digits, pack_columns, ExactModel};
use super::table::ReceiverTable;
use super::{Estimate, SmallSystem};
use crate::error::Result;

/// `I(x_d; y_d | X_t, Y_t)/M` in bits from the joint law of all outputs:
/// `H(Y_t, y_d | X_t) − H(Y_t, y_d | X_t, x_d)`.
///
/// Uses its own channel samples (an independent Monte Carlo stream) and
/// enumerates every training matrix without symmetry reduction.
pub fn mi_direct(t_t: usize, sys: &SmallSystem) -> Result<Estimate> {
    sys.check_training(t_t)?;
    if sys.rho == 0.0 {
        // outputs are independent of the inputs
        return Ok(Estimate::from_batches(&[0.0]));
    }
    let model = ExactModel::with_stream(sys, t_t, 1)?;
    let values: Vec<f64> = model
        .batch_tables()
        .iter()
        .map(|t| direct_information(&t[t_t], sys.m, sys.n, t_t))
        .collect();
    Ok(Estimate::from_batches(&values))
}

fn direct_information(joint: &ReceiverTable, m: usize, n: usize, t_t: usize) -> f64 {
    let len = t_t + 1;
    let nx = 4usize.pow(m as u32);
    let n_train = nx.pow(t_t as u32);
    let seqs = 4usize.pow(len as u32);
    let joint_outs = seqs.pow(n as u32);
    let px = 1.0 / nx as f64;
    let per_train: Vec<f64> = (0..n_train)
        .into_par_iter()
        .map(|code| {
            let x_t = digits(code, m * t_t);
            let mut cols = pack_columns(&x_t, m, t_t);
            cols.push(0);
            // per data symbol: P(sequence) at one receiver
            let laws: Vec<Vec<f64>> = (0..nx)
                .map(|xd| {
                    *cols.last_mut().unwrap() = xd;
                    (0..seqs)
                        .map(|s| joint.log_prob(&cols, &digits(s, len)).exp())
                        .collect()
                })
                .collect();
            let mut h_cond = 0.0;
            let mut h_marg = 0.0;
            for o in 0..joint_outs {
                let mut mix = 0.0;
                for law in &laws {
                    let mut p = 1.0;
                    for k in 0..n {
                        p *= law[(o / seqs.pow(k as u32)) % seqs];
                    }
                    if p > 0.0 {
                        h_cond -= px * p * p.ln();
                    }
                    mix += px * p;
                }
                if mix > 0.0 {
                    h_marg -= mix * mix.ln();
                }
            }
            h_marg - h_cond
        })
        .collect();
    let total: f64 = per_train.iter().sum();
    (total / n_train as f64 / (m as f64 * std::f64::consts::LN_2)).max(0.0)
}
