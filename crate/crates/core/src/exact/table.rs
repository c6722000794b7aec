use rayon::prelude::*;

use super::channel::ChannelSamples;
use super::{output_symbol, qpsk_symbol};
use crate::numerics::{log_q_function, q_function};

/// Entries whose linear-domain accumulation falls below this are
/// recomputed with log-sum-exp over the samples.
const LOG_FALLBACK_BELOW: f64 = 1.5e-154;
const MIN_CHUNK: usize = 1024;
const MAX_CHUNKS: usize = 32;

/// Per-receiver law `P(o_1..o_L | c_1..c_L) = E_h ∏_p g(√(ρ/M)·hᵀc_p, o_p)`
/// for every column sequence and output sequence, stored as natural logs.
///
/// Rotating one transmitter's whole row by `j` is absorbed by the channel,
/// so only sequences whose first column is all symbol 0 are stored. Entry
/// layout: `o_1·S^(L−1) + Σ_{p≥2} (c_p·4 + o_p)·S^(L−p)`, `S = 4^(M+1)`.
#[derive(Debug, Clone)]
pub(crate) struct ReceiverTable {
    m: usize,
    len: usize,
    log_p: Vec<f64>,
}

fn stride(m: usize) -> usize {
    4usize.pow(m as u32 + 1)
}

fn table_size(m: usize, len: usize) -> usize {
    4 * stride(m).pow(len as u32 - 1)
}

/// `g(z, o)` for every column value and output, σ₀² = 1.
fn likelihood_grid(row: &[f64], m: usize, rho: f64, logs: bool) -> Vec<f64> {
    let cols = 4usize.pow(m as u32);
    let amp = (rho / m as f64).sqrt() * std::f64::consts::SQRT_2;
    let mut out = vec![0.0; cols * 4];
    for c in 0..cols {
        let (mut zr, mut zi) = (0.0, 0.0);
        for t in 0..m {
            let x = qpsk_symbol((c >> (2 * t)) & 3);
            let (hr, hi) = (row[2 * t], row[2 * t + 1]);
            zr += hr * x.re - hi * x.im;
            zi += hr * x.im + hi * x.re;
        }
        let (a, b) = (amp * zr, amp * zi);
        for o in 0..4 {
            let y = output_symbol(o);
            let (ar, ai) = (-a * y.re, -b * y.im);
            out[c * 4 + o] = if logs {
                log_q_function(ar) + log_q_function(ai)
            } else {
                q_function(ar) * q_function(ai)
            };
        }
    }
    out
}

impl ReceiverTable {
    pub fn build(samples: &ChannelSamples, rho: f64, len: usize) -> Self {
        assert!(len >= 1);
        let m = samples.m;
        let size = table_size(m, len);
        let k = samples.len();
        let chunk = k.div_ceil(MAX_CHUNKS).max(MIN_CHUNK);
        let starts: Vec<usize> = (0..k).step_by(chunk).collect();
        let partial: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|&s0| {
                let mut acc = vec![0.0; size];
                let mut cur = vec![0.0; size];
                for s in s0..(s0 + chunk).min(k) {
                    let g = likelihood_grid(samples.row(s), m, rho, false);
                    expand(&g, samples.weights[s], m, len, &mut cur);
                    for (a, c) in acc.iter_mut().zip(&cur) {
                        *a += c;
                    }
                }
                acc
            })
            .collect();
        let mut acc = vec![0.0; size];
        for p in &partial {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        let tiny: Vec<usize> = (0..size).filter(|&i| !(acc[i] >= LOG_FALLBACK_BELOW)).collect();
        let mut log_p: Vec<f64> = acc.iter().map(|v| v.ln()).collect();
        if !tiny.is_empty() {
            for (i, v) in tiny.iter().zip(log_domain(samples, rho, len, &tiny)) {
                log_p[*i] = v;
            }
        }
        Self { m, len, log_p }
    }

    /// `ln P(outs | cols)`; `cols[p]` packs the `M` symbol indices of
    /// column `p` in base 4 (transmitter 0 in the lowest digits).
    pub fn log_prob(&self, cols: &[usize], outs: &[usize]) -> f64 {
        debug_assert_eq!(cols.len(), self.len);
        debug_assert_eq!(outs.len(), self.len);
        self.log_p[self.index(cols, outs)]
    }

    fn index(&self, cols: &[usize], outs: &[usize]) -> usize {
        let s = stride(self.m);
        let mut idx = outs[0];
        for p in 1..self.len {
            let c = canonical_column(cols[p], cols[0], self.m);
            idx = idx * s + c * 4 + outs[p];
        }
        idx
    }

    /// The law of the first `len` columns (later columns set to symbol 0 and
    /// their outputs summed out).
    pub fn marginal(&self, len: usize) -> Self {
        assert!(len >= 1 && len <= self.len);
        if len == self.len {
            return self.clone();
        }
        let s = stride(self.m);
        let inner = s.pow((self.len - len) as u32);
        let size = table_size(self.m, len);
        let log_p = (0..size)
            .map(|i| {
                // columns beyond `len` are symbol 0: offsets are the output digits
                let base = i * inner;
                let mut terms = Vec::with_capacity(4usize.pow((self.len - len) as u32));
                collect_outputs(base, self.len - len, s, &self.log_p, &mut terms);
                log_sum_exp(&terms)
            })
            .collect();
        Self {
            m: self.m,
            len,
            log_p,
        }
    }

    /// Sample-weighted combination of tables built from disjoint batches.
    pub fn pooled(tables: &[Self], weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let first = &tables[0];
        let log_p = (0..first.log_p.len())
            .map(|i| {
                let terms: Vec<f64> = tables
                    .iter()
                    .zip(weights)
                    .map(|(t, w)| t.log_p[i] + (w / total).ln())
                    .collect();
                log_sum_exp(&terms)
            })
            .collect();
        Self {
            m: first.m,
            len: first.len,
            log_p,
        }
    }
}

fn collect_outputs(base: usize, depth: usize, s: usize, src: &[f64], out: &mut Vec<f64>) {
    if depth == 0 {
        out.push(src[base]);
        return;
    }
    let unit = s.pow(depth as u32 - 1);
    for o in 0..4 {
        collect_outputs(base + o * unit, depth - 1, s, src, out);
    }
}

/// Column `c` after rotating each transmitter so that its symbol in
/// `first` becomes 0.
fn canonical_column(c: usize, first: usize, m: usize) -> usize {
    let mut out = 0;
    for t in 0..m {
        let s = (c >> (2 * t)) & 3;
        let f = (first >> (2 * t)) & 3;
        out |= ((s + 4 - f) & 3) << (2 * t);
    }
    out
}

/// Fills `cur` with `w·∏_p g(c_p, o_p)` over all stored sequences, by
/// in-place expansion one column at a time.
fn expand(g: &[f64], w: f64, m: usize, len: usize, cur: &mut [f64]) {
    let s = stride(m);
    for o in 0..4 {
        cur[o] = w * g[o];
    }
    let mut size = 4;
    for _ in 1..len {
        for i in (0..size).rev() {
            let v = cur[i];
            let dst = &mut cur[i * s..(i + 1) * s];
            for (d, gk) in dst.iter_mut().zip(g) {
                *d = v * gk;
            }
        }
        size *= s;
    }
}

fn decode(mut idx: usize, m: usize, len: usize) -> (Vec<usize>, Vec<usize>) {
    let s = stride(m);
    let mut cols = vec![0; len];
    let mut outs = vec![0; len];
    for p in (1..len).rev() {
        let d = idx % s;
        idx /= s;
        cols[p] = d / 4;
        outs[p] = d % 4;
    }
    outs[0] = idx;
    (cols, outs)
}

fn log_domain(samples: &ChannelSamples, rho: f64, len: usize, entries: &[usize]) -> Vec<f64> {
    let m = samples.m;
    let decoded: Vec<(Vec<usize>, Vec<usize>)> = entries.iter().map(|&i| decode(i, m, len)).collect();
    let mut max = vec![f64::NEG_INFINITY; entries.len()];
    let mut sum = vec![0.0; entries.len()];
    for s in 0..samples.len() {
        let lg = likelihood_grid(samples.row(s), m, rho, true);
        let lw = samples.weights[s].ln();
        for (e, (cols, outs)) in decoded.iter().enumerate() {
            let mut v = lw;
            for p in 0..len {
                v += lg[cols[p] * 4 + outs[p]];
            }
            if v > max[e] {
                sum[e] = sum[e] * (max[e] - v).exp() + 1.0;
                max[e] = v;
            } else {
                sum[e] += (v - max[e]).exp();
            }
        }
    }
    max.iter().zip(&sum).map(|(m, s)| m + s.ln()).collect()
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
