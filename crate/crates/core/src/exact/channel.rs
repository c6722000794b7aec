use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ChannelIntegration, SmallSystem, MC_BATCHES};
use crate::error::Result;
use crate::numerics::QuadratureRule;

/// Channel rows `h ∈ C^M` with integration weights. Component `m` of sample
/// `s` is `(h[2(sM+m)], h[2(sM+m)+1])` = (re, im); each real part has
/// variance ½.
#[derive(Debug, Clone)]
pub(crate) struct ChannelSamples {
    pub m: usize,
    pub h: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ChannelSamples {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.h[2 * self.m * s..2 * self.m * (s + 1)]
    }
}

/// Sample sets for one evaluation: a single weighted set for quadrature,
/// [`MC_BATCHES`] equally weighted batches for Monte Carlo. `stream`
/// separates independent consumers of the same seed.
pub(crate) fn channel_batches(sys: &SmallSystem, stream: u64) -> Result<Vec<ChannelSamples>> {
    match sys.integration {
        ChannelIntegration::TensorQuadrature { order } => Ok(vec![tensor(sys.m, order)?]),
        ChannelIntegration::MonteCarlo { samples, seed } => {
            let base = samples / MC_BATCHES;
            let extra = samples % MC_BATCHES;
            Ok((0..MC_BATCHES)
                .map(|b| {
                    let k = base + usize::from(b < extra);
                    monte_carlo(sys.m, k, seed, stream * MC_BATCHES as u64 + b as u64)
                })
                .collect())
        }
    }
}

fn tensor(m: usize, order: usize) -> Result<ChannelSamples> {
    let rule = QuadratureRule::<f64>::gauss_hermite(order)?;
    let dims = 2 * m;
    let total = order.pow(dims as u32);
    let mut h = Vec::with_capacity(total * dims);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..total {
        let mut lw = 0.0;
        for &i in &idx {
            h.push(rule.nodes()[i] * s);
            lw += rule.log_weights()[i];
        }
        weights.push(lw.exp());
        for d in idx.iter_mut() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    Ok(ChannelSamples { m, h, weights })
}

fn monte_carlo(m: usize, samples: usize, seed: u64, stream: u64) -> ChannelSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h: Vec<f64> = (0..samples * 2 * m)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v * s
        })
        .collect();
    ChannelSamples {
        m,
        h,
        weights: vec![1.0 / samples as f64; samples],
    }
}
