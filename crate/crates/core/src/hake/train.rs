use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::Graph;

use super::loss::{accumulate, Accumulator};
use super::{init_weights, sample_negative, HakeParams, NegativePair, TripleWeights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Step size for the triple weights; `None` reuses `learning_rate`.
    pub weight_learning_rate: Option<f64>,
    pub negatives_per_positive: usize,
    pub seed: u64,
    /// Literature-weighted training when true.
    pub weighted: bool,
    pub lambda: f64,
    pub gamma: f64,
    /// Worker count; 1 keeps training bit-reproducible for a seed.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 64,
            epochs: 200,
            batch_size: 128,
            learning_rate: 0.05,
            weight_learning_rate: None,
            negatives_per_positive: 4,
            seed: 0,
            weighted: false,
            lambda: 0.5,
            gamma: 200.0,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.negatives_per_positive == 0 {
            return bad("negatives_per_positive must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if let Some(wlr) = self.weight_learning_rate {
            if !(wlr >= 0.0 && wlr.is_finite()) {
                return bad("weight_learning_rate must be nonnegative");
            }
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be nonnegative");
        }
        if !self.gamma.is_finite() {
            return bad("gamma must be finite");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: HakeParams,
    pub weights: TripleWeights,
    /// Pair-weighted mean batch loss per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Mini-batch SGD on the weighted loss over every triple of `g`.
///
/// Triple order is reshuffled each epoch and every positive is paired with
/// `negatives_per_positive` filtered corruptions. In weighted mode the triple
/// weights start from the rescaled literature priors, receive gradient steps,
/// and are projected back to `[0, 1]` after each batch.
pub fn train(g: &Graph, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if g.is_empty() {
        return Err(Error::Validation("cannot train on an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = HakeParams::random(g, cfg.dim, cfg.lambda, cfg.gamma, &mut rng)?;
    let mut weights = if cfg.weighted {
        init_weights(g)?
    } else {
        TripleWeights::uniform(g.num_triples())
    };
    let weight_lr = cfg.weight_learning_rate.unwrap_or(cfg.learning_rate);
    let triples = g.triples();
    let mut order: Vec<usize> = (0..triples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut pair_count = 0usize;
        for (bi, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let acc = if cfg.workers == 1 {
                let mut pairs = Vec::with_capacity(chunk.len() * cfg.negatives_per_positive);
                for &ti in chunk {
                    for _ in 0..cfg.negatives_per_positive {
                        pairs.push(NegativePair {
                            positive: ti,
                            negative: sample_negative(g, &triples[ti], &mut rng)?,
                        });
                    }
                }
                accumulate(&params, &weights, triples, &pairs, true)?
            } else {
                parallel_accumulate(g, &params, &weights, chunk, cfg, epoch, bi)?
            };
            let n_pairs = chunk.len() * cfg.negatives_per_positive;
            if !(acc.sum_w > 0.0) {
                log::warn!("epoch {epoch} batch {bi}: all positive weights are zero, batch skipped");
                continue;
            }
            let batch = acc.finish()?;
            if !batch.loss.is_finite() {
                return Err(Error::Numeric(format!("non-finite loss at epoch {epoch}, batch {bi}")));
            }
            params.apply(&batch.grads, cfg.learning_rate);
            if cfg.weighted && weight_lr > 0.0 {
                for (&k, &gk) in &batch.grads.weights {
                    weights.w[k] = (weights.w[k] - weight_lr * gk).clamp(0.0, 1.0);
                }
            }
            loss_sum += batch.loss * n_pairs as f64;
            pair_count += n_pairs;
        }
        let mean = if pair_count > 0 { loss_sum / pair_count as f64 } else { f64::NAN };
        log::debug!("epoch {epoch}: mean loss {mean:.6}");
        epoch_losses.push(mean);
    }
    Ok(TrainOutcome {
        params,
        weights,
        epoch_losses,
    })
}

// Shards a batch across workers, each with its own stream derived from (seed, epoch, batch, shard).
fn parallel_accumulate(
    g: &Graph,
    params: &HakeParams,
    weights: &TripleWeights,
    chunk: &[usize],
    cfg: &TrainConfig,
    epoch: usize,
    batch: usize,
) -> Result<Accumulator> {
    let shard_len = chunk.len().div_ceil(cfg.workers);
    let triples = g.triples();
    let parts: Vec<Result<Accumulator>> = chunk
        .par_chunks(shard_len)
        .enumerate()
        .map(|(si, shard)| {
            let stream = cfg
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(((epoch as u64) << 32) ^ ((batch as u64) << 8) ^ si as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let mut pairs = Vec::with_capacity(shard.len() * cfg.negatives_per_positive);
            for &ti in shard {
                for _ in 0..cfg.negatives_per_positive {
                    pairs.push(NegativePair {
                        positive: ti,
                        negative: sample_negative(g, &triples[ti], &mut rng)?,
                    });
                }
            }
            accumulate(params, weights, triples, &pairs, true)
        })
        .collect();
    let mut total = Accumulator::default();
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}
