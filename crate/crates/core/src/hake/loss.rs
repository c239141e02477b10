use crate::error::{Error, Result};
use crate::kg::{Graph, Triple};

use super::{Gradients, HakeParams};

/// Per-triple confidence weights, indexed like [`Graph::triples`].
#[derive(Debug, Clone, PartialEq)]
pub struct TripleWeights {
    /// Learnable weight, kept in `[0, 1]`.
    pub w: Vec<f64>,
    /// Literature prior `1 + ln(1 + article_count)`.
    pub w0: Vec<f64>,
}

impl TripleWeights {
    /// All weights (and priors) exactly 1.
    pub fn uniform(n: usize) -> Self {
        Self {
            w: vec![1.0; n],
            w0: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// `1 + ln(1 + n)` for an article count `n`.
pub fn literature_prior(article_count: f64) -> f64 {
    1.0 + article_count.ln_1p()
}

/// Literature priors for every triple, rescaled by their maximum so the
/// best-supported triples start at weight 1.
pub fn init_weights(g: &Graph) -> Result<TripleWeights> {
    if g.is_empty() {
        return Err(Error::Validation("cannot weight an empty graph".into()));
    }
    let w0: Vec<f64> = g
        .triples()
        .iter()
        .map(|t| literature_prior(t.article_count as f64))
        .collect();
    let max = w0.iter().copied().fold(f64::MIN, f64::max);
    let w = w0.iter().map(|x| x / max).collect();
    Ok(TripleWeights { w, w0 })
}

/// A corrupted triple paired with the graph triple it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativePair {
    /// Index of the positive triple in the graph's triple list.
    pub positive: usize,
    pub negative: Triple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchLoss {
    pub loss: f64,
    pub grads: Gradients,
}

// -ln(sigmoid(-x)) = ln(1 + e^x)
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Unnormalized batch sums, so shards can be combined before dividing by the total weight.
#[derive(Debug, Default)]
pub(crate) struct Accumulator {
    pub sum_wl: f64,
    pub sum_w: f64,
    /// `sum_j w_j * d l_j / d theta`
    pub grads: Gradients,
    /// Per positive triple: (sum of pair losses, number of pairs).
    pub per_positive: std::collections::BTreeMap<usize, (f64, usize)>,
}

impl Accumulator {
    pub(crate) fn merge(&mut self, other: Accumulator) {
        self.sum_wl += other.sum_wl;
        self.sum_w += other.sum_w;
        self.grads.merge(other.grads);
        for (k, (l, n)) in other.per_positive {
            let e = self.per_positive.entry(k).or_insert((0.0, 0));
            e.0 += l;
            e.1 += n;
        }
    }

    /// Normalizes into the batch loss and its gradient.
    pub(crate) fn finish(mut self) -> Result<BatchLoss> {
        if !(self.sum_w > 0.0) {
            return Err(Error::Degenerate("sum of positive-triple weights in batch is zero".into()));
        }
        let loss = self.sum_wl / self.sum_w;
        self.grads.scale(1.0 / self.sum_w);
        for (k, (sum_l, n)) in self.per_positive {
            self.grads.weights.insert(k, (sum_l - n as f64 * loss) / self.sum_w);
        }
        Ok(BatchLoss {
            loss,
            grads: self.grads,
        })
    }
}

pub(crate) fn accumulate(
    p: &HakeParams,
    weights: &TripleWeights,
    triples: &[Triple],
    pairs: &[NegativePair],
    with_grads: bool,
) -> Result<Accumulator> {
    let mut acc = Accumulator::default();
    for pair in pairs {
        let pos = triples
            .get(pair.positive)
            .ok_or_else(|| Error::NotFound(format!("positive triple {}", pair.positive)))?;
        let w = *weights
            .w
            .get(pair.positive)
            .ok_or_else(|| Error::NotFound(format!("weight for triple {}", pair.positive)))?;
        let neg = &pair.negative;
        let s_pos = p.score(pos.head, pos.relation, pos.tail)?;
        let s_neg = p.score(neg.head, neg.relation, neg.tail)?;
        let x_pos = p.gamma + s_pos;
        let x_neg = p.gamma + s_neg;
        let l = softplus(-x_pos) + softplus(x_neg);
        if !l.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite loss for triple {} (s+ = {s_pos}, s- = {s_neg})",
                pair.positive
            )));
        }
        acc.sum_wl += w * l;
        acc.sum_w += w;
        let e = acc.per_positive.entry(pair.positive).or_insert((0.0, 0));
        e.0 += l;
        e.1 += 1;
        if with_grads && w != 0.0 {
            p.add_score_grad(pos.head, pos.relation, pos.tail, -w * sigmoid(-x_pos), &mut acc.grads);
            p.add_score_grad(neg.head, neg.relation, neg.tail, w * sigmoid(x_neg), &mut acc.grads);
        }
    }
    Ok(acc)
}

/// Weighted binary cross-entropy over (positive, negative) pairs:
///
/// ```text
/// L = (1 / sum w) * sum w * [ -ln sigmoid(gamma + s(pos)) - ln sigmoid(-(gamma + s(neg))) ]
/// ```
///
/// Each pair carries the weight of its positive triple.
pub fn loss_batch(p: &HakeParams, weights: &TripleWeights, triples: &[Triple], pairs: &[NegativePair]) -> Result<f64> {
    accumulate(p, weights, triples, pairs, false)?.finish().map(|b| b.loss)
}

/// [`loss_batch`] together with its gradient with respect to every embedding
/// coordinate and every positive triple's weight.
pub fn loss_and_grad(
    p: &HakeParams,
    weights: &TripleWeights,
    triples: &[Triple],
    pairs: &[NegativePair],
) -> Result<BatchLoss> {
    accumulate(p, weights, triples, pairs, true)?.finish()
}
