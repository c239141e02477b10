//! Hierarchy-aware knowledge-graph embedding.
//!
//! Every entity and relation has a modulus vector and a phase vector. A triple
//! `(h, r, t)` scores
//!
//! ```text
//! s(h, r, t) = -|| h_mod * r_mod - t_mod ||_2  -  lambda * || sin((h_phase + r_phase - t_phase) / 2) ||_1
//! ```
//!
//! which is never positive and is zero only when both terms vanish.

mod checkpoint;
mod loss;
mod sampling;
mod train;

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::kg::{Entity, EntityKind, Graph};

pub use loss::{init_weights, literature_prior, loss_and_grad, loss_batch, BatchLoss, NegativePair, TripleWeights};
pub use sampling::{sample_negative, sample_negative_slot, Slot, MAX_NEGATIVE_RETRIES};
pub use checkpoint::Model;
pub use train::{train, TrainConfig, TrainOutcome};

/// Embedding tables and scoring hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HakeParams {
    pub dim: usize,
    /// Weight of the phase term.
    pub lambda: f64,
    /// Margin added to scores inside the loss; never part of [`HakeParams::score`].
    pub gamma: f64,
    entities: Vec<Entity>,
    entity_index: HashMap<String, usize>,
    relations: Vec<String>,
    relation_index: HashMap<String, usize>,
    /// Row-major `entities x dim`.
    pub ent_mod: Vec<f64>,
    pub ent_phase: Vec<f64>,
    /// Row-major `relations x dim`.
    pub rel_mod: Vec<f64>,
    pub rel_phase: Vec<f64>,
}

impl HakeParams {
    pub fn zeros(entities: Vec<Entity>, relations: Vec<String>, dim: usize, lambda: f64, gamma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("embedding dimension must be positive".into()));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Validation(format!("lambda must be a finite nonnegative number, got {lambda}")));
        }
        if !gamma.is_finite() {
            return Err(Error::Validation(format!("gamma must be finite, got {gamma}")));
        }
        let entity_index = entities.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let relation_index = relations.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let ne = entities.len();
        let nr = relations.len();
        Ok(Self {
            dim,
            lambda,
            gamma,
            entities,
            entity_index,
            relations,
            relation_index,
            ent_mod: vec![0.0; ne * dim],
            ent_phase: vec![0.0; ne * dim],
            rel_mod: vec![0.0; nr * dim],
            rel_phase: vec![0.0; nr * dim],
        })
    }

    /// Moduli uniform in (-0.5, 0.5), phases uniform in (-pi, pi).
    pub fn random<R: Rng>(g: &Graph, dim: usize, lambda: f64, gamma: f64, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(g.entities().to_vec(), g.relations().to_vec(), dim, lambda, gamma)?;
        let pi = std::f64::consts::PI;
        for i in 0..p.entities.len() {
            for k in 0..dim {
                p.ent_mod[i * dim + k] = rng.gen_range(-0.5..0.5);
            }
            for k in 0..dim {
                p.ent_phase[i * dim + k] = rng.gen_range(-pi..pi);
            }
        }
        for r in 0..p.relations.len() {
            for k in 0..dim {
                p.rel_mod[r * dim + k] = rng.gen_range(-0.5..0.5);
            }
            for k in 0..dim {
                p.rel_phase[r * dim + k] = rng.gen_range(-pi..pi);
            }
        }
        Ok(p)
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_index(&self, id: &str) -> Option<usize> {
        self.entity_index.get(id).copied()
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    fn require_entity(&self, id: &str) -> Result<usize> {
        self.entity_index(id)
            .ok_or_else(|| Error::NotFound(format!("no embedding for entity '{id}'")))
    }

    fn require_relation(&self, name: &str) -> Result<usize> {
        self.relation_index(name)
            .ok_or_else(|| Error::NotFound(format!("no embedding for relation '{name}'")))
    }

    fn check(&self, h: usize, r: usize, t: usize) -> Result<()> {
        let ne = self.entities.len();
        if h >= ne || t >= ne {
            return Err(Error::NotFound(format!("entity index out of range ({h}, {t}) of {ne}")));
        }
        if r >= self.relations.len() {
            return Err(Error::NotFound(format!("relation index {r} out of range")));
        }
        Ok(())
    }

    /// Score of `(h, r, t)` by embedding index.
    pub fn score(&self, h: usize, r: usize, t: usize) -> Result<f64> {
        self.check(h, r, t)?;
        Ok(self.score_unchecked(h, r, t))
    }

    /// Score of `(h, r, t)` by entity id and relation label.
    pub fn score_named(&self, head: &str, relation: &str, tail: &str) -> Result<f64> {
        let h = self.require_entity(head)?;
        let r = self.require_relation(relation)?;
        let t = self.require_entity(tail)?;
        Ok(self.score_unchecked(h, r, t))
    }

    pub(crate) fn score_unchecked(&self, h: usize, r: usize, t: usize) -> f64 {
        let d = self.dim;
        let (hm, rm, tm) = (&self.ent_mod[h * d..][..d], &self.rel_mod[r * d..][..d], &self.ent_mod[t * d..][..d]);
        let (hp, rp, tp) = (&self.ent_phase[h * d..][..d], &self.rel_phase[r * d..][..d], &self.ent_phase[t * d..][..d]);
        let mut sq = 0.0;
        let mut l1 = 0.0;
        for k in 0..d {
            let a = hm[k] * rm[k] - tm[k];
            sq += a * a;
            l1 += ((hp[k] + rp[k] - tp[k]) / 2.0).sin().abs();
        }
        -sq.sqrt() - self.lambda * l1
    }

    /// Adds `coef * d s(h,r,t) / d theta` into `grads`.
    ///
    /// Where a norm is not differentiable (zero modulus residual, or a phase
    /// residual with `sin = 0`) the zero subgradient is used.
    pub(crate) fn add_score_grad(&self, h: usize, r: usize, t: usize, coef: f64, grads: &mut Gradients) {
        let d = self.dim;
        let mut resid = vec![0.0; d];
        let mut sq = 0.0;
        for (k, slot) in resid.iter_mut().enumerate() {
            *slot = self.ent_mod[h * d + k] * self.rel_mod[r * d + k] - self.ent_mod[t * d + k];
            sq += *slot * *slot;
        }
        let norm = sq.sqrt();
        {
            let mut hm = vec![0.0; d];
            let mut rm = vec![0.0; d];
            let mut tm = vec![0.0; d];
            if norm > 0.0 {
                for k in 0..d {
                    let u = resid[k] / norm;
                    hm[k] = -coef * u * self.rel_mod[r * d + k];
                    rm[k] = -coef * u * self.ent_mod[h * d + k];
                    tm[k] = coef * u;
                }
            }
            add_row(&mut grads.ent_mod, h, &hm);
            add_row(&mut grads.rel_mod, r, &rm);
            add_row(&mut grads.ent_mod, t, &tm);
        }
        let mut dphi = vec![0.0; d];
        for (k, slot) in dphi.iter_mut().enumerate() {
            let half = (self.ent_phase[h * d + k] + self.rel_phase[r * d + k] - self.ent_phase[t * d + k]) / 2.0;
            let s = half.sin();
            let sign = if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            };
            *slot = -coef * self.lambda * sign * half.cos() / 2.0;
        }
        add_row(&mut grads.ent_phase, h, &dphi);
        add_row(&mut grads.rel_phase, r, &dphi);
        let neg: Vec<f64> = dphi.iter().map(|x| -x).collect();
        add_row(&mut grads.ent_phase, t, &neg);
    }

    pub(crate) fn apply(&mut self, grads: &Gradients, lr: f64) {
        let d = self.dim;
        let step = |table: &mut [f64], rows: &BTreeMap<usize, Vec<f64>>| {
            for (&i, row) in rows {
                for (x, g) in table[i * d..][..d].iter_mut().zip(row) {
                    *x -= lr * g;
                }
            }
        };
        step(&mut self.ent_mod, &grads.ent_mod);
        step(&mut self.ent_phase, &grads.ent_phase);
        step(&mut self.rel_mod, &grads.rel_mod);
        step(&mut self.rel_phase, &grads.rel_phase);
    }
}

fn add_row(rows: &mut BTreeMap<usize, Vec<f64>>, idx: usize, delta: &[f64]) {
    let row = rows.entry(idx).or_insert_with(|| vec![0.0; delta.len()]);
    for (x, d) in row.iter_mut().zip(delta) {
        *x += d;
    }
}

/// Sparse gradient: only rows touched by a batch are stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradients {
    pub ent_mod: BTreeMap<usize, Vec<f64>>,
    pub ent_phase: BTreeMap<usize, Vec<f64>>,
    pub rel_mod: BTreeMap<usize, Vec<f64>>,
    pub rel_phase: BTreeMap<usize, Vec<f64>>,
    /// Keyed by triple index.
    pub weights: BTreeMap<usize, f64>,
}

impl Gradients {
    pub(crate) fn scale(&mut self, c: f64) {
        for rows in [&mut self.ent_mod, &mut self.ent_phase, &mut self.rel_mod, &mut self.rel_phase] {
            for row in rows.values_mut() {
                row.iter_mut().for_each(|x| *x *= c);
            }
        }
        self.weights.values_mut().for_each(|x| *x *= c);
    }

    pub(crate) fn merge(&mut self, other: Gradients) {
        for (dst, src) in [
            (&mut self.ent_mod, other.ent_mod),
            (&mut self.ent_phase, other.ent_phase),
            (&mut self.rel_mod, other.rel_mod),
            (&mut self.rel_phase, other.rel_phase),
        ] {
            for (i, row) in src {
                add_row(dst, i, &row);
            }
        }
        for (k, v) in other.weights {
            *self.weights.entry(k).or_insert(0.0) += v;
        }
    }

    /// Gradient entry for one coordinate, zero when the row was not touched.
    pub fn ent_mod_at(&self, entity: usize, k: usize) -> f64 {
        self.ent_mod.get(&entity).map_or(0.0, |r| r[k])
    }

    pub fn ent_phase_at(&self, entity: usize, k: usize) -> f64 {
        self.ent_phase.get(&entity).map_or(0.0, |r| r[k])
    }

    pub fn rel_mod_at(&self, relation: usize, k: usize) -> f64 {
        self.rel_mod.get(&relation).map_or(0.0, |r| r[k])
    }

    pub fn rel_phase_at(&self, relation: usize, k: usize) -> f64 {
        self.rel_phase.get(&relation).map_or(0.0, |r| r[k])
    }

    pub fn weight_at(&self, triple: usize) -> f64 {
        self.weights.get(&triple).copied().unwrap_or(0.0)
    }
}

/// Scores `(disease, relation, d)` for every drug entity and returns the
/// top `k` by descending score, ties broken by id.
pub fn rank_drugs(p: &HakeParams, disease: &str, relation: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    let h = p.require_entity(disease)?;
    let r = p.require_relation(relation)?;
    let mut scored: Vec<(String, f64)> = p
        .entities
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EntityKind::Drug)
        .map(|(i, e)| (e.id.clone(), p.score_unchecked(h, r, i)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

/// 1-based rank of `drug` among all drugs scored against `(disease,
/// relation, ·)`, skipping other drugs already linked to `disease` by
/// `relation` in `known`. Ties count against the target.
pub fn filtered_rank(p: &HakeParams, known: &Graph, disease: &str, relation: &str, drug: &str) -> Result<(usize, usize)> {
    let h = p.require_entity(disease)?;
    let r = p.require_relation(relation)?;
    let t = p.require_entity(drug)?;
    let known_pair = |d: &str| -> bool {
        match (known.entity_index(disease), known.relation_index(relation), known.entity_index(d)) {
            (Some(kh), Some(kr), Some(kt)) => known.contains(kh, kr, kt),
            _ => false,
        }
    };
    let target = p.score_unchecked(h, r, t);
    let mut rank = 1;
    let mut candidates = 1;
    for (i, e) in p.entities.iter().enumerate() {
        if i == t || e.kind != EntityKind::Drug || known_pair(&e.id) {
            continue;
        }
        candidates += 1;
        if p.score_unchecked(h, r, i) >= target {
            rank += 1;
        }
    }
    Ok((rank, candidates))
}
