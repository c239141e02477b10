use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{Entity, Graph};

use super::{HakeParams, TripleWeights};

const FORMAT: &str = "hake-checkpoint";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    dim: usize,
    lambda: f64,
    gamma: f64,
    weighted: bool,
    entities: Vec<Entity>,
    relations: Vec<String>,
    ent_mod: Vec<Vec<f64>>,
    ent_phase: Vec<Vec<f64>>,
    rel_mod: Vec<Vec<f64>>,
    rel_phase: Vec<Vec<f64>>,
    weights: Vec<WeightRow>,
}

#[derive(Serialize, Deserialize)]
struct WeightRow {
    head: String,
    relation: String,
    tail: String,
    w: f64,
    w0: f64,
}

/// A trained model as stored on disk.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: HakeParams,
    pub weighted: bool,
    /// `(head id, relation, tail id, w, w0)` for every training triple.
    pub weights: Vec<(String, String, String, f64, f64)>,
}

fn rows(table: &[f64], dim: usize) -> Vec<Vec<f64>> {
    table.chunks(dim).map(<[f64]>::to_vec).collect()
}

fn flatten(rows: Vec<Vec<f64>>, dim: usize, what: &str) -> Result<Vec<f64>> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Data(format!("checkpoint {what} row length differs from dim {dim}")));
    }
    Ok(rows.into_iter().flatten().collect())
}

impl Model {
    pub fn new(params: HakeParams, weights: &TripleWeights, g: &Graph, weighted: bool) -> Self {
        let weights = g
            .triples()
            .iter()
            .zip(weights.w.iter().zip(&weights.w0))
            .map(|(t, (&w, &w0))| {
                (
                    g.entity(t.head).id.clone(),
                    g.relation_name(t.relation).to_string(),
                    g.entity(t.tail).id.clone(),
                    w,
                    w0,
                )
            })
            .collect();
        Self {
            params,
            weighted,
            weights,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let p = &self.params;
        let ck = Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            dim: p.dim,
            lambda: p.lambda,
            gamma: p.gamma,
            weighted: self.weighted,
            entities: p.entities().to_vec(),
            relations: p.relations().to_vec(),
            ent_mod: rows(&p.ent_mod, p.dim),
            ent_phase: rows(&p.ent_phase, p.dim),
            rel_mod: rows(&p.rel_mod, p.dim),
            rel_phase: rows(&p.rel_phase, p.dim),
            weights: self
                .weights
                .iter()
                .map(|(h, r, t, w, w0)| WeightRow {
                    head: h.clone(),
                    relation: r.clone(),
                    tail: t.clone(),
                    w: *w,
                    w0: *w0,
                })
                .collect(),
        };
        fs::write(path, serde_json::to_string(&ck)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::Config(format!(
                "checkpoint {} does not exist; run `train` first",
                path.display()
            )));
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text)?;
        if ck.format != FORMAT {
            return Err(Error::Data(format!("{}: not a model checkpoint", path.display())));
        }
        if ck.version != VERSION {
            return Err(Error::Data(format!(
                "{}: unsupported checkpoint version {}",
                path.display(),
                ck.version
            )));
        }
        if ck.ent_mod.len() != ck.entities.len()
            || ck.ent_phase.len() != ck.entities.len()
            || ck.rel_mod.len() != ck.relations.len()
            || ck.rel_phase.len() != ck.relations.len()
        {
            return Err(Error::Data(format!("{}: embedding table sizes do not match", path.display())));
        }
        let mut params = HakeParams::zeros(ck.entities, ck.relations, ck.dim, ck.lambda, ck.gamma)?;
        params.ent_mod = flatten(ck.ent_mod, ck.dim, "entity modulus")?;
        params.ent_phase = flatten(ck.ent_phase, ck.dim, "entity phase")?;
        params.rel_mod = flatten(ck.rel_mod, ck.dim, "relation modulus")?;
        params.rel_phase = flatten(ck.rel_phase, ck.dim, "relation phase")?;
        Ok(Self {
            params,
            weighted: ck.weighted,
            weights: ck
                .weights
                .into_iter()
                .map(|r| (r.head, r.relation, r.tail, r.w, r.w0))
                .collect(),
        })
    }
}
