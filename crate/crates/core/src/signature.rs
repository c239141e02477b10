//! Drug-specific up/down gene sets from dose- and potency-weighted
//! perturbation records.
//!
//! Each record gets two weights:
//!
//! ```text
//! w_ic50 = min(1 / IC50_uM, 1)            (default weight when IC50 is missing)
//! w_dose = exp(-k * ln(1 + dose_uM))
//! ```
//!
//! Per gene, both weights are averaged with up-records counted positive and
//! down-records negative. The two averages are rescaled by the drug-wide
//! maximum magnitude and blended as `alpha * dose + (1 - alpha) * ic50`; the
//! sign of the blend decides the direction.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" => Ok(Direction::Up),
            "down" => Ok(Direction::Down),
            other => Err(Error::Validation(format!("unknown direction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoseUnit {
    #[serde(rename = "nM")]
    Nanomolar,
    #[serde(rename = "uM")]
    Micromolar,
    #[serde(rename = "mM")]
    Millimolar,
}

impl FromStr for DoseUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nM" | "nm" => Ok(DoseUnit::Nanomolar),
            "uM" | "um" | "µM" | "μM" => Ok(DoseUnit::Micromolar),
            "mM" | "mm" => Ok(DoseUnit::Millimolar),
            other => Err(Error::Validation(format!("unknown dose unit '{other}'"))),
        }
    }
}

impl fmt::Display for DoseUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DoseUnit::Nanomolar => "nM",
            DoseUnit::Micromolar => "uM",
            DoseUnit::Millimolar => "mM",
        })
    }
}

pub fn convert_dose(value: f64, unit: DoseUnit) -> f64 {
    match unit {
        DoseUnit::Nanomolar => value / 1000.0,
        DoseUnit::Micromolar => value,
        DoseUnit::Millimolar => value * 1000.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub drug: String,
    pub signature_id: String,
    pub gene: String,
    pub direction: Direction,
    pub dose_value: f64,
    pub dose_unit: DoseUnit,
    pub ic50_um: Option<f64>,
}

impl PerturbationRecord {
    pub fn dose_um(&self) -> f64 {
        convert_dose(self.dose_value, self.dose_unit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignatureConfig {
    /// Dose decay.
    pub k: f64,
    /// Share of the dose score in the final blend.
    pub alpha: f64,
    pub top_n: usize,
    pub default_ic50_weight: f64,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        Self {
            k: 0.5,
            alpha: 0.2,
            top_n: 200,
            default_ic50_weight: 0.5,
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("k must be nonnegative, got {}", self.k)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.top_n == 0 {
            return Err(Error::Config("top_n must be at least 1".into()));
        }
        if !(self.default_ic50_weight > 0.0 && self.default_ic50_weight <= 1.0) {
            return Err(Error::Config("default_ic50_weight must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

pub fn ic50_weight(ic50_um: Option<f64>, cfg: &SignatureConfig) -> Result<f64> {
    match ic50_um {
        None => Ok(cfg.default_ic50_weight),
        Some(v) if v > 0.0 && v.is_finite() => Ok((1.0 / v).min(1.0)),
        Some(v) => Err(Error::Validation(format!("IC50 must be positive, got {v}"))),
    }
}

pub fn dose_weight(dose_um: f64, k: f64) -> Result<f64> {
    if !(dose_um >= 0.0) || !dose_um.is_finite() {
        return Err(Error::Validation(format!("dose must be nonnegative, got {dose_um}")));
    }
    Ok((-k * dose_um.ln_1p()).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneAggregate {
    pub gene: String,
    pub up_records: usize,
    pub down_records: usize,
    pub ic50_score: f64,
    pub dose_score: f64,
}

// Sorting before summing makes the result independent of record order.
fn signed_mean(mut up: Vec<f64>, mut down: Vec<f64>) -> f64 {
    up.sort_by(f64::total_cmp);
    down.sort_by(f64::total_cmp);
    let n = (up.len() + down.len()) as f64;
    (up.iter().sum::<f64>() - down.iter().sum::<f64>()) / n
}

/// Signed mean IC50 and dose weights for one gene's records.
pub fn aggregate_gene(records: &[PerturbationRecord], cfg: &SignatureConfig) -> Result<GeneAggregate> {
    let first = records
        .first()
        .ok_or_else(|| Error::Validation("no records to aggregate".into()))?;
    let mut ic50 = (Vec::new(), Vec::new());
    let mut dose = (Vec::new(), Vec::new());
    for r in records {
        if r.gene != first.gene || r.drug != first.drug {
            return Err(Error::Validation(format!(
                "records mix ({}, {}) with ({}, {})",
                first.drug, first.gene, r.drug, r.gene
            )));
        }
        let wi = ic50_weight(r.ic50_um, cfg)?;
        let wd = dose_weight(r.dose_um(), cfg.k)?;
        match r.direction {
            Direction::Up => {
                ic50.0.push(wi);
                dose.0.push(wd);
            }
            Direction::Down => {
                ic50.1.push(wi);
                dose.1.push(wd);
            }
        }
    }
    Ok(GeneAggregate {
        gene: first.gene.clone(),
        up_records: ic50.0.len(),
        down_records: ic50.1.len(),
        ic50_score: signed_mean(ic50.0, ic50.1),
        dose_score: signed_mean(dose.0, dose.1),
    })
}

/// Drug-wide normalization denominators: the largest |ic50_score| and |dose_score|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub max_ic50: f64,
    pub max_dose: f64,
}

impl Normalizer {
    pub fn from_aggregates(aggs: &[GeneAggregate]) -> Self {
        let max_abs = |f: fn(&GeneAggregate) -> f64| aggs.iter().map(|a| f(a).abs()).fold(0.0, f64::max);
        Self {
            max_ic50: max_abs(|a| a.ic50_score),
            max_dose: max_abs(|a| a.dose_score),
        }
    }
}

fn normalize(x: f64, max: f64) -> f64 {
    if max == 0.0 {
        x
    } else {
        x / max
    }
}

pub fn final_score(agg: &GeneAggregate, norm: &Normalizer, cfg: &SignatureConfig) -> f64 {
    cfg.alpha * normalize(agg.dose_score, norm.max_dose) + (1.0 - cfg.alpha) * normalize(agg.ic50_score, norm.max_ic50)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneScore {
    pub gene: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrugSignature {
    pub drug: String,
    pub up: Vec<GeneScore>,
    pub down: Vec<GeneScore>,
}

impl DrugSignature {
    pub fn up_genes(&self) -> impl Iterator<Item = &str> {
        self.up.iter().map(|g| g.gene.as_str())
    }

    pub fn down_genes(&self) -> impl Iterator<Item = &str> {
        self.down.iter().map(|g| g.gene.as_str())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }
}

fn by_magnitude(a: &GeneScore, b: &GeneScore) -> std::cmp::Ordering {
    b.score.abs().total_cmp(&a.score.abs()).then_with(|| a.gene.cmp(&b.gene))
}

/// Groups one drug's records by gene and keeps the `top_n` strongest genes
/// in each direction. Genes whose final score is exactly zero are dropped.
pub fn build_signature(records: &[PerturbationRecord], cfg: &SignatureConfig) -> Result<DrugSignature> {
    cfg.validate()?;
    let drug = records
        .first()
        .map(|r| r.drug.clone())
        .ok_or_else(|| Error::Validation("no perturbation records".into()))?;
    let mut by_gene: BTreeMap<&str, Vec<PerturbationRecord>> = BTreeMap::new();
    for r in records {
        if r.drug != drug {
            return Err(Error::Validation(format!("records for '{}' mixed with '{drug}'", r.drug)));
        }
        by_gene.entry(r.gene.as_str()).or_default().push(r.clone());
    }
    let aggs = by_gene
        .values()
        .map(|rs| aggregate_gene(rs, cfg))
        .collect::<Result<Vec<_>>>()?;
    let norm = Normalizer::from_aggregates(&aggs);
    let mut up = Vec::new();
    let mut down = Vec::new();
    for a in &aggs {
        let score = final_score(a, &norm, cfg);
        let gs = GeneScore {
            gene: a.gene.clone(),
            score,
        };
        if score > 0.0 {
            up.push(gs);
        } else if score < 0.0 {
            down.push(gs);
        }
    }
    up.sort_by(by_magnitude);
    down.sort_by(by_magnitude);
    up.truncate(cfg.top_n);
    down.truncate(cfg.top_n);
    Ok(DrugSignature { drug, up, down })
}

/// Reads the perturbation TSV (header: drug, signature_id, gene, direction,
/// dose_value, dose_unit, ic50_um; an empty ic50_um means absent).
pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<PerturbationRecord>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Data(format!("{}: missing column '{name}'", path.display())))
    };
    let idx = [
        col("drug")?,
        col("signature_id")?,
        col("gene")?,
        col("direction")?,
        col("dose_value")?,
        col("dose_unit")?,
        col("ic50_um")?,
    ];
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let field = |j: usize| row.get(idx[j]).unwrap_or("").trim();
        let dose_value: f64 = field(4)
            .parse()
            .map_err(|_| err(format!("dose_value '{}' is not a number", field(4))))?;
        if !(dose_value >= 0.0) {
            return Err(err(format!("negative dose {dose_value}")));
        }
        let ic50_um = match field(6) {
            "" | "NA" | "nan" => None,
            s => {
                let v: f64 = s.parse().map_err(|_| err(format!("ic50_um '{s}' is not a number")))?;
                if !(v > 0.0) {
                    return Err(err(format!("IC50 must be positive, got {v}")));
                }
                Some(v)
            }
        };
        out.push(PerturbationRecord {
            drug: field(0).to_string(),
            signature_id: field(1).to_string(),
            gene: field(2).to_string(),
            direction: field(3).parse().map_err(|e: Error| err(e.to_string()))?,
            dose_value,
            dose_unit: field(5).parse().map_err(|e: Error| err(e.to_string()))?,
            ic50_um,
        });
    }
    Ok(out)
}
