//! Enrichment-based patient stratification and survival statistics.

mod cox;
mod enrichment;
mod km;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::DrugSignature;

pub use cox::{cox_fit, cox_univariable, CoxFit, MAX_ABS_BETA};
pub use enrichment::{average_ranks, nes, ssgsea, tertile_stratify, StratifiedCohort};
pub use km::km_curve;

/// Genes x samples expression values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    genes: Vec<String>,
    samples: Vec<String>,
    gene_index: HashMap<String, usize>,
    /// Row-major: `values[g * n_samples + s]`.
    values: Vec<f64>,
}

impl ExpressionMatrix {
    pub fn new(genes: Vec<String>, samples: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != genes.len() * samples.len() {
            return Err(Error::Validation(format!(
                "expected {} values for {} genes x {} samples, got {}",
                genes.len() * samples.len(),
                genes.len(),
                samples.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite expression value {v}")));
        }
        let mut gene_index = HashMap::with_capacity(genes.len());
        for (i, g) in genes.iter().enumerate() {
            if gene_index.insert(g.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate gene '{g}'")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for s in &samples {
            if !seen.insert(s) {
                return Err(Error::Validation(format!("duplicate sample '{s}'")));
            }
        }
        Ok(Self {
            genes,
            samples,
            gene_index,
            values,
        })
    }

    pub fn genes(&self) -> &[String] {
        &self.genes
    }

    pub fn samples(&self) -> &[String] {
        &self.samples
    }

    pub fn gene_index(&self, gene: &str) -> Option<usize> {
        self.gene_index.get(gene).copied()
    }

    pub fn value(&self, gene: usize, sample: usize) -> f64 {
        self.values[gene * self.samples.len() + sample]
    }

    /// Expression of every gene in one sample.
    pub fn column(&self, sample: usize) -> Vec<f64> {
        let n = self.samples.len();
        (0..self.genes.len()).map(|g| self.values[g * n + sample]).collect()
    }

    pub fn set_column(&mut self, sample: usize, column: &[f64]) {
        let n = self.samples.len();
        for (g, v) in column.iter().enumerate() {
            self.values[g * n + sample] = *v;
        }
    }

    /// Expression TSV: header row of sample ids (first cell is the gene column
    /// label), then one row per gene.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Data(format!("{}: empty expression file", path.display())))?;
        let samples: Vec<String> = header.split('\t').skip(1).map(|s| s.trim().to_string()).collect();
        let mut genes = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            let err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg,
            };
            if cols.len() != samples.len() + 1 {
                return Err(err(format!("expected {} columns, found {}", samples.len() + 1, cols.len())));
            }
            genes.push(cols[0].trim().to_string());
            for c in &cols[1..] {
                values.push(c.trim().parse::<f64>().map_err(|_| err(format!("'{c}' is not a number")))?);
            }
        }
        Self::new(genes, samples, values).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }

    pub fn write_tsv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "gene")?;
        for s in &self.samples {
            write!(w, "\t{s}")?;
        }
        writeln!(w)?;
        for (g, gene) in self.genes.iter().enumerate() {
            write!(w, "{gene}")?;
            for s in 0..self.samples.len() {
                write!(w, "\t{}", self.value(g, s))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    /// Days; strictly positive.
    pub time: f64,
    /// Death observed.
    pub event: bool,
}

/// Survival records keyed by sample id.
pub type SurvivalRecords = BTreeMap<String, SurvivalRecord>;

/// Survival TSV: `sample, time_days, event(0/1)`; a non-numeric first row is
/// treated as a header.
pub fn load_survival(path: impl AsRef<Path>) -> Result<SurvivalRecords> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = SurvivalRecords::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        if cols.len() != 3 {
            return Err(err(format!("expected 3 columns, found {}", cols.len())));
        }
        let Ok(time) = cols[1].parse::<f64>() else {
            if i == 0 {
                continue;
            }
            return Err(err(format!("time '{}' is not a number", cols[1])));
        };
        if !(time > 0.0) || !time.is_finite() {
            return Err(err(format!("survival time must be positive, got {time}")));
        }
        let event = match cols[2] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(err(format!("event must be 0 or 1, got '{other}'"))),
        };
        if out.insert(cols[0].to_string(), SurvivalRecord { time, event }).is_some() {
            return Err(err(format!("duplicate sample '{}'", cols[0])));
        }
    }
    Ok(out)
}

pub fn write_survival<W: std::io::Write>(records: &SurvivalRecords, mut w: W) -> std::io::Result<()> {
    writeln!(w, "sample\ttime_days\tevent")?;
    for (s, r) in records {
        writeln!(w, "{s}\t{}\t{}", r.time, u8::from(r.event))?;
    }
    Ok(())
}

pub(crate) fn record<'a>(surv: &'a SurvivalRecords, sample: &str) -> Result<&'a SurvivalRecord> {
    surv.get(sample)
        .ok_or_else(|| Error::Data(format!("no survival record for sample '{sample}'")))
}

/// Thresholds for running a survival fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurvivalConfig {
    /// ssGSEA weight exponent.
    pub tau: f64,
    pub min_group_size: usize,
    pub min_events: usize,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        Self {
            tau: 0.25,
            min_group_size: 10,
            min_events: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eligibility {
    pub eligible: bool,
    pub high: usize,
    pub low: usize,
    pub events: usize,
}

/// Group sizes and observed events in `high ∪ low` against the configured minimums.
pub fn eligibility(c: &StratifiedCohort, surv: &SurvivalRecords, cfg: &SurvivalConfig) -> Result<Eligibility> {
    let mut events = 0;
    for s in c.high.iter().chain(&c.low) {
        if record(surv, s)?.event {
            events += 1;
        }
    }
    Ok(Eligibility {
        eligible: c.high.len() >= cfg.min_group_size && c.low.len() >= cfg.min_group_size && events >= cfg.min_events,
        high: c.high.len(),
        low: c.low.len(),
        events,
    })
}

/// At least 10 samples per group and at least 3 observed events overall.
pub fn check_eligibility(c: &StratifiedCohort, surv: &SurvivalRecords) -> Result<bool> {
    eligibility(c, surv, &SurvivalConfig::default()).map(|e| e.eligible)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HazardOutcome {
    Fitted { fit: CoxFit },
    Ineligible { reason: String },
}

impl HazardOutcome {
    pub fn fit(&self) -> Option<&CoxFit> {
        match self {
            HazardOutcome::Fitted { fit } => Some(fit),
            HazardOutcome::Ineligible { .. } => None,
        }
    }
}

/// Every intermediate of [`hazard_for_pair`], in matrix sample order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardReport {
    pub samples: Vec<String>,
    pub es_up: Option<Vec<f64>>,
    pub es_down: Option<Vec<f64>>,
    /// `es_up - es_down` (a missing side counts as zero).
    pub es: Vec<f64>,
    pub nes: Vec<f64>,
    pub cohort: StratifiedCohort,
    pub eligibility: Eligibility,
    pub outcome: HazardOutcome,
}

fn present<'a>(m: &ExpressionMatrix, genes: impl Iterator<Item = &'a str>) -> Vec<String> {
    genes.filter(|g| m.gene_index(g).is_some()).map(String::from).collect()
}

/// Signature enrichment, tertile split, eligibility gate and Cox fit for one
/// drug signature against one cohort.
pub fn hazard_for_pair(
    m: &ExpressionMatrix,
    signature: &DrugSignature,
    surv: &SurvivalRecords,
    cfg: &SurvivalConfig,
) -> Result<HazardReport> {
    let up = present(m, signature.up_genes());
    let down = present(m, signature.down_genes());
    if up.is_empty() && down.is_empty() {
        return Err(Error::Validation(format!(
            "signature of '{}' shares no genes with the expression matrix",
            signature.drug
        )));
    }
    let es_up = if up.is_empty() {
        log::info!("{}: no up-regulated genes in matrix, using down set only", signature.drug);
        None
    } else {
        Some(ssgsea(m, &up, cfg.tau)?)
    };
    let es_down = if down.is_empty() {
        log::info!("{}: no down-regulated genes in matrix, using up set only", signature.drug);
        None
    } else {
        Some(ssgsea(m, &down, cfg.tau)?)
    };
    let es: Vec<f64> = (0..m.samples().len())
        .map(|s| es_up.as_ref().map_or(0.0, |v| v[s]) - es_down.as_ref().map_or(0.0, |v| v[s]))
        .collect();
    let nes_values = nes(&es)?;
    let cohort = tertile_stratify(m.samples(), &nes_values)?;
    let elig = eligibility(&cohort, surv, cfg)?;
    let outcome = if elig.eligible {
        HazardOutcome::Fitted {
            fit: cox_univariable(&cohort, surv)?,
        }
    } else {
        HazardOutcome::Ineligible {
            reason: format!(
                "groups of {} and {} samples with {} events (need {} per group and {} events)",
                elig.high, elig.low, elig.events, cfg.min_group_size, cfg.min_events
            ),
        }
    };
    Ok(HazardReport {
        samples: m.samples().to_vec(),
        es_up,
        es_down,
        es,
        nes: nes_values,
        cohort,
        eligibility: elig,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::GeneScore;

    fn cohort(high: &[&str], low: &[&str]) -> StratifiedCohort {
        StratifiedCohort {
            high: high.iter().map(|s| s.to_string()).collect(),
            low: low.iter().map(|s| s.to_string()).collect(),
            excluded: Vec::new(),
        }
    }

    fn surv_for(n: usize, events: usize) -> SurvivalRecords {
        (0..n)
            .map(|i| {
                (
                    format!("s{i:02}"),
                    SurvivalRecord {
                        time: 10.0 + i as f64,
                        event: i < events,
                    },
                )
            })
            .collect()
    }

    fn ids(range: std::ops::Range<usize>) -> Vec<String> {
        range.map(|i| format!("s{i:02}")).collect()
    }

    #[test]
    fn eligibility_thresholds() {
        let surv = surv_for(30, 30);
        let nine = StratifiedCohort {
            high: ids(0..9),
            low: ids(9..18),
            excluded: vec![],
        };
        assert!(!check_eligibility(&nine, &surv).unwrap());
        let surv3 = surv_for(30, 3);
        let ten = StratifiedCohort {
            high: ids(0..10),
            low: ids(10..20),
            excluded: vec![],
        };
        assert!(check_eligibility(&ten, &surv3).unwrap());
        let surv2 = surv_for(30, 2);
        let twelve = StratifiedCohort {
            high: ids(0..12),
            low: ids(12..24),
            excluded: vec![],
        };
        assert!(!check_eligibility(&twelve, &surv2).unwrap());
    }

    #[test]
    fn missing_survival_record_is_data_error() {
        let c = cohort(&["a"], &["zzz"]);
        let mut surv = SurvivalRecords::new();
        surv.insert("a".into(), SurvivalRecord { time: 1.0, event: true });
        assert!(matches!(check_eligibility(&c, &surv), Err(Error::Data(_))));
    }

    fn small_matrix(n_samples: usize) -> ExpressionMatrix {
        let genes: Vec<String> = (0..6).map(|g| format!("G{g}")).collect();
        let samples: Vec<String> = (0..n_samples).map(|s| format!("s{s:02}")).collect();
        let mut values = Vec::new();
        for g in 0..6 {
            for s in 0..n_samples {
                values.push(((g * 7 + s * 3) % 11) as f64 + 0.1 * g as f64);
            }
        }
        ExpressionMatrix::new(genes, samples, values).unwrap()
    }

    fn sig(up: &[&str], down: &[&str]) -> DrugSignature {
        let gs = |g: &&str, s: f64| GeneScore {
            gene: g.to_string(),
            score: s,
        };
        DrugSignature {
            drug: "X".into(),
            up: up.iter().map(|g| gs(g, 1.0)).collect(),
            down: down.iter().map(|g| gs(g, -1.0)).collect(),
        }
    }

    #[test]
    fn small_cohort_is_ineligible() {
        let m = small_matrix(12);
        let surv = surv_for(12, 12);
        let rep = hazard_for_pair(&m, &sig(&["G0", "G1"], &["G4"]), &surv, &SurvivalConfig::default()).unwrap();
        assert!(matches!(rep.outcome, HazardOutcome::Ineligible { .. }));
        assert_eq!(rep.cohort.high.len(), 4);
    }

    #[test]
    fn empty_down_set_uses_up_enrichment() {
        let m = small_matrix(12);
        let surv = surv_for(12, 12);
        let rep = hazard_for_pair(&m, &sig(&["G0", "G1"], &[]), &surv, &SurvivalConfig::default()).unwrap();
        assert!(rep.es_down.is_none());
        assert_eq!(rep.es, rep.es_up.unwrap());
    }

    #[test]
    fn disjoint_signature_is_rejected() {
        let m = small_matrix(5);
        let surv = surv_for(5, 5);
        let err = hazard_for_pair(&m, &sig(&["NOPE"], &[]), &surv, &SurvivalConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn matrix_rejects_duplicates_and_nan() {
        let two = vec!["a".to_string(), "a".to_string()];
        assert!(ExpressionMatrix::new(two.clone(), vec!["s".into()], vec![1.0, 2.0]).is_err());
        assert!(ExpressionMatrix::new(vec!["g".into()], two, vec![1.0, 2.0]).is_err());
        assert!(ExpressionMatrix::new(vec!["g".into()], vec!["s".into()], vec![f64::NAN]).is_err());
    }
}
