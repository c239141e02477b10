use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{canonical, pca, roc_auc, spearman, Correlation, Pca, ScoreDirection};
use crate::error::{Error, Result};
use crate::evidence::{best_trial, Ablation};

use super::context::{resolve_disease, BenchmarkRow, Context};
use super::run::{csv_writer, generate_candidates, opt, process_pair, rescore, write_json_file, Candidate, CandidateSource, RunOutput};

/// Named candidate-set configurations, each a set of sources.
pub const RECALL_CONFIGS: [(&str, &[CandidateSource]); 5] = [
    ("external", &[CandidateSource::External]),
    ("KGE", &[CandidateSource::Kge]),
    ("KGwE", &[CandidateSource::Kgwe]),
    ("KGE+KGwE", &[CandidateSource::Kge, CandidateSource::Kgwe]),
    (
        "union",
        &[CandidateSource::Kge, CandidateSource::Kgwe, CandidateSource::External],
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallRow {
    pub config: String,
    pub recovered: usize,
    pub gold: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    /// Sources that recovered the indication, joined by `&`.
    pub region: String,
    pub count: usize,
    pub fraction_of_gold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub rows: Vec<RecallRow>,
    pub overlap: Vec<OverlapRow>,
    /// Benchmark diseases that could not be mapped.
    pub skipped: Vec<String>,
}

/// Candidate drug names per source for one disease.
fn names_by_source(ctx: &Context, candidates: &[Candidate]) -> BTreeMap<CandidateSource, BTreeSet<String>> {
    let mut out: BTreeMap<CandidateSource, BTreeSet<String>> = BTreeMap::new();
    for c in candidates {
        for &s in &c.sources {
            let e = out.entry(s).or_default();
            e.insert(canonical(&c.drug));
            e.insert(canonical(&ctx.entity_name(&c.drug)));
        }
    }
    out
}

/// The seven non-empty source combinations, singletons first.
pub fn overlap_regions() -> Vec<BTreeSet<CandidateSource>> {
    let mut out: Vec<BTreeSet<CandidateSource>> = (1u8..8)
        .map(|mask| {
            CandidateSource::ALL
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &s)| s)
                .collect()
        })
        .collect();
    out.sort_by_key(|r| (r.len(), r.iter().copied().collect::<Vec<_>>()));
    out
}

pub fn region_label(r: &BTreeSet<CandidateSource>) -> String {
    r.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("&")
}

/// Recall of benchmark indications, pooled over diseases, for each
/// configuration, plus the partition of recovered indications by the exact
/// set of sources that found them.
pub fn recall_from_hits(gold: &[(String, String)], hits: &BTreeMap<(String, String), BTreeSet<CandidateSource>>) -> (Vec<RecallRow>, Vec<OverlapRow>) {
    let n = gold.len();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let rows = RECALL_CONFIGS
        .iter()
        .map(|(name, sources)| {
            let recovered = gold
                .iter()
                .filter(|g| hits.get(*g).is_some_and(|h| sources.iter().any(|s| h.contains(s))))
                .count();
            RecallRow {
                config: name.to_string(),
                recovered,
                gold: n,
                recall: frac(recovered),
            }
        })
        .collect();
    let overlap = overlap_regions()
        .into_iter()
        .map(|region| {
            let count = gold.iter().filter(|g| hits.get(*g) == Some(&region)).count();
            OverlapRow {
                region: region_label(&region),
                count,
                fraction_of_gold: frac(count),
            }
        })
        .collect();
    (rows, overlap)
}

pub fn evaluate_recall(ctx: &Context, bench: &[BenchmarkRow]) -> Result<RecallReport> {
    let mut by_disease: BTreeMap<String, Vec<&BenchmarkRow>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for row in bench {
        let resolved = resolve_disease(&ctx.graph, &row.disease_id).or_else(|_| resolve_disease(&ctx.graph, &row.disease_name));
        match resolved {
            Ok(d) => by_disease.entry(d).or_default().push(row),
            Err(e) => {
                let msg = format!("benchmark disease {} ({}) skipped: {e}", row.disease_id, row.disease_name);
                if !skipped.contains(&msg) {
                    log::warn!("{msg}");
                    skipped.push(msg);
                }
            }
        }
    }
    let mut gold = Vec::new();
    let mut hits = BTreeMap::new();
    for (disease, rows) in by_disease {
        let names = names_by_source(ctx, &generate_candidates(ctx, &disease)?);
        let drugs: BTreeSet<String> = rows.iter().map(|r| canonical(&r.drug_name)).collect();
        for drug in drugs {
            let found: BTreeSet<CandidateSource> = names
                .iter()
                .filter(|(_, set)| set.contains(&drug))
                .map(|(&s, _)| s)
                .collect();
            let key = (disease.clone(), drug);
            if !found.is_empty() {
                hits.insert(key.clone(), found);
            }
            gold.push(key);
        }
    }
    let (rows, overlap) = recall_from_hits(&gold, &hits);
    Ok(RecallReport { rows, overlap, skipped })
}

pub fn write_recall(r: &RecallReport, dir: &Path) -> Result<()> {
    let mut w = csv_writer(&dir.join("recall.csv"))?;
    w.write_record(["config", "recovered", "gold", "recall"])?;
    for row in &r.rows {
        w.write_record([row.config.clone(), row.recovered.to_string(), row.gold.to_string(), row.recall.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("recall.csv"), e))?;
    let mut w = csv_writer(&dir.join("overlap.csv"))?;
    w.write_record(["region", "count", "fraction_of_gold"])?;
    for row in &r.overlap {
        w.write_record([row.region.clone(), row.count.to_string(), row.fraction_of_gold.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("overlap.csv"), e))
}

/// One eligible pair on the score-versus-HR plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub disease: String,
    pub drug: String,
    pub score: f64,
    pub hr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRow {
    /// `pooled` or a disease id.
    pub scope: String,
    pub n: usize,
    /// `None` when fewer than three eligible pairs.
    pub correlation: Option<Correlation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalAlignment {
    pub points: Vec<ScatterPoint>,
    pub pooled: AlignmentRow,
    pub per_disease: Vec<AlignmentRow>,
}

fn alignment_row(scope: String, pts: &[&ScatterPoint]) -> Result<AlignmentRow> {
    let n = pts.len();
    if n < 3 {
        return Ok(AlignmentRow {
            scope,
            n,
            correlation: None,
        });
    }
    let s: Vec<f64> = pts.iter().map(|p| p.score).collect();
    let h: Vec<f64> = pts.iter().map(|p| p.hr).collect();
    let correlation = match spearman(&s, &h) {
        Ok(c) => Some(c),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AlignmentRow { scope, n, correlation })
}

/// Spearman correlation between score and HR over eligible pairs, pooled and
/// per disease.
pub fn alignment_from_points(points: Vec<ScatterPoint>, diseases: &[String]) -> Result<SurvivalAlignment> {
    let all: Vec<&ScatterPoint> = points.iter().collect();
    let pooled = alignment_row("pooled".into(), &all)?;
    let per_disease = diseases
        .iter()
        .map(|d| {
            let pts: Vec<&ScatterPoint> = points.iter().filter(|p| &p.disease == d).collect();
            alignment_row(d.clone(), &pts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalAlignment {
        points,
        pooled,
        per_disease,
    })
}

fn points_for(out: &RunOutput, scores: &[u32]) -> Vec<ScatterPoint> {
    out.pairs
        .iter()
        .zip(scores)
        .filter(|(p, _)| p.result.eligible)
        .filter_map(|(p, &s)| {
            p.result.hr.map(|hr| ScatterPoint {
                disease: p.result.disease.clone(),
                drug: p.result.drug.clone(),
                score: f64::from(s),
                hr,
            })
        })
        .collect()
}

pub fn evaluate_survival_alignment(out: &RunOutput) -> Result<SurvivalAlignment> {
    let scores: Vec<u32> = out.pairs.iter().map(|p| p.result.score).collect();
    alignment_from_points(points_for(out, &scores), &out.diseases)
}

fn corr_cells(c: &Option<Correlation>) -> [String; 2] {
    match c {
        Some(c) => [c.r.to_string(), c.p.to_string()],
        None => [String::new(), String::new()],
    }
}

pub fn write_survival(a: &SurvivalAlignment, dir: &Path) -> Result<()> {
    let mut w = csv_writer(&dir.join("survival_scatter.csv"))?;
    w.write_record(["disease", "drug", "score", "hr"])?;
    for p in &a.points {
        w.write_record([p.disease.clone(), p.drug.clone(), p.score.to_string(), p.hr.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("survival_scatter.csv"), e))?;
    let mut w = csv_writer(&dir.join("survival_alignment.csv"))?;
    w.write_record(["scope", "n", "spearman_r", "p", "status"])?;
    for row in std::iter::once(&a.pooled).chain(&a.per_disease) {
        let [r, p] = corr_cells(&row.correlation);
        let status = if row.correlation.is_some() { "ok" } else { "insufficient" };
        w.write_record([row.scope.clone(), row.n.to_string(), r, p, status.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("survival_alignment.csv"), e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationScore {
    pub disease: String,
    pub drug: String,
    pub ablation: Ablation,
    pub score: u32,
    /// Score minus the unablated score.
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationSummary {
    pub ablation: Ablation,
    pub survival: AlignmentRow,
    /// Spearman between score and the best trial's result-band midpoint.
    pub trials: AlignmentRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub scores: Vec<AblationScore>,
    pub summary: Vec<AblationSummary>,
}

/// Re-scores every pair under each ablation setting.
pub fn evaluate_ablation(out: &RunOutput) -> Result<AblationReport> {
    let base: Vec<u32> = out
        .pairs
        .iter()
        .map(|p| rescore(&p.profile, Ablation::None).map(|v| v.overall_confidence_score))
        .collect::<Result<_>>()?;
    let mut scores = Vec::new();
    let mut summary = Vec::new();
    for a in Ablation::ALL {
        let s: Vec<u32> = out
            .pairs
            .iter()
            .map(|p| rescore(&p.profile, a).map(|v| v.overall_confidence_score))
            .collect::<Result<_>>()?;
        for ((p, &si), &bi) in out.pairs.iter().zip(&s).zip(&base) {
            scores.push(AblationScore {
                disease: p.result.disease.clone(),
                drug: p.result.drug.clone(),
                ablation: a,
                score: si,
                delta: i64::from(si) - i64::from(bi),
            });
        }
        let pts = points_for(out, &s);
        let survival = alignment_row("survival".into(), &pts.iter().collect::<Vec<_>>())?;
        let mut trial_pts = Vec::new();
        for (p, &si) in out.pairs.iter().zip(&s) {
            if let Some((_, status)) = best_trial(&p.profile.trials)? {
                trial_pts.push(ScatterPoint {
                    disease: p.result.disease.clone(),
                    drug: p.result.drug.clone(),
                    score: f64::from(si),
                    hr: status.midpoint(),
                });
            }
        }
        let trials = alignment_row("trials".into(), &trial_pts.iter().collect::<Vec<_>>())?;
        summary.push(AblationSummary {
            ablation: a,
            survival,
            trials,
        });
    }
    Ok(AblationReport { scores, summary })
}

pub fn write_ablation(r: &AblationReport, dir: &Path) -> Result<()> {
    let mut w = csv_writer(&dir.join("ablation.csv"))?;
    w.write_record(["disease", "drug", "ablation", "score", "delta"])?;
    for s in &r.scores {
        w.write_record([
            s.disease.clone(),
            s.drug.clone(),
            s.ablation.as_str().to_string(),
            s.score.to_string(),
            s.delta.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("ablation.csv"), e))?;
    let mut w = csv_writer(&dir.join("ablation_spearman.csv"))?;
    w.write_record([
        "ablation",
        "survival_n",
        "survival_r",
        "survival_p",
        "trials_n",
        "trials_r",
        "trials_p",
    ])?;
    for s in &r.summary {
        let [sr, sp] = corr_cells(&s.survival.correlation);
        let [tr, tp] = corr_cells(&s.trials.correlation);
        w.write_record([
            s.ablation.as_str().to_string(),
            s.survival.n.to_string(),
            sr,
            sp,
            s.trials.n.to_string(),
            tr,
            tp,
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("ablation_spearman.csv"), e))
}

/// Scores of the drugs shared by every subtype and their PCA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtypeProfile {
    pub subtypes: Vec<String>,
    pub drugs: Vec<String>,
    /// `scores[i][j]`: drug `i` in subtype `j`.
    pub scores: Vec<Vec<f64>>,
    pub pca: Pca,
}

/// Restricts to drugs that are candidates in every subtype, scores each, and
/// projects the drug-by-subtype matrix onto two principal components.
pub fn subtype_profile(ctx: &Context) -> Result<SubtypeProfile> {
    if ctx.cfg.subtypes.len() < 2 {
        return Err(Error::Config("subtype profile needs at least two subtypes".into()));
    }
    let mut subtypes = Vec::new();
    for s in &ctx.cfg.subtypes {
        let d = resolve_disease(&ctx.graph, s)?;
        if subtypes.contains(&d) {
            return Err(Error::Config(format!("subtypes '{s}' maps to {d} twice")));
        }
        subtypes.push(d);
    }
    let mut per_subtype = Vec::new();
    for d in &subtypes {
        per_subtype.push(generate_candidates(ctx, d)?);
    }
    let mut shared: Option<BTreeSet<String>> = None;
    for cands in &per_subtype {
        let set: BTreeSet<String> = cands.iter().map(|c| c.drug.clone()).collect();
        shared = Some(match shared {
            None => set,
            Some(s) => s.intersection(&set).cloned().collect(),
        });
    }
    let drugs: Vec<String> = shared.unwrap_or_default().into_iter().collect();
    if drugs.is_empty() {
        return Err(Error::Data("no candidate drug is shared by every subtype".into()));
    }
    let mut scores = vec![vec![0.0; subtypes.len()]; drugs.len()];
    for (j, (d, cands)) in subtypes.iter().zip(&per_subtype).enumerate() {
        for (i, drug) in drugs.iter().enumerate() {
            let c = cands.iter().find(|c| &c.drug == drug).expect("shared drug is a candidate");
            scores[i][j] = f64::from(process_pair(ctx, d, c)?.verdict.overall_confidence_score);
        }
    }
    let n_components = 2.min(subtypes.len());
    let pca = pca(&scores, n_components)?;
    Ok(SubtypeProfile {
        subtypes,
        drugs,
        scores,
        pca,
    })
}

pub fn write_subtype(p: &SubtypeProfile, ctx: &Context, dir: &Path) -> Result<()> {
    let mut w = csv_writer(&dir.join("subtype_pca.csv"))?;
    let mut header = vec!["drug".to_string(), "drug_name".to_string()];
    header.extend(p.subtypes.iter().map(|s| format!("score_{s}")));
    header.extend((1..=p.pca.projections.first().map_or(0, Vec::len)).map(|k| format!("pc{k}")));
    w.write_record(&header)?;
    for (i, drug) in p.drugs.iter().enumerate() {
        let mut row = vec![drug.clone(), ctx.entity_name(drug)];
        row.extend(p.scores[i].iter().map(f64::to_string));
        row.extend(p.pca.projections[i].iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(dir.join("subtype_pca.csv"), e))?;
    write_json_file(&dir.join("pca.json"), p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseAuc {
    pub disease: String,
    pub drug: String,
    pub n: usize,
    pub responders: usize,
    /// AUC with higher signature enrichment predicting response.
    pub auc: f64,
}

/// ROC-AUC of per-sample NES against responder labels, for every pair whose
/// cohort carries labels.
pub fn evaluate_response(ctx: &Context, out: &RunOutput) -> Result<Vec<ResponseAuc>> {
    let mut rows = Vec::new();
    for p in &out.pairs {
        let Some(labels) = ctx.cohorts.get(&p.result.disease).and_then(|c| c.response.as_ref()) else {
            continue;
        };
        let Some(h) = &p.hazard else { continue };
        let (mut scores, mut ys) = (Vec::new(), Vec::new());
        for (s, &nes) in h.report.samples.iter().zip(&h.report.nes) {
            if let Some(&y) = labels.get(s) {
                scores.push(nes);
                ys.push(y);
            }
        }
        let responders = ys.iter().filter(|&&y| y).count();
        if responders == 0 || responders == ys.len() {
            continue;
        }
        rows.push(ResponseAuc {
            disease: p.result.disease.clone(),
            drug: p.result.drug.clone(),
            n: ys.len(),
            responders,
            auc: roc_auc(&scores, &ys, ScoreDirection::HigherIsPositive)?,
        });
    }
    Ok(rows)
}

pub fn write_response(rows: &[ResponseAuc], dir: &Path) -> Result<()> {
    let mut w = csv_writer(&dir.join("response_auc.csv"))?;
    w.write_record(["disease", "drug", "n", "responders", "auc"])?;
    for r in rows {
        w.write_record([r.disease.clone(), r.drug.clone(), r.n.to_string(), r.responders.to_string(), opt(Some(r.auc))])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("response_auc.csv"), e))
}
