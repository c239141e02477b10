use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{
    apply_ablation, categorize_stage, pathway_points, Ablation, ConfidenceLevel, EvidenceProfile, Providers,
    Reasoner, RuleReasoner, Verdict,
};
use crate::hake::rank_drugs;
use crate::survival::{hazard_for_pair, km_curve, HazardReport};

use super::context::{resolve_disease, Context};

/// Channel that proposed a candidate drug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CandidateSource {
    #[serde(rename = "KGE")]
    Kge,
    #[serde(rename = "KGwE")]
    Kgwe,
    #[serde(rename = "external")]
    External,
}

impl CandidateSource {
    pub const ALL: [CandidateSource; 3] = [CandidateSource::Kge, CandidateSource::Kgwe, CandidateSource::External];

    pub fn as_str(self) -> &'static str {
        match self {
            CandidateSource::Kge => "KGE",
            CandidateSource::Kgwe => "KGwE",
            CandidateSource::External => "external",
        }
    }
}

impl fmt::Display for CandidateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub drug: String,
    pub sources: BTreeSet<CandidateSource>,
}

/// Union of the three channel lists with source tags, ordered by drug id.
pub fn merge_candidates<S: AsRef<str>>(kge: &[S], kgwe: &[S], external: &[S]) -> Vec<Candidate> {
    let mut map: BTreeMap<String, BTreeSet<CandidateSource>> = BTreeMap::new();
    for (src, list) in [
        (CandidateSource::Kge, kge),
        (CandidateSource::Kgwe, kgwe),
        (CandidateSource::External, external),
    ] {
        for d in list {
            map.entry(d.as_ref().to_string()).or_default().insert(src);
        }
    }
    map.into_iter().map(|(drug, sources)| Candidate { drug, sources }).collect()
}

/// Top-k drugs from both checkpoints plus the external list for `disease`.
pub fn generate_candidates(ctx: &Context, disease: &str) -> Result<Vec<Candidate>> {
    let k = ctx.cfg.top_k_per_model;
    let rel = &ctx.cfg.indication_relation;
    let ids = |ranked: Vec<(String, f64)>| ranked.into_iter().map(|(d, _)| d).collect::<Vec<_>>();
    let kge = ids(rank_drugs(&ctx.kge.params, disease, rel, k)?);
    let kgwe = ids(rank_drugs(&ctx.kgwe.params, disease, rel, k)?);
    let external: Vec<&str> = ctx
        .external
        .iter()
        .filter(|(d, _)| d == disease)
        .map(|(_, x)| x.as_str())
        .collect();
    let kge: Vec<&str> = kge.iter().map(String::as_str).collect();
    let kgwe: Vec<&str> = kgwe.iter().map(String::as_str).collect();
    Ok(merge_candidates(&kge, &kgwe, &external))
}

/// One row of the ranked report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub disease: String,
    pub disease_name: String,
    pub drug: String,
    pub drug_name: String,
    pub sources: BTreeSet<CandidateSource>,
    pub score: u32,
    pub level: ConfidenceLevel,
    pub stage: String,
    pub fda_any_indication: bool,
    /// Points the pathway rule contributed.
    pub pathway_points: u32,
    pub hr: Option<f64>,
    pub hr_p: Option<f64>,
    /// Cohort passed the eligibility gate and the Cox model was fitted.
    pub eligible: bool,
    /// Dossier path relative to the output directory.
    pub dossier: String,
}

/// Hazard analysis attached to a pair, with Kaplan-Meier curves per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardSummary {
    pub report: HazardReport,
    pub km_high: Vec<(f64, f64)>,
    pub km_low: Vec<(f64, f64)>,
}

/// Everything computed for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRun {
    pub result: PairResult,
    pub verdict: Verdict,
    /// Profile before any ablation.
    pub profile: EvidenceProfile,
    pub hazard: Option<HazardSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFailure {
    pub disease: String,
    pub drug: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    /// Resolved disease ids in config order.
    pub diseases: Vec<String>,
    pub pairs: Vec<PairRun>,
    pub failures: Vec<PairFailure>,
    /// Pairs removed by the FDA filter or the stage allowlist.
    pub filtered_out: usize,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Scores a profile under an ablation with the rule reasoner.
pub fn rescore(profile: &EvidenceProfile, ablation: Ablation) -> Result<Verdict> {
    let mut p = profile.clone();
    apply_ablation(&mut p, ablation);
    RuleReasoner.assess(&p)
}

pub fn dossier_name(disease: &str, drug: &str) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect()
    };
    format!("dossiers/{}__{}.json", clean(disease), clean(drug))
}

fn hazard(ctx: &Context, disease: &str, drug: &str, warnings: &mut Vec<String>) -> Option<HazardSummary> {
    let cohort = ctx.cohorts.get(disease)?;
    let Some(sig) = ctx.signatures.get(drug) else {
        warnings.push("survival: no perturbation signature for this drug".into());
        return None;
    };
    let run = || -> Result<HazardSummary> {
        let report = hazard_for_pair(&cohort.expression, sig, &cohort.survival, &ctx.cfg.survival)?;
        let (km_high, km_low) = if report.cohort.high.is_empty() || report.cohort.low.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            (
                km_curve(&report.cohort.high, &cohort.survival)?,
                km_curve(&report.cohort.low, &cohort.survival)?,
            )
        };
        Ok(HazardSummary {
            report,
            km_high,
            km_low,
        })
    };
    match run() {
        Ok(h) => Some(h),
        Err(e) => {
            warnings.push(format!("survival: {e}"));
            None
        }
    }
}

/// Evidence, verdict, stage and hazard for one candidate.
pub fn process_pair(ctx: &Context, disease: &str, candidate: &Candidate) -> Result<PairRun> {
    let drug = &candidate.drug;
    let providers = Providers::from_fixtures(&ctx.fixtures);
    let profile = crate::evidence::assemble_profile(
        disease,
        drug,
        &ctx.graph,
        &ctx.kgwe.params,
        &providers,
        ctx.signatures.get(drug),
        &ctx.cfg.evidence,
    )?;
    let verdict = rescore(&profile, ctx.cfg.ablation)?;
    let has_literature = !profile.drug_level.literature_snippets.is_empty() || profile.drug_level.co_mentions > 0;
    let stage = categorize_stage(&profile.trials, profile.fda_approved_for_disease, has_literature, &ctx.taxonomy)?;
    let mut warnings = profile.warnings.clone();
    let hazard = hazard(ctx, disease, drug, &mut warnings);
    let fit = hazard.as_ref().and_then(|h| h.report.outcome.fit());
    let result = PairResult {
        disease: disease.to_string(),
        disease_name: ctx.entity_name(disease),
        drug: drug.clone(),
        drug_name: ctx.entity_name(drug),
        sources: candidate.sources.clone(),
        score: verdict.overall_confidence_score,
        level: verdict.overall_confidence_level,
        stage,
        fda_any_indication: profile.flags.fda_any_indication,
        pathway_points: pathway_points(&profile.flags),
        hr: fit.map(|f| f.hr),
        hr_p: fit.map(|f| f.p),
        eligible: fit.is_some(),
        dossier: dossier_name(disease, drug),
    };
    Ok(PairRun {
        result,
        verdict,
        profile,
        hazard,
        warnings,
    })
}

fn passes_filters(ctx: &Context, r: &PairResult) -> bool {
    if ctx.cfg.fda_filter && !r.fda_any_indication {
        return false;
    }
    match &ctx.cfg.stage_allowlist {
        Some(allow) => allow.iter().any(|s| s == &r.stage),
        None => true,
    }
}

/// Runs every configured disease through candidate generation, evidence
/// assembly, scoring, staging and hazard estimation. Per-pair errors are
/// recorded and the run continues.
pub fn run_pipeline(ctx: &Context) -> Result<RunOutput> {
    let mut out = RunOutput {
        warnings: ctx.warnings.clone(),
        ..Default::default()
    };
    let mut jobs = Vec::new();
    for text in &ctx.cfg.diseases {
        let disease = match resolve_disease(&ctx.graph, text) {
            Ok(d) => d,
            Err(e) => {
                out.failures.push(PairFailure {
                    disease: text.clone(),
                    drug: String::new(),
                    error: format!("disease not mappable: {e}"),
                });
                continue;
            }
        };
        if out.diseases.contains(&disease) {
            continue;
        }
        let candidates = generate_candidates(ctx, &disease)?;
        if candidates.is_empty() {
            let msg = format!("no candidates for disease {disease}");
            log::warn!("{msg}");
            out.warnings.push(msg);
        }
        jobs.extend(candidates.into_iter().map(|c| (disease.clone(), c)));
        out.diseases.push(disease);
    }

    let work = |(d, c): &(String, Candidate)| (d.clone(), c.drug.clone(), process_pair(ctx, d, c));
    let results: Vec<_> = if ctx.cfg.serial {
        jobs.iter().map(work).collect()
    } else {
        jobs.par_iter().map(work).collect()
    };
    for (disease, drug, r) in results {
        match r {
            Ok(p) if passes_filters(ctx, &p.result) => out.pairs.push(p),
            Ok(_) => out.filtered_out += 1,
            Err(e) => {
                log::warn!("pair {disease} / {drug} failed: {e}");
                out.failures.push(PairFailure {
                    disease,
                    drug,
                    error: e.to_string(),
                });
            }
        }
    }
    let order: BTreeMap<&str, usize> = out.diseases.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
    out.pairs.sort_by(|a, b| {
        order[a.result.disease.as_str()]
            .cmp(&order[b.result.disease.as_str()])
            .then_with(|| b.result.score.cmp(&a.result.score))
            .then_with(|| a.result.drug.cmp(&b.result.drug))
    });
    Ok(out)
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

pub(crate) fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json_file<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    write_json(path, v)
}

/// Writes `ranked.csv`, one dossier per pair, and `failures.csv` when any
/// pair failed.
pub fn write_run(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = csv_writer(&dir.join("ranked.csv"))?;
    w.write_record([
        "disease",
        "disease_name",
        "drug",
        "drug_name",
        "sources",
        "score",
        "level",
        "stage",
        "fda_any_indication",
        "pathway_points",
        "hr",
        "hr_p",
        "eligible",
        "dossier",
    ])?;
    for p in &out.pairs {
        let r = &p.result;
        let sources: Vec<&str> = r.sources.iter().map(|s| s.as_str()).collect();
        w.write_record([
            r.disease.clone(),
            r.disease_name.clone(),
            r.drug.clone(),
            r.drug_name.clone(),
            sources.join(";"),
            r.score.to_string(),
            r.level.as_str().to_string(),
            r.stage.clone(),
            r.fda_any_indication.to_string(),
            r.pathway_points.to_string(),
            opt(r.hr),
            opt(r.hr_p),
            r.eligible.to_string(),
            r.dossier.clone(),
        ])?;
        write_json(&dir.join(&r.dossier), p)?;
    }
    w.flush().map_err(|e| Error::io(dir.join("ranked.csv"), e))?;
    let failures = dir.join("failures.csv");
    if out.failures.is_empty() {
        if failures.exists() {
            fs::remove_file(&failures).map_err(|e| Error::io(&failures, e))?;
        }
    } else {
        let mut w = csv_writer(&failures)?;
        w.write_record(["disease", "drug", "error"])?;
        for f in &out.failures {
            w.write_record([&f.disease, &f.drug, &f.error])?;
        }
        w.flush().map_err(|e| Error::io(&failures, e))?;
    }
    Ok(())
}
