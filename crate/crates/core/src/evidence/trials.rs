use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "NA")]
    NotApplicable,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4")]
    Four,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::NotApplicable => "NA",
            Phase::One => "1",
            Phase::Two => "2",
            Phase::Three => "3",
            Phase::Four => "4",
        }
    }

    /// Years without results after which a trial counts as long-term incomplete.
    pub fn elapsed_threshold(self) -> i32 {
        match self {
            Phase::One | Phase::Two => 2,
            Phase::Three | Phase::Four | Phase::NotApplicable => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    NotYetRecruiting,
    Recruiting,
    Active,
    Completed,
    Terminated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialMeta {
    pub nct_id: String,
    pub phase: Phase,
    pub status: TrialStatus,
    pub has_results: bool,
    /// `None` when results are posted but their direction is unknown.
    #[serde(default)]
    pub results_positive: Option<bool>,
    pub start_year: i32,
    #[serde(default)]
    pub completion_year: Option<i32>,
    pub current_year: i32,
    /// Overrides the year-based estimate of time since completion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub months_since_completion: Option<u32>,
}

impl TrialMeta {
    pub fn validate(&self) -> Result<()> {
        if self.start_year > self.current_year {
            return Err(Error::Validation(format!(
                "{}: start year {} is after the current year {}",
                self.nct_id, self.start_year, self.current_year
            )));
        }
        Ok(())
    }

    fn months_since_completion(&self) -> Option<i64> {
        self.months_since_completion
            .map(i64::from)
            .or_else(|| self.completion_year.map(|y| i64::from(self.current_year - y) * 12))
    }
}

/// Result-status band, ordered worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStatus {
    Bad,
    CompletedNoResult,
    LongTermIncomplete,
    OngoingInReasonableTerm,
    Good,
}

impl ResultStatus {
    pub const ALL: [ResultStatus; 5] = [
        ResultStatus::Bad,
        ResultStatus::CompletedNoResult,
        ResultStatus::LongTermIncomplete,
        ResultStatus::OngoingInReasonableTerm,
        ResultStatus::Good,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResultStatus::Bad => "bad",
            ResultStatus::CompletedNoResult => "completed_no_result",
            ResultStatus::LongTermIncomplete => "long_term_incomplete",
            ResultStatus::OngoingInReasonableTerm => "ongoing_in_reasonable_term",
            ResultStatus::Good => "good",
        }
    }

    /// Inclusive score interval.
    pub fn band(self) -> (u32, u32) {
        match self {
            ResultStatus::Bad => (0, 19),
            ResultStatus::CompletedNoResult => (20, 34),
            ResultStatus::LongTermIncomplete => (35, 49),
            ResultStatus::OngoingInReasonableTerm => (50, 79),
            ResultStatus::Good => (80, 100),
        }
    }

    pub fn midpoint(self) -> f64 {
        let (lo, hi) = self.band();
        f64::from(lo + hi) / 2.0
    }
}

impl fmt::Display for ResultStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBand {
    pub label: ResultStatus,
    pub lo: u32,
    pub hi: u32,
    pub midpoint: f64,
}

impl From<ResultStatus> for ResultBand {
    fn from(label: ResultStatus) -> Self {
        let (lo, hi) = label.band();
        Self {
            label,
            lo,
            hi,
            midpoint: label.midpoint(),
        }
    }
}

/// Classifies a trial by its posted results and elapsed time. Rules are
/// checked in order: negative results, positive results, completed over 12
/// months ago without results, no results past the phase timeline, otherwise
/// ongoing.
pub fn trial_result_status(t: &TrialMeta) -> Result<ResultBand> {
    t.validate()?;
    if t.has_results {
        return Ok(match t.results_positive {
            Some(false) => ResultStatus::Bad,
            Some(true) => ResultStatus::Good,
            None => ResultStatus::OngoingInReasonableTerm,
        }
        .into());
    }
    if t.status == TrialStatus::Completed && t.months_since_completion().is_some_and(|m| m > 12) {
        return Ok(ResultStatus::CompletedNoResult.into());
    }
    if t.phase == Phase::NotApplicable {
        log::warn!("{}: phase not given, using phase 3 timeline", t.nct_id);
    }
    if t.current_year - t.start_year >= t.phase.elapsed_threshold() {
        return Ok(ResultStatus::LongTermIncomplete.into());
    }
    Ok(ResultStatus::OngoingInReasonableTerm.into())
}

/// Ordered stage labels plus the rule table that maps evidence to a stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageTaxonomy {
    pub stages: Vec<String>,
    pub approved_for_disease: String,
    pub preclinical: String,
    pub insufficient_evidence: String,
    /// phase (`"1"`..`"4"`, optionally `"NA"`) → result status → stage.
    pub trial_stages: BTreeMap<String, BTreeMap<ResultStatus, String>>,
}

const DEFAULT_TAXONOMY: &str = include_str!("../../data/taxonomy.json");

impl StageTaxonomy {
    pub fn from_json(text: &str) -> Result<Self> {
        let t: StageTaxonomy =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("taxonomy: {e}")))?;
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// The shipped 17-stage default.
    pub fn default_config() -> Self {
        Self::from_json(DEFAULT_TAXONOMY).expect("bundled taxonomy is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for s in &self.stages {
            if s.trim().is_empty() {
                return Err(Error::Config("taxonomy contains an empty stage label".into()));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::Config(format!("duplicate stage label '{s}'")));
            }
        }
        let known = |s: &str, what: &str| {
            if seen.contains(s) {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} stage '{s}' is not in the stage list")))
            }
        };
        known(&self.approved_for_disease, "approved_for_disease")?;
        known(&self.preclinical, "preclinical")?;
        known(&self.insufficient_evidence, "insufficient_evidence")?;
        for phase in ["1", "2", "3", "4"] {
            let row = self
                .trial_stages
                .get(phase)
                .ok_or_else(|| Error::Config(format!("taxonomy has no stages for phase {phase}")))?;
            for status in ResultStatus::ALL {
                let stage = row
                    .get(&status)
                    .ok_or_else(|| Error::Config(format!("taxonomy has no stage for phase {phase}, {status}")))?;
                known(stage, "trial")?;
            }
        }
        for (phase, row) in &self.trial_stages {
            if !["1", "2", "3", "4", "NA"].contains(&phase.as_str()) {
                return Err(Error::Config(format!("unknown phase key '{phase}' in taxonomy")));
            }
            for stage in row.values() {
                known(stage, "trial")?;
            }
        }
        Ok(())
    }

    fn trial_stage(&self, phase: Phase, status: ResultStatus) -> &str {
        let row = self
            .trial_stages
            .get(phase.as_str())
            .or_else(|| self.trial_stages.get("1"))
            .expect("validated taxonomy has phase 1");
        row.get(&status).or_else(|| self.trial_stages["1"].get(&status)).expect("validated")
    }
}

/// Picks the highest phase, then the best result band.
pub fn best_trial(trials: &[TrialMeta]) -> Result<Option<(&TrialMeta, ResultStatus)>> {
    let mut best: Option<(&TrialMeta, ResultStatus)> = None;
    for t in trials {
        let status = trial_result_status(t)?.label;
        let better = match best {
            None => true,
            Some((b, bs)) => (t.phase, status) > (b.phase, bs),
        };
        if better {
            best = Some((t, status));
        }
    }
    Ok(best)
}

/// Clinical evidence stage for one pair.
pub fn categorize_stage(
    trials: &[TrialMeta],
    fda_approved_for_disease: bool,
    has_literature: bool,
    taxonomy: &StageTaxonomy,
) -> Result<String> {
    if fda_approved_for_disease {
        return Ok(taxonomy.approved_for_disease.clone());
    }
    if let Some((t, status)) = best_trial(trials)? {
        return Ok(taxonomy.trial_stage(t.phase, status).to_string());
    }
    Ok(if has_literature {
        taxonomy.preclinical.clone()
    } else {
        taxonomy.insufficient_evidence.clone()
    })
}
