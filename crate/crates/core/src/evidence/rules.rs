use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvidenceFlags {
    pub direct_clinical: bool,
    pub direct_preclinical: bool,
    pub strong_gene: bool,
    pub limited_gene: bool,
    pub significant_pathway: bool,
    pub nominal_pathway: bool,
    pub fda_any_indication: bool,
}

impl EvidenceFlags {
    pub fn validate(&self) -> Result<()> {
        if self.strong_gene && self.limited_gene {
            return Err(Error::Validation("strong_gene and limited_gene are mutually exclusive".into()));
        }
        if self.significant_pathway && self.nominal_pathway {
            return Err(Error::Validation(
                "significant_pathway and nominal_pathway are mutually exclusive".into(),
            ));
        }
        Ok(())
    }

    /// Every internally consistent flag assignment.
    pub fn all_consistent() -> Vec<EvidenceFlags> {
        let tri = [(false, false), (true, false), (false, true)];
        let mut out = Vec::new();
        for clinical in [false, true] {
            for preclinical in [false, true] {
                for (strong, limited) in tri {
                    for (sig, nominal) in tri {
                        for fda in [false, true] {
                            out.push(EvidenceFlags {
                                direct_clinical: clinical,
                                direct_preclinical: preclinical,
                                strong_gene: strong,
                                limited_gene: limited,
                                significant_pathway: sig,
                                nominal_pathway: nominal,
                                fda_any_indication: fda,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

pub const CLINICAL_POINTS: u32 = 40;
pub const PRECLINICAL_POINTS: u32 = 20;
pub const STRONG_GENE_POINTS: u32 = 30;
pub const LIMITED_GENE_POINTS: u32 = 15;
pub const SIGNIFICANT_PATHWAY_POINTS: u32 = 20;
pub const NOMINAL_PATHWAY_POINTS: u32 = 10;
pub const FDA_ANY_POINTS: u32 = 10;
pub const MAX_SCORE: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleScore {
    pub score: u32,
    pub rationale: Vec<String>,
}

fn rule(label: &str, points: u32) -> String {
    format!("Rule triggered: {label} (+{points}).")
}

/// Additive rule scorer over evidence flags, capped at 100.
pub fn rule_score(flags: &EvidenceFlags) -> Result<RuleScore> {
    flags.validate()?;
    let mut score = 0;
    let mut rationale = Vec::new();
    let mut add = |label: &str, points: u32| {
        score += points;
        rationale.push(rule(label, points));
    };
    if flags.direct_clinical {
        add("Disease-Drug evidence, clinical or FDA-approved indication", CLINICAL_POINTS);
    } else if flags.direct_preclinical {
        add("Disease-Drug evidence, indirect or preclinical", PRECLINICAL_POINTS);
    }
    if flags.strong_gene {
        add("Gene-level evidence, multiple disease-relevant genes", STRONG_GENE_POINTS);
    } else if flags.limited_gene {
        add("Gene-level evidence, limited or indirect", LIMITED_GENE_POINTS);
    }
    if flags.significant_pathway {
        add("Pathway-level evidence, FDR < 0.05", SIGNIFICANT_PATHWAY_POINTS);
    } else if flags.nominal_pathway {
        add("Pathway-level evidence, nominal", NOMINAL_PATHWAY_POINTS);
    }
    if flags.fda_any_indication {
        add("FDA approval for any indication", FDA_ANY_POINTS);
    }
    Ok(RuleScore {
        score: score.min(MAX_SCORE),
        rationale,
    })
}

/// Points contributed by the pathway rule alone.
pub fn pathway_points(flags: &EvidenceFlags) -> u32 {
    if flags.significant_pathway {
        SIGNIFICANT_PATHWAY_POINTS
    } else if flags.nominal_pathway {
        NOMINAL_PATHWAY_POINTS
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConfidenceLevel {
    #[serde(rename = "Very Low")]
    VeryLow,
    #[serde(rename = "Low")]
    Low,
    #[serde(rename = "Moderately Low")]
    ModeratelyLow,
    #[serde(rename = "Moderate")]
    Moderate,
    #[serde(rename = "Moderately High")]
    ModeratelyHigh,
    #[serde(rename = "High")]
    High,
    #[serde(rename = "Very High")]
    VeryHigh,
}

impl ConfidenceLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfidenceLevel::VeryLow => "Very Low",
            ConfidenceLevel::Low => "Low",
            ConfidenceLevel::ModeratelyLow => "Moderately Low",
            ConfidenceLevel::Moderate => "Moderate",
            ConfidenceLevel::ModeratelyHigh => "Moderately High",
            ConfidenceLevel::High => "High",
            ConfidenceLevel::VeryHigh => "Very High",
        }
    }
}

impl fmt::Display for ConfidenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Seven contiguous bands of width 15 (the top band is 90..=100).
pub fn confidence_level(score: u32) -> Result<ConfidenceLevel> {
    Ok(match score {
        0..=14 => ConfidenceLevel::VeryLow,
        15..=29 => ConfidenceLevel::Low,
        30..=44 => ConfidenceLevel::ModeratelyLow,
        45..=59 => ConfidenceLevel::Moderate,
        60..=74 => ConfidenceLevel::ModeratelyHigh,
        75..=89 => ConfidenceLevel::High,
        90..=100 => ConfidenceLevel::VeryHigh,
        _ => return Err(Error::Validation(format!("confidence score {score} is outside 0..=100"))),
    })
}
