//! Per-pair evidence profiles, the rule-based scorer and clinical stage
//! categorization.

mod ora;
mod providers;
mod rules;
mod trials;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hake::HakeParams;
use crate::kg::{EntityKind, Graph};
use crate::pathfind::{build_subgraph, PathRecord, PathScoringConfig};
use crate::signature::{Direction, DrugSignature};

pub use ora::{
    benjamini_hochberg, default_universe, hypergeom_upper_tail, load_gmt, ora, parse_gmt, EnrichedTerm, OraHit,
    TermSet,
};
pub use providers::{
    FixtureProviders, GeneResourceProvider, LabelProvider, LiteratureProvider, Providers, Reasoner,
    ResourceRecord, ResourceSource, RuleReasoner, Snippet, SnippetEntry, TermLibraryProvider, TrialEntry,
    TrialProvider, GENE_RESOURCES_FILE, LABELS_FILE, SNIPPETS_FILE, TERMS_FILE, TRIALS_FILE,
};
pub use rules::{
    confidence_level, pathway_points, rule_score, ConfidenceLevel, EvidenceFlags, RuleScore, CLINICAL_POINTS,
    FDA_ANY_POINTS, LIMITED_GENE_POINTS, MAX_SCORE, NOMINAL_PATHWAY_POINTS, PRECLINICAL_POINTS,
    SIGNIFICANT_PATHWAY_POINTS, STRONG_GENE_POINTS,
};
pub use trials::{
    best_trial, categorize_stage, trial_result_status, Phase, ResultBand, ResultStatus, StageTaxonomy, TrialMeta,
    TrialStatus,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvidenceConfig {
    pub paths: PathScoringConfig,
    pub max_snippets: usize,
    pub max_genes: usize,
    /// BH-adjusted threshold for a significant pathway.
    pub fdr_threshold: f64,
    /// Raw p threshold for a nominal pathway.
    pub nominal_threshold: f64,
    /// ORA universe; defaults to every gene in the library and signature.
    pub universe_size: Option<usize>,
    pub strong_gene_min_genes: usize,
    pub strong_gene_min_categories: usize,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        Self {
            paths: PathScoringConfig::default(),
            max_snippets: 5,
            max_genes: 10,
            fdr_threshold: 0.05,
            nominal_threshold: 0.05,
            universe_size: None,
            strong_gene_min_genes: 2,
            strong_gene_min_categories: 2,
        }
    }
}

impl EvidenceConfig {
    pub fn validate(&self) -> Result<()> {
        self.paths.validate()?;
        for (name, v) in [("fdr_threshold", self.fdr_threshold), ("nominal_threshold", self.nominal_threshold)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.strong_gene_min_categories > 3 {
            return Err(Error::Config("a gene has at most 3 evidence categories".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DrugEvidence {
    pub paths: Vec<PathRecord>,
    pub literature_snippets: Vec<Snippet>,
    pub co_mentions: u64,
    pub label_sections: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneEvidence {
    pub gene: String,
    pub snippets: Vec<Snippet>,
    pub resource_records: Vec<ResourceRecord>,
    pub paths_to_disease: Vec<PathRecord>,
    pub paths_to_drug: Vec<PathRecord>,
}

impl GeneEvidence {
    /// Distinct categories present: literature, curated resources, graph paths.
    pub fn categories(&self) -> usize {
        usize::from(!self.snippets.is_empty())
            + usize::from(!self.resource_records.is_empty())
            + usize::from(!self.paths_to_disease.is_empty() || !self.paths_to_drug.is_empty())
    }

    pub fn support(&self) -> u64 {
        self.resource_records.iter().filter_map(|r| r.support_count).sum()
    }

    pub fn best_path_score(&self) -> f64 {
        self.paths_to_disease
            .iter()
            .chain(&self.paths_to_drug)
            .map(|p| p.score)
            .fold(0.0, f64::max)
    }

    pub fn has_evidence(&self) -> bool {
        self.categories() > 0
    }
}

/// Ranking used by [`select_genes`].
pub fn compare_genes(a: &GeneEvidence, b: &GeneEvidence) -> Ordering {
    b.categories()
        .cmp(&a.categories())
        .then_with(|| b.support().cmp(&a.support()))
        .then_with(|| b.best_path_score().total_cmp(&a.best_path_score()))
        .then_with(|| a.gene.cmp(&b.gene))
}

/// Keeps the ten best genes by categories, resource support, best path score
/// and symbol.
pub fn select_genes(mut candidates: Vec<GeneEvidence>) -> Vec<GeneEvidence> {
    candidates.sort_by(compare_genes);
    candidates.truncate(10);
    candidates
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceProfile {
    pub disease: String,
    pub disease_name: String,
    pub drug: String,
    pub drug_level: DrugEvidence,
    pub gene_level: Vec<GeneEvidence>,
    pub pathway_level: Vec<EnrichedTerm>,
    pub trials: Vec<TrialMeta>,
    pub fda_approved_for_disease: bool,
    pub flags: EvidenceFlags,
    /// Channels that degraded, with the cause.
    pub warnings: Vec<String>,
}

/// Rule-scorer output in the dossier's verdict shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub overall_confidence_score: u32,
    pub overall_confidence_level: ConfidenceLevel,
    #[serde(rename = "FDA_status")]
    pub fda_status: String,
    pub rationale_bullets: Vec<String>,
}

impl Verdict {
    pub fn new(profile: &EvidenceProfile, rs: &RuleScore) -> Result<Self> {
        Ok(Self {
            overall_confidence_score: rs.score,
            overall_confidence_level: confidence_level(rs.score)?,
            fda_status: fda_status(profile),
            rationale_bullets: rs.rationale.clone(),
        })
    }
}

pub fn fda_status(profile: &EvidenceProfile) -> String {
    if profile.fda_approved_for_disease {
        format!("FDA-approved for {}", profile.disease_name)
    } else if profile.flags.fda_any_indication {
        format!("FDA-approved for other indications but not for {}", profile.disease_name)
    } else {
        "N/A".to_string()
    }
}

/// Whether any indications section of the label names the disease.
pub fn approved_for(label: &BTreeMap<String, String>, disease_id: &str, disease_name: &str) -> bool {
    let name = disease_name.trim().to_lowercase();
    let id = disease_id.to_lowercase();
    label.iter().any(|(section, text)| {
        let text = text.to_lowercase();
        section.to_lowercase().contains("indication") && ((!name.is_empty() && text.contains(&name)) || text.contains(&id))
    })
}

/// Evidence flags from an assembled profile.
pub fn compute_flags(p: &EvidenceProfile, cfg: &EvidenceConfig) -> EvidenceFlags {
    let strong_genes = p
        .gene_level
        .iter()
        .filter(|g| g.categories() >= cfg.strong_gene_min_categories)
        .count();
    let strong_gene = strong_genes >= cfg.strong_gene_min_genes && strong_genes > 0;
    let significant_pathway = p
        .pathway_level
        .iter()
        .any(|t| t.overlap > 0 && t.q < cfg.fdr_threshold);
    EvidenceFlags {
        direct_clinical: !p.trials.is_empty() || p.fda_approved_for_disease,
        direct_preclinical: !p.drug_level.literature_snippets.is_empty()
            || p.drug_level.paths.iter().any(|path| path.relations.len() == 1),
        strong_gene,
        limited_gene: !strong_gene && !p.gene_level.is_empty(),
        significant_pathway,
        nominal_pathway: !significant_pathway
            && p.pathway_level.iter().any(|t| t.overlap > 0 && t.p < cfg.nominal_threshold),
        fda_any_indication: !p.drug_level.label_sections.is_empty(),
    }
}

/// Leave-one-evidence-out setting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    #[default]
    None,
    DropDrug,
    DropGene,
    DropPathway,
    RuleOnly,
}

impl Ablation {
    pub const ALL: [Ablation; 5] = [
        Ablation::None,
        Ablation::DropDrug,
        Ablation::DropGene,
        Ablation::DropPathway,
        Ablation::RuleOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ablation::None => "none",
            Ablation::DropDrug => "drop_drug",
            Ablation::DropGene => "drop_gene",
            Ablation::DropPathway => "drop_pathway",
            Ablation::RuleOnly => "rule_only",
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown ablation '{s}'")))
    }
}

/// Empties the dropped channel and forces its flags off. FDA approval for any
/// indication is its own rule and is never dropped.
pub fn apply_ablation(p: &mut EvidenceProfile, a: Ablation) {
    match a {
        Ablation::None | Ablation::RuleOnly => {}
        Ablation::DropDrug => {
            p.drug_level.paths.clear();
            p.drug_level.literature_snippets.clear();
            p.drug_level.co_mentions = 0;
            p.flags.direct_clinical = false;
            p.flags.direct_preclinical = false;
        }
        Ablation::DropGene => {
            p.gene_level.clear();
            p.flags.strong_gene = false;
            p.flags.limited_gene = false;
        }
        Ablation::DropPathway => {
            p.pathway_level.clear();
            p.flags.significant_pathway = false;
            p.flags.nominal_pathway = false;
        }
    }
}

fn degrade<T: Default>(warnings: &mut Vec<String>, channel: &str, r: Result<T>) -> T {
    r.unwrap_or_else(|e| {
        log::warn!("{channel} channel unavailable: {e}");
        warnings.push(format!("{channel}: {e}"));
        T::default()
    })
}

fn records(g: &Graph, scored: Vec<crate::pathfind::ScoredPath>) -> Vec<PathRecord> {
    scored.iter().map(|sp| PathRecord::new(sp, g)).collect()
}

fn paths_between(
    g: &Graph,
    params: &HakeParams,
    a: &str,
    b: &str,
    cfg: &PathScoringConfig,
) -> Result<Vec<PathRecord>> {
    build_subgraph(g, params, a, b, cfg).map(|s| records(g, s))
}

/// Gathers drug-, gene- and pathway-level evidence for one pair. Provider
/// failures empty the affected channel and are recorded in `warnings`.
pub fn assemble_profile(
    disease: &str,
    drug: &str,
    g: &Graph,
    params: &HakeParams,
    providers: &Providers<'_>,
    signature: Option<&DrugSignature>,
    cfg: &EvidenceConfig,
) -> Result<EvidenceProfile> {
    cfg.validate()?;
    let di = g.require_entity(disease)?;
    g.require_entity(drug)?;
    let disease_name = g.entity(di).name.clone();
    let mut warnings = Vec::new();

    let paths = degrade(&mut warnings, "paths", paths_between(g, params, drug, disease, &cfg.paths));
    let mut snippets = degrade(&mut warnings, "literature", providers.literature.snippets(disease, drug));
    snippets.truncate(cfg.max_snippets);
    let co_mentions = degrade(&mut warnings, "literature", providers.literature.co_mentions(disease, drug));
    let label_sections = degrade(&mut warnings, "label", providers.labels.sections(drug));
    let trials = degrade(&mut warnings, "trials", providers.trials.trials(disease, drug));
    let fda_approved_for_disease = approved_for(&label_sections, disease, &disease_name);

    let mut candidates = BTreeSet::new();
    for p in &paths {
        for n in &p.nodes[1..p.nodes.len() - 1] {
            if g.entity_index(n).is_some_and(|i| g.entity(i).kind == EntityKind::Gene) {
                candidates.insert(n.clone());
            }
        }
    }
    for s in &snippets {
        candidates.extend(s.genes.iter().cloned());
    }
    let mut genes = Vec::with_capacity(candidates.len());
    for gene in candidates {
        let mut gs = degrade(&mut warnings, "literature", providers.literature.snippets(&gene, disease));
        gs.extend(degrade(&mut warnings, "literature", providers.literature.snippets(&gene, drug)));
        gs.dedup();
        gs.truncate(cfg.max_snippets);
        let resource_records = degrade(&mut warnings, "gene resources", providers.genes.records(&gene, &[disease, drug]));
        let (to_disease, to_drug) = if g.entity_index(&gene).is_some() {
            (
                degrade(&mut warnings, "paths", paths_between(g, params, &gene, disease, &cfg.paths)),
                degrade(&mut warnings, "paths", paths_between(g, params, &gene, drug, &cfg.paths)),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let ev = GeneEvidence {
            gene,
            snippets: gs,
            resource_records,
            paths_to_disease: to_disease,
            paths_to_drug: to_drug,
        };
        if ev.has_evidence() {
            genes.push(ev);
        }
    }
    let mut gene_level = select_genes(genes);
    gene_level.truncate(cfg.max_genes);

    let pathway_level = match signature {
        None => {
            warnings.push("pathways: no perturbation signature for this drug".into());
            Vec::new()
        }
        Some(sig) => {
            if sig.drug != drug {
                log::warn!("signature for '{}' used for drug '{drug}'", sig.drug);
            }
            let library = degrade(&mut warnings, "term library", providers.terms.library());
            degrade(&mut warnings, "pathways", enrich(sig, &library, cfg))
        }
    };

    let mut profile = EvidenceProfile {
        disease: disease.to_string(),
        disease_name,
        drug: drug.to_string(),
        drug_level: DrugEvidence {
            paths,
            literature_snippets: snippets,
            co_mentions,
            label_sections,
        },
        gene_level,
        pathway_level,
        trials,
        fda_approved_for_disease,
        flags: EvidenceFlags::default(),
        warnings,
    };
    profile.flags = compute_flags(&profile, cfg);
    Ok(profile)
}

/// ORA of the signature's up and down sets with BH correction across both.
pub fn enrich(sig: &DrugSignature, library: &[TermSet], cfg: &EvidenceConfig) -> Result<Vec<EnrichedTerm>> {
    if library.is_empty() {
        return Ok(Vec::new());
    }
    let up: Vec<&str> = sig.up_genes().collect();
    let down: Vec<&str> = sig.down_genes().collect();
    let universe = cfg
        .universe_size
        .unwrap_or_else(|| default_universe(library, up.iter().chain(&down).copied()));
    let mut tested = Vec::new();
    for (dir, set) in [(Direction::Up, &up), (Direction::Down, &down)] {
        if set.is_empty() {
            continue;
        }
        for h in ora(set, library, universe)? {
            tested.push((dir, h));
        }
    }
    let q = benjamini_hochberg(&tested.iter().map(|(_, h)| h.p).collect::<Vec<_>>());
    let mut out: Vec<EnrichedTerm> = tested
        .into_iter()
        .zip(q)
        .filter(|((_, h), _)| h.overlap > 0)
        .map(|((direction, h), q)| EnrichedTerm {
            term: h.term,
            direction,
            overlap: h.overlap,
            term_size: h.term_size,
            p: h.p,
            q,
        })
        .collect();
    out.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then_with(|| a.direction.cmp(&b.direction))
            .then_with(|| a.term.cmp(&b.term))
    });
    Ok(out)
}
