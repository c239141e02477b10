use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::Direction;

use super::ora::{load_gmt, TermSet};
use super::rules::rule_score;
use super::trials::TrialMeta;
use super::{EvidenceProfile, Verdict};

/// Literature sentence with its source identifier and tagged genes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub source: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub genes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResourceSource {
    #[serde(rename = "CTD")]
    Ctd,
    #[serde(rename = "PubTator")]
    PubTator,
    #[serde(rename = "DGIdb")]
    DgIdb,
    #[serde(rename = "LINCS")]
    Lincs,
}

/// Curated gene association with a drug or disease.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub gene: String,
    /// The drug or disease id the gene is associated with.
    pub partner: String,
    pub source: ResourceSource,
    pub relation_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

pub trait LiteratureProvider: Sync {
    /// Snippets co-mentioning two entities, in provider order.
    fn snippets(&self, a: &str, b: &str) -> Result<Vec<Snippet>>;
    fn co_mentions(&self, a: &str, b: &str) -> Result<u64>;
}

pub trait LabelProvider: Sync {
    /// Drug label sections keyed by section name; empty when unlabeled.
    fn sections(&self, drug: &str) -> Result<BTreeMap<String, String>>;
}

pub trait TrialProvider: Sync {
    fn trials(&self, disease: &str, drug: &str) -> Result<Vec<TrialMeta>>;
}

pub trait TermLibraryProvider: Sync {
    fn library(&self) -> Result<Vec<TermSet>>;
}

pub trait GeneResourceProvider: Sync {
    /// Records for `gene` whose partner is one of `partners`.
    fn records(&self, gene: &str, partners: &[&str]) -> Result<Vec<ResourceRecord>>;
}

pub trait Reasoner: Sync {
    fn assess(&self, profile: &EvidenceProfile) -> Result<Verdict>;
}

/// The deterministic reference reasoner: the additive rule scorer.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleReasoner;

impl Reasoner for RuleReasoner {
    fn assess(&self, profile: &EvidenceProfile) -> Result<Verdict> {
        Verdict::new(profile, &rule_score(&profile.flags)?)
    }
}

/// Bundle of every evidence channel.
#[derive(Clone, Copy)]
pub struct Providers<'a> {
    pub literature: &'a dyn LiteratureProvider,
    pub labels: &'a dyn LabelProvider,
    pub trials: &'a dyn TrialProvider,
    pub terms: &'a dyn TermLibraryProvider,
    pub genes: &'a dyn GeneResourceProvider,
}

impl<'a> Providers<'a> {
    /// Every channel served by one fixture bundle.
    pub fn from_fixtures(f: &'a FixtureProviders) -> Self {
        Self {
            literature: f,
            labels: f,
            trials: f,
            terms: f,
            genes: f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetEntry {
    pub a: String,
    pub b: String,
    /// Co-mention count; defaults to the number of snippets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    pub snippets: Vec<Snippet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialEntry {
    pub disease: String,
    pub drug: String,
    pub trials: Vec<TrialMeta>,
}

/// File names inside a fixture directory.
pub const SNIPPETS_FILE: &str = "snippets.json";
pub const LABELS_FILE: &str = "labels.json";
pub const TRIALS_FILE: &str = "trials.json";
pub const TERMS_FILE: &str = "terms.gmt";
pub const GENE_RESOURCES_FILE: &str = "gene_resources.json";

/// All providers backed by immutable files loaded once.
#[derive(Debug, Clone, Default)]
pub struct FixtureProviders {
    snippets: HashMap<(String, String), SnippetEntry>,
    labels: BTreeMap<String, BTreeMap<String, String>>,
    trials: HashMap<(String, String), Vec<TrialMeta>>,
    terms: Vec<TermSet>,
    resources: HashMap<String, Vec<ResourceRecord>>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned + Default>(path: &Path) -> Result<T> {
    if !path.exists() {
        log::debug!("{} not present; channel empty", path.display());
        return Ok(T::default());
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

impl FixtureProviders {
    pub fn new(
        snippets: Vec<SnippetEntry>,
        labels: BTreeMap<String, BTreeMap<String, String>>,
        trials: Vec<TrialEntry>,
        terms: Vec<TermSet>,
        resources: Vec<ResourceRecord>,
    ) -> Result<Self> {
        let mut out = FixtureProviders {
            labels,
            terms,
            ..Default::default()
        };
        for e in snippets {
            let key = pair_key(&e.a, &e.b);
            if out.snippets.insert(key.clone(), e).is_some() {
                return Err(Error::Data(format!("duplicate snippet entry for {} / {}", key.0, key.1)));
            }
        }
        for e in trials {
            for t in &e.trials {
                t.validate()?;
            }
            out.trials.entry((e.disease, e.drug)).or_default().extend(e.trials);
        }
        for r in resources {
            out.resources.entry(r.gene.clone()).or_default().push(r);
        }
        Ok(out)
    }

    /// Loads whichever fixture files exist in `dir`; missing files leave
    /// their channel empty.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::Config(format!("fixture directory {} does not exist", dir.display())));
        }
        let p = |f: &str| -> PathBuf { dir.join(f) };
        let terms_path = p(TERMS_FILE);
        let terms = if terms_path.exists() { load_gmt(&terms_path)? } else { Vec::new() };
        Self::new(
            read_json(&p(SNIPPETS_FILE))?,
            read_json(&p(LABELS_FILE))?,
            read_json(&p(TRIALS_FILE))?,
            terms,
            read_json(&p(GENE_RESOURCES_FILE))?,
        )
    }
}

impl LiteratureProvider for FixtureProviders {
    fn snippets(&self, a: &str, b: &str) -> Result<Vec<Snippet>> {
        Ok(self
            .snippets
            .get(&pair_key(a, b))
            .map(|e| e.snippets.clone())
            .unwrap_or_default())
    }

    fn co_mentions(&self, a: &str, b: &str) -> Result<u64> {
        Ok(self
            .snippets
            .get(&pair_key(a, b))
            .map_or(0, |e| e.count.unwrap_or(e.snippets.len() as u64)))
    }
}

impl LabelProvider for FixtureProviders {
    fn sections(&self, drug: &str) -> Result<BTreeMap<String, String>> {
        Ok(self.labels.get(drug).cloned().unwrap_or_default())
    }
}

impl TrialProvider for FixtureProviders {
    fn trials(&self, disease: &str, drug: &str) -> Result<Vec<TrialMeta>> {
        Ok(self
            .trials
            .get(&(disease.to_string(), drug.to_string()))
            .cloned()
            .unwrap_or_default())
    }
}

impl TermLibraryProvider for FixtureProviders {
    fn library(&self) -> Result<Vec<TermSet>> {
        Ok(self.terms.clone())
    }
}

impl GeneResourceProvider for FixtureProviders {
    fn records(&self, gene: &str, partners: &[&str]) -> Result<Vec<ResourceRecord>> {
        Ok(self
            .resources
            .get(gene)
            .map(|rs| rs.iter().filter(|r| partners.contains(&r.partner.as_str())).cloned().collect())
            .unwrap_or_default())
    }
}
