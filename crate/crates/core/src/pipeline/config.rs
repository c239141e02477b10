use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{Ablation, EvidenceConfig};
use crate::hake::TrainConfig;
use crate::signature::SignatureConfig;
use crate::survival::SurvivalConfig;

/// Overrides the fixture directory.
pub const ENV_FIXTURES: &str = "REPURPOSE_FIXTURES";
/// Overrides the run seed.
pub const ENV_SEED: &str = "REPURPOSE_SEED";

/// Expression and survival tables for one disease.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortConfig {
    /// Disease id or name.
    pub disease: String,
    pub expression: PathBuf,
    pub survival: PathBuf,
    /// Optional `sample<TAB>responder(0/1)` table for response AUC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<PathBuf>,
}

/// Every input path and hyperparameter of a pipeline run. Relative paths are
/// resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Triple TSV, or a `.json` graph cache.
    pub graph: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names: Option<PathBuf>,
    pub kge_checkpoint: PathBuf,
    pub kgwe_checkpoint: PathBuf,
    pub fixtures: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbations: Option<PathBuf>,
    pub cohorts: Vec<CohortConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<PathBuf>,
    /// `disease<TAB>drug` rows from an external candidate generator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external_candidates: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<PathBuf>,
    /// Diseases to process, as ids or free text.
    pub diseases: Vec<String>,
    /// Diseases compared by the subtype profile.
    pub subtypes: Vec<String>,
    pub indication_relation: String,
    pub top_k_per_model: usize,
    pub output_dir: PathBuf,
    /// `train.seed` is replaced by `seed`.
    pub train: TrainConfig,
    pub signature: SignatureConfig,
    pub survival: SurvivalConfig,
    pub evidence: EvidenceConfig,
    /// Keep only drugs with an FDA label.
    pub fda_filter: bool,
    /// Keep only pairs in these stages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_allowlist: Option<Vec<String>>,
    pub ablation: Ablation,
    pub seed: u64,
    /// Process pairs on one thread.
    pub serial: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            graph: PathBuf::from("graph.tsv"),
            names: None,
            kge_checkpoint: PathBuf::from("kge.json"),
            kgwe_checkpoint: PathBuf::from("kgwe.json"),
            fixtures: PathBuf::from("."),
            perturbations: None,
            cohorts: Vec::new(),
            benchmark: None,
            external_candidates: None,
            taxonomy: None,
            diseases: Vec::new(),
            subtypes: Vec::new(),
            indication_relation: "indication".into(),
            top_k_per_model: 100,
            output_dir: PathBuf::from("out"),
            train: TrainConfig::default(),
            signature: SignatureConfig::default(),
            survival: SurvivalConfig::default(),
            evidence: EvidenceConfig::default(),
            fda_filter: false,
            stage_allowlist: None,
            ablation: Ablation::None,
            seed: 0,
            serial: false,
        }
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a JSON config and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.graph,
            &mut self.kge_checkpoint,
            &mut self.kgwe_checkpoint,
            &mut self.fixtures,
            &mut self.output_dir,
        ] {
            resolve(base, p);
        }
        for p in [
            &mut self.names,
            &mut self.perturbations,
            &mut self.benchmark,
            &mut self.external_candidates,
            &mut self.taxonomy,
        ]
        .into_iter()
        .flatten()
        {
            resolve(base, p);
        }
        for c in &mut self.cohorts {
            resolve(base, &mut c.expression);
            resolve(base, &mut c.survival);
            if let Some(r) = &mut c.response {
                resolve(base, r);
            }
        }
    }

    /// Applies the given override values (normally read from the environment).
    pub fn apply_overrides(&mut self, fixtures: Option<&str>, seed: Option<&str>) -> Result<()> {
        if let Some(dir) = fixtures {
            self.fixtures = PathBuf::from(dir);
        }
        if let Some(s) = seed {
            self.seed = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{ENV_SEED}='{s}' is not an unsigned integer")))?;
        }
        Ok(())
    }

    /// Applies `REPURPOSE_FIXTURES` and `REPURPOSE_SEED` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        let fixtures = std::env::var(ENV_FIXTURES).ok();
        let seed = std::env::var(ENV_SEED).ok();
        self.apply_overrides(fixtures.as_deref(), seed.as_deref())
    }

    /// Training settings with the run seed applied.
    pub fn train_config(&self, weighted: bool) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            weighted,
            ..self.train.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_k_per_model == 0 {
            return Err(Error::Config("top_k_per_model must be positive".into()));
        }
        self.train.validate()?;
        self.signature.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.evidence.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.survival.tau >= 0.0) {
            return Err(Error::Config("survival.tau must be nonnegative".into()));
        }
        let must_exist = |p: &Path, what: &str| {
            if p.exists() {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} {} does not exist", p.display())))
            }
        };
        must_exist(&self.graph, "graph")?;
        must_exist(&self.fixtures, "fixture directory")?;
        for (p, what) in [
            (&self.names, "names file"),
            (&self.perturbations, "perturbation table"),
            (&self.benchmark, "benchmark"),
            (&self.external_candidates, "external candidate list"),
            (&self.taxonomy, "taxonomy"),
        ] {
            if let Some(p) = p {
                must_exist(p, what)?;
            }
        }
        for c in &self.cohorts {
            must_exist(&c.expression, "expression table")?;
            must_exist(&c.survival, "survival table")?;
            if let Some(r) = &c.response {
                must_exist(r, "response table")?;
            }
        }
        Ok(())
    }
}
