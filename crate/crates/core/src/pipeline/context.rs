use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evidence::{FixtureProviders, StageTaxonomy};
use crate::hake::Model;
use crate::kg::{load_graph, load_names, map_disease, EntityKind, Graph, TrigramEncoder};
use crate::signature::{build_signature, load_records, DrugSignature, PerturbationRecord};
use crate::survival::{load_survival, ExpressionMatrix, SurvivalRecords};

use super::RunConfig;

/// Expression, survival and optional response labels for one disease.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub expression: ExpressionMatrix,
    pub survival: SurvivalRecords,
    pub response: Option<BTreeMap<String, bool>>,
}

/// One gold row of the benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkRow {
    pub disease_id: String,
    pub disease_name: String,
    pub drug_name: String,
    pub category: String,
}

/// Everything a run reads, loaded once and shared read-only across pairs.
pub struct Context {
    pub cfg: RunConfig,
    pub graph: Graph,
    pub kge: Model,
    pub kgwe: Model,
    pub fixtures: FixtureProviders,
    pub taxonomy: StageTaxonomy,
    /// Keyed by drug entity id.
    pub signatures: BTreeMap<String, DrugSignature>,
    /// Keyed by disease entity id.
    pub cohorts: BTreeMap<String, Cohort>,
    /// Resolved `(disease id, drug id)` pairs from the external list.
    pub external: BTreeSet<(String, String)>,
    pub warnings: Vec<String>,
}

/// Loads a triple TSV or a `.json` graph cache, then applies a names file.
pub fn load_graph_with_names(graph: &Path, names: Option<&Path>) -> Result<Graph> {
    let mut g = if graph.extension().is_some_and(|e| e == "json") {
        Graph::load_cache(graph)?
    } else {
        load_graph(graph)?
    };
    if let Some(names) = names {
        let pairs = load_names(names)?;
        g.set_names(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
    }
    Ok(g)
}

fn load_model(path: &Path, what: &str) -> Result<Model> {
    if !path.exists() {
        return Err(Error::Config(format!(
            "{what} checkpoint {} does not exist; run `train` first",
            path.display()
        )));
    }
    Model::load(path)
}

/// Resolves an entity id or exact display name of the given kind.
pub fn resolve_entity(g: &Graph, text: &str, kind: EntityKind) -> Option<String> {
    let text = text.trim();
    if let Some(i) = g.entity_index(text) {
        if g.entity(i).kind == kind {
            return Some(text.to_string());
        }
    }
    g.lookup_name(text)
        .iter()
        .filter(|&&i| g.entity(i).kind == kind)
        .map(|&i| g.entity(i).id.clone())
        .min()
}

/// Disease id for free text: an id, an exact name, or the nearest name.
pub fn resolve_disease(g: &Graph, text: &str) -> Result<String> {
    match resolve_entity(g, text, EntityKind::Disease) {
        Some(id) => Ok(id),
        None => map_disease(g, text, &TrigramEncoder::default()),
    }
}

/// Reads `sample<TAB>responder(0/1)`, skipping a non-numeric header row.
pub fn load_response(path: &Path) -> Result<BTreeMap<String, bool>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let (sample, flag) = line.split_once('\t').ok_or_else(|| parse_err("expected 'sample<TAB>responder'"))?;
        let flag = match flag.trim() {
            "1" => true,
            "0" => false,
            _ if i == 0 => continue,
            other => return Err(parse_err(&format!("responder must be 0 or 1, got '{other}'"))),
        };
        out.insert(sample.trim().to_string(), flag);
    }
    Ok(out)
}

/// Reads the benchmark TSV and keeps only `indication` rows.
pub fn load_benchmark(path: &Path) -> Result<Vec<BenchmarkRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        if rec.len() < 4 {
            return Err(Error::Data(format!(
                "{}: benchmark rows need disease_id, disease_name, drug_name, category",
                path.display()
            )));
        }
        if rec[3].trim() != "indication" {
            continue;
        }
        out.push(BenchmarkRow {
            disease_id: rec[0].trim().to_string(),
            disease_name: rec[1].trim().to_string(),
            drug_name: rec[2].trim().to_string(),
            category: rec[3].trim().to_string(),
        });
    }
    Ok(out)
}

/// Reads `disease<TAB>drug` rows, each given as an id or a name.
pub fn load_external(path: &Path, g: &Graph, warnings: &mut Vec<String>) -> Result<BTreeSet<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (d, x) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: "expected 'disease<TAB>drug'".into(),
        })?;
        match (resolve_entity(g, d, EntityKind::Disease), resolve_entity(g, x, EntityKind::Drug)) {
            (Some(d), Some(x)) => {
                out.insert((d, x));
            }
            _ => {
                let msg = format!("external candidate '{}' / '{}' not in graph", d.trim(), x.trim());
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    Ok(out)
}

fn signatures(
    records: Vec<PerturbationRecord>,
    g: &Graph,
    cfg: &RunConfig,
    warnings: &mut Vec<String>,
) -> Result<BTreeMap<String, DrugSignature>> {
    let mut by_drug: BTreeMap<String, Vec<PerturbationRecord>> = BTreeMap::new();
    for mut r in records {
        match resolve_entity(g, &r.drug, EntityKind::Drug) {
            Some(id) => {
                r.drug = id.clone();
                by_drug.entry(id).or_default().push(r);
            }
            None => {
                if !warnings.iter().any(|w| w.contains(&format!("'{}'", r.drug))) {
                    warnings.push(format!("perturbation drug '{}' not in graph", r.drug));
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (id, recs) in by_drug {
        out.insert(id, build_signature(&recs, &cfg.signature)?);
    }
    Ok(out)
}

impl Context {
    /// Validates `cfg` and loads every input it names.
    pub fn load(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let graph = load_graph_with_names(&cfg.graph, cfg.names.as_deref())?;
        let kge = load_model(&cfg.kge_checkpoint, "KGE")?;
        let kgwe = load_model(&cfg.kgwe_checkpoint, "KGwE")?;
        let fixtures = FixtureProviders::load(&cfg.fixtures)?;
        let taxonomy = match &cfg.taxonomy {
            Some(p) => StageTaxonomy::load(p)?,
            None => StageTaxonomy::default_config(),
        };
        let mut warnings = Vec::new();
        let signatures = match &cfg.perturbations {
            Some(p) => signatures(load_records(p)?, &graph, &cfg, &mut warnings)?,
            None => BTreeMap::new(),
        };
        let mut cohorts = BTreeMap::new();
        for c in &cfg.cohorts {
            let disease = resolve_disease(&graph, &c.disease)?;
            let cohort = Cohort {
                expression: ExpressionMatrix::load(&c.expression)?,
                survival: load_survival(&c.survival)?,
                response: c.response.as_deref().map(load_response).transpose()?,
            };
            if cohorts.insert(disease.clone(), cohort).is_some() {
                return Err(Error::Config(format!("two cohorts map to disease {disease}")));
            }
        }
        let external = match &cfg.external_candidates {
            Some(p) => load_external(p, &graph, &mut warnings)?,
            None => BTreeSet::new(),
        };
        Ok(Context {
            cfg,
            graph,
            kge,
            kgwe,
            fixtures,
            taxonomy,
            signatures,
            cohorts,
            external,
            warnings,
        })
    }

    pub fn entity_name(&self, id: &str) -> String {
        self.graph
            .entity_index(id)
            .map_or_else(|| id.to_string(), |i| self.graph.entity(i).name.clone())
    }
}
