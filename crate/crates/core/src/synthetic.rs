//! Deterministic synthetic inputs: a 20-entity toy graph for training checks
//! and a 60-entity world with fixtures for every provider.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};

use crate::error::{Error, Result};
use crate::evidence::{
    Ablation, EvidenceConfig, Phase, ResourceRecord, ResourceSource, Snippet, SnippetEntry, StageTaxonomy,
    TrialEntry, TrialMeta, TrialStatus,
};
use crate::hake::TrainConfig;
use crate::pathfind::PathScoringConfig;
use crate::pipeline::{CohortConfig, RunConfig};
use crate::signature::{Direction, SignatureConfig};
use crate::survival::SurvivalConfig;

pub const INDICATION: &str = "indication";

const TOY_BLOCKS: [char; 2] = ['A', 'B'];
// (drug, disease) indications held out of the toy graph, per block
const TOY_HELDOUT: [(usize, usize); 4] = [(1, 1), (2, 2), (3, 3), (4, 1)];
const TOY_TARGETS: [(usize, [usize; 2]); 4] = [(1, [1, 2]), (2, [2, 3]), (3, [1, 3]), (4, [1, 2])];
const TOY_ASSOCIATIONS: [(usize, usize); 4] = [(1, 1), (2, 2), (3, 3), (1, 2)];

/// Two disconnected blocks of 3 diseases, 4 drugs and 3 genes: 40 training
/// triples, with 8 indications held out.
pub fn toy_graph_tsv() -> String {
    let mut out = String::new();
    let mut n = 0u64;
    let mut count = || {
        n += 1;
        (n * 7) % 23
    };
    for b in TOY_BLOCKS {
        for x in 1..=4 {
            for d in 1..=3 {
                if !TOY_HELDOUT.contains(&(x, d)) {
                    let _ = writeln!(out, "D{b}{d}\tdisease\t{INDICATION}\tX{b}{x}\tdrug\t{}", count());
                }
            }
        }
        for (x, genes) in TOY_TARGETS {
            for gene in genes {
                let _ = writeln!(out, "X{b}{x}\tdrug\ttarget\tG{b}{gene}\tgene\t{}", count());
            }
        }
        for (gene, d) in TOY_ASSOCIATIONS {
            let _ = writeln!(out, "G{b}{gene}\tgene\tassociated with\tD{b}{d}\tdisease\t{}", count());
        }
    }
    out
}

/// Held-out `(drug, disease)` indications of the toy graph.
pub fn toy_heldout() -> Vec<(String, String)> {
    TOY_BLOCKS
        .iter()
        .flat_map(|b| TOY_HELDOUT.iter().map(move |(x, d)| (format!("X{b}{x}"), format!("D{b}{d}"))))
        .collect()
}

/// The toy graph and its held-out indications as files.
pub fn toy() -> World {
    let mut heldout = String::from("disease\tdrug\n");
    for (x, d) in toy_heldout() {
        let _ = writeln!(heldout, "{d}\t{x}");
    }
    World {
        files: BTreeMap::from([("graph.tsv".to_string(), toy_graph_tsv()), ("heldout.tsv".to_string(), heldout)]),
    }
}

/// Training settings used for the toy graph.
pub fn toy_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        dim: 16,
        epochs: 300,
        batch_size: 40,
        learning_rate: 2.0,
        weight_learning_rate: None,
        negatives_per_positive: 32,
        seed,
        weighted: false,
        lambda: 0.5,
        gamma: 4.0,
        workers: 1,
    }
}

pub const WORLD_SEED: u64 = 20_240_611;
pub const WORLD_DISEASES: [(&str, &str); 3] = [
    ("D01", "amber carcinoma"),
    ("D02", "basalt carcinoma"),
    ("D03", "cobalt carcinoma"),
];
pub const WORLD_DRUG_NAMES: [&str; 25] = [
    "alverine", "bexarotin", "calvidrol", "dasomide", "elmavir", "fentrazole", "galunisib", "hydroxatin",
    "ibranolol", "jorvastin", "kelatrine", "lumefax", "moxibrate", "nortigen", "olvaprim", "pexaline",
    "quinoralt", "rovastide", "sulmetrin", "tavonib", "ulprazole", "vendimab", "woxicept", "xylofen", "zerantib",
];
const PROGRAM_SIZE: usize = 6;
const NEUTRAL_GENES: usize = 7;
const BACKGROUND_GENES: usize = 15;
const SAMPLES: usize = 60;
const CURRENT_YEAR: i32 = 2024;

pub fn world_drug(j: usize) -> String {
    format!("X{:02}", j + 1)
}

fn program_gene(k: usize, i: usize) -> String {
    format!("P{}{}", ['A', 'B', 'C'][k], i + 1)
}

fn neutral_gene(i: usize) -> String {
    format!("NX{}", i + 1)
}

fn background_gene(i: usize) -> String {
    format!("BG{:02}", i + 1)
}

/// Planted efficacy tier (0..=3) of drug `j` in disease `k`; tier 3 pairs are
/// the benchmark indications.
pub fn world_tier(k: usize, j: usize) -> u8 {
    if j < 12 {
        if j % 3 == k {
            3
        } else if (j + k).is_multiple_of(2) {
            2
        } else {
            1
        }
    } else {
        ((j + k) % 3) as u8
    }
}

fn up_genes(j: usize) -> Vec<String> {
    let mut genes = Vec::new();
    for k in 0..3 {
        for i in 0..2 * world_tier(k, j) as usize {
            genes.push(program_gene(k, i));
        }
    }
    genes.push(background_gene(j % BACKGROUND_GENES));
    genes.push(background_gene((j + 5) % BACKGROUND_GENES));
    genes
}

fn down_genes(j: usize) -> Vec<String> {
    vec![
        neutral_gene((j + 3) % NEUTRAL_GENES),
        background_gene((j + 10) % BACKGROUND_GENES),
        background_gene((j + 11) % BACKGROUND_GENES),
    ]
}

fn all_genes() -> Vec<String> {
    let mut g: Vec<String> = (0..3).flat_map(|k| (0..PROGRAM_SIZE).map(move |i| program_gene(k, i))).collect();
    g.extend((0..NEUTRAL_GENES).map(neutral_gene));
    g.extend((0..BACKGROUND_GENES).map(background_gene));
    g
}

/// Generated world files keyed by relative path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub files: BTreeMap<String, String>,
}

impl World {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        for (name, content) in &self.files {
            let path: PathBuf = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn world_graph() -> (String, String) {
    let mut tsv = String::new();
    let mut names = String::new();
    let mut edge = |h: &str, hk: &str, r: &str, t: &str, tk: &str, c: usize| {
        let _ = writeln!(tsv, "{h}\t{hk}\t{r}\t{t}\t{tk}\t{c}");
    };
    for j in 0..25 {
        let x = world_drug(j);
        for (k, (d, _)) in WORLD_DISEASES.iter().enumerate() {
            if world_tier(k, j) == 3 {
                edge(d, "disease", INDICATION, &x, "drug", 40 + 5 * j);
            }
        }
        for k in 0..3 {
            if world_tier(k, j) >= 2 {
                for i in 0..2 {
                    edge(&x, "drug", "target", &program_gene(k, i), "gene", 10 + j);
                }
            }
        }
        edge(&x, "drug", "target", &neutral_gene(j % NEUTRAL_GENES), "gene", 3);
        edge(&x, "drug", "side effect", &format!("PH{}", j % 2 + 1), "phenotype", 1 + j % 4);
    }
    for (k, (d, _)) in WORLD_DISEASES.iter().enumerate() {
        for i in 0..PROGRAM_SIZE {
            let gene = program_gene(k, i);
            edge(&gene, "gene", "associated with", d, "disease", 15 + i);
            edge(&gene, "gene", "member of", &format!("PW_{}", ['A', 'B', 'C'][k]), "pathway", 5);
        }
        edge(d, "disease", "presents with", &format!("PH{}", k % 2 + 1), "phenotype", 8);
    }
    for i in 0..NEUTRAL_GENES {
        let pw = if i < 4 { "PW_N1" } else { "PW_N2" };
        edge(&neutral_gene(i), "gene", "member of", pw, "pathway", 2);
    }
    for (a, b) in [(0, 12), (3, 15), (6, 18)] {
        edge(&world_drug(a), "drug", "synergistic interaction", &world_drug(b), "drug", 4);
    }

    for (d, name) in WORLD_DISEASES {
        let _ = writeln!(names, "{d}\t{name}");
    }
    for (j, name) in WORLD_DRUG_NAMES.iter().enumerate() {
        let _ = writeln!(names, "{}\t{name}", world_drug(j));
    }
    for (pw, name) in [
        ("PW_A", "amber survival program"),
        ("PW_B", "basalt survival program"),
        ("PW_C", "cobalt survival program"),
        ("PW_N1", "housekeeping module one"),
        ("PW_N2", "housekeeping module two"),
    ] {
        let _ = writeln!(names, "{pw}\t{name}");
    }
    let _ = writeln!(names, "PH1\tfatigue");
    let _ = writeln!(names, "PH2\trash");
    (tsv, names)
}

fn perturbations(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("drug\tsignature_id\tgene\tdirection\tdose_value\tdose_unit\tic50_um\n");
    for j in 0..25 {
        let x = world_drug(j);
        let ic50: f64 = 0.5 + 2.0 * rng.gen::<f64>();
        let sets = [(Direction::Up, up_genes(j)), (Direction::Down, down_genes(j))];
        for (dir, genes) in sets {
            let d = match dir {
                Direction::Up => "up",
                Direction::Down => "down",
            };
            for gene in genes {
                let _ = writeln!(out, "{x}\t{x}_S1\t{gene}\t{d}\t1\tuM\t{ic50:.3}");
                let second = if j % 5 == 0 { String::new() } else { format!("{ic50:.3}") };
                let _ = writeln!(out, "{x}\t{x}_S2\t{gene}\t{d}\t10000\tnM\t{second}");
            }
        }
    }
    out
}

struct Cohort {
    expression: String,
    survival: String,
    response: Option<String>,
}

fn cohort(k: usize, means: &[f64], rng: &mut ChaCha8Rng) -> Cohort {
    let genes = all_genes();
    let z_dist = Normal::new(0.0, 1.0).expect("valid");
    let noise = Normal::new(0.0, 0.5).expect("valid");
    let censor = Uniform::new(300.0, 2400.0);
    let d = WORLD_DISEASES[k].0;
    let samples: Vec<String> = (1..=SAMPLES).map(|s| format!("{d}_S{s:02}")).collect();
    let z: Vec<f64> = (0..SAMPLES).map(|_| z_dist.sample(rng)).collect();
    let program: Vec<String> = (0..PROGRAM_SIZE).map(|i| program_gene(k, i)).collect();

    let mut expression = String::from("gene");
    for s in &samples {
        let _ = write!(expression, "\t{s}");
    }
    expression.push('\n');
    for (g, gene) in genes.iter().enumerate() {
        expression.push_str(gene);
        let effect = if program.contains(gene) { 1.0 } else { 0.0 };
        for zs in &z {
            let v = means[g] + effect * zs + noise.sample(rng);
            let _ = write!(expression, "\t{v:.4}");
        }
        expression.push('\n');
    }

    let mut survival = String::from("sample\ttime_days\tevent\n");
    for (s, zs) in samples.iter().zip(&z) {
        let rate = (-1.2 * zs).exp() / 900.0;
        let t = Exp::new(rate).expect("positive rate").sample(rng);
        let c = censor.sample(rng);
        let time = t.min(c).round().max(1.0);
        let _ = writeln!(survival, "{s}\t{time}\t{}", u8::from(t <= c));
    }

    let response = (k == 0).then(|| {
        let mut r = String::from("sample\tresponder\n");
        let n = Normal::new(0.0, 1.0).expect("valid");
        for (s, zs) in samples.iter().zip(&z) {
            let _ = writeln!(r, "{s}\t{}", u8::from(zs + n.sample(rng) > 0.3));
        }
        r
    });
    Cohort {
        expression,
        survival,
        response,
    }
}

fn snippet(source: usize, text: String, genes: Vec<String>) -> Snippet {
    Snippet {
        source: format!("PMID:{}", 30_000_000 + source),
        text,
        genes,
    }
}

fn literature() -> Vec<SnippetEntry> {
    let mut out = Vec::new();
    let mut pmid = 0;
    let mut next = || {
        pmid += 17;
        pmid
    };
    for (k, (d, dname)) in WORLD_DISEASES.iter().enumerate() {
        for j in 0..25 {
            let tier = world_tier(k, j);
            let drug = WORLD_DRUG_NAMES[j];
            let tagged: Vec<usize> = match tier {
                3 => vec![0, 1, 2],
                2 => vec![0, 0],
                1 => vec![3],
                _ => vec![],
            };
            if tagged.is_empty() {
                continue;
            }
            let snippets = tagged
                .iter()
                .map(|&i| {
                    let gene = program_gene(k, i);
                    snippet(
                        next(),
                        format!("{drug} modulated {gene} activity in {dname} models."),
                        vec![gene],
                    )
                })
                .collect();
            out.push(SnippetEntry {
                a: d.to_string(),
                b: world_drug(j),
                count: Some(3 * tier as u64 + 1),
                snippets,
            });
        }
        for i in 0..4 {
            let gene = program_gene(k, i);
            out.push(SnippetEntry {
                a: gene.clone(),
                b: d.to_string(),
                count: None,
                snippets: vec![snippet(next(), format!("{gene} expression tracks outcome in {dname}."), vec![gene])],
            });
        }
    }
    out
}

fn labels() -> BTreeMap<String, BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for j in 0..25 {
        let approved: Vec<&str> = (0..3)
            .filter(|&k| world_tier(k, j) == 3)
            .map(|k| WORLD_DISEASES[k].1)
            .collect();
        let mut label = BTreeMap::new();
        if !approved.is_empty() {
            label.insert(
                "indications_and_usage".to_string(),
                format!("Indicated for the treatment of {}.", approved.join(" and ")),
            );
            label.insert("warnings".to_string(), "Monitor liver enzymes.".to_string());
        } else if j % 4 == 0 {
            label.insert("indications_and_usage".to_string(), "Indicated for chronic hypertension.".to_string());
        }
        if !label.is_empty() {
            out.insert(world_drug(j), label);
        }
    }
    out
}

fn trial(id: String, phase: Phase, status: TrialStatus, start: i32, results: Option<bool>) -> TrialMeta {
    TrialMeta {
        nct_id: id,
        phase,
        status,
        has_results: results.is_some(),
        results_positive: results,
        start_year: start,
        completion_year: (status == TrialStatus::Completed).then_some(start + 3),
        current_year: CURRENT_YEAR,
        months_since_completion: None,
    }
}

fn trials() -> Vec<TrialEntry> {
    let mut out = Vec::new();
    for (k, (d, _)) in WORLD_DISEASES.iter().enumerate() {
        for j in 0..25 {
            let id = format!("NCT09{}{j:03}", k + 1);
            let t = match world_tier(k, j) {
                3 => vec![trial(id, Phase::Three, TrialStatus::Completed, 2015, Some(true))],
                2 if j >= 12 && j % 5 == 0 => vec![trial(id, Phase::Two, TrialStatus::Recruiting, 2021, None)],
                1 if j == 14 => vec![trial(id, Phase::One, TrialStatus::Terminated, 2019, Some(false))],
                _ => continue,
            };
            out.push(TrialEntry {
                disease: d.to_string(),
                drug: world_drug(j),
                trials: t,
            });
        }
    }
    out
}

fn resources() -> Vec<ResourceRecord> {
    let mut out = Vec::new();
    for (k, (d, _)) in WORLD_DISEASES.iter().enumerate() {
        for i in 0..PROGRAM_SIZE {
            out.push(ResourceRecord {
                gene: program_gene(k, i),
                partner: d.to_string(),
                source: ResourceSource::Ctd,
                relation_type: "marker/mechanism".into(),
                support_count: Some(3 + i as u64),
                direction: None,
            });
        }
    }
    for j in 0..25 {
        for k in 0..3 {
            if world_tier(k, j) >= 2 {
                for i in 0..2 {
                    out.push(ResourceRecord {
                        gene: program_gene(k, i),
                        partner: world_drug(j),
                        source: ResourceSource::DgIdb,
                        relation_type: "inhibitor".into(),
                        support_count: Some(2),
                        direction: None,
                    });
                }
            }
        }
        for gene in up_genes(j).into_iter().filter(|g| g.starts_with('P')) {
            out.push(ResourceRecord {
                gene,
                partner: world_drug(j),
                source: ResourceSource::Lincs,
                relation_type: "expression".into(),
                support_count: None,
                direction: Some(Direction::Up),
            });
        }
    }
    out
}

fn term_library() -> String {
    let mut out = String::new();
    for (k, (_, dname)) in WORLD_DISEASES.iter().enumerate() {
        let genes: Vec<String> = (0..PROGRAM_SIZE).map(|i| program_gene(k, i)).collect();
        let _ = writeln!(out, "PW_{}\t{dname} survival program\t{}", ['A', 'B', 'C'][k], genes.join("\t"));
    }
    let n1: Vec<String> = (0..4).map(neutral_gene).chain((0..4).map(background_gene)).collect();
    let n2: Vec<String> = (4..7).map(neutral_gene).chain((4..9).map(background_gene)).collect();
    let n3: Vec<String> = (9..15).map(background_gene).collect();
    let _ = writeln!(out, "PW_N1\thousekeeping module one\t{}", n1.join("\t"));
    let _ = writeln!(out, "PW_N2\thousekeeping module two\t{}", n2.join("\t"));
    let _ = writeln!(out, "PW_N3\tribosome biogenesis\t{}", n3.join("\t"));
    out
}

fn benchmark() -> String {
    let mut out = String::from("disease_id\tdisease_name\tdrug_name\tcategory\n");
    for (k, (d, dname)) in WORLD_DISEASES.iter().enumerate() {
        for (j, drug) in WORLD_DRUG_NAMES.iter().enumerate() {
            let category = match world_tier(k, j) {
                3 => "indication",
                0 if j % 4 == 1 => "contraindication",
                _ => continue,
            };
            let _ = writeln!(out, "{d}\t{dname}\t{drug}\t{category}");
        }
    }
    out
}

fn external_candidates() -> String {
    let mut out = String::new();
    for (k, (d, _)) in WORLD_DISEASES.iter().enumerate() {
        let _ = writeln!(out, "{d}\t{}", WORLD_DRUG_NAMES[k]);
        for j in 12..20 {
            let _ = writeln!(out, "{d}\t{}", WORLD_DRUG_NAMES[j]);
        }
    }
    out
}

/// Run configuration shipped with the world.
pub fn world_config() -> RunConfig {
    let diseases: Vec<String> = WORLD_DISEASES.iter().map(|(_, n)| n.to_string()).collect();
    RunConfig {
        graph: "graph.tsv".into(),
        names: Some("names.tsv".into()),
        kge_checkpoint: "kge.json".into(),
        kgwe_checkpoint: "kgwe.json".into(),
        fixtures: ".".into(),
        perturbations: Some("perturbations.tsv".into()),
        cohorts: WORLD_DISEASES
            .iter()
            .enumerate()
            .map(|(k, (d, _))| CohortConfig {
                disease: d.to_string(),
                expression: format!("expression_{d}.tsv").into(),
                survival: format!("survival_{d}.tsv").into(),
                response: (k == 0).then(|| format!("response_{d}.tsv").into()),
            })
            .collect(),
        benchmark: Some("benchmark.tsv".into()),
        external_candidates: Some("external_candidates.tsv".into()),
        taxonomy: Some("taxonomy.json".into()),
        diseases: diseases.clone(),
        subtypes: diseases,
        indication_relation: INDICATION.into(),
        top_k_per_model: 10,
        output_dir: "out".into(),
        train: TrainConfig {
            dim: 16,
            epochs: 500,
            batch_size: 256,
            learning_rate: 1.0,
            weight_learning_rate: None,
            negatives_per_positive: 16,
            seed: 0,
            weighted: false,
            lambda: 0.5,
            gamma: 6.0,
            workers: 1,
        },
        signature: SignatureConfig::default(),
        survival: SurvivalConfig::default(),
        evidence: EvidenceConfig {
            paths: PathScoringConfig {
                mu: 6.0,
                sigma: 2.0,
                ..PathScoringConfig::default()
            },
            ..EvidenceConfig::default()
        },
        fda_filter: false,
        stage_allowlist: None,
        ablation: Ablation::None,
        seed: 7,
        serial: true,
    }
}

/// The full rehearsal world generated from [`WORLD_SEED`].
pub fn world() -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(WORLD_SEED);
    let mut files = BTreeMap::new();
    let (graph, names) = world_graph();
    files.insert("graph.tsv".into(), graph);
    files.insert("names.tsv".into(), names);
    files.insert("perturbations.tsv".into(), perturbations(&mut rng));
    let means: Vec<f64> = all_genes().iter().map(|_| rng.gen_range(4.0..10.0)).collect();
    for k in 0..3 {
        let d = WORLD_DISEASES[k].0;
        let c = cohort(k, &means, &mut rng);
        files.insert(format!("expression_{d}.tsv"), c.expression);
        files.insert(format!("survival_{d}.tsv"), c.survival);
        if let Some(r) = c.response {
            files.insert(format!("response_{d}.tsv"), r);
        }
    }
    files.insert(crate::evidence::SNIPPETS_FILE.into(), to_json(&literature()));
    files.insert(crate::evidence::LABELS_FILE.into(), to_json(&labels()));
    files.insert(crate::evidence::TRIALS_FILE.into(), to_json(&trials()));
    files.insert(crate::evidence::GENE_RESOURCES_FILE.into(), to_json(&resources()));
    files.insert(crate::evidence::TERMS_FILE.into(), term_library());
    files.insert("benchmark.tsv".into(), benchmark());
    files.insert("external_candidates.tsv".into(), external_candidates());
    files.insert("taxonomy.json".into(), to_json(&StageTaxonomy::default_config()));
    files.insert("config.json".into(), to_json(&world_config()));
    files.insert(
        "README.md".into(),
        format!(
            "# Rehearsal world\n\nGenerated by `repurpose make-world` from seed {WORLD_SEED}. Do not edit by hand; \
             regenerate instead.\n\nTrain the checkpoints with `repurpose train --run config.json`, then run \
             `run`, `eval-recall`, `eval-survival`, `ablate` and `subtype-pca` with `--config config.json`.\n"
        ),
    );
    World { files }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::parse_graph;

    #[test]
    fn toy_graph_shape() {
        let g = parse_graph(&toy_graph_tsv(), Path::new("toy")).unwrap();
        assert_eq!(g.num_entities(), 20);
        assert_eq!(g.num_triples(), 40);
        assert_eq!(toy_heldout().len(), 8);
        for (x, d) in toy_heldout() {
            let (xi, di) = (g.entity_index(&x).unwrap(), g.entity_index(&d).unwrap());
            assert!(!g.contains(di, g.relation_index(INDICATION).unwrap(), xi));
        }
    }

    #[test]
    fn world_graph_shape() {
        let (tsv, _) = world_graph();
        let g = parse_graph(&tsv, Path::new("world")).unwrap();
        assert_eq!(g.num_entities(), 60);
        assert_eq!(g.entities_of_kind(crate::kg::EntityKind::Drug).len(), 25);
        assert_eq!(g.entities_of_kind(crate::kg::EntityKind::Disease).len(), 3);
    }

    #[test]
    fn four_indications_per_disease() {
        for k in 0..3 {
            assert_eq!((0..25).filter(|&j| world_tier(k, j) == 3).count(), 4);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(world(), world());
    }
}
