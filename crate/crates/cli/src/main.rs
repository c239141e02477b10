use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use repurpose::evidence::{assemble_profile, Ablation, FixtureProviders, Providers, Reasoner, RuleReasoner};
use repurpose::hake::{rank_drugs, train, Model, TrainConfig};
use repurpose::kg::{load_graph, load_names};
use repurpose::pathfind::{build_subgraph, PathRecord, PathScoringConfig};
use repurpose::pipeline::{
    evaluate_ablation, evaluate_recall, evaluate_response, evaluate_survival_alignment, load_benchmark,
    load_graph_with_names, rescore, resolve_disease, run_pipeline, subtype_profile, write_ablation, write_recall,
    write_response, write_run, write_subtype, write_survival, Context, RunConfig, RunOutput, ENV_FIXTURES, ENV_SEED,
};
use repurpose::signature::{build_signature, load_records, DrugSignature, SignatureConfig};
use repurpose::survival::{hazard_for_pair, km_curve, load_survival, ExpressionMatrix, SurvivalConfig};
use repurpose::synthetic;
use repurpose::{Error, Result};

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "repurpose", version, about = "Drug repurposing evidence pipeline")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a triple TSV into a JSON graph cache.
    Ingest {
        #[arg(long)]
        triples: PathBuf,
        /// Optional `id<TAB>name` display names.
        #[arg(long)]
        names: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one checkpoint, or both checkpoints of a run config.
    Train {
        /// Graph TSV or JSON cache.
        #[arg(long, required_unless_present = "run")]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
        weighted: bool,
        /// Training hyperparameters (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "run")]
        out: Option<PathBuf>,
        /// Run config; trains the KGE and KGwE checkpoints it names.
        #[arg(long, conflicts_with_all = ["graph", "out", "config"])]
        run: Option<PathBuf>,
        #[arg(long, env = ENV_SEED)]
        seed: Option<u64>,
    },
    /// Top-K drugs for a disease under one checkpoint.
    Rank {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        disease: String,
        #[arg(long, default_value = "indication")]
        relation: String,
        #[arg(long, default_value_t = 100)]
        top: usize,
    },
    /// Scored shortest paths between a drug and a disease.
    Paths {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        disease: String,
        #[arg(long)]
        drug: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Build a drug signature from perturbation records.
    Signature {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        drug: String,
        #[arg(long)]
        out: PathBuf,
        /// Signature parameters (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Hazard ratio of a signature in one cohort.
    Survive {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        surv: PathBuf,
        #[arg(long)]
        signature: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        tau: f64,
    },
    /// Rule-scored verdict for one disease,drug pair.
    Score {
        /// `disease,drug` ids.
        #[arg(long)]
        pair: String,
        #[arg(long, env = ENV_FIXTURES)]
        fixtures: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        names: Option<PathBuf>,
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        signature: Option<PathBuf>,
        #[arg(long, default_value = "none")]
        ablation: String,
    },
    /// Full pipeline: ranked CSV and per-pair dossiers.
    Run(ConfigArgs),
    /// Recall of benchmark indications per candidate configuration.
    EvalRecall(ConfigArgs),
    /// Correlation of scores with hazard ratios, and response AUCs.
    EvalSurvival(ConfigArgs),
    /// Leave-one-evidence-out re-scoring.
    Ablate(ConfigArgs),
    /// PCA of confidence profiles across subtypes.
    SubtypePca(ConfigArgs),
    /// Write the synthetic rehearsal world.
    MakeWorld {
        #[arg(long)]
        out: PathBuf,
        /// Also train both checkpoints.
        #[arg(long, conflicts_with = "toy")]
        train: bool,
        /// Write the 20-entity toy graph instead.
        #[arg(long)]
        toy: bool,
    },
}

#[derive(clap::Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_DATA
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_run_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply_env()?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run_code(out: &RunOutput) -> u8 {
    if out.has_failures() {
        eprintln!("{} pair(s) failed; see failures.csv", out.failures.len());
        EXIT_PARTIAL
    } else {
        0
    }
}

fn report_warnings(out: &RunOutput) {
    for w in &out.warnings {
        log::warn!("{w}");
    }
    if out.pairs.is_empty() {
        log::warn!("run produced no pairs");
    }
}

fn train_one(g: &repurpose::kg::Graph, cfg: &TrainConfig, out: &Path) -> Result<()> {
    let outcome = train(g, cfg)?;
    if let Some(last) = outcome.epoch_losses.last() {
        log::info!("trained {} epochs, final loss {last:.6}", outcome.epoch_losses.len());
    }
    Model::new(outcome.params, &outcome.weights, g, cfg.weighted).save(out)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn train_run(path: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply_env()?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.train.validate()?;
    let g = load_graph_with_names(&cfg.graph, cfg.names.as_deref())?;
    train_one(&g, &cfg.train_config(false), &cfg.kge_checkpoint)?;
    train_one(&g, &cfg.train_config(true), &cfg.kgwe_checkpoint)
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Ingest { triples, names, out } => {
            let mut g = load_graph(&triples)?;
            if let Some(n) = names {
                let pairs = load_names(&n)?;
                g.set_names(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
            }
            g.save_cache(&out)?;
            eprintln!(
                "{} entities, {} triples -> {}",
                g.num_entities(),
                g.num_triples(),
                out.display()
            );
        }
        Command::Train {
            graph,
            weighted,
            config,
            out,
            run,
            seed,
        } => match run {
            Some(run) => train_run(&run, seed)?,
            None => {
                let graph = graph.ok_or_else(|| Error::Config("--graph is required".into()))?;
                let out = out.ok_or_else(|| Error::Config("--out is required".into()))?;
                let mut cfg: TrainConfig = match config {
                    Some(p) => read_json(&p)?,
                    None => TrainConfig::default(),
                };
                cfg.weighted = weighted;
                if let Some(s) = seed {
                    cfg.seed = s;
                }
                let g = load_graph_with_names(&graph, None)?;
                train_one(&g, &cfg, &out)?;
            }
        },
        Command::Rank {
            ckpt,
            disease,
            relation,
            top,
        } => {
            let model = Model::load(&ckpt)?;
            let ranked = rank_drugs(&model.params, &disease, &relation, top)?;
            let rows: Vec<_> = ranked
                .into_iter()
                .map(|(drug, score)| json!({"drug": drug, "score": score}))
                .collect();
            print_json(&rows)?;
        }
        Command::Paths {
            ckpt,
            graph,
            disease,
            drug,
            mu,
            sigma,
            top,
        } => {
            let model = Model::load(&ckpt)?;
            let g = load_graph_with_names(&graph, None)?;
            let mut cfg = PathScoringConfig::default();
            if let Some(m) = mu {
                cfg.mu = m;
            }
            if let Some(s) = sigma {
                cfg.sigma = s;
            }
            if let Some(t) = top {
                cfg.max_paths = t;
            }
            cfg.validate()?;
            let paths: Vec<PathRecord> = build_subgraph(&g, &model.params, &drug, &disease, &cfg)?
                .iter()
                .map(|sp| PathRecord::new(sp, &g))
                .collect();
            print_json(&paths)?;
        }
        Command::Signature {
            records,
            drug,
            out,
            config,
        } => {
            let cfg: SignatureConfig = match config {
                Some(p) => read_json(&p)?,
                None => SignatureConfig::default(),
            };
            let recs: Vec<_> = load_records(&records)?.into_iter().filter(|r| r.drug == drug).collect();
            if recs.is_empty() {
                return Err(Error::Data(format!("no perturbation records for drug '{drug}'")));
            }
            let sig = build_signature(&recs, &cfg)?;
            sig.save(&out)?;
            eprintln!("{} up, {} down -> {}", sig.up.len(), sig.down.len(), out.display());
        }
        Command::Survive {
            expr,
            surv,
            signature,
            tau,
        } => {
            let m = ExpressionMatrix::load(&expr)?;
            let s = load_survival(&surv)?;
            let sig = DrugSignature::load(&signature)?;
            let cfg = SurvivalConfig {
                tau,
                ..SurvivalConfig::default()
            };
            let r = hazard_for_pair(&m, &sig, &s, &cfg)?;
            let km = |ids: &[String]| -> Result<Vec<(f64, f64)>> {
                if ids.is_empty() {
                    Ok(Vec::new())
                } else {
                    km_curve(ids, &s)
                }
            };
            let fit = r.outcome.fit();
            print_json(&json!({
                "es": r.es,
                "nes": r.nes,
                "groups": {"high": r.cohort.high, "low": r.cohort.low},
                "eligibility": r.eligibility,
                "hr": fit.map(|f| f.hr),
                "p": fit.map(|f| f.p),
                "outcome": r.outcome,
                "km": {"high": km(&r.cohort.high)?, "low": km(&r.cohort.low)?},
            }))?;
        }
        Command::Score {
            pair,
            fixtures,
            graph,
            names,
            ckpt,
            signature,
            ablation,
        } => {
            let (disease, drug) = pair
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("--pair must be 'disease,drug', got '{pair}'")))?;
            let ablation: Ablation = ablation.parse()?;
            let g = load_graph_with_names(&graph, names.as_deref())?;
            let disease = resolve_disease(&g, disease.trim())?;
            let model = Model::load(&ckpt)?;
            let fx = FixtureProviders::load(&fixtures)?;
            let sig = signature.as_deref().map(DrugSignature::load).transpose()?;
            let profile = assemble_profile(
                &disease,
                drug.trim(),
                &g,
                &model.params,
                &Providers::from_fixtures(&fx),
                sig.as_ref(),
                &Default::default(),
            )?;
            let verdict = if ablation == Ablation::None {
                RuleReasoner.assess(&profile)?
            } else {
                rescore(&profile, ablation)?
            };
            print_json(&verdict)?;
        }
        Command::Run(args) => {
            let cfg = load_run_config(&args)?;
            let ctx = Context::load(cfg)?;
            let out = run_pipeline(&ctx)?;
            report_warnings(&out);
            write_run(&out, &ctx.cfg.output_dir)?;
            eprintln!(
                "{} pairs ({} filtered) -> {}",
                out.pairs.len(),
                out.filtered_out,
                ctx.cfg.output_dir.join("ranked.csv").display()
            );
            return Ok(run_code(&out));
        }
        Command::EvalRecall(args) => {
            let cfg = load_run_config(&args)?;
            let bench = cfg
                .benchmark
                .clone()
                .ok_or_else(|| Error::Config("config has no benchmark".into()))?;
            let ctx = Context::load(cfg)?;
            let report = evaluate_recall(&ctx, &load_benchmark(&bench)?)?;
            write_recall(&report, &ctx.cfg.output_dir)?;
            for r in &report.rows {
                println!("{:<10} {}/{} = {:.4}", r.config, r.recovered, r.gold, r.recall);
            }
            if !report.skipped.is_empty() {
                for s in &report.skipped {
                    log::warn!("{s}");
                }
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::EvalSurvival(args) => {
            let ctx = Context::load(load_run_config(&args)?)?;
            let out = run_pipeline(&ctx)?;
            report_warnings(&out);
            let a = evaluate_survival_alignment(&out)?;
            write_survival(&a, &ctx.cfg.output_dir)?;
            write_response(&evaluate_response(&ctx, &out)?, &ctx.cfg.output_dir)?;
            match &a.pooled.correlation {
                Some(c) => println!("pooled spearman r = {:.4} (p = {:.4}, n = {})", c.r, c.p, a.pooled.n),
                None => println!("insufficient eligible pairs (n = {})", a.pooled.n),
            }
            return Ok(run_code(&out));
        }
        Command::Ablate(args) => {
            let ctx = Context::load(load_run_config(&args)?)?;
            let out = run_pipeline(&ctx)?;
            report_warnings(&out);
            let r = evaluate_ablation(&out)?;
            write_ablation(&r, &ctx.cfg.output_dir)?;
            for s in &r.summary {
                let r = s.survival.correlation.map(|c| format!("{:.4}", c.r)).unwrap_or_else(|| "NA".into());
                println!("{:<13} survival r = {r}", s.ablation.as_str());
            }
            return Ok(run_code(&out));
        }
        Command::SubtypePca(args) => {
            let ctx = Context::load(load_run_config(&args)?)?;
            let p = subtype_profile(&ctx)?;
            write_subtype(&p, &ctx, &ctx.cfg.output_dir)?;
            let ratios: BTreeMap<String, f64> = p
                .pca
                .explained_variance_ratio
                .iter()
                .enumerate()
                .map(|(i, r)| (format!("pc{}", i + 1), *r))
                .collect();
            println!("{} shared drugs; explained variance {ratios:?}", p.drugs.len());
        }
        Command::MakeWorld { out, train, toy } => {
            if toy {
                synthetic::toy().write_to(&out)?;
                eprintln!("wrote toy graph to {}", out.display());
                return Ok(0);
            }
            synthetic::world().write_to(&out)?;
            eprintln!("wrote world to {}", out.display());
            if train {
                train_run(&out.join("config.json"), None)?;
            }
        }
    }
    Ok(0)
}
