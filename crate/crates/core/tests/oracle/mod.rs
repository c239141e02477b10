//! Reference implementations and random instance generators shared by the
//! integration tests and the acceptance suite. A reference never calls the
//! routine it checks.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use repurpose::evidence::{Phase, ResultStatus, TrialMeta, TrialStatus};
use repurpose::hake::{loss_and_grad, loss_batch, HakeParams, NegativePair, TripleWeights};
use repurpose::kg::{parse_graph, Graph, Triple, SYNERGISTIC_INTERACTION};
use repurpose::signature::{DoseUnit, Direction, DrugSignature, GeneScore, PerturbationRecord, SignatureConfig};

pub fn graph(tsv: &str) -> Graph {
    parse_graph(tsv, Path::new("oracle.tsv")).expect("oracle graph parses")
}

// ---------------------------------------------------------------- gradients

pub struct LossInstance {
    pub params: HakeParams,
    pub weights: TripleWeights,
    pub triples: Vec<Triple>,
    pub pairs: Vec<NegativePair>,
}

/// A small random graph, random embeddings of dimension `dim`, random
/// weights and random (not necessarily unseen) negatives.
pub fn random_loss_instance<R: Rng>(rng: &mut R, dim: usize) -> LossInstance {
    let n_ent = rng.gen_range(3..=6);
    let rels = ["r0", "r1"];
    let mut tsv = String::new();
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..rng.gen_range(2..=6) {
        let h = rng.gen_range(0..n_ent);
        let t = (h + rng.gen_range(1..n_ent)) % n_ent;
        let r = rels[rng.gen_range(0..2)];
        if seen.insert((h, r, t)) {
            tsv.push_str(&format!("E{h}\tgene\t{r}\tE{t}\tgene\t{}\n", rng.gen_range(0..50)));
        }
    }
    let g = graph(&tsv);
    let lambda = rng.gen_range(0.1..2.0);
    let gamma = rng.gen_range(0.0..6.0);
    let params = HakeParams::random(&g, dim, lambda, gamma, rng).expect("random params");
    let triples = g.triples().to_vec();
    let weights = TripleWeights {
        w: (0..triples.len()).map(|_| rng.gen_range(0.05..1.0)).collect(),
        w0: vec![1.0; triples.len()],
    };
    let ne = g.num_entities();
    let nr = g.relations().len();
    let mut pairs = Vec::new();
    for (i, _) in triples.iter().enumerate() {
        for _ in 0..rng.gen_range(1..=3) {
            pairs.push(NegativePair {
                positive: i,
                negative: Triple {
                    head: rng.gen_range(0..ne),
                    relation: rng.gen_range(0..nr),
                    tail: rng.gen_range(0..ne),
                    article_count: 0,
                },
            });
        }
    }
    LossInstance {
        params,
        weights,
        triples,
        pairs,
    }
}

/// `|a - n| / max(|a|, |n|, floor)`.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Largest relative error between `loss_and_grad` and central differences
/// of `loss_batch`, over every embedding coordinate and every positive
/// triple weight.
pub fn max_gradient_error(inst: &LossInstance, h: f64, floor: f64) -> f64 {
    let analytic = loss_and_grad(&inst.params, &inst.weights, &inst.triples, &inst.pairs).expect("gradient");
    let g = &analytic.grads;
    let d = inst.params.dim;
    let mut worst = 0.0f64;
    let mut check = |a: f64, n: f64| worst = worst.max(relative_error(a, n, floor));

    type Table = fn(&mut HakeParams) -> &mut Vec<f64>;
    let tables: [(Table, usize); 4] = [
        (|p| &mut p.ent_mod, 0),
        (|p| &mut p.ent_phase, 1),
        (|p| &mut p.rel_mod, 2),
        (|p| &mut p.rel_phase, 3),
    ];
    for (table, which) in tables {
        let len = table(&mut inst.params.clone()).len();
        for idx in 0..len {
            let numeric = {
                let mut plus = inst.params.clone();
                table(&mut plus)[idx] += h;
                let mut minus = inst.params.clone();
                table(&mut minus)[idx] -= h;
                let lp = loss_batch(&plus, &inst.weights, &inst.triples, &inst.pairs).unwrap();
                let lm = loss_batch(&minus, &inst.weights, &inst.triples, &inst.pairs).unwrap();
                (lp - lm) / (2.0 * h)
            };
            let (row, k) = (idx / d, idx % d);
            let a = match which {
                0 => g.ent_mod_at(row, k),
                1 => g.ent_phase_at(row, k),
                2 => g.rel_mod_at(row, k),
                _ => g.rel_phase_at(row, k),
            };
            check(a, numeric);
        }
    }
    for j in 0..inst.weights.len() {
        let mut plus = inst.weights.clone();
        plus.w[j] += h;
        let mut minus = inst.weights.clone();
        minus.w[j] -= h;
        let lp = loss_batch(&inst.params, &plus, &inst.triples, &inst.pairs).unwrap();
        let lm = loss_batch(&inst.params, &minus, &inst.triples, &inst.pairs).unwrap();
        check(g.weight_at(j), (lp - lm) / (2.0 * h));
    }
    worst
}

// -------------------------------------------------------------------- paths

/// `(nodes, edges, forward)` of one path.
pub type PathKey = (Vec<usize>, Vec<usize>, Vec<bool>);

/// Every minimum-hop simple path from `s` to `t`, found by enumerating all
/// simple paths over the raw triple list and keeping the shortest.
pub fn brute_shortest_paths(g: &Graph, s: usize, t: usize, excluded: &[&str]) -> Vec<PathKey> {
    let mut all = Vec::new();
    let mut nodes = vec![s];
    let mut edges = Vec::new();
    let mut fwd = Vec::new();
    dfs(g, t, excluded, &mut nodes, &mut edges, &mut fwd, &mut all);
    let Some(min) = all.iter().map(|p: &PathKey| p.1.len()).min() else {
        return Vec::new();
    };
    let mut out: Vec<PathKey> = all.into_iter().filter(|p| p.1.len() == min).collect();
    out.sort();
    out
}

fn dfs(
    g: &Graph,
    t: usize,
    excluded: &[&str],
    nodes: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    fwd: &mut Vec<bool>,
    out: &mut Vec<PathKey>,
) {
    let u = *nodes.last().unwrap();
    if u == t {
        out.push((nodes.clone(), edges.clone(), fwd.clone()));
        return;
    }
    for (i, tr) in g.triples().iter().enumerate() {
        if excluded.contains(&g.relation_name(tr.relation)) || tr.head == tr.tail {
            continue;
        }
        let step = if tr.head == u {
            Some((tr.tail, true))
        } else if tr.tail == u {
            Some((tr.head, false))
        } else {
            None
        };
        if let Some((v, forward)) = step {
            if nodes.contains(&v) {
                continue;
            }
            nodes.push(v);
            edges.push(i);
            fwd.push(forward);
            dfs(g, t, excluded, nodes, edges, fwd, out);
            nodes.pop();
            edges.pop();
            fwd.pop();
        }
    }
}

/// A random multigraph on at most `max_nodes` nodes whose relations include
/// the synergistic-interaction label.
pub fn random_path_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> Graph {
    let rels = ["targets", "interacts with", SYNERGISTIC_INTERACTION];
    loop {
        let n = rng.gen_range(3..=max_nodes);
        let density = rng.gen_range(0.15..0.6);
        let mut tsv = String::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for r in rels {
                    if rng.gen_bool(density / 3.0) {
                        tsv.push_str(&format!("N{a}\tgene\t{r}\tN{b}\tgene\t0\n"));
                    }
                }
            }
        }
        let g = graph(&tsv);
        if g.num_entities() >= 2 {
            return g;
        }
    }
}

// ---------------------------------------------------------------- signature

pub fn random_records<R: Rng>(rng: &mut R) -> Vec<PerturbationRecord> {
    let genes = rng.gen_range(1..=12);
    let n = rng.gen_range(1..=40);
    let units = [DoseUnit::Nanomolar, DoseUnit::Micromolar, DoseUnit::Millimolar];
    (0..n)
        .map(|i| PerturbationRecord {
            drug: "X".into(),
            signature_id: format!("S{}", i % 4),
            gene: format!("G{:02}", rng.gen_range(0..genes)),
            direction: if rng.gen_bool(0.5) { Direction::Up } else { Direction::Down },
            dose_value: [0.0, 0.1, 1.0, 10.0, 500.0, 10_000.0][rng.gen_range(0..6)],
            dose_unit: *units.choose(rng).unwrap(),
            ic50_um: match rng.gen_range(0..4) {
                0 => None,
                1 => Some(rng.gen_range(0.01..1.0)),
                _ => Some(rng.gen_range(1.0..50.0)),
            },
        })
        .collect()
}

pub fn random_signature_config<R: Rng>(rng: &mut R) -> SignatureConfig {
    SignatureConfig {
        k: rng.gen_range(0.0..2.0),
        alpha: rng.gen_range(0.0..=1.0),
        top_n: rng.gen_range(1..=8),
        default_ic50_weight: rng.gen_range(0.1..=1.0),
    }
}

fn um(value: f64, unit: DoseUnit) -> f64 {
    match unit {
        DoseUnit::Nanomolar => value / 1000.0,
        DoseUnit::Micromolar => value,
        DoseUnit::Millimolar => value * 1000.0,
    }
}

fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Group by gene, signed-average the two weights, normalize each by its
/// largest magnitude, blend, split by sign and sort by magnitude. Sums run
/// over ascending values so the result does not depend on record order.
pub fn reference_signature(records: &[PerturbationRecord], cfg: &SignatureConfig) -> DrugSignature {
    #[derive(Default)]
    struct Acc {
        ic50: (Vec<f64>, Vec<f64>),
        dose: (Vec<f64>, Vec<f64>),
    }
    let mut groups: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in records {
        let wi = match r.ic50_um {
            None => cfg.default_ic50_weight,
            Some(v) => (1.0 / v).min(1.0),
        };
        let wd = (-cfg.k * um(r.dose_value, r.dose_unit).ln_1p()).exp();
        let acc = groups.entry(&r.gene).or_default();
        match r.direction {
            Direction::Up => {
                acc.ic50.0.push(wi);
                acc.dose.0.push(wd);
            }
            Direction::Down => {
                acc.ic50.1.push(wi);
                acc.dose.1.push(wd);
            }
        }
    }
    let mean = |(up, down): (Vec<f64>, Vec<f64>)| {
        let n = (up.len() + down.len()) as f64;
        (sorted_sum(up) - sorted_sum(down)) / n
    };
    let scores: Vec<(String, f64, f64)> = groups
        .into_iter()
        .map(|(g, a)| (g.to_string(), mean(a.ic50), mean(a.dose)))
        .collect();
    let max_i = scores.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let max_d = scores.iter().map(|s| s.2.abs()).fold(0.0, f64::max);
    let norm = |x: f64, m: f64| if m == 0.0 { x } else { x / m };
    let mut up = Vec::new();
    let mut down = Vec::new();
    for (gene, i, d) in scores {
        let score = cfg.alpha * norm(d, max_d) + (1.0 - cfg.alpha) * norm(i, max_i);
        let gs = GeneScore { gene, score };
        if score > 0.0 {
            up.push(gs);
        } else if score < 0.0 {
            down.push(gs);
        }
    }
    for list in [&mut up, &mut down] {
        list.sort_by(|a, b| b.score.abs().total_cmp(&a.score.abs()).then_with(|| a.gene.cmp(&b.gene)));
        list.truncate(cfg.top_n);
    }
    DrugSignature {
        drug: records[0].drug.clone(),
        up,
        down,
    }
}

// ------------------------------------------------------------------ ssGSEA

/// Average rank by counting: `1 + #less + (#equal - 1) / 2`.
pub fn hand_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let less = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Running-sum enrichment of one sample, recomputing both ECDFs from
/// scratch at every position. Genes are walked by descending value, ties in
/// input order.
pub fn brute_es(values: &[f64], members: &[bool], tau: f64) -> f64 {
    let n = values.len();
    let ranks = hand_ranks(values);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let total_in: f64 = (0..n).filter(|&g| members[g]).map(|g| ranks[g].powf(tau)).sum();
    let n_out = members.iter().filter(|m| !**m).count() as f64;
    let mut es = 0.0;
    for i in 0..n {
        let walked = &order[..=i];
        let p_in: f64 = walked.iter().filter(|&&g| members[g]).map(|&g| ranks[g].powf(tau)).sum::<f64>() / total_in;
        let p_out = walked.iter().filter(|&&g| !members[g]).count() as f64 / n_out;
        es += p_in - p_out;
    }
    es
}

// --------------------------------------------------------------------- Cox

/// Breslow log partial likelihood for a binary covariate, by direct sums
/// over each distinct event time's risk set.
pub fn breslow_loglik(data: &[(f64, bool, f64)], beta: f64) -> f64 {
    let mut times: Vec<f64> = data.iter().filter(|d| d.1).map(|d| d.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .iter()
        .map(|&t| {
            let events: Vec<f64> = data.iter().filter(|d| d.1 && d.0 == t).map(|d| d.2).collect();
            let risk: f64 = data.iter().filter(|d| d.0 >= t).map(|d| (beta * d.2).exp()).sum();
            beta * events.iter().sum::<f64>() - events.len() as f64 * risk.ln()
        })
        .sum()
}

/// Maximizer of the Breslow partial likelihood over a grid on `[lo, hi]`.
/// The covariate must be 0/1 so each risk set reduces to two counts.
pub fn grid_search_beta(data: &[(f64, bool, f64)], lo: f64, hi: f64, step: f64) -> f64 {
    assert!(data.iter().all(|d| d.2 == 0.0 || d.2 == 1.0), "grid search needs a 0/1 covariate");
    let mut times: Vec<f64> = data.iter().filter(|d| d.1).map(|d| d.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    // (events, events with x = 1, at risk with x = 1, at risk with x = 0)
    let terms: Vec<(f64, f64, f64, f64)> = times
        .iter()
        .map(|&t| {
            let d = data.iter().filter(|s| s.1 && s.0 == t).count() as f64;
            let x = data.iter().filter(|s| s.1 && s.0 == t && s.2 == 1.0).count() as f64;
            let n1 = data.iter().filter(|s| s.0 >= t && s.2 == 1.0).count() as f64;
            let n0 = data.iter().filter(|s| s.0 >= t && s.2 == 0.0).count() as f64;
            (d, x, n1, n0)
        })
        .collect();
    let ll = |b: f64| -> f64 {
        terms
            .iter()
            .map(|&(d, x, n1, n0)| b * x - d * (n1 * b.exp() + n0).ln())
            .sum()
    };
    let steps = ((hi - lo) / step).round() as i64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=steps {
        let b = lo + i as f64 * step;
        let v = ll(b);
        if v > best.0 {
            best = (v, b);
        }
    }
    best.1
}

// ------------------------------------------------------------------- stats

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Fraction of (positive, negative) pairs ordered correctly, ties one half.
pub fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Sample covariance of the columns of `rows`.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect()
}

// ------------------------------------------------------------------- rules

/// Hand arithmetic of the rule table. `gene` and `pathway` are 0 (none),
/// 1 (weaker tier) or 2 (stronger tier).
pub fn expected_rule_score(clinical: bool, preclinical: bool, gene: u8, pathway: u8, fda_any: bool) -> u32 {
    let direct = if clinical {
        40
    } else if preclinical {
        20
    } else {
        0
    };
    let gene = [0, 15, 30][gene as usize];
    let pathway = [0, 10, 20][pathway as usize];
    let fda = if fda_any { 10 } else { 0 };
    (direct + gene + pathway + fda).min(100)
}

fn trial(phase: Phase, status: TrialStatus, has_results: bool, positive: Option<bool>, started_ago: i32) -> TrialMeta {
    TrialMeta {
        nct_id: "NCT00000000".into(),
        phase,
        status,
        has_results,
        results_positive: positive,
        start_year: 2024 - started_ago,
        completion_year: None,
        current_year: 2024,
        months_since_completion: None,
    }
}

/// Twelve trials with their expected result-status labels, covering each
/// rule and both sides of the phase-1 and phase-3 elapsed-year thresholds.
pub fn trial_status_table() -> Vec<(&'static str, TrialMeta, ResultStatus)> {
    use Phase::*;
    use TrialStatus::*;
    let completed_months = |months: u32, phase: Phase, started_ago: i32| TrialMeta {
        months_since_completion: Some(months),
        ..trial(phase, Completed, false, None, started_ago)
    };
    vec![
        ("negative results", trial(Two, Completed, true, Some(false), 3), ResultStatus::Bad),
        ("positive results", trial(Three, Completed, true, Some(true), 6), ResultStatus::Good),
        (
            "negative results outrank long elapsed time",
            TrialMeta {
                completion_year: Some(2019),
                ..trial(Three, Completed, true, Some(false), 10)
            },
            ResultStatus::Bad,
        ),
        ("completed 14 months ago, no results", completed_months(14, Two, 1), ResultStatus::CompletedNoResult),
        (
            "completed two calendar years ago, no results",
            TrialMeta {
                completion_year: Some(2022),
                ..trial(Two, Completed, false, None, 1)
            },
            ResultStatus::CompletedNoResult,
        ),
        ("completed exactly 12 months ago, within timeline", completed_months(12, Three, 1), ResultStatus::OngoingInReasonableTerm),
        ("phase 1 started 3 years ago, recruiting", trial(One, Recruiting, false, None, 3), ResultStatus::LongTermIncomplete),
        ("phase 1 at the 2-year boundary", trial(One, Recruiting, false, None, 2), ResultStatus::LongTermIncomplete),
        ("phase 1 one year in", trial(One, Active, false, None, 1), ResultStatus::OngoingInReasonableTerm),
        ("phase 3 at the 5-year boundary", trial(Three, Active, false, None, 5), ResultStatus::LongTermIncomplete),
        ("phase 3 four years in", trial(Three, Recruiting, false, None, 4), ResultStatus::OngoingInReasonableTerm),
        ("missing phase uses the phase 3 timeline", trial(NotApplicable, Active, false, None, 4), ResultStatus::OngoingInReasonableTerm),
    ]
}
