mod oracle;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use repurpose::hake::HakeParams;
use repurpose::kg::SYNERGISTIC_INTERACTION;
use repurpose::pathfind::{
    build_subgraph, geometric_mean, k_shortest_paths, normalize_edge_score, path_score, PathScoringConfig,
    MAX_ENUMERATED_PATHS,
};

fn keys(paths: &[repurpose::pathfind::Path]) -> Vec<oracle::PathKey> {
    let mut out: Vec<_> = paths
        .iter()
        .map(|p| (p.nodes.clone(), p.edges.clone(), p.forward.clone()))
        .collect();
    out.sort();
    out
}

fn no_exclusions() -> PathScoringConfig {
    PathScoringConfig {
        excluded_relations: Vec::new(),
        ..PathScoringConfig::default()
    }
}

#[test]
fn synergy_only_connection_gives_no_paths() {
    let g = oracle::graph(&format!("A\tdrug\t{SYNERGISTIC_INTERACTION}\tB\tdrug\t0\n"));
    let cfg = PathScoringConfig::default();
    assert!(k_shortest_paths(&g, "A", "B", 10, &cfg).unwrap().is_empty());
    assert_eq!(k_shortest_paths(&g, "A", "B", 10, &no_exclusions()).unwrap().len(), 1);
}

#[test]
fn edge_score_midpoint_and_two_edge_mean() {
    let cfg = PathScoringConfig::default();
    assert!((normalize_edge_score(-350.0, &cfg).unwrap() - 0.5).abs() < 1e-12);
    assert!((geometric_mean(&[0.25, 1.0]) - 0.5).abs() < 1e-12);
}

#[test]
fn path_score_is_geometric_mean_of_logistic_edges() {
    let g = oracle::graph("X\tdrug\ttargets\tG\tgene\t0\nG\tgene\tassociated with\tD\tdisease\t0\n");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = HakeParams::random(&g, 3, 0.5, 0.0, &mut rng).unwrap();
    let cfg = PathScoringConfig {
        mu: 1.0,
        sigma: 0.5,
        ..PathScoringConfig::default()
    };
    let paths = k_shortest_paths(&g, "X", "D", 5, &cfg).unwrap();
    assert_eq!(paths.len(), 1);
    let logistic = |s: f64| 1.0 / (1.0 + ((-s - cfg.mu) / cfg.sigma).exp());
    let e1 = logistic(p.score_named("X", "targets", "G").unwrap());
    let e2 = logistic(p.score_named("G", "associated with", "D").unwrap());
    let got = path_score(&paths[0], &g, &p, &cfg).unwrap();
    assert!((got - (e1 * e2).sqrt()).abs() < 1e-12);
}

#[test]
fn subgraph_keeps_best_paths_in_descending_order() {
    let mut tsv = String::new();
    for i in 0..12 {
        tsv.push_str(&format!("X\tdrug\ttargets\tG{i:02}\tgene\t0\nG{i:02}\tgene\tassociated with\tD\tdisease\t0\n"));
    }
    let g = oracle::graph(&tsv);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = HakeParams::random(&g, 4, 0.5, 0.0, &mut rng).unwrap();
    let cfg = PathScoringConfig {
        mu: 1.0,
        sigma: 1.0,
        ..PathScoringConfig::default()
    };
    let sub = build_subgraph(&g, &p, "X", "D", &cfg).unwrap();
    assert_eq!(sub.len(), 10);
    let mut all: Vec<f64> = k_shortest_paths(&g, "X", "D", 100, &cfg)
        .unwrap()
        .iter()
        .map(|path| path_score(path, &g, &p, &cfg).unwrap())
        .collect();
    all.sort_by(|a, b| b.total_cmp(a));
    let kept: Vec<f64> = sub.iter().map(|s| s.score).collect();
    assert_eq!(kept, all[..10].to_vec());
}

fn check_against_brute(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = oracle::random_path_graph(&mut rng, 8);
    let n = g.num_entities();
    let s = rng.gen_range(0..n);
    let t = (s + rng.gen_range(1..n)) % n;
    let (src, dst) = (g.entity(s).id.clone(), g.entity(t).id.clone());
    for (cfg, excluded) in [
        (PathScoringConfig::default(), vec![SYNERGISTIC_INTERACTION]),
        (no_exclusions(), vec![]),
    ] {
        let want = oracle::brute_shortest_paths(&g, s, t, &excluded);
        let got = k_shortest_paths(&g, &src, &dst, MAX_ENUMERATED_PATHS, &cfg).unwrap();
        prop_assert_eq!(keys(&got), want.clone());
        let k = rng.gen_range(1..=4);
        let few = keys(&k_shortest_paths(&g, &src, &dst, k, &cfg).unwrap());
        prop_assert_eq!(few.len(), k.min(want.len()));
        prop_assert!(few.iter().all(|p| want.contains(p)));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shortest_paths_match_exhaustive_enumeration(seed in any::<u64>()) {
        check_against_brute(seed)?;
    }

    #[test]
    fn edge_scores_are_monotone_in_distance(a in 0.0f64..1000.0, b in 0.0f64..1000.0) {
        let cfg = PathScoringConfig::default();
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(normalize_edge_score(-near, &cfg).unwrap() >= normalize_edge_score(-far, &cfg).unwrap());
    }

    #[test]
    fn geometric_mean_lies_between_extremes(v in prop::collection::vec(0.001f64..1.0, 1..6)) {
        let m = geometric_mean(&v);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));
    }
}
