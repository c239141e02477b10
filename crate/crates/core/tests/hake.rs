mod oracle;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use repurpose::hake::{filtered_rank, init_weights, rank_drugs, train, HakeParams, Model, TrainConfig};
use repurpose::kg::{Entity, EntityKind};
use repurpose::synthetic;

fn entity(id: &str, kind: EntityKind) -> Entity {
    Entity {
        id: id.into(),
        name: id.into(),
        kind,
    }
}

fn one_dim(lambda: f64, h: (f64, f64), r: (f64, f64), t: (f64, f64)) -> HakeParams {
    let ents = vec![entity("h", EntityKind::Gene), entity("t", EntityKind::Gene)];
    let mut p = HakeParams::zeros(ents, vec!["r".into()], 1, lambda, 0.0).unwrap();
    p.ent_mod = vec![h.0, t.0];
    p.ent_phase = vec![h.1, t.1];
    p.rel_mod = vec![r.0];
    p.rel_phase = vec![r.1];
    p
}

#[test]
fn score_matches_hand_evaluation() {
    let p = one_dim(1.0, (2.0, 0.0), (3.0, 0.0), (4.0, 0.0));
    assert!((p.score_named("h", "r", "t").unwrap() - -2.0).abs() < 1e-12);
    let pi = std::f64::consts::PI;
    let p = one_dim(2.0, (1.0, pi), (1.0, 0.0), (1.0, 0.0));
    assert!((p.score_named("h", "r", "t").unwrap() - -2.0).abs() < 1e-12);
    let p = one_dim(0.7, (0.5, 1.0), (2.0, 2.0), (1.0, 3.0 - 2.0 * pi));
    assert!(p.score_named("h", "r", "t").unwrap().abs() < 1e-12);
}

#[test]
fn missing_embedding_is_not_found() {
    let p = one_dim(1.0, (1.0, 0.0), (1.0, 0.0), (1.0, 0.0));
    assert!(matches!(p.score_named("h", "r", "nobody"), Err(repurpose::Error::NotFound(_))));
    assert!(matches!(p.score_named("h", "q", "t"), Err(repurpose::Error::NotFound(_))));
}

#[test]
fn gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let inst = oracle::random_loss_instance(&mut rng, 1 + i % 8);
        let err = oracle::max_gradient_error(&inst, 1e-6, 1e-6);
        assert!(err < 1e-4, "instance {i}: relative error {err}");
    }
}

#[test]
fn literature_prior_rescaled_by_max() {
    let g = oracle::graph("A\tgene\tr\tB\tgene\t0\nB\tgene\tr\tC\tgene\t6\nC\tgene\tr\tA\tgene\t2\n");
    let w = init_weights(&g).unwrap();
    let hand = [1.0, 1.0 + 7f64.ln(), 1.0 + 3f64.ln()];
    for (j, &w0) in hand.iter().enumerate() {
        assert!((w.w0[j] - w0).abs() < 1e-12);
        assert!((w.w[j] - w0 / hand[1]).abs() < 1e-12);
    }
}

fn toy_config(seed: u64, epochs: usize, weighted: bool) -> TrainConfig {
    TrainConfig {
        epochs,
        weighted,
        ..synthetic::toy_train_config(seed)
    }
}

#[test]
fn training_is_reproducible_from_the_seed() {
    let g = oracle::graph(&synthetic::toy_graph_tsv());
    let a = train(&g, &toy_config(3, 5, true)).unwrap();
    let b = train(&g, &toy_config(3, 5, true)).unwrap();
    let c = train(&g, &toy_config(4, 5, true)).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.weights, b.weights);
    assert_eq!(a.epoch_losses, b.epoch_losses);
    assert_ne!(a.params, c.params);
}

#[test]
fn learned_weights_stay_in_unit_interval() {
    let g = oracle::graph(&synthetic::toy_graph_tsv());
    let out = train(&g, &toy_config(5, 20, true)).unwrap();
    assert!(out.weights.w.iter().all(|w| (0.0..=1.0).contains(w)));
    assert_ne!(out.weights.w, init_weights(&g).unwrap().w);
}

#[test]
fn uniform_weights_with_frozen_weights_match_unweighted() {
    let tsv: String = synthetic::toy_graph_tsv()
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split('\t').collect();
            f[5] = "0";
            f.join("\t") + "\n"
        })
        .collect();
    let g = oracle::graph(&tsv);
    let frozen = TrainConfig {
        weight_learning_rate: Some(0.0),
        ..toy_config(9, 5, true)
    };
    let weighted = train(&g, &frozen).unwrap();
    let plain = train(&g, &toy_config(9, 5, false)).unwrap();
    assert_eq!(weighted.params, plain.params);
    assert_eq!(weighted.epoch_losses, plain.epoch_losses);
}

#[test]
fn checkpoint_round_trip_preserves_rankings() {
    let g = oracle::graph(&synthetic::toy_graph_tsv());
    let out = train(&g, &toy_config(1, 3, true)).unwrap();
    let model = Model::new(out.params, &out.weights, &g, true);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    model.save(&path).unwrap();
    let back = Model::load(&path).unwrap();
    assert_eq!(back.params, model.params);
    assert_eq!(
        rank_drugs(&back.params, "DA1", "indication", 8).unwrap(),
        rank_drugs(&model.params, "DA1", "indication", 8).unwrap()
    );
}

#[test]
fn filtered_rank_matches_counting() {
    let g = oracle::graph(&synthetic::toy_graph_tsv());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = HakeParams::random(&g, 4, 0.5, 1.0, &mut rng).unwrap();
    for (drug, disease) in synthetic::toy_heldout() {
        let (rank, n) = filtered_rank(&p, &g, &disease, "indication", &drug).unwrap();
        let target = p.score_named(&disease, "indication", &drug).unwrap();
        let known = |x: &str| g.triples().iter().any(|t| {
            g.entity(t.head).id == disease && g.relation_name(t.relation) == "indication" && g.entity(t.tail).id == x
        });
        let others: Vec<&str> = p
            .entities()
            .iter()
            .filter(|e| e.kind == EntityKind::Drug && e.id != drug && !known(&e.id))
            .map(|e| e.id.as_str())
            .collect();
        let better = others
            .iter()
            .filter(|x| p.score_named(&disease, "indication", x).unwrap() >= target)
            .count();
        assert_eq!((rank, n), (1 + better, 1 + others.len()));
    }
}

fn params_strategy() -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 1usize..=8, 0.0f64..3.0)
}

proptest! {
    #[test]
    fn scores_are_never_positive((seed, dim, lambda) in params_strategy()) {
        let g = oracle::graph(&synthetic::toy_graph_tsv());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = HakeParams::random(&g, dim, lambda, 0.0, &mut rng).unwrap();
        for h in 0..g.num_entities() {
            for t in 0..g.num_entities() {
                prop_assert!(p.score(h, 0, t).unwrap() <= 0.0);
            }
        }
    }

    #[test]
    fn margin_does_not_change_rankings((seed, dim, lambda) in params_strategy(), shift in -50.0f64..50.0) {
        let g = oracle::graph(&synthetic::toy_graph_tsv());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = HakeParams::random(&g, dim, lambda, 1.0, &mut rng).unwrap();
        let mut q = p.clone();
        q.gamma += shift;
        prop_assert_eq!(rank_drugs(&p, "DB2", "indication", 8).unwrap(), rank_drugs(&q, "DB2", "indication", 8).unwrap());
    }
}
