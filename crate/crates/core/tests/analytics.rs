mod oracle;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use repurpose::analytics::{pca, rank_permutation_p, recall, roc_auc, spearman, ScoreDirection};

#[test]
fn spearman_with_ties_by_hand() {
    let x = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0];
    let y = [10.0, 30.0, 20.0, 20.0, 50.0, 40.0];
    // ranks written out by hand
    let rx = [1.0, 2.5, 2.5, 4.0, 5.5, 5.5];
    let ry = [1.0, 4.0, 2.5, 2.5, 6.0, 5.0];
    let want = oracle::pearson(&rx, &ry);
    let got = spearman(&x, &y).unwrap();
    assert!((got.r - want).abs() < 1e-12);
    assert_eq!(got.n, 6);
    let anti = spearman(&[1.0, 2.0, 3.0, 4.0], &[9.0, 7.0, 7.5, 1.0]).unwrap();
    assert!((anti.r - -0.8).abs() < 1e-12);
}

#[test]
fn spearman_rejects_constant_input() {
    assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
}

#[test]
fn recall_is_case_insensitive() {
    assert_eq!(recall(&["Aspirin", "x"], &["aspirin", "b"]).unwrap(), 0.5);
    assert!(recall::<&str, &str>(&["a"], &[]).is_err());
}

#[test]
fn permutation_p_separates_good_and_random_ranks() {
    let n = vec![20; 8];
    assert!(rank_permutation_p(&[1; 8], &n, 9999, 1).unwrap() < 0.001);
    assert!(rank_permutation_p(&[11; 8], &n, 9999, 1).unwrap() > 0.3);
    assert!(rank_permutation_p(&[0], &[5], 10, 1).is_err());
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mix: Vec<f64> = (0..d).map(|_| rng.gen_range(0.2..3.0)).collect();
    (0..n)
        .map(|_| {
            let shared: f64 = rng.gen_range(-1.0..1.0);
            (0..d).map(|j| mix[j] * (shared + rng.gen_range(-0.5..0.5))).collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn spearman_matches_ranked_pearson(seed in any::<u64>(), n in 3usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let want = oracle::pearson(&oracle::hand_ranks(&x), &oracle::hand_ranks(&y));
        match spearman(&x, &y) {
            Ok(c) => prop_assert!((c.r - want).abs() < 1e-12 && (0.0..=1.0).contains(&c.p)),
            Err(_) => prop_assert!(!want.is_finite()),
        }
    }

    #[test]
    fn auc_matches_pairwise_count(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        let got = roc_auc(&scores, &labels, ScoreDirection::HigherIsPositive).unwrap();
        prop_assert!((got - oracle::pairwise_auc(&scores, &labels)).abs() < 1e-12);
        let flipped = roc_auc(&scores, &labels, ScoreDirection::LowerIsPositive).unwrap();
        prop_assert!((got + flipped - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pca_matches_nalgebra(seed in any::<u64>(), n in 3usize..20, d in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_rows(&mut rng, n, d);
        let k = rng.gen_range(1..=d);
        let got = pca(&rows, k).unwrap();
        let cov = oracle::covariance(&rows);
        let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
        let mut want: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0)).collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (g, w) in got.eigenvalues.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-8, "{} vs {}", g, w);
        }
        for (i, a) in got.components.iter().enumerate() {
            for (j, b) in got.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                prop_assert!((dot - f64::from(u8::from(i == j))).abs() < 1e-10);
            }
            let v = nalgebra::DVector::from_vec(a.clone());
            let residual = (&m * &v - &v * got.eigenvalues[i]).norm();
            prop_assert!(residual < 1e-8);
        }
    }
}
