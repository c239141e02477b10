//! Evaluation statistics: recall, Spearman correlation, ROC-AUC, PCA and a
//! rank permutation test.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::survival::average_ranks;

/// Lower-cased, trimmed drug name used for set matching.
pub fn canonical(name: &str) -> String {
    name.trim().to_lowercase()
}

/// `|retrieved ∩ gold| / |gold|` with case-insensitive names.
pub fn recall<A: AsRef<str>, B: AsRef<str>>(retrieved: &[A], gold: &[B]) -> Result<f64> {
    let gold: HashSet<String> = gold.iter().map(|g| canonical(g.as_ref())).collect();
    if gold.is_empty() {
        return Err(Error::Validation("recall needs a nonempty gold set".into()));
    }
    let got: HashSet<String> = retrieved.iter().map(|r| canonical(r.as_ref())).collect();
    Ok(gold.intersection(&got).count() as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with a two-sided t-approximation p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Validation(format!("Spearman correlation needs at least 3 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite value in correlation input".into()));
    }
    let r = pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Degenerate("correlation undefined: a vector has constant ranks".into()))?;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numeric(e.to_string()))?;
        (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
    };
    Ok(Correlation { r, p, n })
}

/// Which score direction predicts the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreDirection {
    #[default]
    HigherIsPositive,
    LowerIsPositive,
}

/// Mann-Whitney AUC; ties count one half.
pub fn roc_auc(scores: &[f64], labels: &[bool], direction: ScoreDirection) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let sign = match direction {
        ScoreDirection::HigherIsPositive => 1.0,
        ScoreDirection::LowerIsPositive => -1.0,
    };
    let s: Vec<f64> = scores.iter().map(|v| sign * v).collect();
    let n_pos = labels.iter().filter(|l| **l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation("ROC-AUC needs both classes".into()));
    }
    // rank-sum form of the pairwise count
    let ranks = average_ranks(&s);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, l)| **l).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    /// Unit component vectors, one per row, by descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Centered rows projected on the components.
    pub projections: Vec<Vec<f64>>,
    pub column_means: Vec<f64>,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and matching unit eigenvectors as columns
/// of the returned row-major matrix.
pub fn jacobi_eigen(a: &[Vec<f64>], tol: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Validation("matrix is not square".into()));
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    Ok((values, vectors))
}

/// Covariance PCA of a rows x columns matrix.
pub fn pca(rows: &[Vec<f64>], n_components: usize) -> Result<Pca> {
    if rows.len() < 2 {
        return Err(Error::Degenerate(format!("PCA needs at least 2 rows, got {}", rows.len())));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Validation("matrix rows differ in length".into()));
    }
    if n_components == 0 || n_components > d {
        return Err(Error::Validation(format!("n_components must be in 1..={d}, got {n_components}")));
    }
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&means).map(|(v, m)| v - m).collect())
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let c = centered.iter().map(|r| r[i] * r[j]).sum::<f64>() / (n - 1.0);
            cov[i][j] = c;
            cov[j][i] = c;
        }
    }
    let total: f64 = (0..d).map(|i| cov[i][i]).sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("all columns have zero variance".into()));
    }
    let (values, vectors) = jacobi_eigen(&cov, 1e-12)?;
    let mut components = Vec::with_capacity(n_components);
    for k in 0..n_components {
        let mut c: Vec<f64> = (0..d).map(|r| vectors[r][k]).collect();
        let lead = c
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map_or(1.0, |(_, v)| v);
        if lead < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(c);
    }
    let eigenvalues: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let projections = centered
        .iter()
        .map(|r| components.iter().map(|c| c.iter().zip(r).map(|(a, b)| a * b).sum()).collect())
        .collect();
    Ok(Pca {
        explained_variance_ratio: eigenvalues[..n_components].iter().map(|v| v / total).collect(),
        eigenvalues,
        components,
        projections,
        column_means: means,
    })
}

/// One-sided Monte Carlo p-value that the mean of `ranks` is at most its
/// observed value when each rank is uniform on `1..=candidates[i]`.
/// Returns `(1 + hits) / (1 + draws)`.
pub fn rank_permutation_p(ranks: &[usize], candidates: &[usize], draws: usize, seed: u64) -> Result<f64> {
    if ranks.is_empty() || ranks.len() != candidates.len() {
        return Err(Error::Validation("ranks and candidate counts must be nonempty and equal length".into()));
    }
    if ranks.iter().zip(candidates).any(|(&r, &n)| r == 0 || r > n) {
        return Err(Error::Validation("every rank must lie in 1..=candidates".into()));
    }
    if draws == 0 {
        return Err(Error::Validation("draws must be positive".into()));
    }
    let observed: usize = ranks.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..draws)
        .filter(|_| candidates.iter().map(|&n| rng.gen_range(1..=n)).sum::<usize>() <= observed)
        .count();
    Ok((1 + hits) as f64 / (1 + draws) as f64)
}
