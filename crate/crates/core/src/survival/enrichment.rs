use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ExpressionMatrix;

/// Ascending ranks starting at 1; tied values share the mean of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Single-sample enrichment score of `gene_set` in every sample.
///
/// Genes are walked from highest to lowest expression (ties in matrix order).
/// Members step a weighted ECDF by `rank^tau`, where `rank` is the ascending
/// average rank; non-members step an unweighted ECDF. The score is the sum of
/// the running difference over all positions.
pub fn ssgsea<S: AsRef<str>>(m: &ExpressionMatrix, gene_set: &[S], tau: f64) -> Result<Vec<f64>> {
    let members: HashSet<usize> = gene_set.iter().filter_map(|g| m.gene_index(g.as_ref())).collect();
    let n = m.genes().len();
    if members.is_empty() {
        return Err(Error::Validation("gene set shares no genes with the expression matrix".into()));
    }
    if members.len() == n {
        return Err(Error::Degenerate(
            "gene set covers every matrix gene; the non-member distribution is empty".into(),
        ));
    }
    let n_out = (n - members.len()) as f64;
    let mut out = Vec::with_capacity(m.samples().len());
    for s in 0..m.samples().len() {
        let ranks = average_ranks(&m.column(s));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| ranks[b].total_cmp(&ranks[a]).then(a.cmp(&b)));
        let total_in: f64 = order
            .iter()
            .filter(|g| members.contains(g))
            .map(|&g| ranks[g].powf(tau))
            .sum();
        let mut cum_in = 0.0;
        let mut cum_out = 0.0;
        let mut es = 0.0;
        for &g in &order {
            if members.contains(&g) {
                cum_in += ranks[g].powf(tau);
            } else {
                cum_out += 1.0;
            }
            es += cum_in / total_in - cum_out / n_out;
        }
        out.push(es);
    }
    Ok(out)
}

/// Cross-sample z-score using the sample standard deviation.
pub fn nes(es: &[f64]) -> Result<Vec<f64>> {
    if es.len() < 2 {
        return Err(Error::Validation("NES needs at least two samples".into()));
    }
    let n = es.len() as f64;
    let mean = es.iter().sum::<f64>() / n;
    let var = es.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::Degenerate("enrichment scores have zero variance".into()));
    }
    Ok(es.iter().map(|x| (x - mean) / sd).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedCohort {
    pub high: Vec<String>,
    pub low: Vec<String>,
    /// The middle third.
    pub excluded: Vec<String>,
}

/// Top and bottom `floor(N / 3)` samples by descending NES, ties by sample id.
pub fn tertile_stratify<S: AsRef<str>>(samples: &[S], nes: &[f64]) -> Result<StratifiedCohort> {
    if samples.len() != nes.len() {
        return Err(Error::Validation(format!(
            "{} samples but {} NES values",
            samples.len(),
            nes.len()
        )));
    }
    let n = samples.len();
    if n < 3 {
        return Err(Error::Validation(format!("tertile split needs at least 3 samples, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        nes[b]
            .total_cmp(&nes[a])
            .then_with(|| samples[a].as_ref().cmp(samples[b].as_ref()))
    });
    let third = n / 3;
    let name = |i: &usize| samples[*i].as_ref().to_string();
    Ok(StratifiedCohort {
        high: order[..third].iter().map(name).collect(),
        excluded: order[third..n - third].iter().map(name).collect(),
        low: order[n - third..].iter().map(name).collect(),
    })
}
