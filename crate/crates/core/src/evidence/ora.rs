use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::signature::Direction;

/// One named gene set from a term library.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSet {
    pub term: String,
    pub description: String,
    pub genes: Vec<String>,
}

/// Reads a GMT file: `term<TAB>description<TAB>gene<TAB>gene...`.
pub fn load_gmt(path: impl AsRef<Path>) -> Result<Vec<TermSet>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gmt(&text, path)
}

pub fn parse_gmt(text: &str, origin: &Path) -> Result<Vec<TermSet>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            msg,
        };
        if cols.len() < 3 {
            return Err(err("a GMT row needs a term, a description and at least one gene".into()));
        }
        if !seen.insert(cols[0].to_string()) {
            return Err(err(format!("duplicate term '{}'", cols[0])));
        }
        let genes: BTreeSet<&str> = cols[2..].iter().copied().filter(|g| !g.is_empty()).collect();
        out.push(TermSet {
            term: cols[0].to_string(),
            description: cols[1].to_string(),
            genes: genes.into_iter().map(String::from).collect(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraHit {
    pub term: String,
    pub overlap: usize,
    pub term_size: usize,
    pub p: f64,
}

/// Enriched term tagged with the signature direction that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedTerm {
    pub term: String,
    pub direction: Direction,
    pub overlap: usize,
    pub term_size: usize,
    pub p: f64,
    /// Benjamini-Hochberg adjusted p across every term tested for the pair.
    pub q: f64,
}

/// `P(X >= k)` for `X ~ Hypergeometric(population, successes, draws)`.
pub fn hypergeom_upper_tail(population: u64, successes: u64, draws: u64, k: u64) -> Result<f64> {
    if successes > population || draws > population {
        return Err(Error::Validation(format!(
            "hypergeometric sizes inconsistent: population {population}, successes {successes}, draws {draws}"
        )));
    }
    let hi = successes.min(draws);
    let lo = (successes + draws).saturating_sub(population);
    if k > hi {
        return Err(Error::Validation(format!(
            "overlap {k} exceeds min(term size {successes}, query size {draws})"
        )));
    }
    if k <= lo {
        return Ok(1.0);
    }
    let denom = ln_binomial(population, draws);
    // summed from the far tail inward so p is non-increasing in k
    let mut p = 0.0;
    for i in (k..=hi).rev() {
        p += (ln_binomial(successes, i) + ln_binomial(population - successes, draws - i) - denom).exp();
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Over-representation of `query` in each library term, sorted by ascending
/// p then term name.
pub fn ora<S: AsRef<str>>(query: &[S], library: &[TermSet], universe_size: usize) -> Result<Vec<OraHit>> {
    let q: HashSet<&str> = query.iter().map(AsRef::as_ref).collect();
    if universe_size < q.len() {
        return Err(Error::Validation(format!(
            "universe of {universe_size} genes is smaller than the query ({})",
            q.len()
        )));
    }
    let mut hits = Vec::with_capacity(library.len());
    for t in library {
        if t.genes.len() > universe_size {
            return Err(Error::Validation(format!(
                "term '{}' has {} genes, more than the universe of {universe_size}",
                t.term,
                t.genes.len()
            )));
        }
        let overlap = t.genes.iter().filter(|g| q.contains(g.as_str())).count();
        let p = hypergeom_upper_tail(universe_size as u64, t.genes.len() as u64, q.len() as u64, overlap as u64)?;
        hits.push(OraHit {
            term: t.term.clone(),
            overlap,
            term_size: t.genes.len(),
            p,
        });
    }
    hits.sort_by(|a, b| a.p.total_cmp(&b.p).then_with(|| a.term.cmp(&b.term)));
    Ok(hits)
}

/// Benjamini-Hochberg adjusted p-values, returned in input order.
pub fn benjamini_hochberg(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p[i] * m as f64 / (rank + 1) as f64);
        q[i] = running.min(1.0);
    }
    q
}

/// Distinct genes across the library and the extra sets.
pub fn default_universe<'a>(library: &'a [TermSet], extra: impl IntoIterator<Item = &'a str>) -> usize {
    let mut all: HashSet<&str> = library.iter().flat_map(|t| t.genes.iter().map(String::as_str)).collect();
    all.extend(extra);
    all.len()
}
