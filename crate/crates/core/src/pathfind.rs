//! Minimal-hop mechanistic paths between two entities, scored with the
//! embedding model.
//!
//! Edges are walked in either direction but always scored in their stored
//! `(head, relation, tail)` orientation. Each raw score `s <= 0` is read as a
//! distance `d = -s` and squashed with a logistic curve centred at `mu`:
//!
//! ```text
//! s' = 1 / (1 + exp((d - mu) / sigma))
//! ```
//!
//! A path's score is the geometric mean of its edge scores.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hake::HakeParams;
use crate::kg::{Graph, SYNERGISTIC_INTERACTION};

/// Upper bound on enumerated paths for one pair.
pub const MAX_ENUMERATED_PATHS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathScoringConfig {
    pub mu: f64,
    pub sigma: f64,
    pub max_paths: usize,
    pub excluded_relations: Vec<String>,
}

impl Default for PathScoringConfig {
    fn default() -> Self {
        Self {
            mu: 350.0,
            sigma: 100.0,
            max_paths: 10,
            excluded_relations: vec![SYNERGISTIC_INTERACTION.to_string()],
        }
    }
}

impl PathScoringConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Config("mu must be finite".into()));
        }
        if self.max_paths == 0 {
            return Err(Error::Config("max_paths must be at least 1".into()));
        }
        Ok(())
    }

    fn excluded(&self) -> HashSet<String> {
        self.excluded_relations.iter().cloned().collect()
    }
}

/// A simple path `nodes[0] -> ... -> nodes[n]` over graph indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub nodes: Vec<usize>,
    /// Triple indices, `edges[i]` joins `nodes[i]` and `nodes[i + 1]`.
    pub edges: Vec<usize>,
    /// `true` when `edges[i]` is walked head to tail.
    pub forward: Vec<bool>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn node_ids<'g>(&self, g: &'g Graph) -> Vec<&'g str> {
        self.nodes.iter().map(|&n| g.entity(n).id.as_str()).collect()
    }

    pub fn relation_names<'g>(&self, g: &'g Graph) -> Vec<&'g str> {
        self.edges
            .iter()
            .map(|&e| g.relation_name(g.triples()[e].relation))
            .collect()
    }
}

/// Logistic map of a raw (non-positive) triple score onto `(0, 1)`.
pub fn normalize_edge_score(raw: f64, cfg: &PathScoringConfig) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::Numeric(format!("edge score {raw} is not finite")));
    }
    let d = -raw;
    Ok(1.0 / (1.0 + ((d - cfg.mu) / cfg.sigma).exp()))
}

/// Geometric mean of normalized edge scores.
pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.contains(&0.0) {
        return 0.0;
    }
    let m = values.len() as f64;
    (values.iter().map(|v| v.ln()).sum::<f64>() / m).exp()
}

/// Normalized score of each edge of `path` under `p`.
pub fn edge_scores(path: &Path, g: &Graph, p: &HakeParams, cfg: &PathScoringConfig) -> Result<Vec<f64>> {
    path.edges
        .iter()
        .map(|&ei| {
            let t = &g.triples()[ei];
            let raw = p.score_named(&g.entity(t.head).id, g.relation_name(t.relation), &g.entity(t.tail).id)?;
            normalize_edge_score(raw, cfg)
        })
        .collect()
}

pub fn path_score(path: &Path, g: &Graph, p: &HakeParams, cfg: &PathScoringConfig) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::Validation("path has no edges".into()));
    }
    Ok(geometric_mean(&edge_scores(path, g, p, cfg)?))
}

fn bfs(g: &Graph, start: usize, excluded: &HashSet<String>) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_entities()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for n in g.neighbors_of(u, excluded) {
            if dist[n.other].is_none() {
                dist[n.other] = Some(du + 1);
                queue.push_back(n.other);
            }
        }
    }
    dist
}

/// Up to `k` paths of minimal hop count between `src` and `dst`, in
/// deterministic neighbor order, never using an excluded relation.
pub fn k_shortest_paths(g: &Graph, src: &str, dst: &str, k: usize, cfg: &PathScoringConfig) -> Result<Vec<Path>> {
    let s = g.require_entity(src)?;
    let t = g.require_entity(dst)?;
    if s == t {
        return Err(Error::Validation("source and destination are the same entity".into()));
    }
    if k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    let excluded = cfg.excluded();
    let from_src = bfs(g, s, &excluded);
    let Some(length) = from_src[t] else {
        return Ok(Vec::new());
    };
    let to_dst = bfs(g, t, &excluded);
    let limit = k.min(MAX_ENUMERATED_PATHS);
    let mut out = Vec::new();
    let mut nodes = vec![s];
    let mut edges = Vec::new();
    let mut forward = Vec::new();
    extend(
        g,
        &excluded,
        &from_src,
        &to_dst,
        length,
        limit,
        &mut nodes,
        &mut edges,
        &mut forward,
        &mut out,
    );
    if out.len() == MAX_ENUMERATED_PATHS {
        log::warn!("path enumeration between {src} and {dst} hit the {MAX_ENUMERATED_PATHS}-path cap");
    }
    Ok(out)
}

// Depth-first walk restricted to layer-advancing steps; every such walk is a
// shortest path and therefore simple.
#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    excluded: &HashSet<String>,
    from_src: &[Option<usize>],
    to_dst: &[Option<usize>],
    length: usize,
    limit: usize,
    nodes: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    forward: &mut Vec<bool>,
    out: &mut Vec<Path>,
) {
    if out.len() >= limit {
        return;
    }
    let depth = edges.len();
    let u = *nodes.last().expect("path always has a start node");
    if depth == length {
        out.push(Path {
            nodes: nodes.clone(),
            edges: edges.clone(),
            forward: forward.clone(),
        });
        return;
    }
    for n in g.neighbors_of(u, excluded) {
        if from_src[n.other] != Some(depth + 1) || to_dst[n.other] != Some(length - depth - 1) {
            continue;
        }
        nodes.push(n.other);
        edges.push(n.triple);
        forward.push(n.forward);
        extend(g, excluded, from_src, to_dst, length, limit, nodes, edges, forward, out);
        nodes.pop();
        edges.pop();
        forward.pop();
        if out.len() >= limit {
            return;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPath {
    pub path: Path,
    pub score: f64,
}

/// Scores every minimal-length path between `a` and `b` and keeps the best
/// `cfg.max_paths`, ordered by descending score then node-id sequence.
pub fn build_subgraph(g: &Graph, p: &HakeParams, a: &str, b: &str, cfg: &PathScoringConfig) -> Result<Vec<ScoredPath>> {
    cfg.validate()?;
    let paths = k_shortest_paths(g, a, b, MAX_ENUMERATED_PATHS, cfg)?;
    let mut scored = paths
        .into_iter()
        .map(|path| {
            let score = path_score(&path, g, p, cfg)?;
            Ok(ScoredPath { path, score })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|x, y| compare_scored(g, x, y));
    scored.truncate(cfg.max_paths);
    Ok(scored)
}

fn compare_scored(g: &Graph, x: &ScoredPath, y: &ScoredPath) -> Ordering {
    y.score
        .total_cmp(&x.score)
        .then_with(|| x.path.node_ids(g).cmp(&y.path.node_ids(g)))
        .then_with(|| x.path.relation_names(g).cmp(&y.path.relation_names(g)))
        .then_with(|| x.path.edges.cmp(&y.path.edges))
}

/// JSON shape used by the `paths` command and evidence dossiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub nodes: Vec<String>,
    pub relations: Vec<String>,
    pub score: f64,
}

impl PathRecord {
    pub fn new(sp: &ScoredPath, g: &Graph) -> Self {
        Self {
            nodes: sp.path.node_ids(g).into_iter().map(String::from).collect(),
            relations: sp.path.relation_names(g).into_iter().map(String::from).collect(),
            score: sp.score,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::parse_graph;

    fn graph(text: &str) -> Graph {
        parse_graph(text, std::path::Path::new("t.tsv")).unwrap()
    }

    #[test]
    fn midpoint_and_zero_distance() {
        let cfg = PathScoringConfig::default();
        assert!((normalize_edge_score(-350.0, &cfg).unwrap() - 0.5).abs() < 1e-15);
        let expect = 1.0 / (1.0 + (-3.5f64).exp());
        assert!((normalize_edge_score(0.0, &cfg).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.97069).abs() < 1e-5);
        assert!(normalize_edge_score(-1e6, &cfg).unwrap() < 1e-300);
        assert!(matches!(normalize_edge_score(f64::NAN, &cfg), Err(Error::Numeric(_))));
    }

    #[test]
    fn geometric_mean_cases() {
        assert!((geometric_mean(&[0.64]) - 0.64).abs() < 1e-15);
        assert!((geometric_mean(&[0.25, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(geometric_mean(&[0.3, 0.0, 0.9]), 0.0);
    }

    #[test]
    fn direct_edge_is_returned() {
        let g = graph("A\tdrug\ttarget\tB\tgene\nB\tgene\tassoc\tC\tdisease\n");
        let paths = k_shortest_paths(&g, "B", "A", 5, &PathScoringConfig::default()).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 1);
        assert!(!paths[0].forward[0]);
    }

    #[test]
    fn synergistic_only_link_gives_nothing() {
        let g = graph("A\tdrug\tsynergistic interaction\tB\tdrug\n");
        assert!(k_shortest_paths(&g, "A", "B", 5, &PathScoringConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn diamond_has_two_routes() {
        let g = graph(
            "S\tdisease\tassoc\tX\tgene\n\
             S\tdisease\tassoc\tY\tgene\n\
             X\tgene\ttarget\tT\tdrug\n\
             T\tdrug\ttarget\tY\tgene\n\
             X\tgene\tppi\tZ\tgene\n\
             Z\tgene\tppi\tW\tgene\n",
        );
        let paths = k_shortest_paths(&g, "S", "T", 10, &PathScoringConfig::default()).unwrap();
        let ids: Vec<Vec<&str>> = paths.iter().map(|p| p.node_ids(&g)).collect();
        assert_eq!(ids, vec![vec!["S", "X", "T"], vec!["S", "Y", "T"]]);
        let one = k_shortest_paths(&g, "S", "T", 1, &PathScoringConfig::default()).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn missing_endpoint_is_not_found() {
        let g = graph("A\tdrug\ttarget\tB\tgene\n");
        let cfg = PathScoringConfig::default();
        assert!(matches!(k_shortest_paths(&g, "A", "Q", 1, &cfg), Err(Error::NotFound(_))));
        assert!(matches!(k_shortest_paths(&g, "A", "A", 1, &cfg), Err(Error::Validation(_))));
    }
}
