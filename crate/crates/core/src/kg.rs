//! Typed knowledge-graph store.
//!
//! A [`Graph`] holds entities and relation-labelled triples, each carrying the
//! number of literature articles that support it. Entities and relations are
//! addressed by dense indices internally; string ids are resolved once through
//! [`Graph::entity_index`] and [`Graph::relation_index`].
//!
//! The on-disk triple format is a headerless tab-separated file:
//!
//! ```text
//! head_id  head_kind  relation  tail_id  tail_kind  [article_count]
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relation label excluded from mechanistic path search by default.
pub const SYNERGISTIC_INTERACTION: &str = "synergistic interaction";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Drug,
    Disease,
    Gene,
    Pathway,
    Phenotype,
    Other,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Drug => "drug",
            EntityKind::Disease => "disease",
            EntityKind::Gene => "gene",
            EntityKind::Pathway => "pathway",
            EntityKind::Phenotype => "phenotype",
            EntityKind::Other => "other",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = Error;

    /// Accepts the canonical names plus the PrimeKG node types that map onto
    /// them (`gene/protein`, `effect/phenotype`). Anything else is `Other`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Validation("empty entity kind".into()));
        }
        Ok(match s.to_ascii_lowercase().as_str() {
            "drug" => EntityKind::Drug,
            "disease" => EntityKind::Disease,
            "gene" | "gene/protein" | "protein" => EntityKind::Gene,
            "pathway" => EntityKind::Pathway,
            "phenotype" | "effect/phenotype" => EntityKind::Phenotype,
            _ => EntityKind::Other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub name: String,
    pub kind: EntityKind,
}

/// A directed fact `(head, relation, tail)` over graph indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
    pub article_count: u64,
}

impl Triple {
    pub fn key(&self) -> (usize, usize, usize) {
        (self.head, self.relation, self.tail)
    }
}

/// One incident edge as seen from a query entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    /// Index into [`Graph::triples`].
    pub triple: usize,
    /// The endpoint that is not the query entity (the query itself for self-loops).
    pub other: usize,
    /// `true` when the query entity is the triple's head.
    pub forward: bool,
}

/// Immutable knowledge graph with bidirectional adjacency and a name index.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    entities: Vec<Entity>,
    entity_index: HashMap<String, usize>,
    relations: Vec<String>,
    relation_index: HashMap<String, usize>,
    triples: Vec<Triple>,
    triple_index: HashMap<(usize, usize, usize), usize>,
    adjacency: Vec<Vec<usize>>,
    name_index: HashMap<String, Vec<usize>>,
    by_kind: BTreeMap<EntityKind, Vec<usize>>,
}

fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

impl Graph {
    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn entity(&self, idx: usize) -> &Entity {
        &self.entities[idx]
    }

    pub fn entity_index(&self, id: &str) -> Option<usize> {
        self.entity_index.get(id).copied()
    }

    pub fn require_entity(&self, id: &str) -> Result<usize> {
        self.entity_index(id)
            .ok_or_else(|| Error::NotFound(format!("entity '{id}'")))
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    pub fn relation_name(&self, idx: usize) -> &str {
        &self.relations[idx]
    }

    pub fn contains(&self, head: usize, relation: usize, tail: usize) -> bool {
        self.triple_index.contains_key(&(head, relation, tail))
    }

    pub fn triple_id(&self, head: usize, relation: usize, tail: usize) -> Option<usize> {
        self.triple_index.get(&(head, relation, tail)).copied()
    }

    /// Entity indices of one kind, in insertion order.
    pub fn entities_of_kind(&self, kind: EntityKind) -> &[usize] {
        self.by_kind.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of the triples incident to `idx` (each triple listed once).
    pub fn incident(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    /// Entities whose trimmed, lower-cased name equals the trimmed, lower-cased query.
    pub fn lookup_name(&self, name: &str) -> &[usize] {
        self.name_index
            .get(&normalize_name(name))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All incident triples of `entity` in either direction whose relation is
    /// not excluded, sorted by `(relation label, other endpoint id)`.
    pub fn neighbors(&self, entity: &str, exclude: &HashSet<String>) -> Result<Vec<Neighbor>> {
        let idx = self.require_entity(entity)?;
        Ok(self.neighbors_of(idx, exclude))
    }

    pub fn neighbors_of(&self, idx: usize, exclude: &HashSet<String>) -> Vec<Neighbor> {
        let mut out: Vec<Neighbor> = self.adjacency[idx]
            .iter()
            .filter_map(|&ti| {
                let t = &self.triples[ti];
                if exclude.contains(&self.relations[t.relation]) {
                    return None;
                }
                let forward = t.head == idx;
                let other = if forward { t.tail } else { t.head };
                Some(Neighbor {
                    triple: ti,
                    other,
                    forward,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            let ta = &self.triples[a.triple];
            let tb = &self.triples[b.triple];
            self.relations[ta.relation]
                .cmp(&self.relations[tb.relation])
                .then_with(|| self.entities[a.other].id.cmp(&self.entities[b.other].id))
                .then_with(|| a.triple.cmp(&b.triple))
        });
        out
    }

    /// Overrides display names from an `id -> name` map; unknown ids are ignored.
    pub fn set_names<'a>(&mut self, names: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        for (id, name) in names {
            if name.trim().is_empty() {
                return Err(Error::Validation(format!("empty name for entity '{id}'")));
            }
            if let Some(&idx) = self.entity_index.get(id) {
                self.entities[idx].name = name.to_string();
            }
        }
        self.rebuild_name_index();
        Ok(())
    }

    fn rebuild_name_index(&mut self) {
        self.name_index.clear();
        for (i, e) in self.entities.iter().enumerate() {
            self.name_index.entry(normalize_name(&e.name)).or_default().push(i);
        }
    }

    /// Writes the headerless triple TSV that [`load_graph`] reads.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in &self.triples {
            let h = &self.entities[t.head];
            let tl = &self.entities[t.tail];
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                h.id, h.kind, self.relations[t.relation], tl.id, tl.kind, t.article_count
            )?;
        }
        Ok(())
    }

    /// Loads a graph cache written by [`Graph::save_cache`].
    pub fn load_cache(path: impl AsRef<Path>) -> Result<Graph> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cache: GraphCache = serde_json::from_str(&text)?;
        if cache.format != CACHE_FORMAT {
            return Err(Error::Data(format!(
                "{}: not a graph cache (format '{}')",
                path.display(),
                cache.format
            )));
        }
        Graph::from_cache(cache)
    }

    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let cache = self.to_cache();
        let text = serde_json::to_string(&cache)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    fn to_cache(&self) -> GraphCache {
        GraphCache {
            format: CACHE_FORMAT.to_string(),
            version: CACHE_VERSION,
            entities: self.entities.clone(),
            triples: self
                .triples
                .iter()
                .map(|t| CachedTriple {
                    head: self.entities[t.head].id.clone(),
                    relation: self.relations[t.relation].clone(),
                    tail: self.entities[t.tail].id.clone(),
                    article_count: t.article_count,
                })
                .collect(),
        }
    }

    fn from_cache(cache: GraphCache) -> Result<Graph> {
        let mut b = GraphBuilder::default();
        for e in &cache.entities {
            b.add_entity(&e.id, e.kind)?;
        }
        for t in &cache.triples {
            let hk = cache_kind(&b, &t.head)?;
            let tk = cache_kind(&b, &t.tail)?;
            b.add_triple(&t.head, hk, &t.relation, &t.tail, tk, t.article_count)?;
        }
        let mut g = b.build();
        g.set_names(cache.entities.iter().map(|e| (e.id.as_str(), e.name.as_str())))?;
        Ok(g)
    }
}

fn cache_kind(b: &GraphBuilder, id: &str) -> Result<EntityKind> {
    b.kinds
        .get(id)
        .copied()
        .ok_or_else(|| Error::Data(format!("graph cache references unknown entity '{id}'")))
}

const CACHE_FORMAT: &str = "repurpose-graph";
const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphCache {
    format: String,
    version: u32,
    entities: Vec<Entity>,
    triples: Vec<CachedTriple>,
}

#[derive(Serialize, Deserialize)]
struct CachedTriple {
    head: String,
    relation: String,
    tail: String,
    article_count: u64,
}

/// Incremental construction; duplicate triples keep the maximal article count.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    entities: Vec<Entity>,
    kinds: HashMap<String, EntityKind>,
    index: HashMap<String, usize>,
    relations: Vec<String>,
    relation_index: HashMap<String, usize>,
    triples: Vec<Triple>,
    triple_index: HashMap<(usize, usize, usize), usize>,
}

impl GraphBuilder {
    pub fn add_entity(&mut self, id: &str, kind: EntityKind) -> Result<usize> {
        if id.is_empty() {
            return Err(Error::Validation("empty entity id".into()));
        }
        if let Some(&idx) = self.index.get(id) {
            let existing = self.entities[idx].kind;
            if existing != kind {
                return Err(Error::Validation(format!(
                    "entity '{id}' declared as both {existing} and {kind}"
                )));
            }
            return Ok(idx);
        }
        let idx = self.entities.len();
        self.entities.push(Entity {
            id: id.to_string(),
            name: id.to_string(),
            kind,
        });
        self.kinds.insert(id.to_string(), kind);
        self.index.insert(id.to_string(), idx);
        Ok(idx)
    }

    fn relation(&mut self, name: &str) -> Result<usize> {
        if name.is_empty() {
            return Err(Error::Validation("empty relation label".into()));
        }
        if let Some(&r) = self.relation_index.get(name) {
            return Ok(r);
        }
        let r = self.relations.len();
        self.relations.push(name.to_string());
        self.relation_index.insert(name.to_string(), r);
        Ok(r)
    }

    pub fn add_triple(
        &mut self,
        head: &str,
        head_kind: EntityKind,
        relation: &str,
        tail: &str,
        tail_kind: EntityKind,
        article_count: u64,
    ) -> Result<()> {
        let h = self.add_entity(head, head_kind)?;
        let t = self.add_entity(tail, tail_kind)?;
        let r = self.relation(relation)?;
        match self.triple_index.get(&(h, r, t)) {
            Some(&ti) => {
                let existing = &mut self.triples[ti];
                existing.article_count = existing.article_count.max(article_count);
            }
            None => {
                self.triple_index.insert((h, r, t), self.triples.len());
                self.triples.push(Triple {
                    head: h,
                    relation: r,
                    tail: t,
                    article_count,
                });
            }
        }
        Ok(())
    }

    pub fn build(self) -> Graph {
        let mut adjacency = vec![Vec::new(); self.entities.len()];
        for (ti, t) in self.triples.iter().enumerate() {
            adjacency[t.head].push(ti);
            if t.tail != t.head {
                adjacency[t.tail].push(ti);
            }
        }
        let mut by_kind: BTreeMap<EntityKind, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.entities.iter().enumerate() {
            by_kind.entry(e.kind).or_default().push(i);
        }
        let mut g = Graph {
            entities: self.entities,
            entity_index: self.index,
            relations: self.relations,
            relation_index: self.relation_index,
            triples: self.triples,
            triple_index: self.triple_index,
            adjacency,
            name_index: HashMap::new(),
            by_kind,
        };
        g.rebuild_name_index();
        g
    }
}

/// Parses triple TSV text. `origin` is used only in error messages.
pub fn parse_graph(text: &str, origin: &Path) -> Result<Graph> {
    let mut b = GraphBuilder::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 && cols.len() != 6 {
            return Err(err(format!("expected 5 or 6 tab-separated columns, found {}", cols.len())));
        }
        let head_kind: EntityKind = cols[1].parse().map_err(|e: Error| err(e.to_string()))?;
        let tail_kind: EntityKind = cols[4].parse().map_err(|e: Error| err(e.to_string()))?;
        let count = match cols.get(5) {
            Some(c) => c
                .trim()
                .parse::<u64>()
                .map_err(|_| err(format!("article_count '{c}' is not a nonnegative integer")))?,
            None => 0,
        };
        b.add_triple(cols[0].trim(), head_kind, cols[2].trim(), cols[3].trim(), tail_kind, count)
            .map_err(|e| match e {
                Error::Validation(msg) => Error::Validation(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
    }
    Ok(b.build())
}

/// Reads a triple TSV file into a [`Graph`].
pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text, path)
}

/// Reads an optional `id<TAB>name` file of display names.
pub fn load_names(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, name) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "expected 'id<TAB>name'".into(),
        })?;
        out.push((id.trim().to_string(), name.trim().to_string()));
    }
    Ok(out)
}

/// Maps free text onto a fixed-length real vector.
pub trait TextEncoder {
    fn dim(&self) -> usize;
    fn encode(&self, text: &str) -> Vec<f64>;
}

/// Character-trigram term-frequency encoder hashed into a fixed number of buckets.
#[derive(Debug, Clone)]
pub struct TrigramEncoder {
    buckets: usize,
}

impl TrigramEncoder {
    pub fn new(buckets: usize) -> Self {
        assert!(buckets > 0, "trigram encoder needs at least one bucket");
        Self { buckets }
    }

    /// Trigrams of the lower-cased text padded with one space on each side.
    pub fn trigrams(text: &str) -> Vec<String> {
        let norm = text.trim().to_lowercase();
        if norm.is_empty() {
            return Vec::new();
        }
        let chars: Vec<char> = format!(" {norm} ").chars().collect();
        chars.windows(3).map(|w| w.iter().collect()).collect()
    }
}

impl Default for TrigramEncoder {
    fn default() -> Self {
        Self::new(4096)
    }
}

// FNV-1a; std's hasher is randomly seeded per process.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl TextEncoder for TrigramEncoder {
    fn dim(&self) -> usize {
        self.buckets
    }

    fn encode(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.buckets];
        for tri in Self::trigrams(text) {
            v[(fnv1a(&tri) % self.buckets as u64) as usize] += 1.0;
        }
        v
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        None
    } else {
        Some(dot / (na * nb))
    }
}

/// Resolves free text to a disease entity id.
///
/// A case-insensitive exact name match among disease entities always wins;
/// otherwise the disease whose encoded name is most cosine-similar to the
/// encoded text is returned. Ties go to the lexicographically smallest id.
pub fn map_disease(g: &Graph, text: &str, enc: &dyn TextEncoder) -> Result<String> {
    let diseases = g.entities_of_kind(EntityKind::Disease);
    if diseases.is_empty() {
        return Err(Error::NotFound("graph has no disease entities".into()));
    }
    let exact = g
        .lookup_name(text)
        .iter()
        .filter(|&&i| g.entity(i).kind == EntityKind::Disease)
        .map(|&i| &g.entity(i).id)
        .min();
    if let Some(id) = exact {
        return Ok(id.clone());
    }
    let query = enc.encode(text);
    if query.iter().all(|&x| x == 0.0) {
        return Err(Error::Encoding(format!("text '{text}' encodes to the zero vector")));
    }
    let mut best: Option<(f64, &str)> = None;
    for &i in diseases {
        let e = g.entity(i);
        let Some(sim) = cosine(&query, &enc.encode(&e.name)) else {
            continue;
        };
        best = match best {
            Some((bs, bid)) if bs > sim || (bs == sim && bid <= e.id.as_str()) => Some((bs, bid)),
            _ => Some((sim, e.id.as_str())),
        };
    }
    best.map(|(_, id)| id.to_string())
        .ok_or_else(|| Error::Encoding("no disease name has a nonzero encoding".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_graph(text, Path::new("test.tsv"))
    }

    #[test]
    fn empty_file_gives_empty_graph() {
        let g = parse("").unwrap();
        assert_eq!(g.num_entities(), 0);
        assert_eq!(g.num_triples(), 0);
    }

    #[test]
    fn single_row() {
        let g = parse("D1\tdisease\tindication\tC1\tdrug\t3\n").unwrap();
        assert_eq!(g.num_entities(), 2);
        assert_eq!(g.num_triples(), 1);
        assert_eq!(g.triples()[0].article_count, 3);
        assert_eq!(g.entity(g.triples()[0].tail).kind, EntityKind::Drug);
    }

    #[test]
    fn duplicate_rows_collapse_to_max_count() {
        let g = parse("A\tgene\tbinds\tB\tgene\t2\nA\tgene\tbinds\tB\tgene\t7\nA\tgene\tbinds\tB\tgene\t1\n").unwrap();
        assert_eq!(g.num_triples(), 1);
        assert_eq!(g.triples()[0].article_count, 7);
    }

    #[test]
    fn count_column_is_optional() {
        let g = parse("A\tgene\tbinds\tB\tgene\n").unwrap();
        assert_eq!(g.triples()[0].article_count, 0);
    }

    #[test]
    fn malformed_rows_name_the_line() {
        let err = parse("A\tgene\tbinds\tB\tgene\t1\nA\tgene\tbinds\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("A\tgene\tbinds\tB\tgene\tmany\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse("A\tgene\tbinds\tB\tgene\t-1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn kind_conflict_is_rejected() {
        let err = parse("A\tgene\tbinds\tB\tgene\t1\nA\tdrug\ttargets\tB\tgene\t1\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn neighbors_filters_and_sorts() {
        let g = parse(
            "X\tdrug\tsynergistic interaction\tY\tdrug\n\
             X\tdrug\ttarget\tG2\tgene\n\
             G1\tgene\ttarget\tX\tdrug\n\
             X\tdrug\tindication\tD\tdisease\n\
             I\tother\tlinks\tJ\tother\n",
        )
        .unwrap();
        let none = HashSet::new();
        let all = g.neighbors("X", &none).unwrap();
        let labels: Vec<(&str, &str)> = all
            .iter()
            .map(|n| (g.relation_name(g.triples()[n.triple].relation), g.entity(n.other).id.as_str()))
            .collect();
        assert_eq!(
            labels,
            vec![
                ("indication", "D"),
                ("synergistic interaction", "Y"),
                ("target", "G1"),
                ("target", "G2"),
            ]
        );
        assert!(!all[2].forward);
        let ex: HashSet<String> = [SYNERGISTIC_INTERACTION.to_string()].into();
        assert_eq!(g.neighbors("X", &ex).unwrap().len(), 3);
        assert!(matches!(g.neighbors("nope", &none), Err(Error::NotFound(_))));
    }

    #[test]
    fn isolated_entity_has_no_neighbors() {
        let mut b = GraphBuilder::default();
        b.add_entity("lonely", EntityKind::Gene).unwrap();
        let g = b.build();
        assert!(g.neighbors("lonely", &HashSet::new()).unwrap().is_empty());
    }

    fn named_graph() -> Graph {
        let mut g = parse(
            "D1\tdisease\tindication\tC1\tdrug\n\
             D2\tdisease\tindication\tC1\tdrug\n\
             D3\tdisease\tindication\tC1\tdrug\n",
        )
        .unwrap();
        g.set_names([("D1", "Melanoma"), ("D2", "asthma"), ("D3", "melanoma ")]).unwrap();
        g
    }

    #[test]
    fn exact_match_is_case_insensitive_and_smallest_id() {
        let g = named_graph();
        let enc = TrigramEncoder::default();
        assert_eq!(map_disease(&g, "melanoma", &enc).unwrap(), "D1");
        assert_eq!(map_disease(&g, "  ASTHMA", &enc).unwrap(), "D2");
    }

    #[test]
    fn fallback_uses_cosine_similarity() {
        let g = named_graph();
        let enc = TrigramEncoder::default();
        assert_eq!(map_disease(&g, "cutaneous melanoma", &enc).unwrap(), "D1");
        assert!(matches!(map_disease(&g, "   ", &enc), Err(Error::Encoding(_))));
    }

    #[test]
    fn no_diseases_is_not_found() {
        let g = parse("A\tgene\tbinds\tB\tgene\n").unwrap();
        assert!(matches!(
            map_disease(&g, "melanoma", &TrigramEncoder::default()),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn trigram_encoding_is_deterministic() {
        let enc = TrigramEncoder::new(64);
        assert_eq!(enc.encode("Melanoma"), enc.encode("melanoma"));
        assert_eq!(enc.encode("ab").len(), 64);
        assert_eq!(TrigramEncoder::trigrams("ab"), vec![" ab", "ab "]);
    }
}
