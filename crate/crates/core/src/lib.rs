pub mod analytics;
pub mod error;
pub mod evidence;
pub mod hake;
pub mod kg;
pub mod pathfind;
pub mod signature;
pub mod pipeline;
pub mod survival;
pub mod synthetic;

pub use error::{Error, Result};

/// Guide chapters compiled as doc-tests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/knowledge-graph.md")]
    pub struct KnowledgeGraph;
    #[doc = include_str!("../../../book/src/embedding.md")]
    pub struct Embedding;
    #[doc = include_str!("../../../book/src/paths.md")]
    pub struct Paths;
    #[doc = include_str!("../../../book/src/signatures.md")]
    pub struct Signatures;
    #[doc = include_str!("../../../book/src/survival.md")]
    pub struct Survival;
    #[doc = include_str!("../../../book/src/evidence.md")]
    pub struct Evidence;
    #[doc = include_str!("../../../book/src/analytics.md")]
    pub struct Analytics;
    #[doc = include_str!("../../../book/src/pipeline.md")]
    pub struct Pipeline;
}
