//! End-to-end orchestration: candidate generation, per-pair evidence and
//! scoring, hazard estimation, and the evaluation protocols.

mod config;
mod context;
mod eval;
mod run;

pub use config::*;
pub use context::*;
pub use eval::*;
pub use run::*;
