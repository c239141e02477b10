use rand::Rng;

use crate::error::{Error, Result};
use crate::kg::{Graph, Triple};

/// Attempts made before a corruption is declared impossible.
pub const MAX_NEGATIVE_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Head,
    Tail,
}

/// Corrupts the head or tail (fair coin per attempt) with a uniformly drawn
/// entity of the same kind, rejecting candidates already present in `g`.
pub fn sample_negative<R: Rng>(g: &Graph, pos: &Triple, rng: &mut R) -> Result<Triple> {
    for _ in 0..MAX_NEGATIVE_RETRIES {
        let slot = if rng.gen_bool(0.5) { Slot::Head } else { Slot::Tail };
        if let Some(t) = draw(g, pos, slot, rng) {
            return Ok(t);
        }
    }
    Err(exhausted(g, pos))
}

/// Like [`sample_negative`] but always corrupts `slot`.
pub fn sample_negative_slot<R: Rng>(g: &Graph, pos: &Triple, slot: Slot, rng: &mut R) -> Result<Triple> {
    for _ in 0..MAX_NEGATIVE_RETRIES {
        if let Some(t) = draw(g, pos, slot, rng) {
            return Ok(t);
        }
    }
    Err(exhausted(g, pos))
}

fn draw<R: Rng>(g: &Graph, pos: &Triple, slot: Slot, rng: &mut R) -> Option<Triple> {
    let original = match slot {
        Slot::Head => pos.head,
        Slot::Tail => pos.tail,
    };
    let pool = g.entities_of_kind(g.entity(original).kind);
    let cand = pool[rng.gen_range(0..pool.len())];
    let t = match slot {
        Slot::Head => Triple {
            head: cand,
            article_count: 0,
            ..*pos
        },
        Slot::Tail => Triple {
            tail: cand,
            article_count: 0,
            ..*pos
        },
    };
    (!g.contains(t.head, t.relation, t.tail)).then_some(t)
}

fn exhausted(g: &Graph, pos: &Triple) -> Error {
    Error::Exhausted(format!(
        "no corruption of ({}, {}, {}) found in {MAX_NEGATIVE_RETRIES} attempts",
        g.entity(pos.head).id,
        g.relation_name(pos.relation),
        g.entity(pos.tail).id
    ))
}
