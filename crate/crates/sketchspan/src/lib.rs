//! Linear graph sketching for fully dynamic spanning forests.
//!
//! The crate provides:
//!
//! - [`support_find`]: a linear sketch answering support queries over a
//!   turnstile-updated vector, with separate Fail and arbitrary-error
//!   probabilities;
//! - [`agm`]: per-vertex banks of those sketches whose component sums
//!   expose cut edges, with the round-based merging query that extracts a
//!   spanning forest from insert/delete edge streams;
//! - [`graph`]: the exact oracle, stream parsing, forest verification,
//!   and the insert-only baseline;
//! - [`distributed`]: the one-shot model where each vertex sends one
//!   message from its local view and a referee reconstructs the forest,
//!   with exact message-size accounting;
//! - [`lab`]: the hard-instance apparatus — the subset universal-relation
//!   distribution and its geometric size ladder, sketch-backed one-way
//!   protocols, an unconditionally correct randomized encode/decode
//!   scheme, planted block graphs, the instance embedding, and the n-fold
//!   reduction that ships sketch memory between parties;
//! - [`experiments`]: seeded, replayable drivers for all of the above.

#![forbid(unsafe_code)]

pub mod agm;
pub mod bitpack;
pub mod distributed;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod lab;
pub mod m61;
pub mod prf;
pub mod support_find;

pub use error::{Error, Result};
pub use prf::Seed256;
