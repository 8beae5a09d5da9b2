//! The n-fold reduction: answering n relation instances at once through a
//! fully dynamic spanning-forest sketch.
//!
//! Build a bipartite graph with the universe on the left and one vertex
//! per instance on the right. The set holder inserts an edge `(x, n + i)`
//! for every `x` in `S_i`, then ships the sketch memory — the serialized
//! bank payload — as the one-way message. The receiver deletes `(x, n+i)`
//! for every `x` in `T_i` and queries; in any correct spanning forest,
//! every forest neighbor of right vertex `i` is an element of
//! `S_i \ T_i`, so all n answers are read off one forest.

use crate::agm::{agm_params, SpanningForest, VertexSketchBank};
use crate::error::{Error, Result};
use crate::graph::{verify_forest, ExactGraph};
use crate::prf::Seed256;

use super::ur::UrInstance;

/// Everything one run of the reduction produces.
#[derive(Clone, Debug)]
pub struct NfoldOutcome {
    /// Per-instance answer: a forest neighbor of the instance vertex.
    pub answers: Vec<Option<u64>>,
    /// Whether every answer lies in its `S_i \ T_i`.
    pub all_correct: bool,
    /// Whether the forest verified against the true bipartite graph.
    pub forest_valid: bool,
    /// Bytes of sketch memory shipped between the two phases.
    pub communicated_bytes: usize,
    pub forest: SpanningForest,
}

/// Runs the two-phase protocol on `n` instances over the universe `[n]`.
/// With probability at least `1 - delta` the forest is correct and then
/// all answers are simultaneously correct.
pub fn nfold_reduction(
    instances: &[UrInstance],
    delta: f64,
    shared_seed: Seed256,
) -> Result<NfoldOutcome> {
    let n = instances.len() as u64;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one instance".into()));
    }
    for inst in instances {
        if inst.s.iter().any(|&x| x >= n) {
            return Err(Error::InvalidParameter(format!(
                "instance elements must lie in [0, {n})"
            )));
        }
    }
    let params = agm_params(2 * n, delta)?;

    // set-holder phase: insert S_i edges, then ship the memory
    let mut bank = VertexSketchBank::init(params, shared_seed);
    let mut truth = ExactGraph::new(2 * n);
    for (i, inst) in instances.iter().enumerate() {
        for &x in &inst.s {
            bank.update(x, n + i as u64, 1)?;
            truth.insert(x, n + i as u64)?;
        }
    }
    let shipped = bank.payload_bytes();
    drop(bank);

    // receiver phase: rebuild from the shipped bytes, delete T_i, query
    let mut received = VertexSketchBank::from_payload(params, shared_seed, &shipped)?;
    if received.payload_bytes() != shipped {
        return Err(Error::Format("shipped memory failed to round-trip".into()));
    }
    for (i, inst) in instances.iter().enumerate() {
        for &x in &inst.t {
            received.update(x, n + i as u64, -1)?;
            truth.delete(x, n + i as u64)?;
        }
    }
    let forest = received.query();
    let forest_valid = verify_forest(&forest, &truth).is_valid;

    let answers: Vec<Option<u64>> = (0..n)
        .map(|i| forest.neighbors(n + i).first().copied())
        .collect();
    let all_correct = instances.iter().zip(&answers).all(|(inst, ans)| match ans {
        Some(x) => inst.s.binary_search(x).is_ok() && inst.t.binary_search(x).is_err(),
        None => false,
    });
    Ok(NfoldOutcome {
        answers,
        all_correct,
        forest_valid,
        communicated_bytes: shipped.len(),
        forest,
    })
}
