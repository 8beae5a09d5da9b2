//! One-shot distributed sketching: vertices send, a referee reconstructs.
//!
//! Each vertex sees only its own id, its neighbor list, and the shared
//! random seed. From that it computes one message: its `R` round sketches,
//! serialized. The referee, holding all `n` messages and the same seed,
//! reassembles the vertex bank and runs the spanning-forest query. Message
//! sizes are data-independent, so the bit accounting is exact.

use crate::agm::{AgmParams, EdgeSlot, SpanningForest, VertexSketchBank};
use crate::error::{Error, Result};
use crate::graph::{verify_forest, ExactGraph};
use crate::prf::Seed256;
use crate::support_find::SupportFindSketch;

/// What one vertex knows: its id, its sorted neighbor list, and `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexView {
    pub vertex_id: u64,
    pub neighbors: Vec<u64>,
    pub n: u64,
}

impl VertexView {
    pub fn new(vertex_id: u64, mut neighbors: Vec<u64>, n: u64) -> Result<Self> {
        if vertex_id >= n {
            return Err(Error::VertexOutOfRange { vertex: vertex_id, n });
        }
        neighbors.sort_unstable();
        neighbors.dedup();
        for &w in &neighbors {
            if w >= n {
                return Err(Error::VertexOutOfRange { vertex: w, n });
            }
            if w == vertex_id {
                return Err(Error::SelfLoop(w));
            }
        }
        Ok(VertexView { vertex_id, neighbors, n })
    }
}

/// One vertex's message: `R` serialized round sketches of its signed
/// edge-incidence vector. Decodable given the parameters and shared seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub payload: Vec<u8>,
    pub bit_length: u64,
}

/// Computes the message a vertex sends: for each round, the sketch of its
/// incidence vector (`+1` on edges where it is the smaller endpoint, `-1`
/// otherwise). Deterministic in (view, params, seed); the length depends
/// only on the parameters.
pub fn vertex_message(
    view: &VertexView,
    params: &AgmParams,
    shared_seed: &Seed256,
) -> Result<Message> {
    if view.n != params.n {
        return Err(Error::InvalidParameter(format!(
            "view is over {} vertices but parameters say {}",
            view.n, params.n
        )));
    }
    let mut payload = Vec::with_capacity(
        params.rounds as usize * params.sketch.serialized_len(),
    );
    for r in 0..params.rounds {
        let mut sk = SupportFindSketch::new(params.sketch, crate::agm::round_seed(shared_seed, r));
        for &w in &view.neighbors {
            let slot = EdgeSlot::new(view.vertex_id, w, view.n)?;
            sk.update(slot.index, slot.sign(view.vertex_id))?;
        }
        payload.extend_from_slice(&sk.to_bytes());
    }
    let bit_length = 8 * payload.len() as u64;
    Ok(Message { payload, bit_length })
}

/// Reassembles the vertex bank from all `n` messages.
pub fn referee_bank(
    messages: &[Message],
    params: AgmParams,
    shared_seed: Seed256,
) -> Result<VertexSketchBank> {
    if messages.len() as u64 != params.n {
        return Err(Error::InvalidParameter(format!(
            "expected {} messages, got {}",
            params.n,
            messages.len()
        )));
    }
    let mut bank = VertexSketchBank::init(params, shared_seed);
    for (u, msg) in messages.iter().enumerate() {
        bank.set_row_from_bytes(u as u64, &msg.payload)?;
    }
    Ok(bank)
}

/// The referee's output: reassemble and run the query. Identical to the
/// centralized query on the same graph and seed.
pub fn referee_decode(
    messages: &[Message],
    params: AgmParams,
    shared_seed: Seed256,
) -> Result<SpanningForest> {
    Ok(referee_bank(messages, params, shared_seed)?.query())
}

/// Outcome of one full simulation with exact message accounting.
#[derive(Clone, Debug)]
pub struct SimReport {
    pub forest: SpanningForest,
    pub valid: bool,
    pub avg_message_bits: f64,
    pub max_message_bits: u64,
    pub total_message_bits: u64,
}

/// Runs the whole model on a concrete graph: builds every vertex's view,
/// computes its message, feeds the referee, and verifies the forest
/// against the graph. Messages are absorbed one at a time, so peak memory
/// stays near one message plus the bank; all-zero messages (isolated
/// vertices) are recognized without reparsing.
pub fn simulate(g: &ExactGraph, delta: f64, shared_seed: Seed256) -> Result<SimReport> {
    let params = crate::agm::agm_params(g.n(), delta)?;
    let adjacency = g.adjacency();
    let zero_message = vertex_message(
        &VertexView::new(0, Vec::new(), g.n())?,
        &params,
        &shared_seed,
    )?;
    let mut bank = VertexSketchBank::init(params, shared_seed);
    let mut total_bits = 0u64;
    let mut max_bits = 0u64;
    for u in 0..g.n() {
        let neighbors = &adjacency[u as usize];
        if neighbors.is_empty() {
            // identical to the cached all-zero message; account and move on
            total_bits += zero_message.bit_length;
            max_bits = max_bits.max(zero_message.bit_length);
            continue;
        }
        let msg = vertex_message(
            &VertexView::new(u, neighbors.clone(), g.n())?,
            &params,
            &shared_seed,
        )?;
        total_bits += msg.bit_length;
        max_bits = max_bits.max(msg.bit_length);
        bank.set_row_from_bytes(u, &msg.payload)?;
    }
    let forest = bank.query();
    let valid = verify_forest(&forest, g).is_valid;
    Ok(SimReport {
        forest,
        valid,
        avg_message_bits: total_bits as f64 / g.n() as f64,
        max_message_bits: max_bits,
        total_message_bits: total_bits,
    })
}
