//! Fully dynamic spanning forest via per-vertex linear sketches.
//!
//! Every vertex `u` keeps, for each of `R` rounds, a support-find sketch of
//! its signed edge-incidence vector `z_u` over the universe of unordered
//! vertex pairs: edge `(u, v)` with `u < v` contributes `+1` to `z_u` and
//! `-1` to `z_v`. Sketches of one round share their randomness across
//! vertices, so for any vertex set `s` the sum of its members' sketches is
//! exactly the sketch of the cut vector of `s` (internal edges cancel by
//! sign). The query runs rounds of component merging: each current
//! component queries its summed round sketch for one outgoing edge,
//! validated edges merge components, and after `R` rounds the collected
//! edges form a spanning forest with probability at least `1 - delta`.

use crate::error::{Error, Result};
use crate::graph::{Partition, UnionFind};
use crate::prf::{tag, Seed256};
use crate::support_find::{SketchParams, SupportFindSketch, SupportResult};

/// Hard cap on the per-query Fail probability delta'. Chosen strictly below
/// `1/(6e)` so the bad-round amplification keeps `6e * delta' <= 1/2`.
pub fn delta_prime_cap() -> f64 {
    1.0 / (12.0 * std::f64::consts::E)
}

/// Derived parameters of the spanning-forest sketch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgmParams {
    /// Number of vertices.
    pub n: u64,
    /// Target failure probability of a spanning-forest query.
    pub delta: f64,
    /// Per-query Fail probability of each support-find sketch.
    pub delta_prime: f64,
    /// Per-sketch arbitrary-error probability, `delta / (2 n R)`.
    pub delta_dprime: f64,
    /// Number of rounds R.
    pub rounds: u32,
    /// Size of the unordered-pair universe, `n (n - 1) / 2`.
    pub edge_universe: u64,
    /// Shape of each per-vertex per-round sketch.
    pub sketch: SketchParams,
}

/// Derives all sketch parameters from `(n, delta)`:
/// `delta' = min(1/(12e), 2^(-log2(n/delta)/log2 n))` and
/// `R = ceil(log_{3/2} n) + max(ceil(log_{3/2} n),
///      ceil(log2(2/delta) / log2(1/(6e delta'))))`.
pub fn agm_params(n: u64, delta: f64) -> Result<AgmParams> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 vertices, got {n}")));
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must lie strictly inside (0, 1), got {delta}"
        )));
    }
    // below 2^-n the trivial bitmap of all pairs is smaller; reject
    let trivial_floor = if n < 1024 { 2f64.powi(-(n as i32)) } else { 0.0 };
    if delta <= trivial_floor {
        return Err(Error::InvalidParameter(format!(
            "delta must exceed 2^-n = {trivial_floor:e}"
        )));
    }
    let nf = n as f64;
    let candidate = 2f64.powf(-((nf / delta).log2() / nf.log2()));
    let delta_prime = candidate.min(delta_prime_cap());
    let log32 = (nf.ln() / 1.5f64.ln()).ceil() as u32;
    let amplification =
        ((2.0 / delta).log2() / (1.0 / (6.0 * std::f64::consts::E * delta_prime)).log2()).ceil()
            as u32;
    let rounds = log32 + log32.max(amplification);
    let delta_dprime = delta / (2.0 * nf * rounds as f64);
    let edge_universe = n * (n - 1) / 2;
    let sketch = SketchParams::new(edge_universe, 1, delta_prime, delta_dprime)?;
    Ok(AgmParams {
        n,
        delta,
        delta_prime,
        delta_dprime,
        rounds,
        edge_universe,
        sketch,
    })
}

/// Position of an unordered pair in the edge universe:
/// `index(u, v) = v (v - 1) / 2 + u` for `u < v`.
pub fn edge_index(u: u64, v: u64) -> u64 {
    debug_assert!(u < v);
    v * (v - 1) / 2 + u
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(index: u64) -> (u64, u64) {
    let mut v = ((1.0 + (8.0 * index as f64 + 1.0).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > index {
        v -= 1;
    }
    while (v + 1) * v / 2 <= index {
        v += 1;
    }
    (index - v * (v - 1) / 2, v)
}

/// An edge slot: the sorted endpoints, the universe index, and the sign
/// convention (`+1` at the smaller endpoint, `-1` at the larger).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeSlot {
    pub u: u64,
    pub v: u64,
    pub index: u64,
}

impl EdgeSlot {
    pub fn new(a: u64, b: u64, n: u64) -> Result<Self> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        for w in [a, b] {
            if w >= n {
                return Err(Error::VertexOutOfRange { vertex: w, n });
            }
        }
        let (u, v) = (a.min(b), a.max(b));
        Ok(EdgeSlot { u, v, index: edge_index(u, v) })
    }

    pub fn sign(&self, w: u64) -> i64 {
        if w == self.u {
            1
        } else {
            debug_assert_eq!(w, self.v);
            -1
        }
    }
}

/// A spanning forest: the edge list plus the component partition it
/// induces on `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningForest {
    pub n: u64,
    pub edges: Vec<(u64, u64)>,
}

impl SpanningForest {
    pub fn empty(n: u64) -> Self {
        SpanningForest { n, edges: Vec::new() }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn partition(&self) -> Partition {
        let mut uf = UnionFind::new(self.n as usize);
        for &(u, v) in &self.edges {
            uf.union(u as u32, v as u32);
        }
        Partition::from_union_find(&mut uf)
    }

    pub fn component_count(&self) -> usize {
        self.partition().count
    }

    /// Forest neighbors of one vertex, ascending.
    pub fn neighbors(&self, w: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                if u == w {
                    Some(v)
                } else if v == w {
                    Some(u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Per-round progress of one query, for round-count statistics.
#[derive(Clone, Debug, Default)]
pub struct QueryTrace {
    pub edges_added_per_round: Vec<usize>,
}

impl QueryTrace {
    /// True when the final round added nothing, i.e. the merge process had
    /// already converged strictly before round R.
    pub fn converged_before_final_round(&self) -> bool {
        match self.edges_added_per_round.last() {
            Some(&last) => last == 0,
            None => true,
        }
    }

    /// 1-based index of the last round that made progress (0 if none did).
    pub fn last_progress_round(&self) -> usize {
        self.edges_added_per_round
            .iter()
            .rposition(|&a| a > 0)
            .map(|i| i + 1)
            .unwrap_or(0)
    }
}

fn crosses(snapshot: &[u32], root: u32, a: u64, b: u64) -> bool {
    (snapshot[a as usize] == root) != (snapshot[b as usize] == root)
}

/// The AGM state: one support-find sketch per (vertex, round), all rounds
/// zero-initialized, with round `r`'s randomness shared by every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSketchBank {
    params: AgmParams,
    shared_seed: Seed256,
    sketches: Vec<SupportFindSketch>,
}

/// Seed of round `r`'s shared sketch randomness.
pub fn round_seed(shared_seed: &Seed256, round: u32) -> Seed256 {
    shared_seed.derive(tag::ROUND, round as u64)
}

const BANK_MAGIC: u32 = 0x4253_5353; // "SSSB"
const BANK_VERSION: u32 = 1;
const BANK_HEADER_BYTES: usize = 4 + 4 + 8 + 8 + 4 + 4 + 32;

impl VertexSketchBank {
    /// `n * R` zero sketches.
    pub fn init(params: AgmParams, shared_seed: Seed256) -> Self {
        let mut sketches = Vec::with_capacity((params.n * params.rounds as u64) as usize);
        for _u in 0..params.n {
            for r in 0..params.rounds {
                sketches.push(SupportFindSketch::new(params.sketch, round_seed(&shared_seed, r)));
            }
        }
        VertexSketchBank { params, shared_seed, sketches }
    }

    pub fn params(&self) -> &AgmParams {
        &self.params
    }

    pub fn shared_seed(&self) -> &Seed256 {
        &self.shared_seed
    }

    pub fn sketch(&self, u: u64, round: u32) -> &SupportFindSketch {
        &self.sketches[(u * self.params.rounds as u64 + round as u64) as usize]
    }

    /// Applies one signed edge update: with `(a, b)` the sorted pair, every
    /// round's sketch of `a` gets `+delta` at the pair index and `b` gets
    /// `-delta`.
    pub fn update(&mut self, u: u64, v: u64, delta: i64) -> Result<()> {
        if delta != 1 && delta != -1 {
            return Err(Error::InvalidParameter(format!(
                "edge updates carry delta +1 or -1, got {delta}"
            )));
        }
        let slot = EdgeSlot::new(u, v, self.params.n)?;
        let rounds = self.params.rounds as u64;
        for r in 0..rounds {
            // both endpoints share one round seed, so the per-cell terms
            // are computed once and applied with opposite signs
            let terms = self.sketches[(slot.u * rounds + r) as usize].update_terms(slot.index)?;
            self.sketches[(slot.u * rounds + r) as usize].apply_terms(&terms, delta);
            self.sketches[(slot.v * rounds + r) as usize].apply_terms(&terms, -delta);
        }
        Ok(())
    }

    /// Sum of the round-`r` sketches of a vertex set: the sketch of the
    /// set's cut vector.
    pub fn component_sketch(&self, members: &[u64], round: u32) -> Result<SupportFindSketch> {
        let mut iter = members.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty component".into()))?;
        let mut sum = self.sketch(*first, round).clone();
        for &w in iter {
            sum.absorb(self.sketch(w, round))?;
        }
        Ok(sum)
    }

    pub fn query(&self) -> SpanningForest {
        self.query_traced().0
    }

    /// Runs the R merging rounds. Each round queries every current
    /// component's summed sketch for a candidate edge, drops candidates
    /// that do not cross their component (treated as Fail), then merges in
    /// ascending smallest-member order, skipping candidates whose endpoints
    /// were already joined this round.
    pub fn query_traced(&self) -> (SpanningForest, QueryTrace) {
        let n = self.params.n as usize;
        let mut uf = UnionFind::new(n);
        let mut edges: Vec<(u64, u64)> = Vec::new();
        let mut trace = QueryTrace::default();
        for r in 0..self.params.rounds {
            // snapshot of the partition entering this round
            let snapshot: Vec<u32> = (0..n as u32).map(|v| uf.find(v)).collect();
            let mut members: std::collections::BTreeMap<u32, Vec<u64>> = Default::default();
            for (v, &root) in snapshot.iter().enumerate() {
                members.entry(root).or_default().push(v as u64);
            }
            let mut groups: Vec<(u32, Vec<u64>)> = members.into_iter().collect();
            groups.sort_by_key(|(_, m)| m[0]);

            let mut candidates: Vec<(u64, u64)> = Vec::new();
            for (root, group) in &groups {
                if group.len() == n {
                    break; // a single component has no outgoing edge
                }
                let sum = self
                    .component_sketch(group, r)
                    .expect("bank sketches share round randomness");
                if let SupportResult::Found(indices) = sum.query() {
                    if let Some(&idx) = indices.first() {
                        let (a, b) = edge_from_index(idx);
                        if crosses(&snapshot, *root, a, b) {
                            candidates.push((a, b));
                        }
                    }
                }
            }
            let mut added = 0usize;
            for (a, b) in candidates {
                if uf.union(a as u32, b as u32) {
                    edges.push((a.min(b), a.max(b)));
                    added += 1;
                }
            }
            trace.edges_added_per_round.push(added);
        }
        (SpanningForest { n: self.params.n, edges }, trace)
    }

    /// Exact size of the sketch state in bits: `n * R` serialized sketches.
    /// Data-independent.
    pub fn total_size_bits(&self) -> u64 {
        self.params.n * self.params.rounds as u64 * self.params.sketch.size_bits()
    }

    /// The sketch memory alone: every sketch serialized, vertex-major then
    /// round-major. This is the byte string a reduction ships between
    /// parties; `8 * len` equals [`Self::total_size_bits`].
    pub fn payload_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity((self.total_size_bits() / 8) as usize);
        for s in &self.sketches {
            out.extend_from_slice(&s.to_bytes());
        }
        out
    }

    /// Rebuilds a bank from its parameters, shared seed, and payload.
    pub fn from_payload(params: AgmParams, shared_seed: Seed256, payload: &[u8]) -> Result<Self> {
        let mut sketches = Vec::with_capacity((params.n * params.rounds as u64) as usize);
        let mut off = 0usize;
        for _u in 0..params.n {
            for r in 0..params.rounds {
                let (s, used) = SupportFindSketch::from_bytes(&payload[off..])?;
                if *s.params() != params.sketch {
                    return Err(Error::Format("sketch shape differs from bank parameters".into()));
                }
                if *s.seed() != round_seed(&shared_seed, r) {
                    return Err(Error::Format("sketch seed differs from round seed".into()));
                }
                off += used;
                sketches.push(s);
            }
        }
        if off != payload.len() {
            return Err(Error::Format("trailing bytes after bank payload".into()));
        }
        Ok(VertexSketchBank { params, shared_seed, sketches })
    }

    /// Replaces vertex `u`'s row from a serialized message of `R` sketches.
    pub fn set_row_from_bytes(&mut self, u: u64, payload: &[u8]) -> Result<()> {
        let rounds = self.params.rounds as u64;
        let mut off = 0usize;
        for r in 0..self.params.rounds {
            let (s, used) = SupportFindSketch::from_bytes(&payload[off..])?;
            if *s.params() != self.params.sketch {
                return Err(Error::Format("sketch shape differs from bank parameters".into()));
            }
            if *s.seed() != round_seed(&self.shared_seed, r) {
                return Err(Error::Format("sketch seed differs from round seed".into()));
            }
            off += used;
            self.sketches[(u * rounds + r as u64) as usize] = s;
        }
        if off != payload.len() {
            return Err(Error::Format("trailing bytes after vertex row".into()));
        }
        Ok(())
    }

    /// Full serialization: parameter header then the payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(BANK_HEADER_BYTES + (self.total_size_bits() / 8) as usize);
        out.extend_from_slice(&BANK_MAGIC.to_le_bytes());
        out.extend_from_slice(&BANK_VERSION.to_le_bytes());
        out.extend_from_slice(&self.params.n.to_le_bytes());
        out.extend_from_slice(&self.params.delta.to_bits().to_le_bytes());
        out.extend_from_slice(&self.params.rounds.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&self.shared_seed.to_bytes());
        out.extend_from_slice(&self.payload_bytes());
        out
    }

    pub fn header_bits() -> u64 {
        8 * BANK_HEADER_BYTES as u64
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < BANK_HEADER_BYTES {
            return Err(Error::Format("truncated bank header".into()));
        }
        let magic = u32::from_le_bytes(data[0..4].try_into().unwrap());
        let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
        if magic != BANK_MAGIC || version != BANK_VERSION {
            return Err(Error::Format("unrecognized bank header".into()));
        }
        let n = u64::from_le_bytes(data[8..16].try_into().unwrap());
        let delta = f64::from_bits(u64::from_le_bytes(data[16..24].try_into().unwrap()));
        let rounds = u32::from_le_bytes(data[24..28].try_into().unwrap());
        let seed = Seed256::from_bytes(&data[32..64].try_into().unwrap());
        let params = agm_params(n, delta).map_err(|e| Error::Format(e.to_string()))?;
        if params.rounds != rounds {
            return Err(Error::Format("stored round count disagrees with parameters".into()));
        }
        Self::from_payload(params, seed, &data[BANK_HEADER_BYTES..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{oracle_components, verify_forest, ExactGraph};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn seed(x: u64) -> Seed256 {
        Seed256::from_u64(x)
    }

    #[test]
    fn params_low_delta_example() {
        // n = 2^10, delta = 2^-60: candidate delta' = 2^-7 stays below the
        // cap; R = 18 + max(18, ceil(61 / (7 - log2(6e)))) = 18 + 21
        let p = agm_params(1 << 10, 2f64.powi(-60)).unwrap();
        assert_eq!(p.delta_prime, 2f64.powi(-7));
        assert_eq!(p.rounds, 39);
        assert_eq!(p.sketch.num_reps, 28); // ceil(4 * 7)
        assert_eq!(p.delta_dprime, 2f64.powi(-60) / (2.0 * 1024.0 * 39.0));
        assert_eq!(p.sketch.fingerprints, 2); // delta'' below 2^-40
        assert_eq!(p.edge_universe, 1024 * 1023 / 2);
    }

    #[test]
    fn params_moderate_delta_hits_cap() {
        // n = 2^10, delta = 2^-4: candidate 2^-1.4 exceeds the cap
        let p = agm_params(1 << 10, 2f64.powi(-4)).unwrap();
        assert_eq!(p.delta_prime, delta_prime_cap());
        assert_eq!(p.rounds, 36);
        assert_eq!(p.delta_dprime, 2f64.powi(-4) / (2.0 * 1024.0 * 36.0));
        assert_eq!(p.sketch.fingerprints, 1);
    }

    #[test]
    fn params_validation() {
        assert!(agm_params(1, 0.1).is_err());
        assert!(agm_params(16, 0.0).is_err());
        assert!(agm_params(16, 1.0).is_err());
        assert!(agm_params(8, 2f64.powi(-9)).is_err()); // below 2^-n
    }

    #[test]
    fn pairing_is_a_bijection() {
        let n = 40u64;
        let mut seen = std::collections::HashSet::new();
        for v in 1..n {
            for u in 0..v {
                let idx = edge_index(u, v);
                assert!(idx < n * (n - 1) / 2);
                assert!(seen.insert(idx));
                assert_eq!(edge_from_index(idx), (u, v));
            }
        }
        assert_eq!(seen.len() as u64, n * (n - 1) / 2);
    }

    #[test]
    fn slot_signs() {
        let slot = EdgeSlot::new(5, 2, 8).unwrap();
        assert_eq!((slot.u, slot.v), (2, 5));
        assert_eq!(slot.sign(2), 1);
        assert_eq!(slot.sign(5), -1);
        assert!(EdgeSlot::new(3, 3, 8).is_err());
        assert!(EdgeSlot::new(0, 9, 8).is_err());
    }

    #[test]
    fn fresh_bank_queries_empty_forest() {
        let p = agm_params(4, 0.1).unwrap();
        let bank = VertexSketchBank::init(p, seed(0));
        let f = bank.query();
        assert_eq!(f.edge_count(), 0);
        assert_eq!(f.component_count(), 4);
        assert_eq!(bank.total_size_bits(), 4 * p.rounds as u64 * p.sketch.size_bits());
        let again = VertexSketchBank::init(p, seed(0));
        assert_eq!(bank.payload_bytes(), again.payload_bytes());
    }

    #[test]
    fn insert_then_delete_restores_zero_state() {
        let p = agm_params(4, 0.1).unwrap();
        let fresh = VertexSketchBank::init(p, seed(1));
        let mut bank = fresh.clone();
        bank.update(1, 2, 1).unwrap();
        assert_ne!(bank.payload_bytes(), fresh.payload_bytes());
        bank.update(1, 2, -1).unwrap();
        assert_eq!(bank.payload_bytes(), fresh.payload_bytes());
        assert!(bank.update(1, 1, 1).is_err());
        assert!(bank.update(1, 2, 2).is_err());
    }

    #[test]
    fn internal_edges_cancel_in_component_sums() {
        let p = agm_params(4, 0.1).unwrap();
        let mut bank = VertexSketchBank::init(p, seed(2));
        bank.update(1, 2, 1).unwrap();
        for r in 0..p.rounds {
            assert!(bank.component_sketch(&[1, 2], r).unwrap().is_zero());
        }
    }

    #[test]
    fn component_sum_sketches_the_cut_vector() {
        // brute-force cut-vector oracle: build the cut sketch directly
        let p = agm_params(4, 0.1).unwrap();
        let mut bank = VertexSketchBank::init(p, seed(3));
        bank.update(1, 2, 1).unwrap();
        bank.update(2, 3, 1).unwrap();
        let sum = bank.component_sketch(&[1, 2], 0).unwrap();
        let mut direct = SupportFindSketch::new(p.sketch, round_seed(&seed(3), 0));
        // cut({1,2}) = {(2,3)}, signed by the inside endpoint 2 < 3
        direct.update(edge_index(2, 3), 1).unwrap();
        assert_eq!(sum.to_bytes(), direct.to_bytes());
        assert_eq!(sum.query(), SupportResult::Found(vec![edge_index(2, 3)]));
    }

    #[test]
    fn cut_cancellation_over_all_subsets() {
        // arbitrary update sequence: inserts, then some deletions
        let n = 6u64;
        let p = agm_params(n, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut bank = VertexSketchBank::init(p, seed(4));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(0.6) {
                    bank.update(u, v, 1).unwrap();
                    edges.push((u, v));
                }
            }
        }
        let mut i = 0;
        while i < edges.len() {
            if rng.gen_bool(0.3) {
                let (u, v) = edges.swap_remove(i);
                bank.update(u, v, -1).unwrap();
            } else {
                i += 1;
            }
        }
        for mask in 1u32..(1 << n) {
            let members: Vec<u64> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            let sum = bank.component_sketch(&members, 1).unwrap();
            let mut direct = SupportFindSketch::new(p.sketch, round_seed(&seed(4), 1));
            for &(u, v) in &edges {
                let inside_u = mask >> u & 1 == 1;
                let inside_v = mask >> v & 1 == 1;
                if inside_u != inside_v {
                    direct
                        .update(edge_index(u, v), if inside_u { 1 } else { -1 })
                        .unwrap();
                }
            }
            assert_eq!(sum, direct, "subset {mask:b}");
        }
    }

    #[test]
    fn triangle_query_finds_two_triangle_edges() {
        let p = agm_params(4, 0.1).unwrap();
        let mut bank = VertexSketchBank::init(p, seed(5));
        let mut g = ExactGraph::new(4);
        for (u, v) in [(1u64, 2u64), (2, 3), (1, 3)] {
            bank.update(u, v, 1).unwrap();
            g.insert(u, v).unwrap();
        }
        let f = bank.query();
        let report = verify_forest(&f, &g);
        assert!(report.is_valid, "reasons: {:?}", report.reasons);
        assert_eq!(f.edge_count(), 2);
    }

    #[test]
    fn path_with_deleted_middle_edge_has_forced_forest() {
        let p = agm_params(4, 0.1).unwrap();
        let mut bank = VertexSketchBank::init(p, seed(6));
        for (u, v) in [(0u64, 1u64), (1, 2), (2, 3)] {
            bank.update(u, v, 1).unwrap();
        }
        bank.update(1, 2, -1).unwrap();
        let f = bank.query();
        let mut got = f.edges.clone();
        got.sort_unstable();
        assert_eq!(got, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn size_is_monotone_as_delta_shrinks() {
        let sizes: Vec<u64> = [0.05, 2f64.powi(-20), 2f64.powi(-60)]
            .iter()
            .map(|&d| {
                let p = agm_params(256, d).unwrap();
                p.n * p.rounds as u64 * p.sketch.size_bits()
            })
            .collect();
        assert!(sizes[0] <= sizes[1] && sizes[1] <= sizes[2], "{sizes:?}");
    }

    #[test]
    fn crossing_validation() {
        let snapshot = vec![0u32, 0, 2, 2];
        assert!(crosses(&snapshot, 0, 1, 2));
        assert!(!crosses(&snapshot, 0, 0, 1)); // internal edge
        assert!(!crosses(&snapshot, 0, 2, 3)); // entirely outside
    }

    #[test]
    fn bank_serialization_roundtrip() {
        let p = agm_params(8, 0.1).unwrap();
        let mut bank = VertexSketchBank::init(p, seed(7));
        for (u, v) in [(0u64, 1u64), (3, 7), (2, 5)] {
            bank.update(u, v, 1).unwrap();
        }
        let bytes = bank.to_bytes();
        assert_eq!(
            bytes.len() as u64 * 8,
            bank.total_size_bits() + VertexSketchBank::header_bits()
        );
        let back = VertexSketchBank::from_bytes(&bytes).unwrap();
        assert_eq!(back, bank);
        assert_eq!(back.query().edges, bank.query().edges);

        let payload = bank.payload_bytes();
        assert_eq!(payload.len() as u64 * 8, bank.total_size_bits());
        let back2 = VertexSketchBank::from_payload(p, seed(7), &payload).unwrap();
        assert_eq!(back2, bank);
        assert!(VertexSketchBank::from_payload(p, seed(8), &payload).is_err());
    }

    #[test]
    fn dynamic_queries_verify_against_oracle() {
        // random insert/delete churn on a small graph, many seeds
        let n = 16u64;
        let p = agm_params(n, 0.05).unwrap();
        let mut failures = 0u32;
        let trials = 60;
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + t as u64);
            let mut bank = VertexSketchBank::init(p, seed(2000 + t as u64));
            let mut g = ExactGraph::new(n);
            for _ in 0..80 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v {
                    continue;
                }
                if g.contains(u, v) {
                    if rng.gen_bool(0.4) {
                        g.delete(u, v).unwrap();
                        bank.update(u, v, -1).unwrap();
                    }
                } else {
                    g.insert(u, v).unwrap();
                    bank.update(u, v, 1).unwrap();
                }
            }
            let (f, trace) = bank.query_traced();
            if !verify_forest(&f, &g).is_valid {
                failures += 1;
            } else {
                assert_eq!(f.partition(), oracle_components(&g));
                assert!(trace.last_progress_round() <= p.rounds as usize);
            }
        }
        assert!(failures <= 3, "failures {failures}/{trials}");
    }

    #[test]
    fn successful_queries_converge_before_the_final_round() {
        let n = 64u64;
        let p = agm_params(n, 0.05).unwrap();
        let mut converged = 0u32;
        let mut valid = 0u32;
        let trials = 40;
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
            let mut bank = VertexSketchBank::init(p, seed(500 + t as u64));
            let mut g = ExactGraph::new(n);
            for _ in 0..(2 * n) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !g.contains(u, v) {
                    g.insert(u, v).unwrap();
                    bank.update(u, v, 1).unwrap();
                }
            }
            let (f, trace) = bank.query_traced();
            if verify_forest(&f, &g).is_valid {
                valid += 1;
                if trace.converged_before_final_round() {
                    converged += 1;
                }
            }
        }
        assert!(valid > 0);
        // the good-rounds margin: all but a delta fraction finish early
        assert!(
            converged as f64 >= (1.0 - 2.0 * 0.05) * valid as f64,
            "converged {converged}/{valid}"
        );
    }
}
