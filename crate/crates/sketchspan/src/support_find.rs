//! Linear sketch for support finding over a sparse integer vector.
//!
//! The sketch answers "name up to `k` coordinates on which the vector is
//! nonzero" for a vector receiving turnstile updates. With probability at
//! most `delta1` a query may report `Fail`; with probability at most
//! `delta2` it may report garbage; otherwise it returns up to
//! `min(k, support size)` verified support coordinates.
//!
//! Construction: geometric subsampling plus exact one-sparse recovery.
//! Level `l` keeps each index with probability `2^-l` (level 0 keeps
//! everything), decided by a keyed PRF of the shared seed, so any party
//! holding the seed builds the identical sketch. Each (level, repetition)
//! cell tracks `sum z_j`, `sum j*z_j`, and a polynomial fingerprint
//! `sum z_j * rho^j` over GF(2^61 - 1). A cell whose contents pass the
//! fingerprint test decodes to the unique surviving coordinate.
//!
//! The sketch is exactly linear: adding two sketches with equal parameters
//! and seed yields the sketch of the summed vectors, bit for bit.

use crate::bitpack::{packed_len, BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::m61;
use crate::prf::{prf, tag, Seed256};

/// Repetitions per level are `ceil(REPS_PER_LOG * log2(1/delta1))`.
pub const REPS_PER_LOG: f64 = 4.0;

/// Below this arbitrary-error probability a second, independently seeded
/// fingerprint is stacked onto every cell.
pub const STACKED_FINGERPRINT_THRESHOLD: f64 = 1.0 / ((1u64 << 40) as f64);

/// Serialized header: universe, delta1, delta2, k, levels, reps,
/// fingerprint count, padding, field modulus, seed.
const HEADER_BYTES: usize = 8 + 8 + 8 + 4 + 2 + 2 + 1 + 7 + 8 + 32;
const LEN_PREFIX_BYTES: usize = 4;

/// Shape parameters of a support-find sketch.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SketchParams {
    pub universe_size: u64,
    pub k: u32,
    pub delta1: f64,
    pub delta2: f64,
    pub num_levels: u16,
    pub num_reps: u16,
    pub fingerprints: u8,
    pub field_modulus: u64,
}

impl SketchParams {
    pub fn new(universe_size: u64, k: u32, delta1: f64, delta2: f64) -> Result<Self> {
        if universe_size == 0 {
            return Err(Error::InvalidParameter("universe size must be positive".into()));
        }
        if universe_size >= m61::P {
            return Err(Error::InvalidParameter(format!(
                "universe size {universe_size} must be below the field modulus"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        for (name, p) in [("delta1", delta1), ("delta2", delta2)] {
            if !p.is_finite() || p <= 0.0 || p >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie strictly inside (0, 1), got {p}"
                )));
            }
        }
        let num_levels = ceil_log2(universe_size) + 1;
        let num_reps = ((REPS_PER_LOG * (1.0 / delta1).log2()).ceil() as u32).max(1);
        if num_levels > u16::MAX as u32 || num_reps > u16::MAX as u32 {
            return Err(Error::InvalidParameter("sketch dimensions overflow".into()));
        }
        let fingerprints = if delta2 < STACKED_FINGERPRINT_THRESHOLD { 2 } else { 1 };
        Ok(SketchParams {
            universe_size,
            k,
            delta1,
            delta2,
            num_levels: num_levels as u16,
            num_reps: num_reps as u16,
            fingerprints,
            field_modulus: m61::P,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.num_levels as usize * self.num_reps as usize
    }

    fn values_per_cell(&self) -> usize {
        2 + self.fingerprints as usize
    }

    /// Serialized size in bits; a pure function of the parameters.
    pub fn size_bits(&self) -> u64 {
        8 * self.serialized_len() as u64
    }

    pub fn serialized_len(&self) -> usize {
        LEN_PREFIX_BYTES
            + HEADER_BYTES
            + packed_len(self.cell_count() * self.values_per_cell(), m61::ELEM_BITS)
    }

    /// Bits spent on cell payload alone (the `3 * levels * reps * 61` term).
    pub fn cell_payload_bits(&self) -> u64 {
        self.values_per_cell() as u64 * self.cell_count() as u64 * m61::ELEM_BITS as u64
    }
}

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// One cell of the sketch: modular count, index-weighted count, and
/// polynomial fingerprint(s). All three zero iff no net update survives.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct OneSparseCell {
    pub count: u64,
    pub index_sum: u64,
    pub fingerprint: [u64; 2],
}

impl OneSparseCell {
    pub fn is_zero(&self) -> bool {
        self.count == 0 && self.index_sum == 0 && self.fingerprint == [0, 0]
    }
}

/// Exact one-sparse recovery from a cell's contents.
///
/// Returns `(index, value)` with the value as a field element when the cell
/// is consistent with exactly one surviving coordinate: the decoded index
/// lands inside the universe and every fingerprint matches
/// `value * rho^index`. A wrong answer requires a fingerprint collision,
/// which for random `rho` happens with probability below
/// `universe / field_modulus` per fingerprint.
pub fn one_sparse_decode(
    cell: &OneSparseCell,
    universe: u64,
    rho: &[u64; 2],
    fingerprints: u8,
) -> Option<(u64, u64)> {
    if cell.count == 0 {
        return None;
    }
    let index = m61::mul(cell.index_sum, m61::inv(cell.count));
    if index >= universe {
        return None;
    }
    for (&rho_slot, &fp) in rho.iter().zip(cell.fingerprint.iter()).take(fingerprints as usize) {
        if fp != m61::mul(cell.count, m61::pow(rho_slot, index)) {
            return None;
        }
    }
    Some((index, cell.count))
}

/// Precomputed contributions of a unit update: the field image of the
/// index plus, per touched cell, the fingerprint bases raised to it.
pub(crate) struct UpdateTerms {
    index_f: u64,
    cells: Vec<(u16, u16, [u64; 2])>,
}

/// Query outcome: `Fail`, or up to `k` distinct verified support indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportResult {
    Found(Vec<u64>),
    Fail,
}

impl SupportResult {
    pub fn is_fail(&self) -> bool {
        matches!(self, SupportResult::Fail)
    }
}

/// The support-find sketch. Cell rows are allocated per level on first
/// touch, so sketches of low-degree vectors stay small; an unallocated row
/// reads as all-zero cells. Equality and serialization see through the
/// allocation, so equal vector states compare equal and serialize
/// identically.
#[derive(Clone, Debug)]
pub struct SupportFindSketch {
    params: SketchParams,
    seed: Seed256,
    rows: Vec<Option<Box<[OneSparseCell]>>>,
}

impl PartialEq for SupportFindSketch {
    fn eq(&self, other: &Self) -> bool {
        if self.params != other.params || self.seed != other.seed {
            return false;
        }
        let zero_row = |row: &Option<Box<[OneSparseCell]>>| -> bool {
            row.as_ref().map(|r| r.iter().all(|c| c.is_zero())).unwrap_or(true)
        };
        self.rows.iter().zip(other.rows.iter()).all(|(a, b)| match (a, b) {
            (None, None) => true,
            (Some(ra), Some(rb)) => ra == rb,
            (a, b) => zero_row(a) && zero_row(b),
        })
    }
}

/// Builds a zero-initialized sketch for vectors over `[0, universe_size)`.
pub fn new_support_find(
    universe_size: u64,
    k: u32,
    delta1: f64,
    delta2: f64,
    seed: Seed256,
) -> Result<SupportFindSketch> {
    Ok(SupportFindSketch::new(
        SketchParams::new(universe_size, k, delta1, delta2)?,
        seed,
    ))
}

impl SupportFindSketch {
    pub fn new(params: SketchParams, seed: Seed256) -> Self {
        SupportFindSketch { params, seed, rows: vec![None; params.num_levels as usize] }
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn seed(&self) -> &Seed256 {
        &self.seed
    }

    pub fn is_zero(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.as_ref().map(|r| r.iter().all(|c| c.is_zero())).unwrap_or(true))
    }

    pub fn nonzero_cells(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .map(|r| r.iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    fn row_mut(&mut self, level: u16) -> &mut [OneSparseCell] {
        let reps = self.params.num_reps as usize;
        self.rows[level as usize]
            .get_or_insert_with(|| vec![OneSparseCell::default(); reps].into_boxed_slice())
    }

    /// Highest level at which `index` is subsampled for `rep`; membership
    /// is nested, so `index` lives in levels `0..=cap`. `P(cap >= l) = 2^-l`.
    pub fn level_cap(&self, rep: u16, index: u64) -> u16 {
        let h = prf(&self.seed, tag::LEVEL, rep as u64, index);
        (h.trailing_zeros() as u16).min(self.params.num_levels - 1)
    }

    pub fn is_member(&self, level: u16, rep: u16, index: u64) -> bool {
        level <= self.level_cap(rep, index)
    }

    /// Fingerprint base of a cell, nonzero by construction.
    pub fn rho(&self, level: u16, rep: u16, slot: u8) -> u64 {
        let key = self.cell_key(level, rep) as u64;
        prf(&self.seed, tag::RHO, key, slot as u64) % (m61::P - 1) + 1
    }

    fn cell_key(&self, level: u16, rep: u16) -> u32 {
        level as u32 * self.params.num_reps as u32 + rep as u32
    }

    pub fn cell(&self, level: u16, rep: u16) -> OneSparseCell {
        self.rows[level as usize]
            .as_ref()
            .map(|r| r[rep as usize])
            .unwrap_or_default()
    }

    /// Applies the turnstile update `z[index] += delta`.
    pub fn update(&mut self, index: u64, delta: i64) -> Result<()> {
        if delta == 0 {
            return Ok(());
        }
        let terms = self.update_terms(index)?;
        self.apply_terms(&terms, delta);
        Ok(())
    }

    /// Precomputes the cell contributions of a unit update at `index`.
    /// Valid for any sketch with the same parameters and seed, so the two
    /// signed halves of an edge update share one computation.
    pub(crate) fn update_terms(&self, index: u64) -> Result<UpdateTerms> {
        if index >= self.params.universe_size {
            return Err(Error::IndexOutOfRange { index, universe: self.params.universe_size });
        }
        let nfp = self.params.fingerprints;
        let mut cells = Vec::with_capacity(2 * self.params.num_reps as usize);
        for rep in 0..self.params.num_reps {
            let cap = self.level_cap(rep, index);
            for level in 0..=cap {
                let mut rho_pow = [0u64; 2];
                for slot in 0..nfp {
                    rho_pow[slot as usize] = m61::pow(self.rho(level, rep, slot), index);
                }
                cells.push((level, rep, rho_pow));
            }
        }
        Ok(UpdateTerms { index_f: m61::reduce(index), cells })
    }

    /// Adds `delta` worth of precomputed terms into the cells.
    pub(crate) fn apply_terms(&mut self, terms: &UpdateTerms, delta: i64) {
        if delta == 0 {
            return;
        }
        let dv = m61::from_i64(delta);
        let weighted = m61::mul(terms.index_f, dv);
        let nfp = self.params.fingerprints as usize;
        for &(level, rep, rho_pow) in &terms.cells {
            let cell = &mut self.row_mut(level)[rep as usize];
            cell.count = m61::add(cell.count, dv);
            cell.index_sum = m61::add(cell.index_sum, weighted);
            for (fp, &pow) in cell.fingerprint.iter_mut().zip(rho_pow.iter()).take(nfp) {
                *fp = m61::add(*fp, m61::mul(dv, pow));
            }
        }
    }

    /// Adds `other` into `self` cell-wise; the result sketches the summed
    /// vectors exactly.
    pub fn absorb(&mut self, other: &SupportFindSketch) -> Result<()> {
        if self.params != other.params {
            return Err(Error::Incompatible("sketch parameters differ"));
        }
        if self.seed != other.seed {
            return Err(Error::Incompatible("sketch seeds differ"));
        }
        for level in 0..self.params.num_levels {
            let Some(rhs_row) = other.rows[level as usize].as_ref() else {
                continue;
            };
            if rhs_row.iter().all(|c| c.is_zero()) {
                continue;
            }
            let row = self.row_mut(level);
            for (cell, rhs) in row.iter_mut().zip(rhs_row.iter()) {
                cell.count = m61::add(cell.count, rhs.count);
                cell.index_sum = m61::add(cell.index_sum, rhs.index_sum);
                for slot in 0..2 {
                    cell.fingerprint[slot] =
                        m61::add(cell.fingerprint[slot], rhs.fingerprint[slot]);
                }
            }
        }
        Ok(())
    }

    /// Cell-wise sum of two sketches over the same parameters and seed.
    pub fn add(&self, other: &SupportFindSketch) -> Result<SupportFindSketch> {
        let mut out = self.clone();
        out.absorb(other)?;
        Ok(out)
    }

    /// Decodes one cell; `Some((index, value))` with a signed value.
    pub fn decode_cell(&self, level: u16, rep: u16) -> Option<(u64, i64)> {
        let cell = self.cell(level, rep);
        let rho = [self.rho(level, rep, 0), self.rho(level, rep, 1)];
        one_sparse_decode(&cell, self.params.universe_size, &rho, self.params.fingerprints)
            .map(|(idx, v)| (idx, m61::to_i64(v)))
    }

    /// Scans cells from the sparsest level down, pooling distinct verified
    /// indices. The all-zero sketch reports an empty support; a nonzero
    /// sketch with no decodable cell reports `Fail`.
    pub fn query(&self) -> SupportResult {
        let mut any_nonzero = false;
        let mut found: Vec<u64> = Vec::new();
        'scan: for level in (0..self.params.num_levels).rev() {
            let Some(row) = self.rows[level as usize].as_ref() else {
                continue;
            };
            for (rep, cell) in row.iter().enumerate() {
                if cell.is_zero() {
                    continue;
                }
                any_nonzero = true;
                let rho = [self.rho(level, rep as u16, 0), self.rho(level, rep as u16, 1)];
                if let Some((idx, _)) = one_sparse_decode(
                    cell,
                    self.params.universe_size,
                    &rho,
                    self.params.fingerprints,
                ) {
                    if !found.contains(&idx) {
                        found.push(idx);
                        if found.len() == self.params.k as usize {
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !any_nonzero {
            SupportResult::Found(Vec::new())
        } else if found.is_empty() {
            SupportResult::Fail
        } else {
            SupportResult::Found(found)
        }
    }

    /// Exact serialized size in bits; data-independent.
    pub fn size_bits(&self) -> u64 {
        self.params.size_bits()
    }

    /// Length-prefixed little-endian layout: params header, seed, then
    /// cells packed 61 bits per field element, row-major by level then
    /// repetition. Round-trips bit-exactly.
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::with_capacity(p.serialized_len());
        let body_len = (p.serialized_len() - LEN_PREFIX_BYTES) as u32;
        out.extend_from_slice(&body_len.to_le_bytes());
        out.extend_from_slice(&p.universe_size.to_le_bytes());
        out.extend_from_slice(&p.delta1.to_bits().to_le_bytes());
        out.extend_from_slice(&p.delta2.to_bits().to_le_bytes());
        out.extend_from_slice(&p.k.to_le_bytes());
        out.extend_from_slice(&p.num_levels.to_le_bytes());
        out.extend_from_slice(&p.num_reps.to_le_bytes());
        out.push(p.fingerprints);
        out.extend_from_slice(&[0u8; 7]);
        out.extend_from_slice(&p.field_modulus.to_le_bytes());
        out.extend_from_slice(&self.seed.to_bytes());

        let nvals = p.cell_count() * p.values_per_cell();
        let mut w = BitWriter::with_capacity(packed_len(nvals, m61::ELEM_BITS));
        let zero_row = vec![OneSparseCell::default(); p.num_reps as usize];
        for level in 0..p.num_levels as usize {
            let row: &[OneSparseCell] = match self.rows[level].as_ref() {
                Some(r) => r,
                None => &zero_row,
            };
            for cell in row {
                w.write(cell.count, m61::ELEM_BITS);
                w.write(cell.index_sum, m61::ELEM_BITS);
                for slot in 0..p.fingerprints as usize {
                    w.write(cell.fingerprint[slot], m61::ELEM_BITS);
                }
            }
        }
        out.extend_from_slice(&w.finish());
        debug_assert_eq!(out.len(), p.serialized_len());
        out
    }

    /// Parses one serialized sketch, returning it and the bytes consumed.
    pub fn from_bytes(data: &[u8]) -> Result<(SupportFindSketch, usize)> {
        let take = |data: &[u8], off: &mut usize, len: usize| -> Result<Vec<u8>> {
            if *off + len > data.len() {
                return Err(Error::Format("truncated sketch payload".into()));
            }
            let s = data[*off..*off + len].to_vec();
            *off += len;
            Ok(s)
        };
        let mut off = 0usize;
        let body_len = u32::from_le_bytes(
            take(data, &mut off, 4)?.try_into().expect("4 bytes"),
        ) as usize;
        if off + body_len > data.len() {
            return Err(Error::Format("length prefix exceeds payload".into()));
        }
        let universe_size = u64::from_le_bytes(take(data, &mut off, 8)?.try_into().unwrap());
        let delta1 = f64::from_bits(u64::from_le_bytes(
            take(data, &mut off, 8)?.try_into().unwrap(),
        ));
        let delta2 = f64::from_bits(u64::from_le_bytes(
            take(data, &mut off, 8)?.try_into().unwrap(),
        ));
        let k = u32::from_le_bytes(take(data, &mut off, 4)?.try_into().unwrap());
        let num_levels = u16::from_le_bytes(take(data, &mut off, 2)?.try_into().unwrap());
        let num_reps = u16::from_le_bytes(take(data, &mut off, 2)?.try_into().unwrap());
        let fingerprints = take(data, &mut off, 1)?[0];
        let _pad = take(data, &mut off, 7)?;
        let field_modulus = u64::from_le_bytes(take(data, &mut off, 8)?.try_into().unwrap());
        let seed_bytes: [u8; 32] = take(data, &mut off, 32)?.try_into().unwrap();
        let seed = Seed256::from_bytes(&seed_bytes);

        let params = SketchParams::new(universe_size, k, delta1, delta2)
            .map_err(|e| Error::Format(format!("bad header parameters: {e}")))?;
        if params.num_levels != num_levels
            || params.num_reps != num_reps
            || params.fingerprints != fingerprints
            || params.field_modulus != field_modulus
        {
            return Err(Error::Format("header shape disagrees with parameters".into()));
        }
        let total_len = params.serialized_len();
        if body_len + LEN_PREFIX_BYTES != total_len {
            return Err(Error::Format("length prefix disagrees with parameters".into()));
        }
        let remaining = total_len - off;
        let cell_bytes = take(data, &mut off, remaining)?;
        let mut r = BitReader::new(&cell_bytes);
        let mut rows: Vec<Option<Box<[OneSparseCell]>>> =
            vec![None; params.num_levels as usize];
        let mut row_buf = vec![OneSparseCell::default(); params.num_reps as usize];
        for row in rows.iter_mut() {
            let mut any = false;
            for cell in row_buf.iter_mut() {
                let mut read_elem = || -> Result<u64> {
                    let v = r
                        .read(m61::ELEM_BITS)
                        .ok_or_else(|| Error::Format("truncated cell payload".into()))?;
                    if v >= m61::P {
                        return Err(Error::Format("cell value outside the field".into()));
                    }
                    Ok(v)
                };
                cell.count = read_elem()?;
                cell.index_sum = read_elem()?;
                cell.fingerprint = [0, 0];
                for slot in 0..params.fingerprints as usize {
                    cell.fingerprint[slot] = read_elem()?;
                }
                any |= !cell.is_zero();
            }
            if any {
                *row = Some(row_buf.clone().into_boxed_slice());
            }
        }
        Ok((SupportFindSketch { params, seed, rows }, total_len))
    }
}
