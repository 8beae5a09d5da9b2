//! Randomized encoding of a set S through a one-way protocol.
//!
//! The encoder writes an initial subset T0, one protocol message M for
//! (S, T0), then walks the size ladder: at each stage it evaluates the
//! protocol's output function on the current T with the *same* message M,
//! records one accept bit (the output was a fresh element of S \ T), and
//! tops T up to the next ladder size with the elements of S \ T of
//! smallest shared-permutation rank. Whatever the protocol does — honest,
//! always-Fail, or adversarial — the decoder replays the identical walk
//! from (T0, M, accept bits, the set of never-accepted elements) and
//! reconstructs S exactly.
//!
//! The replay works because an element the encoder tops up at stage i can
//! never be accepted later (it is already in T), so the accepted elements
//! are disjoint from the topped-up ones; the decoder's candidate pool
//! (the written tail minus T) therefore agrees with the encoder's
//! candidate pool on every prefix of the permutation order.

use rand::seq::index::sample as index_sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ur::{UrParams, UrProtocol};
use crate::error::{Error, Result};
use crate::prf::{tag, Seed256};

/// The encoder's output: everything the decoder reads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncRecord {
    pub t0: Vec<u64>,
    pub message: Vec<u8>,
    /// One bit per ladder stage from i0 upward.
    pub accept_bits: Vec<bool>,
    /// S minus the accepted elements and T0: exactly the topped-up part.
    pub tail: Vec<u64>,
}

impl EncRecord {
    /// |A|: how many stages accepted a protocol answer.
    pub fn accepted(&self) -> usize {
        self.accept_bits.iter().filter(|&&b| b).count()
    }

    /// T0 list, message (length-prefixed), bit string, tail list.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.t0.len() as u32).to_le_bytes());
        for &x in &self.t0 {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&(self.message.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.message);
        out.extend_from_slice(&(self.accept_bits.len() as u32).to_le_bytes());
        let mut byte = 0u8;
        for (i, &b) in self.accept_bits.iter().enumerate() {
            if b {
                byte |= 1 << (i % 8);
            }
            if i % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if !self.accept_bits.len().is_multiple_of(8) {
            out.push(byte);
        }
        out.extend_from_slice(&(self.tail.len() as u32).to_le_bytes());
        for &x in &self.tail {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<EncRecord> {
        let mut off = 0usize;
        let read_u32 = |data: &[u8], off: &mut usize| -> Result<u32> {
            if *off + 4 > data.len() {
                return Err(Error::Format("truncated record".into()));
            }
            let v = u32::from_le_bytes(data[*off..*off + 4].try_into().unwrap());
            *off += 4;
            Ok(v)
        };
        let read_list = |data: &[u8], off: &mut usize, len: usize| -> Result<Vec<u64>> {
            if *off + 8 * len > data.len() {
                return Err(Error::Format("truncated list".into()));
            }
            let mut v = Vec::with_capacity(len);
            for i in 0..len {
                v.push(u64::from_le_bytes(
                    data[*off + 8 * i..*off + 8 * (i + 1)].try_into().unwrap(),
                ));
            }
            *off += 8 * len;
            Ok(v)
        };
        let t0_len = read_u32(data, &mut off)? as usize;
        let t0 = read_list(data, &mut off, t0_len)?;
        let msg_len = read_u32(data, &mut off)? as usize;
        if off + msg_len > data.len() {
            return Err(Error::Format("truncated message".into()));
        }
        let message = data[off..off + msg_len].to_vec();
        off += msg_len;
        let bit_count = read_u32(data, &mut off)? as usize;
        let bit_bytes = bit_count.div_ceil(8);
        if off + bit_bytes > data.len() {
            return Err(Error::Format("truncated bit string".into()));
        }
        let accept_bits = (0..bit_count)
            .map(|i| data[off + i / 8] >> (i % 8) & 1 == 1)
            .collect();
        off += bit_bytes;
        let tail_len = read_u32(data, &mut off)? as usize;
        let tail = read_list(data, &mut off, tail_len)?;
        if off != data.len() {
            return Err(Error::Format("trailing bytes after record".into()));
        }
        Ok(EncRecord { t0, message, accept_bits, tail })
    }
}

/// The public permutation both sides derive from the shared seed:
/// `rank[x]` is x's position in a uniform shuffle of the universe.
pub fn shared_permutation(universe: u64, shared_seed: &Seed256) -> Vec<u64> {
    let mut rng = ChaCha8Rng::from_seed(shared_seed.derive(tag::PERM, 0).to_bytes());
    let mut order: Vec<u64> = (0..universe).collect();
    order.shuffle(&mut rng);
    let mut rank = vec![0u64; universe as usize];
    for (pos, &x) in order.iter().enumerate() {
        rank[x as usize] = pos as u64;
    }
    rank
}

fn fill_by_rank(t: &mut Vec<u64>, pool: &[u64], rank: &[u64], target: usize) -> Result<()> {
    if t.len() >= target {
        return Ok(());
    }
    let mut candidates: Vec<u64> = pool
        .iter()
        .copied()
        .filter(|x| t.binary_search(x).is_err())
        .collect();
    let need = target - t.len();
    if candidates.len() < need {
        return Err(Error::Format(format!(
            "ladder fill needs {need} elements but only {} remain",
            candidates.len()
        )));
    }
    candidates.sort_by_key(|&x| rank[x as usize]);
    for &x in &candidates[..need] {
        let pos = t.binary_search(&x).unwrap_err();
        t.insert(pos, x);
    }
    Ok(())
}

/// Encodes `s` (which must have the ladder's set size m). T0 is drawn from
/// the hard distribution's conditional given S; the message is generated
/// once for (S, T0) and reused at every later stage.
pub fn encode(
    s: &[u64],
    p: &UrParams,
    protocol: &dyn UrProtocol,
    shared_seed: &Seed256,
    private_seed: &Seed256,
) -> Result<EncRecord> {
    let mut sorted_s = s.to_vec();
    sorted_s.sort_unstable();
    sorted_s.dedup();
    if sorted_s.len() as u64 != p.m {
        return Err(Error::InvalidParameter(format!(
            "encoding needs |S| = m = {}, got {}",
            p.m,
            sorted_s.len()
        )));
    }
    if sorted_s.iter().any(|&x| x >= p.universe) {
        return Err(Error::InvalidParameter("set element outside the universe".into()));
    }
    let mut rng = ChaCha8Rng::from_seed(private_seed.derive(tag::PROTO, 0).to_bytes());
    let i0 = rng.gen_range(0..p.stages());
    let mut t0: Vec<u64> = index_sample(&mut rng, sorted_s.len(), p.schedule[i0] as usize)
        .into_iter()
        .map(|i| sorted_s[i])
        .collect();
    t0.sort_unstable();

    let message = protocol.message(&sorted_s, &t0);
    let rank = shared_permutation(p.universe, shared_seed);

    let mut t = t0.clone();
    let mut accepted: Vec<u64> = Vec::new();
    let mut accept_bits = Vec::with_capacity(p.stages() - i0);
    for i in i0..p.stages() {
        let x = protocol.answer(&message, &t);
        let fresh = match x {
            Some(x) => {
                sorted_s.binary_search(&x).is_ok() && t.binary_search(&x).is_err()
            }
            None => false,
        };
        if fresh {
            let x = x.expect("fresh implies Some");
            accepted.push(x);
            let pos = t.binary_search(&x).unwrap_err();
            t.insert(pos, x);
        }
        accept_bits.push(fresh);
        let target = if i + 1 < p.stages() {
            p.schedule[i + 1] as usize
        } else {
            p.m as usize
        };
        fill_by_rank(&mut t, &sorted_s, &rank, target)?;
    }
    accepted.sort_unstable();
    let tail: Vec<u64> = sorted_s
        .iter()
        .copied()
        .filter(|x| accepted.binary_search(x).is_err() && t0.binary_search(x).is_err())
        .collect();
    Ok(EncRecord { t0, message, accept_bits, tail })
}

/// Replays the encoder's walk and returns S. Total: succeeds for every
/// protocol behavior, including adversarial output functions.
pub fn decode(
    rec: &EncRecord,
    p: &UrParams,
    protocol: &dyn UrProtocol,
    shared_seed: &Seed256,
) -> Result<Vec<u64>> {
    let i0 = p
        .schedule
        .iter()
        .position(|&r| r as usize == rec.t0.len())
        .ok_or_else(|| Error::Format(format!("no ladder stage has size {}", rec.t0.len())))?;
    if rec.accept_bits.len() != p.stages() - i0 {
        return Err(Error::Format(format!(
            "expected {} accept bits, got {}",
            p.stages() - i0,
            rec.accept_bits.len()
        )));
    }
    let rank = shared_permutation(p.universe, shared_seed);
    let mut t = rec.t0.clone();
    t.sort_unstable();
    for (offset, i) in (i0..p.stages()).enumerate() {
        let x = protocol.answer(&rec.message, &t);
        if rec.accept_bits[offset] {
            let x = x.ok_or_else(|| {
                Error::Format("accept bit set but the protocol answered Fail".into())
            })?;
            match t.binary_search(&x) {
                Ok(_) => {
                    return Err(Error::Format(
                        "accept bit set but the answer is already in T".into(),
                    ))
                }
                Err(pos) => t.insert(pos, x),
            }
        }
        let target = if i + 1 < p.stages() {
            p.schedule[i + 1] as usize
        } else {
            p.m as usize
        };
        fill_by_rank(&mut t, &rec.tail, &rank, target)?;
    }
    Ok(t)
}
