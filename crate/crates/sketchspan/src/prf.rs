//! Keyed pseudorandom function over a 256-bit seed.
//!
//! Every random choice shared between parties (subsampling membership,
//! fingerprint bases, per-round sketch randomness) is derived from a
//! [`Seed256`] through [`prf`], so that any party holding the seed can
//! reproduce the exact same choices. The mixer is a splitmix64 chain over
//! the four seed words and the tagged inputs; it is not cryptographic.

/// A 256-bit seed shared by all parties of a protocol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Seed256 {
    pub words: [u64; 4],
}

impl Seed256 {
    pub const fn from_words(words: [u64; 4]) -> Self {
        Seed256 { words }
    }

    /// Expands a small integer seed, so CLIs can take `--seed 7`.
    pub fn from_u64(x: u64) -> Self {
        let mut words = [0u64; 4];
        let mut s = x;
        for w in words.iter_mut() {
            s = s.wrapping_add(0x9e3779b97f4a7c15);
            *w = mix(s);
        }
        Seed256 { words }
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, w) in self.words.iter().enumerate() {
            out[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[i * 8..(i + 1) * 8]);
            *w = u64::from_le_bytes(b);
        }
        Seed256 { words }
    }

    /// A child seed for an independent purpose (round index, trial index).
    pub fn derive(&self, tag: u64, index: u64) -> Seed256 {
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            *w = prf(self, tag, index, i as u64);
        }
        Seed256 { words }
    }
}

/// Domain tags keeping the PRF's input spaces disjoint.
pub mod tag {
    /// Subsampling level cap of one (repetition, index) pair.
    pub const LEVEL: u64 = 0x4c45_5645;
    /// Fingerprint base of one (level, repetition) cell.
    pub const RHO: u64 = 0x5248_4f31;
    /// Per-round sketch seed inside a vertex bank.
    pub const ROUND: u64 = 0x524e_4453;
    /// Per-trial seed inside an experiment.
    pub const TRIAL: u64 = 0x5452_4941;
    /// Shared permutation of the encoder/decoder pair.
    pub const PERM: u64 = 0x5045_524d;
    /// Protocol-message randomness.
    pub const PROTO: u64 = 0x5052_4f54;
}

#[inline]
fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    x
}

/// Keyed PRF: 64 uniform-looking bits from (seed, tag, a, b).
#[inline]
pub fn prf(seed: &Seed256, tag: u64, a: u64, b: u64) -> u64 {
    let w = &seed.words;
    let mut h = mix(w[0] ^ tag.wrapping_mul(0x9e3779b97f4a7c15));
    h = mix(h ^ w[1] ^ a.wrapping_mul(0xc2b2ae3d27d4eb4f));
    h = mix(h ^ w[2] ^ b.wrapping_mul(0x165667b19e3779f9));
    mix(h ^ w[3])
}
