//! Fixed-width bit packing for serialized sketch cells.
//!
//! Field elements occupy 61 bits, so packing them tightly (instead of one
//! u64 each) keeps serialized sizes equal to the bit counts the space
//! accounting reports. Bits are emitted little-endian within the stream.

pub struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter { out: Vec::new(), acc: 0, used: 0 }
    }

    pub fn with_capacity(bytes: usize) -> Self {
        BitWriter { out: Vec::with_capacity(bytes), acc: 0, used: 0 }
    }

    pub fn write(&mut self, value: u64, bits: u32) {
        debug_assert!(bits <= 64);
        debug_assert!(bits == 64 || value < (1u64 << bits));
        let mut v = value;
        let mut left = bits;
        while left > 0 {
            let room = 64 - self.used;
            let take = left.min(room);
            self.acc |= (v & mask(take)) << self.used;
            self.used += take;
            v = if take == 64 { 0 } else { v >> take };
            left -= take;
            if self.used == 64 {
                self.out.extend_from_slice(&self.acc.to_le_bytes());
                self.acc = 0;
                self.used = 0;
            }
        }
    }

    /// Flushes the tail, zero-padding to a byte boundary.
    pub fn finish(mut self) -> Vec<u8> {
        if self.used > 0 {
            let bytes = self.used.div_ceil(8) as usize;
            self.out.extend_from_slice(&self.acc.to_le_bytes()[..bytes]);
        }
        self.out
    }
}

impl Default for BitWriter {
    fn default() -> Self {
        Self::new()
    }
}

pub struct BitReader<'a> {
    data: &'a [u8],
    bitpos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, bitpos: 0 }
    }

    pub fn read(&mut self, bits: u32) -> Option<u64> {
        debug_assert!(bits <= 64);
        if self.bitpos + bits as usize > self.data.len() * 8 {
            return None;
        }
        let byte = self.bitpos / 8;
        let shift = (self.bitpos % 8) as u32;
        let v = if byte + 16 <= self.data.len() {
            let wide = u128::from_le_bytes(self.data[byte..byte + 16].try_into().unwrap());
            (wide >> shift) as u64 & mask(bits)
        } else {
            // tail: assemble bytes by hand
            let mut wide = 0u128;
            for (i, &b) in self.data[byte..].iter().take(16).enumerate() {
                wide |= (b as u128) << (8 * i);
            }
            (wide >> shift) as u64 & mask(bits)
        };
        self.bitpos += bits as usize;
        Some(v)
    }
}

#[inline]
fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Bytes needed to hold `count` values of `width` bits each.
pub fn packed_len(count: usize, width: u32) -> usize {
    (count * width as usize).div_ceil(8)
}
