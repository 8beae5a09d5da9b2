//! Arithmetic in the prime field GF(p) for the Mersenne prime p = 2^61 - 1.
//!
//! Elements are kept canonical in `[0, p)`. Reduction uses the Mersenne
//! fold `x mod p = (x & p) + (x >> 61)` applied twice.

/// The field modulus 2^61 - 1.
pub const P: u64 = (1u64 << 61) - 1;

/// Number of bits needed to store one canonical element.
pub const ELEM_BITS: u32 = 61;

#[inline]
fn fold(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut r = lo + hi;
    if r >= P {
        r -= P;
    }
    // hi < 2^67, so one more carry can remain after the first fold
    if r >= P {
        r -= P;
    }
    r
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    debug_assert!(a < P && b < P);
    let mut r = a + b;
    if r >= P {
        r -= P;
    }
    r
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    debug_assert!(a < P && b < P);
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn neg(a: u64) -> u64 {
    debug_assert!(a < P);
    if a == 0 {
        0
    } else {
        P - a
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    debug_assert!(a < P && b < P);
    fold((a as u128) * (b as u128))
}

/// Maps a signed integer into the field.
#[inline]
pub fn from_i64(v: i64) -> u64 {
    if v >= 0 {
        (v as u64) % P
    } else {
        neg((v.unsigned_abs()) % P)
    }
}

/// Interprets a field element as a signed value, mapping the upper half to
/// negatives. Only meaningful when the true magnitude is far below p/2.
#[inline]
pub fn to_i64(a: u64) -> i64 {
    debug_assert!(a < P);
    if a > P / 2 {
        -((P - a) as i64)
    } else {
        a as i64
    }
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    debug_assert!(base < P);
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat; `a` must be nonzero.
pub fn inv(a: u64) -> u64 {
    debug_assert!(a != 0 && a < P);
    pow(a, P - 2)
}

/// Reduces an arbitrary u64 into the field.
#[inline]
pub fn reduce(x: u64) -> u64 {
    fold(x as u128)
}
