//! C ABI for the sketchspan library.
//!
//! Handles are opaque pointers created and freed here; every fallible call
//! returns an [`SsStatus`]. Buffers are caller-allocated: pass a null
//! buffer to size-query calls first, then call again with capacity.
//!
//! Seeds are 32-byte arrays shared verbatim between parties.
//!
//! Pointer contract for every call: handles must come from the matching
//! constructor and not be freed twice; byte pointers must reference live
//! allocations of the stated length; null handles are rejected with
//! `SS_STATUS_NULL_POINTER` where a status is returned.
#![allow(clippy::missing_safety_doc)]

use std::slice;

use sketchspan::agm::{agm_params, SpanningForest, VertexSketchBank};
use sketchspan::error::Error;
use sketchspan::prf::Seed256;
use sketchspan::support_find::{new_support_find, SupportFindSketch, SupportResult};

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SsStatus {
    Ok = 0,
    /// The sketch answered Fail (a value, not an error).
    QueryFail = 1,
    NullPointer = 2,
    InvalidArgument = 3,
    Incompatible = 4,
    OutOfRange = 5,
    MalformedPayload = 6,
    BufferTooSmall = 7,
}

fn status_of(err: &Error) -> SsStatus {
    match err {
        Error::InvalidParameter(_) | Error::Parse { .. } | Error::Regime(_)
        | Error::Schedule(_) | Error::Size(_) | Error::UnsupportedOp(_) => {
            SsStatus::InvalidArgument
        }
        Error::Incompatible(_) => SsStatus::Incompatible,
        Error::IndexOutOfRange { .. } | Error::VertexOutOfRange { .. } | Error::SelfLoop(_)
        | Error::Multiplicity { .. } => SsStatus::OutOfRange,
        Error::Format(_) => SsStatus::MalformedPayload,
    }
}

/// Opaque support-find sketch handle.
pub struct SsSketch(SupportFindSketch);

/// Opaque spanning-forest bank handle.
pub struct SsBank(VertexSketchBank);

unsafe fn read_seed(seed: *const u8) -> Option<Seed256> {
    if seed.is_null() {
        return None;
    }
    let bytes = unsafe { slice::from_raw_parts(seed, 32) };
    let mut arr = [0u8; 32];
    arr.copy_from_slice(bytes);
    Some(Seed256::from_bytes(&arr))
}

/// Creates a support-find sketch over `[0, universe)`. Returns null on
/// invalid parameters. `seed` must point to 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_new(
    universe: u64,
    k: u32,
    delta1: f64,
    delta2: f64,
    seed: *const u8,
) -> *mut SsSketch {
    let Some(seed) = (unsafe { read_seed(seed) }) else {
        return std::ptr::null_mut();
    };
    match new_support_find(universe, k, delta1, delta2, seed) {
        Ok(s) => Box::into_raw(Box::new(SsSketch(s))),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Frees a sketch handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_free(sketch: *mut SsSketch) {
    if !sketch.is_null() {
        drop(unsafe { Box::from_raw(sketch) });
    }
}

/// Applies the turnstile update `z[index] += delta`.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_update(
    sketch: *mut SsSketch,
    index: u64,
    delta: i64,
) -> SsStatus {
    let Some(s) = (unsafe { sketch.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    match s.0.update(index, delta) {
        Ok(()) => SsStatus::Ok,
        Err(e) => status_of(&e),
    }
}

/// Adds `other` into `sketch` cell-wise (both must share parameters and
/// seed).
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_absorb(
    sketch: *mut SsSketch,
    other: *const SsSketch,
) -> SsStatus {
    let (Some(dst), Some(src)) = (unsafe { sketch.as_mut() }, unsafe { other.as_ref() }) else {
        return SsStatus::NullPointer;
    };
    match dst.0.absorb(&src.0) {
        Ok(()) => SsStatus::Ok,
        Err(e) => status_of(&e),
    }
}

/// Queries for support indices. On `SS_STATUS_OK`, `out_len` holds how
/// many indices were written (possibly zero for the zero vector);
/// `SS_STATUS_QUERY_FAIL` reports the sketch's Fail outcome.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_query(
    sketch: *const SsSketch,
    out_indices: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> SsStatus {
    let (Some(s), Some(len)) = (unsafe { sketch.as_ref() }, unsafe { out_len.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    match s.0.query() {
        SupportResult::Fail => SsStatus::QueryFail,
        SupportResult::Found(v) => {
            if v.len() > capacity {
                *len = v.len();
                return SsStatus::BufferTooSmall;
            }
            if !v.is_empty() {
                if out_indices.is_null() {
                    return SsStatus::NullPointer;
                }
                let out = unsafe { slice::from_raw_parts_mut(out_indices, v.len()) };
                out.copy_from_slice(&v);
            }
            *len = v.len();
            SsStatus::Ok
        }
    }
}

/// Exact serialized size in bits (data-independent).
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_size_bits(sketch: *const SsSketch) -> u64 {
    unsafe { sketch.as_ref() }.map(|s| s.0.size_bits()).unwrap_or(0)
}

/// Serializes the sketch. With a null buffer, writes the needed capacity
/// to `out_len` and returns `SS_STATUS_BUFFER_TOO_SMALL`.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_serialize(
    sketch: *const SsSketch,
    buffer: *mut u8,
    capacity: usize,
    out_len: *mut usize,
) -> SsStatus {
    let (Some(s), Some(len)) = (unsafe { sketch.as_ref() }, unsafe { out_len.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    let bytes = s.0.to_bytes();
    *len = bytes.len();
    if buffer.is_null() || capacity < bytes.len() {
        return SsStatus::BufferTooSmall;
    }
    unsafe { slice::from_raw_parts_mut(buffer, bytes.len()) }.copy_from_slice(&bytes);
    SsStatus::Ok
}

/// Parses a serialized sketch; returns null on malformed payloads.
#[no_mangle]
pub unsafe extern "C" fn ss_sketch_deserialize(data: *const u8, len: usize) -> *mut SsSketch {
    if data.is_null() {
        return std::ptr::null_mut();
    }
    let bytes = unsafe { slice::from_raw_parts(data, len) };
    match SupportFindSketch::from_bytes(bytes) {
        Ok((s, used)) if used == len => Box::into_raw(Box::new(SsSketch(s))),
        _ => std::ptr::null_mut(),
    }
}

/// Creates a spanning-forest bank for `n` vertices at failure probability
/// `delta`. Returns null on invalid parameters. `seed` points to 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn ss_bank_new(n: u64, delta: f64, seed: *const u8) -> *mut SsBank {
    let Some(seed) = (unsafe { read_seed(seed) }) else {
        return std::ptr::null_mut();
    };
    match agm_params(n, delta) {
        Ok(params) => Box::into_raw(Box::new(SsBank(VertexSketchBank::init(params, seed)))),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Frees a bank handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ss_bank_free(bank: *mut SsBank) {
    if !bank.is_null() {
        drop(unsafe { Box::from_raw(bank) });
    }
}

/// Applies one edge update; `delta` is `+1` (insert) or `-1` (delete).
#[no_mangle]
pub unsafe extern "C" fn ss_bank_update(
    bank: *mut SsBank,
    u: u64,
    v: u64,
    delta: i64,
) -> SsStatus {
    let Some(b) = (unsafe { bank.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    match b.0.update(u, v, delta) {
        Ok(()) => SsStatus::Ok,
        Err(e) => status_of(&e),
    }
}

fn write_forest(
    forest: &SpanningForest,
    out_edges: *mut u64,
    capacity_pairs: usize,
    out_len: &mut usize,
) -> SsStatus {
    *out_len = forest.edges.len();
    if forest.edges.len() > capacity_pairs {
        return SsStatus::BufferTooSmall;
    }
    if !forest.edges.is_empty() {
        if out_edges.is_null() {
            return SsStatus::NullPointer;
        }
        let out = unsafe { slice::from_raw_parts_mut(out_edges, 2 * forest.edges.len()) };
        for (i, &(u, v)) in forest.edges.iter().enumerate() {
            out[2 * i] = u;
            out[2 * i + 1] = v;
        }
    }
    SsStatus::Ok
}

/// Queries the spanning forest. Edges land in `out_edges` as `u, v` pairs;
/// `out_len` receives the edge count. With insufficient capacity, the
/// needed count is written and `SS_STATUS_BUFFER_TOO_SMALL` returned.
#[no_mangle]
pub unsafe extern "C" fn ss_bank_query(
    bank: *const SsBank,
    out_edges: *mut u64,
    capacity_pairs: usize,
    out_len: *mut usize,
) -> SsStatus {
    let (Some(b), Some(len)) = (unsafe { bank.as_ref() }, unsafe { out_len.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    let forest = b.0.query();
    write_forest(&forest, out_edges, capacity_pairs, len)
}

/// Exact sketch-memory size of the bank in bits (data-independent).
#[no_mangle]
pub unsafe extern "C" fn ss_bank_total_size_bits(bank: *const SsBank) -> u64 {
    unsafe { bank.as_ref() }.map(|b| b.0.total_size_bits()).unwrap_or(0)
}

/// Serializes the bank's sketch memory (the shippable payload). Null
/// buffer: size query, as in [`ss_sketch_serialize`].
#[no_mangle]
pub unsafe extern "C" fn ss_bank_serialize_payload(
    bank: *const SsBank,
    buffer: *mut u8,
    capacity: usize,
    out_len: *mut usize,
) -> SsStatus {
    let (Some(b), Some(len)) = (unsafe { bank.as_ref() }, unsafe { out_len.as_mut() }) else {
        return SsStatus::NullPointer;
    };
    let bytes = b.0.payload_bytes();
    *len = bytes.len();
    if buffer.is_null() || capacity < bytes.len() {
        return SsStatus::BufferTooSmall;
    }
    unsafe { slice::from_raw_parts_mut(buffer, bytes.len()) }.copy_from_slice(&bytes);
    SsStatus::Ok
}

/// Rebuilds a bank from `(n, delta, seed)` and a payload produced by
/// [`ss_bank_serialize_payload`]. Returns null on mismatch.
#[no_mangle]
pub unsafe extern "C" fn ss_bank_from_payload(
    n: u64,
    delta: f64,
    seed: *const u8,
    data: *const u8,
    len: usize,
) -> *mut SsBank {
    let Some(seed) = (unsafe { read_seed(seed) }) else {
        return std::ptr::null_mut();
    };
    if data.is_null() {
        return std::ptr::null_mut();
    }
    let bytes = unsafe { slice::from_raw_parts(data, len) };
    let Ok(params) = agm_params(n, delta) else {
        return std::ptr::null_mut();
    };
    match VertexSketchBank::from_payload(params, seed, bytes) {
        Ok(b) => Box::into_raw(Box::new(SsBank(b))),
        Err(_) => std::ptr::null_mut(),
    }
}
