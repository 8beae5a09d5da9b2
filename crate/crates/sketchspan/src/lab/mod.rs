//! Executable hard-instance apparatus: the subset universal-relation
//! distribution and its geometric size schedule, one-way protocols built on
//! the support-find sketch, the randomized encode/decode scheme, the
//! planted block graph families, the embedding of a relation instance into
//! a planted graph, and the n-fold reduction that ships real sketch memory
//! between parties.

pub mod codec;
pub mod dsk;
pub mod nfold;
pub mod ur;

pub use codec::{decode, encode, shared_permutation, EncRecord};
pub use dsk::{
    check_dsk_invariants, disconnected_copies, dsk_shape, embed_ur_in_dsk, recover_embedded,
    sample_d_sk, sample_d_sk_prime, sample_dm_degree, sample_dr_degree, DskGraph, DskPrimeSample,
    DskShape, Embedding,
};
pub use nfold::{nfold_reduction, NfoldOutcome};
pub use ur::{
    sample_d_ur, ur_alice, ur_bob, ur_params, AlwaysFailProtocol, AlwaysWrongProtocol,
    SketchUrProtocol, UrInstance, UrParams, UrProtocol, DEFAULT_C_R, DEFAULT_C_SIZE,
};
