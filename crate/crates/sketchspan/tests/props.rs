//! Property tests for the structural invariants: serialization
//! round-trips, linearity under arbitrary update interleavings, the pair
//! index bijection, parser totality, and codec totality.

use proptest::prelude::*;

use sketchspan::agm::{edge_from_index, edge_index};
use sketchspan::graph::parse_stream;
use sketchspan::lab::{decode, encode, sample_d_ur, ur_params, AlwaysWrongProtocol};
use sketchspan::prf::Seed256;
use sketchspan::support_find::{new_support_find, SupportFindSketch};

proptest! {
    #[test]
    fn sketch_serialization_roundtrips(
        seed in any::<u64>(),
        universe in 1u64..5000,
        k in 1u32..4,
        delta1 in 0.01f64..0.9,
        updates in prop::collection::vec((any::<u64>(), -20i64..20), 0..40),
    ) {
        let mut s = new_support_find(universe, k, delta1, 0.001, Seed256::from_u64(seed)).unwrap();
        for (i, v) in updates {
            s.update(i % universe, v).unwrap();
        }
        let bytes = s.to_bytes();
        prop_assert_eq!(bytes.len() as u64 * 8, s.size_bits());
        let (back, used) = SupportFindSketch::from_bytes(&bytes).unwrap();
        prop_assert_eq!(used, bytes.len());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn sketch_addition_is_linear(
        seed in any::<u64>(),
        universe in 1u64..2000,
        first in prop::collection::vec((any::<u64>(), -5i64..5), 0..20),
        second in prop::collection::vec((any::<u64>(), -5i64..5), 0..20),
    ) {
        let sd = Seed256::from_u64(seed);
        let build = |ups: &[(u64, i64)]| {
            let mut s = new_support_find(universe, 1, 0.2, 0.01, sd).unwrap();
            for &(i, v) in ups {
                s.update(i % universe, v).unwrap();
            }
            s
        };
        let sum = build(&first).add(&build(&second)).unwrap();
        let mut merged = first.clone();
        merged.extend_from_slice(&second);
        prop_assert_eq!(sum.to_bytes(), build(&merged).to_bytes());
    }

    #[test]
    fn pair_index_bijection(v in 1u64..1_000_000, u_frac in 0.0f64..1.0) {
        let u = ((v as f64) * u_frac) as u64;
        let u = u.min(v - 1);
        prop_assert_eq!(edge_from_index(edge_index(u, v)), (u, v));
    }

    #[test]
    fn stream_parser_never_panics(text in "[ -~\n]{0,300}") {
        let _ = parse_stream(&text);
    }

    #[test]
    fn codec_reconstructs_under_an_adversarial_protocol(
        master in any::<u64>(),
        trial in any::<u64>(),
    ) {
        let p = ur_params(64, 2f64.powi(-9), 3.0, 1.0).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(trial);
        let inst = sample_d_ur(&p, &mut rng);
        let shared = Seed256::from_u64(master);
        let wrong = AlwaysWrongProtocol { universe: p.universe };
        let rec = encode(&inst.s, &p, &wrong, &shared, &Seed256::from_u64(trial)).unwrap();
        prop_assert_eq!(decode(&rec, &p, &wrong, &shared).unwrap(), inst.s);
    }
}
