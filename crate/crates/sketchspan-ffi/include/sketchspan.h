#ifndef SKETCHSPAN_H
#define SKETCHSPAN_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  /**
   * The sketch answered Fail (a value, not an error).
   */
  SS_STATUS_QUERY_FAIL = 1,
  SS_STATUS_NULL_POINTER = 2,
  SS_STATUS_INVALID_ARGUMENT = 3,
  SS_STATUS_INCOMPATIBLE = 4,
  SS_STATUS_OUT_OF_RANGE = 5,
  SS_STATUS_MALFORMED_PAYLOAD = 6,
  SS_STATUS_BUFFER_TOO_SMALL = 7,
} SsStatus;

/**
 * Opaque spanning-forest bank handle.
 */
typedef struct SsBank SsBank;

/**
 * Opaque support-find sketch handle.
 */
typedef struct SsSketch SsSketch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a support-find sketch over `[0, universe)`. Returns null on
 * invalid parameters. `seed` must point to 32 bytes.
 */
struct SsSketch *ss_sketch_new(uint64_t universe,
                               uint32_t k,
                               double delta1,
                               double delta2,
                               const uint8_t *seed);

/**
 * Frees a sketch handle. Null is a no-op.
 */
void ss_sketch_free(struct SsSketch *sketch);

/**
 * Applies the turnstile update `z[index] += delta`.
 */
enum SsStatus ss_sketch_update(struct SsSketch *sketch, uint64_t index, int64_t delta);

/**
 * Adds `other` into `sketch` cell-wise (both must share parameters and
 * seed).
 */
enum SsStatus ss_sketch_absorb(struct SsSketch *sketch, const struct SsSketch *other);

/**
 * Queries for support indices. On `SS_STATUS_OK`, `out_len` holds how
 * many indices were written (possibly zero for the zero vector);
 * `SS_STATUS_QUERY_FAIL` reports the sketch's Fail outcome.
 */
enum SsStatus ss_sketch_query(const struct SsSketch *sketch,
                              uint64_t *out_indices,
                              uintptr_t capacity,
                              uintptr_t *out_len);

/**
 * Exact serialized size in bits (data-independent).
 */
uint64_t ss_sketch_size_bits(const struct SsSketch *sketch);

/**
 * Serializes the sketch. With a null buffer, writes the needed capacity
 * to `out_len` and returns `SS_STATUS_BUFFER_TOO_SMALL`.
 */
enum SsStatus ss_sketch_serialize(const struct SsSketch *sketch,
                                  uint8_t *buffer,
                                  uintptr_t capacity,
                                  uintptr_t *out_len);

/**
 * Parses a serialized sketch; returns null on malformed payloads.
 */
struct SsSketch *ss_sketch_deserialize(const uint8_t *data, uintptr_t len);

/**
 * Creates a spanning-forest bank for `n` vertices at failure probability
 * `delta`. Returns null on invalid parameters. `seed` points to 32 bytes.
 */
struct SsBank *ss_bank_new(uint64_t n, double delta, const uint8_t *seed);

/**
 * Frees a bank handle. Null is a no-op.
 */
void ss_bank_free(struct SsBank *bank);

/**
 * Applies one edge update; `delta` is `+1` (insert) or `-1` (delete).
 */
enum SsStatus ss_bank_update(struct SsBank *bank, uint64_t u, uint64_t v, int64_t delta);

/**
 * Queries the spanning forest. Edges land in `out_edges` as `u, v` pairs;
 * `out_len` receives the edge count. With insufficient capacity, the
 * needed count is written and `SS_STATUS_BUFFER_TOO_SMALL` returned.
 */
enum SsStatus ss_bank_query(const struct SsBank *bank,
                            uint64_t *out_edges,
                            uintptr_t capacity_pairs,
                            uintptr_t *out_len);

/**
 * Exact sketch-memory size of the bank in bits (data-independent).
 */
uint64_t ss_bank_total_size_bits(const struct SsBank *bank);

/**
 * Serializes the bank's sketch memory (the shippable payload). Null
 * buffer: size query, as in [`ss_sketch_serialize`].
 */
enum SsStatus ss_bank_serialize_payload(const struct SsBank *bank,
                                        uint8_t *buffer,
                                        uintptr_t capacity,
                                        uintptr_t *out_len);

/**
 * Rebuilds a bank from `(n, delta, seed)` and a payload produced by
 * [`ss_bank_serialize_payload`]. Returns null on mismatch.
 */
struct SsBank *ss_bank_from_payload(uint64_t n,
                                    double delta,
                                    const uint8_t *seed,
                                    const uint8_t *data,
                                    uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKETCHSPAN_H */
