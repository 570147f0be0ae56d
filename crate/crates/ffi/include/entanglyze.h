#ifndef ENTANGLYZE_H
#define ENTANGLYZE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes.
typedef enum EzStatus {
  EZ_STATUS_OK = 0,
  EZ_STATUS_NULL_POINTER = 1,
  EZ_STATUS_INVALID_ARGUMENT = 2,
  EZ_STATUS_PARSE = 3,
  EZ_STATUS_IO = 4,
  EZ_STATUS_NUMERIC = 5,
  EZ_STATUS_NOT_MAXIMALLY_ENTANGLED = 6,
  EZ_STATUS_ZERO_PROBABILITY = 7,
  EZ_STATUS_TOO_LARGE = 8,
  EZ_STATUS_PANIC = 9,
} EzStatus;

// Opaque state handle.
typedef struct EzState EzState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or null.
const char *ez_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ez_version(void);

// Builds a state from `2^n_qubits` interleaved `(re, im)` pairs, normalizing.
// `len` counts doubles.
enum EzStatus ez_state_from_amplitudes(size_t n_qubits,
                                       const double *re_im,
                                       size_t len,
                                       struct EzState **out_state);

// Builds a state from a textual spec such as `"brs:6"` or `"s4:0,0,1,0"`.
// `seed` applies to `random:N` specs without an explicit seed.
enum EzStatus ez_state_from_spec(const char *spec, uint64_t seed, struct EzState **out_state);

// Releases a handle. Null is ignored.
void ez_state_free(struct EzState *s);

// Qubit count, or 0 for a null handle.
size_t ez_state_n_qubits(const struct EzState *s);

// Copies the amplitudes as interleaved `(re, im)`; `len` must be `2^(n+1)`.
enum EzStatus ez_state_amplitudes(const struct EzState *s, double *out_re_im, size_t len);

// Writes `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of qubit `q` to `out3`.
enum EzStatus ez_bloch_vector(const struct EzState *s, size_t q, double *out3);

enum EzStatus ez_expectation(const struct EzState *s,
                             size_t q,
                             const double *axis3,
                             double *out_value);

// `⟨∏ σ⟩` over `k` distinct qubits; `axes` holds `3k` doubles.
enum EzStatus ez_correlator(const struct EzState *s,
                            const size_t *qubits,
                            const double *axes3k,
                            size_t k,
                            double *out_value);

enum EzStatus ez_ed_single(const struct EzState *s, size_t q, double *out_value);

enum EzStatus ez_total_entanglement(const struct EzState *s, double *out_value);

// Row-major `n×n` EM for `n` axes (`3n` doubles).
enum EzStatus ez_em_matrix(const struct EzState *s, const double *axes3n, double *out_nn);

// Row-major 3×3 MIEB matrix. A null `targets` selects every other qubit.
enum EzStatus ez_mieb_matrix(const struct EzState *s,
                             size_t nu,
                             const size_t *targets,
                             size_t n_targets,
                             double *out9);

// Axis maximizing the entanglement broken on all other qubits. Requires a
// maximally entangled state.
enum EzStatus ez_optimal_breaking_axis(const struct EzState *s,
                                       size_t nu,
                                       double *out_axis3,
                                       double *out_eigenvalue);

enum EzStatus ez_optimal_pair_axes(const struct EzState *s,
                                   size_t mu,
                                   size_t nu,
                                   double *out_v_mu3,
                                   double *out_v_nu3,
                                   double *out_lambda);

// Projects qubit `q` onto outcome `+1` or `-1` along the axis and returns a
// new handle. `out_probability` may be null.
enum EzStatus ez_project(const struct EzState *s,
                         size_t q,
                         const double *axis3,
                         int32_t outcome,
                         struct EzState **out_state,
                         double *out_probability);

// Block count of the quantized EM and the persistency bound (`-1` when the
// bound does not apply). A null `axes3n` uses the optimal axis set.
enum EzStatus ez_persistency_upper_bound(const struct EzState *s,
                                         const double *axes3n,
                                         double tol,
                                         size_t *out_n_blocks,
                                         int64_t *out_bound);

// Full analysis report as JSON. Free the string with `ez_string_free`.
enum EzStatus ez_analyze_json(const char *spec,
                              uint64_t seed,
                              bool optimal_axes,
                              double tol,
                              char **out_json);

// Releases a string returned by this library. Null is ignored.
void ez_string_free(char *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTANGLYZE_H */
