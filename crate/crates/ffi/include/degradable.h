#ifndef DEGRADABLE_H
#define DEGRADABLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DgStatus {
  DG_STATUS_OK = 0,
  DG_STATUS_NULL_POINTER = 1,
  DG_STATUS_INVALID_ARGUMENT = 2,
  DG_STATUS_PARSE = 3,
  DG_STATUS_DIMENSION = 4,
  DG_STATUS_NOT_TRACE_PRESERVING = 5,
  DG_STATUS_NUMERICAL = 6,
  DG_STATUS_IO = 7,
  // Index or buffer length out of range.
  DG_STATUS_OUT_OF_RANGE = 8,
  DG_STATUS_PANIC = 99,
} DgStatus;

typedef enum DgChannelVerdict {
  DG_CHANNEL_VERDICT_ANTI_DEGRADABLE_CERTIFIED = 0,
  DG_CHANNEL_VERDICT_DEGRADABLE_CERTIFIED = 1,
  DG_CHANNEL_VERDICT_BOTH_CERTIFIED = 2,
  DG_CHANNEL_VERDICT_RULED_OUT_FOR_FILTERED_INPUTS = 3,
  DG_CHANNEL_VERDICT_INCONCLUSIVE = 4,
} DgChannelVerdict;

typedef enum DgDirection {
  // A channel on Eve's share reproduces Bob's.
  DG_DIRECTION_EVE_TO_BOB = 0,
  DG_DIRECTION_BOB_TO_EVE = 1,
} DgDirection;

typedef enum DgVerdict {
  DG_VERDICT_FEASIBLE = 0,
  DG_VERDICT_RULED_OUT = 1,
  DG_VERDICT_INCONCLUSIVE = 2,
} DgVerdict;

typedef enum DgStage {
  DG_STAGE_FILTER = 0,
  DG_STAGE_RANK_ONE = 1,
  DG_STAGE_CONSTRAINTS = 2,
  DG_STAGE_SDP = 3,
} DgStage;

// Opaque channel.
typedef struct DgChannel DgChannel;

// Opaque result of a one-direction decision.
typedef struct DgOutcome DgOutcome;

// Opaque tripartite state.
typedef struct DgState DgState;

// Decision settings. Obtain defaults from [`dg_config_default`].
typedef struct DgConfig {
  size_t max_iter;
  double feas_tol;
  double psd_tol;
  size_t stall_window;
  // Random combination witnesses; 0 disables them.
  size_t witness_count;
  uint64_t seed;
  bool use_rank_one;
  // Constrain only the `(u, u)` block pairs.
  bool diagonal_only;
} DgConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. Valid
// until the next failing call on the same thread.
const char *dg_last_error(void);

// Library version as a static string.
const char *dg_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void dg_string_free(char *s);

// # Safety
// `out` must be valid for writes.
enum DgStatus dg_config_default(struct DgConfig *out);

// State on `C^n ⊗ C^p ⊗ C^q` from `2·n·p·q` doubles: interleaved real and
// imaginary parts in lexicographic `(i, j, k)` order.
//
// # Safety
// `amplitudes` must point to `2·n·p·q` readable doubles; `out` must be
// valid for writes.
enum DgStatus dg_state_new(size_t n,
                           size_t p,
                           size_t q,
                           const double *amplitudes,
                           struct DgState **out);

// # Safety
// `json` must be a nul-terminated string; `out` must be valid for writes.
enum DgStatus dg_state_from_json(const char *json, struct DgState **out);

// # Safety
// `state` must be a live handle; `out` must be valid for writes. Release
// the result with [`dg_string_free`].
enum DgStatus dg_state_to_json(const struct DgState *state, char **out);

// # Safety
// `state` must be a live handle; the outputs must be valid for writes.
enum DgStatus dg_state_dims(const struct DgState *state, size_t *n, size_t *p, size_t *q);

// # Safety
// `state` must be null or a handle not yet freed.
void dg_state_free(struct DgState *state);

// # Safety
// `json` must be a nul-terminated string; `out` must be valid for writes.
enum DgStatus dg_channel_from_json(const char *json, struct DgChannel **out);

// Qubit depolarizing channel, `0 ≤ epsilon ≤ 3/4`.
//
// # Safety
// `out` must be valid for writes.
enum DgStatus dg_channel_depolarizing(double epsilon, struct DgChannel **out);

// Qubit amplitude damping, `0 ≤ gamma ≤ 1`.
//
// # Safety
// `out` must be valid for writes.
enum DgStatus dg_channel_amplitude_damping(double gamma, struct DgChannel **out);

// Maximally entangled lift `(I ⊗ V)Σ|ii⟩` of the channel (unnormalized).
//
// # Safety
// `ch` must be a live handle; `out` must be valid for writes.
enum DgStatus dg_channel_lift(const struct DgChannel *ch, struct DgState **out);

// Decide the lift in both directions. `config` may be null for defaults.
// With `report_json` non-null, the full report is written there as JSON.
//
// # Safety
// `ch` must be a live handle; `verdict` must be valid for writes;
// `config` and `report_json` may be null.
enum DgStatus dg_channel_test(const struct DgChannel *ch,
                              const struct DgConfig *config,
                              enum DgChannelVerdict *verdict,
                              char **report_json);

// # Safety
// `ch` must be null or a handle not yet freed.
void dg_channel_free(struct DgChannel *ch);

// Decide whether a channel on one share reproduces the other.
//
// # Safety
// `state` must be a live handle; `config` may be null; `out` must be valid
// for writes.
enum DgStatus dg_decide(const struct DgState *state,
                        enum DgDirection dir,
                        const struct DgConfig *config,
                        struct DgOutcome **out);

// # Safety
// `o` must be a live handle; `out` must be valid for writes.
enum DgStatus dg_outcome_verdict(const struct DgOutcome *o, enum DgVerdict *out);

// # Safety
// `o` must be a live handle; `out` must be valid for writes.
enum DgStatus dg_outcome_stage(const struct DgOutcome *o, enum DgStage *out);

// Residual of the certificate on the normalized state; NaN when the
// outcome carries no certificate.
//
// # Safety
// `o` must be a live handle; `out` must be valid for writes.
enum DgStatus dg_outcome_residual(const struct DgOutcome *o, double *out);

// Number of Kraus operators in the certificate and their shape
// (`rows × cols`); all zero without a certificate.
//
// # Safety
// `o` must be a live handle; the outputs must be valid for writes.
enum DgStatus dg_outcome_kraus_shape(const struct DgOutcome *o,
                                     size_t *count,
                                     size_t *rows,
                                     size_t *cols);

// Copy Kraus operator `index` into `buf` as `2·rows·cols` doubles,
// row-major with interleaved real and imaginary parts.
//
// # Safety
// `o` must be a live handle; `buf` must be writable for `len` doubles.
enum DgStatus dg_outcome_kraus(const struct DgOutcome *o, size_t index, double *buf, size_t len);

// # Safety
// `o` must be a live handle; `out` must be valid for writes. Release the
// result with [`dg_string_free`].
enum DgStatus dg_outcome_to_json(const struct DgOutcome *o, char **out);

// # Safety
// `o` must be null or a handle not yet freed.
void dg_outcome_free(struct DgOutcome *o);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEGRADABLE_H */
