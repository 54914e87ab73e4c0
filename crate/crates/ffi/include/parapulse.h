#ifndef PARAPULSE_H
#define PARAPULSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpAxis {
  PP_AXIS_EPSILON = 0,
  PP_AXIS_DELTA = 1,
  PP_AXIS_EPSILON_S = 2,
  /**
   * ε = δ.
   */
  PP_AXIS_DIAGONAL = 3,
} PpAxis;

/**
 * Result code of every entry point.
 */
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_INVALID_ARGUMENT = 2,
  PP_STATUS_PARSE = 3,
  PP_STATUS_NO_CONVERGENCE = 4,
  PP_STATUS_VERIFICATION = 5,
  PP_STATUS_IO = 6,
  PP_STATUS_PANIC = 7,
} PpStatus;

/**
 * Opaque sequence handle.
 */
typedef struct PpSequence PpSequence;

/**
 * Quasistatic errors: amplitude ε, detuning δ, Stark ε_s.
 */
typedef struct PpErrorParams {
  double epsilon;
  double delta;
  double epsilon_s;
} PpErrorParams;

/**
 * `U = w − i(x σx + y σy + z σz)`.
 */
typedef struct PpQuaternion {
  double w;
  double x;
  double y;
  double z;
} PpQuaternion;

typedef struct PpStats {
  /**
   * Physical pulse count.
   */
  size_t k;
  /**
   * Total global pulse area in units of π.
   */
  double t;
  /**
   * Duration in units of 1/Ω, Z rotations weighted by the slowdown.
   */
  double duration;
} PpStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a family instance for the gate given by the scheme's three
 * basic-sequence angles (PC: α β γ, AC: XYX, ZC: ZYZ). `n = 0` selects the
 * family's default order; `scheme` may be NULL for the family's default.
 *
 * # Safety
 * `family` (and `scheme` unless NULL) must be NUL-terminated strings; `out`
 * must be valid for writes.
 */
enum PpStatus pp_synth_gate(const char *family,
                            uint32_t n,
                            const char *scheme,
                            double alpha,
                            double beta,
                            double gamma,
                            struct PpSequence **out);

/**
 * Builds a family instance replacing the single rotation `[θ]_φ` (`Z(θ)`
 * for RZ).
 *
 * # Safety
 * As for [`pp_synth_gate`].
 */
enum PpStatus pp_synth_rotation(const char *family,
                                uint32_t n,
                                const char *scheme,
                                double theta,
                                double phi,
                                struct PpSequence **out);

/**
 * Parses the plain-text sequence format (angles in units of π).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum PpStatus pp_sequence_from_text(const char *text, struct PpSequence **out);

/**
 * Formats a sequence as text; release the string with `pp_string_free`.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid for writes.
 */
enum PpStatus pp_sequence_to_text(const struct PpSequence *seq, char **out);

/**
 * Number of elements (global pulses and Z rotations).
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid for writes.
 */
enum PpStatus pp_sequence_len(const struct PpSequence *seq, size_t *out);

/**
 * Unitary implemented under `err`.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid for writes.
 */
enum PpStatus pp_evaluate(const struct PpSequence *seq,
                          struct PpErrorParams err,
                          struct PpQuaternion *out);

/**
 * Pulse count, area and duration.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid for writes.
 */
enum PpStatus pp_stats(const struct PpSequence *seq, double z_slowdown, struct PpStats *out);

/**
 * Average gate fidelity against `target` under `err` and depolarization at
 * rate `gamma` over the sequence's duration.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be valid for writes.
 */
enum PpStatus pp_avg_gate_fidelity(const struct PpSequence *seq,
                                   struct PpQuaternion target,
                                   struct PpErrorParams err,
                                   double gamma,
                                   double z_slowdown,
                                   double *out);

/**
 * Fitted infidelity slope along `axis` (a [`PpAxis`] value) and the
 * certified order, or `-1` when the slope lies outside every order's window.
 *
 * # Safety
 * `seq` must be a live handle; `slope` and `order` must be valid for writes.
 */
enum PpStatus pp_suppression_order(const struct PpSequence *seq,
                                   struct PpQuaternion target,
                                   uint32_t axis,
                                   double *slope,
                                   int32_t *order);

/**
 * Releases a sequence handle; NULL is ignored.
 *
 * # Safety
 * `seq` must be NULL or a handle not yet freed.
 */
void pp_sequence_free(struct PpSequence *seq);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from `pp_sequence_to_text` not yet freed.
 */
void pp_string_free(char *s);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAPULSE_H */
