#ifndef SPINFORGE_H
#define SPINFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_PARSE_ERROR = 3,
  SF_STATUS_UNKNOWN_TAG = 4,
  SF_STATUS_DOMAIN_ERROR = 5,
  SF_STATUS_NOT_LOCALLY_EQUIVALENT = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

typedef enum SfTarget {
  SF_TARGET_CNOT = 0,
  SF_TARGET_CZ = 1,
  SF_TARGET_SQRT_CNOT = 2,
  SF_TARGET_CPHASE = 3,
} SfTarget;

/**
 * Opaque device parameters.
 */
typedef struct SfParams SfParams;

typedef struct SfGateReport {
  double fidelity;
  double g1;
  double g2;
  double g3;
  double gate_time_ns;
  double peak_amplitude_mhz;
  /**
   * 1 when numerically optimized corrections replaced the printed ones
   */
  int locals_optimized;
} SfGateReport;

typedef struct SfUnitary4 {
  double re[16];
  double im[16];
} SfUnitary4;

typedef struct SfCphaseDesign {
  double theta;
  double n;
  double m;
  double alpha;
  double tau_ns;
  double peak_amplitude_mhz;
  /**
   * angular frequency, rad/s
   */
  double carrier;
} SfCphaseDesign;

typedef struct SfNoiseResult {
  double sigma_delta_khz;
  double mean_infidelity;
  double standard_error;
  size_t n_samples;
  size_t rejected_samples;
} SfNoiseResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/**
 * Message of the last failed call on this thread ("" after a success).
 * Valid until the next `sf_*` call on the same thread.
 */
const char *sf_last_error_message(void);

/**
 * Built-in device parameters. Free with `sf_params_free`.
 */
struct SfParams *sf_params_default(void);

/**
 * Parses a JSON parameter document (cyclic MHz) into `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_params_from_json(const char *json, struct SfParams **out);

/**
 * Serializes `params` to JSON; release the string with `sf_string_free`.
 *
 * # Safety
 * `params` must come from this library and `out` be a valid pointer.
 */
enum SfStatus sf_params_to_json(const struct SfParams *params, char **out);

/**
 * Exchange coupling in cyclic MHz, or NaN for a null handle.
 *
 * # Safety
 * `params` must be null or come from this library.
 */
double sf_params_j_mhz(const struct SfParams *params);

/**
 * # Safety
 * `params` must be null or come from this library, and not be used again.
 */
void sf_params_free(struct SfParams *params);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void sf_string_free(char *s);

/**
 * Simulates the named design and scores it against its target gate.
 *
 * # Safety
 * Pointers must be valid; `tag` NUL-terminated.
 */
enum SfStatus sf_gate_report(const struct SfParams *params,
                             const char *tag,
                             double step_ps,
                             int optimize_locals,
                             struct SfGateReport *out);

/**
 * Interaction-picture propagator of the named design's pulse (no locals).
 *
 * # Safety
 * Pointers must be valid; `tag` NUL-terminated.
 */
enum SfStatus sf_pulse_unitary(const struct SfParams *params,
                               const char *tag,
                               double step_ps,
                               struct SfUnitary4 *out);

/**
 * Full gate of the named design with its printed single-qubit corrections.
 *
 * # Safety
 * Pointers must be valid; `tag` NUL-terminated.
 */
enum SfStatus sf_gate_unitary(const struct SfParams *params,
                              const char *tag,
                              double step_ps,
                              struct SfUnitary4 *out);

/**
 * Reference gate; `theta` is used only for `SF_TARGET_CPHASE`.
 *
 * # Safety
 * `out` must be valid.
 */
enum SfStatus sf_target_gate(enum SfTarget target, double theta, struct SfUnitary4 *out);

/**
 * `(G₁, G₂, G₃)` into `out[0..3]`.
 *
 * # Safety
 * `u` must be valid and `out` point to three doubles.
 */
enum SfStatus sf_local_invariants(const struct SfUnitary4 *u, double *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum SfStatus sf_fidelity(const struct SfUnitary4 *u, const struct SfUnitary4 *target, double *out);

/**
 * Standard sech θ-CPHASE design.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SfStatus sf_design_cphase(const struct SfParams *params,
                               double theta,
                               struct SfCphaseDesign *out);

/**
 * Mean infidelity of the named design under quasistatic noise of strength
 * `sigma_delta_khz` (σ_δ/2π).
 *
 * # Safety
 * Pointers must be valid; `tag` NUL-terminated.
 */
enum SfStatus sf_noise_average(const struct SfParams *params,
                               const char *tag,
                               double sigma_delta_khz,
                               size_t n_samples,
                               uint64_t seed,
                               double step_ps,
                               struct SfNoiseResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINFORGE_H */
