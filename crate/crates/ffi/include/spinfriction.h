/*
 * Copyright 2026 The spinfriction Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Generated by cbindgen from crates/ffi. Do not edit.
 */

#ifndef SPINFRICTION_H
#define SPINFRICTION_H

#include <stddef.h>
#include <stdint.h>

#define SF_PULSE_SINUSOIDAL 0

#define SF_PULSE_POWER_LAW 1

#define SF_LEG_FORWARD 0

#define SF_LEG_BACKWARD 1

#define SF_STATE_INITIAL 0

#define SF_STATE_MIDWAY 1

#define SF_STATE_FINAL 2

// Number of doubles in a flattened 2x2 complex matrix.
#define SF_MATRIX_LEN 8

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_INVALID_ARGUMENT = 1,
  SF_STATUS_NULL_POINTER = 2,
  SF_STATUS_DIVERGENT = 3,
  SF_STATUS_INTEGRITY = 4,
  SF_STATUS_CONVERGENCE = 5,
  SF_STATUS_BUFFER_TOO_SMALL = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

// Opaque handle to a completed protocol run.
typedef struct SfProtocolResult SfProtocolResult;

// Protocol parameters. `pulse_exponent` is read only for
// `SF_PULSE_POWER_LAW`.
typedef struct SfConfig {
  double b0;
  double b1;
  double b2;
  double beta;
  double tau;
  uint32_t pulse_kind;
  double pulse_exponent;
  size_t steps_per_leg;
  size_t sample_stride;
} SfConfig;

typedef struct SfReport {
  double relative_entropy;
  double friction_work;
  double heat_to_bath;
  double energy_initial;
  double energy_final;
  double integrator_error;
} SfReport;

// One stored trajectory point as a Bloch vector.
typedef struct SfBlochSample {
  double t;
  double rx;
  double ry;
  double rz;
  double field;
} SfBlochSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// successful one. The pointer stays valid until the next `sf_*` call on
// the same thread.
const char *sf_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sf_version(void);

// # Safety
// `out` must be valid for writes of one `SfConfig`.
enum SfStatus sf_config_default(struct SfConfig *out);

// Runs the forward-backward protocol and stores a new handle in `*out`.
// `*out` is set to NULL on failure.
//
// # Safety
// `config` must point to a valid `SfConfig` and `out` must be writable.
enum SfStatus sf_run_protocol(const struct SfConfig *config, struct SfProtocolResult **out);

// Releases a handle from [`sf_run_protocol`]. NULL is ignored.
//
// # Safety
// `result` must be NULL or a live handle that is not used afterwards.
void sf_result_free(struct SfProtocolResult *result);

// # Safety
// `result` must be a live handle and `out` writable.
enum SfStatus sf_result_report(const struct SfProtocolResult *result, struct SfReport *out);

// Copies one of the three protocol states (`SF_STATE_*`) into
// `out[0..SF_MATRIX_LEN]`.
//
// # Safety
// `result` must be a live handle and `out` valid for `SF_MATRIX_LEN` writes.
enum SfStatus sf_result_state(const struct SfProtocolResult *result, uint32_t which, double *out);

// Number of stored samples on a leg (`SF_LEG_*`).
//
// # Safety
// `result` must be a live handle and `out_len` writable.
enum SfStatus sf_result_trajectory_len(const struct SfProtocolResult *result,
                                       uint32_t which_leg,
                                       size_t *out_len);

// Copies a leg's samples into `buf`. Times are measured from the start of
// the leg. Fails with `BufferTooSmall` (writing nothing) when `capacity` is
// below the trajectory length.
//
// # Safety
// `result` must be a live handle, `buf` valid for `capacity` writes.
enum SfStatus sf_result_trajectory(const struct SfProtocolResult *result,
                                   uint32_t which_leg,
                                   struct SfBlochSample *buf,
                                   size_t capacity);

// Relative entropy and friction work for each `taus[i]`, with every other
// parameter taken from `config`. Either output may be NULL.
//
// # Safety
// `taus` must be valid for `len` reads; non-null outputs for `len` writes.
enum SfStatus sf_sweep_tau(const struct SfConfig *config,
                           const double *taus,
                           size_t len,
                           double *out_relative_entropy,
                           double *out_friction_work);

// Report for a single protocol run without keeping trajectories.
//
// # Safety
// `config` must point to a valid `SfConfig` and `out` be writable.
enum SfStatus sf_evaluate(const struct SfConfig *config, struct SfReport *out);

// `S(rho || sigma)` in nats for two flattened density matrices.
//
// # Safety
// `rho` and `sigma` must be valid for `SF_MATRIX_LEN` reads, `out` writable.
enum SfStatus sf_relative_entropy(const double *rho, const double *sigma, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINFRICTION_H */
