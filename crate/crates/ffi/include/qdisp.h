#ifndef QDISP_H
#define QDISP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values 1 to 4 match the CLI exit codes.
 */
typedef enum {
  QDISP_STATUS_OK = 0,
  QDISP_STATUS_INTERNAL_INCONSISTENCY = 1,
  QDISP_STATUS_INVALID_INPUT = 2,
  QDISP_STATUS_UNPHYSICAL_INPUT = 3,
  QDISP_STATUS_TRUNCATION = 4,
  QDISP_STATUS_NULL_POINTER = 5,
  QDISP_STATUS_PANIC = 6,
} QdispStatus;

/**
 * Opaque estimation report.
 */
typedef struct QdispReport QdispReport;

/**
 * Opaque probe state.
 */
typedef struct QdispState QdispState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fock state `|n⟩` on `dim` levels.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_fock(size_t n, size_t dim, QdispState **out);

/**
 * Coherent state with amplitude `re + i·im`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_coherent(double re, double im, size_t dim, QdispState **out);

/**
 * Squeezed vacuum; positive `r` squeezes `x`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_squeezed_vacuum(double r, size_t dim, QdispState **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_thermal(double nbar, size_t dim, QdispState **out);

/**
 * Diagonal state with Fock populations `probs[0..len]`.
 *
 * # Safety
 * `probs` must point to `len` doubles; `out` must be writable.
 */
QdispStatus qdisp_state_fock_diagonal(const double *probs,
                                      size_t len,
                                      size_t dim,
                                      QdispState **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_photon_added_thermal(double lambda, size_t dim, QdispState **out);

/**
 * Balanced mixture of the vacua squeezed by `r` and `-r`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
QdispStatus qdisp_state_squeezed_mixture(double r, size_t dim, QdispState **out);

/**
 * Pure state whose covariance matrix is `sigma`. `n_fock = 0` picks the
 * default seed level.
 *
 * # Safety
 * `sigma` must point to four doubles; `out` must be writable.
 */
QdispStatus qdisp_state_purify(const double *sigma, size_t dim, size_t n_fock, QdispState **out);

/**
 * # Safety
 * `state` must come from a `qdisp_state_*` constructor and not be freed
 * twice. Null is ignored.
 */
void qdisp_state_free(QdispState *state);

/**
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
QdispStatus qdisp_state_dim(const QdispState *state, size_t *out);

/**
 * Covariance matrix of the state, after the truncation gate.
 *
 * # Safety
 * `state` must be a live handle; `out` must point to four doubles.
 */
QdispStatus qdisp_state_covariance(const QdispState *state, double *out);

/**
 * Runs the full estimation analysis for joint `x`/`p` displacements.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
QdispStatus qdisp_analyze(const QdispState *state, bool strict, QdispReport **out);

/**
 * # Safety
 * `report` must come from [`qdisp_analyze`] and not be freed twice. Null is
 * ignored.
 */
void qdisp_report_free(QdispReport *report);

/**
 * # Safety
 * `report` must be a live handle; `out` must point to four doubles.
 */
QdispStatus qdisp_report_qfi(const QdispReport *report, double *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must point to four doubles.
 */
QdispStatus qdisp_report_uhlmann(const QdispReport *report, double *out);

/**
 * Incompatibility parameter `R ∈ [0, 1]`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
QdispStatus qdisp_report_r(const QdispReport *report, double *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
QdispStatus qdisp_report_det_q(const QdispReport *report, double *out);

/**
 * Serializes the report as JSON. Release the string with
 * [`qdisp_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
QdispStatus qdisp_report_to_json(const QdispReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void qdisp_string_free(char *s);

/**
 * Closed-form QFI diagonal entry for a Fock-diagonal state.
 *
 * # Safety
 * `probs` must point to `len` doubles; `out` must be writable.
 */
QdispStatus qdisp_qfi_fock_diagonal(const double *probs, size_t len, double *out);

/**
 * `R` from a QFI matrix and an Uhlmann curvature matrix.
 *
 * # Safety
 * `q` and `d` must point to four doubles; `out` must be writable.
 */
QdispStatus qdisp_r_parameter(const double *q, const double *d, double *out);

/**
 * Message of the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *qdisp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qdisp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDISP_H */
