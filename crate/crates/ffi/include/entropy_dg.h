#ifndef ENTROPY_DG_H
#define ENTROPY_DG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the library's error classes.
 */
typedef enum EdgStatus {
  EdgStatus_Ok = 0,
  EdgStatus_Failure = 1,
  EdgStatus_ConfigError = 2,
  EdgStatus_BlowUp = 3,
  EdgStatus_OracleFailure = 4,
  EdgStatus_PlotError = 5,
  EdgStatus_InvalidHandle = 6,
  EdgStatus_Panic = 7,
} EdgStatus;

/**
 * An experiment run owned by the library.
 */
typedef struct EdgRun EdgRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to at least `len` writable bytes, or be NULL (then only
 * the length is returned).
 */
size_t edg_last_error_message(char *buf, size_t len);

/**
 * Library version as a static string.
 */
const char *edg_version(void);

/**
 * Logarithmic mean with the Ismail-Roe series switch at `eps`. Returns NaN
 * (and sets the error message) for nonpositive input.
 */
double edg_log_mean(double a, double b, double eps);

/**
 * Entropy-conservative two-point flux of the 1D Euler equations;
 * `ul`, `ur` are conserved triples, `fs` receives three components.
 *
 * # Safety
 * `ul`, `ur` must point to 3 readable doubles and `fs` to 3 writable ones.
 */
enum EdgStatus edg_euler1d_ec_flux(const double *ul, const double *ur, double eps, double *fs);

/**
 * Maximum relative Tadmor residual over random admissible state pairs for
 * one of the models `"burgers"`, `"euler1d"`, `"euler2d"`.
 *
 * # Safety
 * `model` must be a NUL-terminated string and `out` a writable double.
 */
enum EdgStatus edg_tadmor_check(const char *model, size_t trials, uint64_t seed, double *out);

/**
 * Build the operator set for an element (`element`: `"interval"` or
 * `"triangle"`; `quad`: `"gll"`, `"gauss1"`, `"gauss2"`, `"tri2n"`) and
 * write the worst operator-identity residual to `out`.
 *
 * # Safety
 * `element` and `quad` must be NUL-terminated strings; `out` must be a
 * writable double.
 */
enum EdgStatus edg_ops_check(const char *element, int n, const char *quad, double *out);

/**
 * Create a run handle for `experiment` from config text (may be empty for
 * the experiment's defaults). Returns NULL on config errors.
 *
 * # Safety
 * Both pointers must be NUL-terminated strings; `config` may be NULL.
 */
struct EdgRun *edg_run_new(const char *experiment, const char *config);

/**
 * Execute a run; artifacts are written under the configured output
 * directory.
 *
 * # Safety
 * `run` must be a handle from [`edg_run_new`] that has not been freed.
 */
enum EdgStatus edg_run_execute(struct EdgRun *run);

/**
 * Free a run handle. NULL is accepted.
 *
 * # Safety
 * `run` must be NULL or a handle from [`edg_run_new`], freed exactly once.
 */
void edg_run_free(struct EdgRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROPY_DG_H */
