#ifndef LAX_DENSITY_H
#define LAX_DENSITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum LdStatus {
  LD_STATUS_OK = 0,
  LD_STATUS_NULL_POINTER = 1,
  LD_STATUS_DOMAIN = 2,
  LD_STATUS_POLE = 3,
  LD_STATUS_CONVERGENCE = 4,
  LD_STATUS_STRUCTURE = 5,
  LD_STATUS_NOT_POSITIVE_DEFINITE = 6,
  LD_STATUS_ON_CUT = 7,
  LD_STATUS_BUFFER_TOO_SMALL = 8,
  LD_STATUS_PANIC = 9,
} LdStatus;

typedef enum LdBoundary {
  LD_BOUNDARY_OPEN = 0,
  LD_BOUNDARY_PERIODIC = 1,
} LdBoundary;

/**
 * A solved integral equation.
 */
typedef struct LdBethe LdBethe;

/**
 * Nome, modulus and complete elliptic integrals for one lattice constant.
 */
typedef struct LdParams LdParams;

typedef struct LdModulus {
  double a;
  double q;
  double k;
  double kprime;
  double big_k;
  double big_kprime;
  double big_e;
  double big_eprime;
} LdModulus;

typedef struct LdBetheInfo {
  double big_a;
  double a;
  size_t nodes;
  double min_pivot;
} LdBetheInfo;

typedef struct LdReport {
  double a;
  double big_a;
  double omega0;
  double sup_sigma_diff;
  double sup_rho_diff;
  double cut_equation_residual;
  double derivative_representation_residual;
  double inverse_map_residual;
  double ks_distance_finite_n;
  bool pass;
} LdReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ld_last_error_message(void);

/**
 * Builds the parameter set for lattice constant `a`. `series_epsilon <= 0`
 * selects the default truncation.
 */
enum LdStatus ld_params_new(double a, double series_epsilon, struct LdParams **out);

void ld_params_free(struct LdParams *params);

enum LdStatus ld_params_get(const struct LdParams *params, struct LdModulus *out);

/**
 * ω(φ) at complex φ = `phi_re + i·phi_im`.
 */
enum LdStatus ld_omega(const struct LdParams *params,
                       double phi_re,
                       double phi_im,
                       double *out_re,
                       double *out_im);

/**
 * dω/dφ at complex φ.
 */
enum LdStatus ld_domega(const struct LdParams *params,
                        double phi_re,
                        double phi_im,
                        double *out_re,
                        double *out_im);

enum LdStatus ld_band_edge(const struct LdParams *params, double *phi_min, double *omega0);

enum LdStatus ld_sigma_exact(const struct LdParams *params, double omega, double *out);

/**
 * Solves the integral equation on `nodes` Chebyshev nodes for lattice
 * constant `a`.
 */
enum LdStatus ld_bethe_solve(double a, size_t nodes, struct LdBethe **out);

void ld_bethe_free(struct LdBethe *bethe);

enum LdStatus ld_bethe_info(const struct LdBethe *bethe, struct LdBetheInfo *out);

/**
 * Copies nodes and density values; both buffers need `info.nodes` slots.
 */
enum LdStatus ld_bethe_density(const struct LdBethe *bethe,
                               double *x,
                               double *rho,
                               size_t capacity);

enum LdStatus ld_bethe_sigma(const struct LdBethe *bethe, double omega, double *out);

/**
 * Ascending eigenvalues of the `n × n` Lax matrix into `out[0..n]`.
 */
enum LdStatus ld_lax_eigenvalues(size_t n,
                                 double a,
                                 double lambda,
                                 enum LdBoundary boundary,
                                 double *out,
                                 size_t capacity);

/**
 * Runs the full comparison with default tolerances. `report` and `json`
 * may each be null; a non-null `json` receives a string to release with
 * `ld_string_free`.
 */
enum LdStatus ld_verify(double a,
                        size_t nodes,
                        size_t matrix_n,
                        struct LdReport *report,
                        char **json);

void ld_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAX_DENSITY_H */
