#ifndef BLOWUP_LAB_H
#define BLOWUP_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define BL_TRACE_T 0

#define BL_TRACE_G 1

#define BL_TRACE_LP 2

#define BL_TRACE_SUP_U 3

#define BL_TRACE_SUPPORT_R 4

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_INPUT = 2,
  /**
   * Non-convergence, missing multipliers, quadrature or support failures.
   */
  BL_STATUS_NUMERICAL_FAILURE = 3,
  BL_STATUS_HYPOTHESIS_VIOLATION = 4,
  /**
   * The requested value does not exist for this result, e.g. T_est without blow-up.
   */
  BL_STATUS_NOT_AVAILABLE = 5,
  BL_STATUS_BUFFER_TOO_SMALL = 6,
  BL_STATUS_PANIC = 7,
} BlStatus;

typedef struct BlKernel BlKernel;

typedef struct BlMultipliers BlMultipliers;

typedef struct BlSolveReport BlSolveReport;

/**
 * Damping mu/(1+t)^beta and mass mu2/(1+t)^alpha_m.
 */
typedef struct BlProfile {
  double mu;
  double beta;
  double mu2;
  double alpha_m;
} BlProfile;

/**
 * Radial solver inputs. Fill with [`bl_solver_params_default`] and adjust.
 */
typedef struct BlSolverParams {
  uint32_t n;
  double p;
  struct BlProfile profile;
  /**
   * Bump radius, smoothness exponent and amplitudes of u(0) and u_t(0).
   */
  double r0;
  uint32_t m;
  double f_amp;
  double g_amp;
  double eps;
  double h;
  double cfl;
  double horizon;
  double m_blow;
  uint32_t levels;
  bool theorem_mode;
  bool nonlinear;
} BlSolverParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. Valid until the next call.
 */
const char *bl_last_error_message(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_strauss_exponent(uint32_t n, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_fujita_exponent(uint32_t n, double *out);

/**
 * gamma(p, n) = 2 + (n+1)p - (n-1)p^2.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_gamma(uint32_t n, double p, double *out);

/**
 * Writes -1 (sub-critical), 0 (critical) or 1 (super-critical).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_classify(uint32_t n, double p, int32_t *out);

/**
 * Lifespan bound C4 eps^{-2p(p-1)/gamma} of the sub-critical iteration.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_subcrit_threshold(double p,
                                   uint32_t n,
                                   double c_r1r2,
                                   double c2,
                                   double eps,
                                   double *out);

/**
 * Multipliers r1, r2 on [t0, horizon] with grid `step`.
 *
 * # Safety
 * `out` must be valid for writes; the handle is released with [`bl_multipliers_free`].
 */
enum BlStatus bl_multipliers_compute(struct BlProfile profile,
                                     double t0,
                                     double horizon,
                                     double step,
                                     struct BlMultipliers **out);

/**
 * # Safety
 * `h` must come from [`bl_multipliers_compute`]; `out` must be valid for writes.
 */
enum BlStatus bl_multipliers_len(const struct BlMultipliers *h, size_t *out);

/**
 * L1 norms of r1 and r2 on [t0, inf), and C_{r1,r2}.
 *
 * # Safety
 * `h` must come from [`bl_multipliers_compute`]; the out-pointers must be valid for writes.
 */
enum BlStatus bl_multipliers_norms(const struct BlMultipliers *h,
                                   double *l1_r1,
                                   double *l1_r2,
                                   double *c_r1r2);

/**
 * Copies t, r1 and r2; each buffer needs `len` entries, see [`bl_multipliers_len`].
 *
 * # Safety
 * `h` must come from [`bl_multipliers_compute`]; each non-null buffer must hold `len` doubles.
 */
enum BlStatus bl_multipliers_copy(const struct BlMultipliers *h,
                                  double *t,
                                  double *r1,
                                  double *r2,
                                  size_t len);

/**
 * # Safety
 * `h` must come from [`bl_multipliers_compute`] and not be used afterwards. NULL is ignored.
 */
void bl_multipliers_free(struct BlMultipliers *h);

/**
 * xi_q / eta_q evaluator for radii up to `r_max`.
 *
 * # Safety
 * `out` must be valid for writes; the handle is released with [`bl_kernel_free`].
 */
enum BlStatus bl_kernel_new(uint32_t n,
                            double q,
                            double lambda0,
                            double radius,
                            double r_max,
                            struct BlKernel **out);

/**
 * # Safety
 * `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
 */
enum BlStatus bl_kernel_xi(const struct BlKernel *h, double r, double t, double *out);

/**
 * # Safety
 * `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
 */
enum BlStatus bl_kernel_eta(const struct BlKernel *h, double r, double t, double s, double *out);

/**
 * phi_lambda(r) with the kernel's angular rules; lambda * r must stay within the prepared range.
 *
 * # Safety
 * `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
 */
enum BlStatus bl_kernel_phi(const struct BlKernel *h, double lambda, double r, double *out);

/**
 * # Safety
 * `h` must come from [`bl_kernel_new`] and not be used afterwards. NULL is ignored.
 */
void bl_kernel_free(struct BlKernel *h);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_solver_params_default(struct BlSolverParams *out);

/**
 * # Safety
 * `params` must point to a valid struct; `out` must be valid for writes. The handle is
 * released with [`bl_report_free`].
 */
enum BlStatus bl_solve(const struct BlSolverParams *params, struct BlSolveReport **out);

/**
 * # Safety
 * `h` must come from [`bl_solve`]; `out` must be valid for writes.
 */
enum BlStatus bl_report_blow_up(const struct BlSolveReport *h, bool *out);

/**
 * Extrapolated blow-up time; `NotAvailable` when the run stayed bounded.
 *
 * # Safety
 * `h` must come from [`bl_solve`]; `out` must be valid for writes.
 */
enum BlStatus bl_report_t_est(const struct BlSolveReport *h, double *out);

/**
 * # Safety
 * `h` must come from [`bl_solve`]; `out` must be valid for writes.
 */
enum BlStatus bl_report_trace_len(const struct BlSolveReport *h, size_t *out);

/**
 * Copies one trace column (`BL_TRACE_*`) into `buf`.
 *
 * # Safety
 * `h` must come from [`bl_solve`]; `buf` must hold `len` doubles.
 */
enum BlStatus bl_report_trace(const struct BlSolveReport *h,
                              uint32_t column,
                              double *buf,
                              size_t len);

/**
 * # Safety
 * `h` must come from [`bl_solve`] and not be used afterwards. NULL is ignored.
 */
void bl_report_free(struct BlSolveReport *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOWUP_LAB_H */
