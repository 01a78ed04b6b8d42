#ifndef FRAC_YAMABE_H
#define FRAC_YAMABE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FyStatus {
  FY_STATUS_OK = 0,
  FY_STATUS_NULL_POINTER = 1,
  FY_STATUS_DOMAIN = 2,
  FY_STATUS_PARAMETER = 3,
  FY_STATUS_DIMENSION = 4,
  FY_STATUS_NON_CONVERGENCE = 5,
  FY_STATUS_NUMERIC = 6,
  FY_STATUS_IO = 7,
  FY_STATUS_FORMAT = 8,
  FY_STATUS_BUFFER_TOO_SMALL = 9,
  FY_STATUS_INVALID_UTF8 = 10,
  FY_STATUS_PANIC = 11,
} FyStatus;

typedef enum FyTrichotomy {
  FY_TRICHOTOMY_POSITIVE = 1,
  FY_TRICHOTOMY_ZERO = 0,
  FY_TRICHOTOMY_NEGATIVE = -1,
} FyTrichotomy;

// Opaque nodal field on a half-strip.
typedef struct FyGridField FyGridField;

// Opaque `(n, γ)` pair.
typedef struct FyParams FyParams;

// Opaque periodic half-strip grid.
typedef struct FyStrip FyStrip;

// Opaque zonal field on `Sⁿ`, stored by its harmonic coefficients.
typedef struct FyZonalField FyZonalField;

typedef struct FyConstants {
  uint32_t n;
  double gamma;
  double d_gamma;
  double dstar_paper;
  double c_ext;
  double s_sobolev;
  double s_bar;
  double lambda_sphere;
  double c1_bessel;
  double c_poisson;
  // Zero at `γ = 1`, where `c_bubble` is undefined.
  bool has_c_bubble;
  double c_bubble;
  bool has_theta_hat;
  double theta_hat;
} FyConstants;

typedef struct FySolverOptions {
  double tol;
  size_t max_iter;
  double damping;
  bool normalize_volume;
} FySolverOptions;

typedef struct FySolverReport {
  size_t iterations;
  double final_residual;
  double c_beta;
  double min_value;
  bool positivity_flag;
  bool converged_flag;
  bool monotone_after_damping;
  double final_damping;
} FySolverReport;

typedef struct FyEigenReport {
  double lambda1;
  double min_value;
  size_t iterations;
  double residual;
} FyEigenReport;

typedef struct FySolveStats {
  size_t iterations;
  double relative_residual;
} FySolveStats;

typedef struct FyHopfReport {
  double value;
  size_t zero_index;
  double zero_x;
  double solver_residual;
  double min_interior;
  bool max_principle;
  bool passed;
} FyHopfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fy_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// NUL-terminated) and returns the full length including the terminator.
// Returns 0 when the last call succeeded.
//
// # Safety
// `buf` must be NULL or valid for `cap` bytes.
size_t fy_last_error_message(char *buf, size_t cap);

// # Safety
// `out` must be a valid pointer to writable storage.
enum FyStatus fy_params_new(uint32_t n, double gamma, struct FyParams **out_params);

// # Safety
// `p` must be NULL or a handle from `fy_params_new` not yet freed.
void fy_params_free(struct FyParams *p);

// Critical exponent `2n/(n−2γ)`.
//
// # Safety
// Pointers must be valid.
enum FyStatus fy_params_two_star(const struct FyParams *p, double *value);

// # Safety
// Pointers must be valid.
enum FyStatus fy_constants(const struct FyParams *p, struct FyConstants *result);

// Multipliers of `P_γ` on degrees `0..=kmax` of the round sphere.
//
// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_sphere_multipliers(const struct FyParams *p,
                                    size_t kmax,
                                    double *buf,
                                    size_t cap,
                                    size_t *len);

// # Safety
// `coeffs` must be valid for `len` reads; `out_field` must be writable.
enum FyStatus fy_zonal_new(uint32_t n,
                           const double *coeffs,
                           size_t len,
                           struct FyZonalField **out_field);

// The constant field `c` with band limit `k`.
//
// # Safety
// `out_field` must be writable.
enum FyStatus fy_zonal_constant(uint32_t n, size_t k, double c, struct FyZonalField **out_field);

// # Safety
// `f` must be NULL or a live zonal handle.
void fy_zonal_free(struct FyZonalField *f);

// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_zonal_coeffs(const struct FyZonalField *f, double *buf, size_t cap, size_t *len);

// Value at the point with polar cosine `x ∈ [−1, 1]`.
//
// # Safety
// Pointers must be valid.
enum FyStatus fy_zonal_eval(const struct FyZonalField *f, double x, double *value);

// Fractional Yamabe quotient of `w` on the round sphere.
//
// # Safety
// Pointers must be valid.
enum FyStatus fy_sphere_yamabe_functional(const struct FyZonalField *f,
                                          const struct FyParams *p,
                                          double *value);

// Default options of the subcritical solver.
struct FySolverOptions fy_solver_options_default(void);

// Damped fixed-point solve of `P_γ w = c_β w^{β−1}`. Running out of
// iterations is not an error: check `report->converged_flag`.
//
// # Safety
// Pointers must be valid; `out_field` may be NULL to discard the solution.
enum FyStatus fy_sphere_subcritical_solve(const struct FyParams *p,
                                          double beta,
                                          const struct FyZonalField *init,
                                          struct FySolverOptions opts,
                                          struct FyZonalField **out_field,
                                          struct FySolverReport *report);

// First eigenpair of the conformal operator of the metric `w^{4/(n−2γ)}` times round.
//
// # Safety
// Pointers must be valid; `out_field` may be NULL.
enum FyStatus fy_sphere_first_eigenvalue(const struct FyZonalField *w,
                                         const struct FyParams *p,
                                         double tol,
                                         struct FyZonalField **out_field,
                                         struct FyEigenReport *report);

// # Safety
// Pointers must be valid.
enum FyStatus fy_sphere_trichotomy(const struct FyZonalField *w,
                                   const struct FyParams *p,
                                   enum FyTrichotomy *class_);

// Strip `[0, period) × [0, height]` with `nx × ny` unknowns and weight
// exponent `a = 1 − 2γ` taken from `p`.
//
// # Safety
// Pointers must be valid.
enum FyStatus fy_strip_new(const struct FyParams *p,
                           double period,
                           double height,
                           size_t nx,
                           size_t ny,
                           struct FyStrip **out_strip);

// # Safety
// `s` must be NULL or a live strip handle.
void fy_strip_free(struct FyStrip *s);

// Abscissae of the `nx` columns.
//
// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_strip_x(const struct FyStrip *s, double *buf, size_t cap, size_t *len);

// Heights of all `ny + 2` rows, boundary and cap included.
//
// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_strip_y(const struct FyStrip *s, double *buf, size_t cap, size_t *len);

// Solves `div(y^a ∇U) = 0` with `U = trace` at `y = 0` and `U = cap` at the
// top. Both arrays hold `nx` values; `cap` may be NULL for a zero cap.
//
// # Safety
// `trace` (and `cap` if non-null) must be valid for `nx` reads.
enum FyStatus fy_halfspace_solve(const struct FyStrip *s,
                                 const double *trace,
                                 const double *cap,
                                 size_t len,
                                 double tol,
                                 struct FyGridField **out_field,
                                 struct FySolveStats *stats);

// # Safety
// `f` must be NULL or a live grid handle.
void fy_grid_free(struct FyGridField *f);

// Grid shape: columns and total rows (`ny + 2`).
//
// # Safety
// Pointers must be valid.
enum FyStatus fy_grid_shape(const struct FyGridField *f, size_t *nx, size_t *rows);

// Nodal values, row-major with `y` outer.
//
// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_grid_values(const struct FyGridField *f, double *buf, size_t cap, size_t *len);

// Fractional Laplacian of the trace recovered from the weighted normal derivative.
//
// # Safety
// See the crate-level buffer convention.
enum FyStatus fy_grid_neumann_trace(const struct FyGridField *f,
                                    const struct FyParams *p,
                                    double *buf,
                                    size_t cap,
                                    size_t *len);

// # Safety
// Pointers must be valid.
enum FyStatus fy_grid_max_principle(const struct FyGridField *f, bool *holds);

// Writes the field; a `.bin` extension selects the binary format, anything else CSV.
//
// # Safety
// `path` must be a NUL-terminated string.
enum FyStatus fy_grid_save(const struct FyGridField *f, const char *path);

// # Safety
// `path` must be a NUL-terminated string; `out_field` must be writable.
enum FyStatus fy_grid_load(const char *path, struct FyGridField **out_field);

// Hopf-type check for a nonnegative trace of `nx` values vanishing somewhere.
//
// # Safety
// `trace` must be valid for `len` reads.
enum FyStatus fy_hopf_check(const struct FyStrip *s,
                            const struct FyParams *p,
                            const double *trace,
                            size_t len,
                            double tol,
                            struct FyHopfReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAC_YAMABE_H */
