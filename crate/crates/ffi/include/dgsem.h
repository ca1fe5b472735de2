#ifndef DGSEM_H
#define DGSEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DgsemNodeKind {
  DGSEM_NODE_KIND_GAUSS = 0,
  DGSEM_NODE_KIND_GAUSS_LOBATTO = 1,
} DgsemNodeKind;

typedef enum DgsemRiemannSolver {
  DGSEM_RIEMANN_SOLVER_CENTRAL = 0,
  DGSEM_RIEMANN_SOLVER_LAX_FRIEDRICHS = 1,
  DGSEM_RIEMANN_SOLVER_RUSANOV = 2,
  DGSEM_RIEMANN_SOLVER_ROE = 3,
} DgsemRiemannSolver;

typedef enum DgsemStatus {
  DGSEM_STATUS_OK = 0,
  DGSEM_STATUS_NULL_POINTER = 1,
  DGSEM_STATUS_INVALID_UTF8 = 2,
  DGSEM_STATUS_CONFIGURATION = 3,
  DGSEM_STATUS_PARAMETER = 4,
  DGSEM_STATUS_ADMISSIBILITY = 5,
  DGSEM_STATUS_NUMERICAL = 6,
  DGSEM_STATUS_IO = 7,
  DGSEM_STATUS_BUFFER_TOO_SMALL = 8,
  DGSEM_STATUS_PANIC = 9,
} DgsemStatus;

/**
 * Opaque solver handle.
 */
typedef struct DgsemSolver DgsemSolver;

/**
 * Scalar monitor values; probes are read with `dgsem_solver_probe`.
 */
typedef struct DgsemMonitors {
  uint64_t step;
  double time;
  double kinetic_energy;
  double entropy;
  double entropy_rate;
  double max_residual;
  double min_density;
  double min_pressure;
} DgsemMonitors;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t dgsem_last_error_message(char *buf, size_t len);

/**
 * Parse control-file text and set up the case. `threads = 0` uses the
 * default worker count.
 *
 * # Safety
 * `control` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DgsemStatus dgsem_solver_new(const char *control, size_t threads, struct DgsemSolver **out);

/**
 * Release a handle from `dgsem_solver_new`. Null is ignored.
 *
 * # Safety
 * `solver` must be null or a live handle, not used afterwards.
 */
void dgsem_solver_free(struct DgsemSolver *solver);

/**
 * Advance one step. `dt <= 0` uses the configured step (fixed or CFL).
 * On failure the state is left at its value before the step.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum DgsemStatus dgsem_solver_step(struct DgsemSolver *solver, double dt);

/**
 * Step until the configured final time or iteration limit; `steps_taken`
 * (optional) receives the number of steps taken by this call.
 *
 * # Safety
 * `solver` must be a live handle; `steps_taken` null or valid.
 */
enum DgsemStatus dgsem_solver_run(struct DgsemSolver *solver, uint64_t *steps_taken);

/**
 * Current simulation time.
 *
 * # Safety
 * `solver` must be a live handle and `time` valid.
 */
enum DgsemStatus dgsem_solver_time(const struct DgsemSolver *solver, double *time);

/**
 * Total number of solution nodes over all elements.
 *
 * # Safety
 * `solver` must be a live handle and `dofs` valid.
 */
enum DgsemStatus dgsem_solver_dofs(const struct DgsemSolver *solver, uint64_t *dofs);

/**
 * Evaluate the monitor quantities for the current state.
 *
 * # Safety
 * `solver` must be a live handle and `out` valid.
 */
enum DgsemStatus dgsem_solver_monitors(const struct DgsemSolver *solver, struct DgsemMonitors *out);

/**
 * Conservative state (ρ, ρu, ρv, ρw, ρE) at a point in undeformed box
 * coordinates.
 *
 * # Safety
 * `solver` must be a live handle, `point` valid for 3 reads and `state`
 * for 5 writes.
 */
enum DgsemStatus dgsem_solver_probe(const struct DgsemSolver *solver,
                                    const double *point,
                                    double *state);

/**
 * Quadrature nodes and weights on [-1, 1] for polynomial `order`; both
 * buffers need `order + 1` entries.
 *
 * # Safety
 * `nodes` and `weights` must be valid for `len` writes.
 */
enum DgsemStatus dgsem_quadrature(size_t order,
                                  enum DgsemNodeKind kind,
                                  double *nodes,
                                  double *weights,
                                  size_t len);

/**
 * Interface flux between conservative states `left` and `right` along the
 * unit normal, for an inviscid gas with ratio of specific heats `gamma`.
 *
 * # Safety
 * `left`, `right` valid for 5 reads, `normal` for 3, `flux` for 5 writes.
 */
enum DgsemStatus dgsem_riemann_flux(enum DgsemRiemannSolver solver,
                                    double gamma,
                                    const double *left,
                                    const double *right,
                                    const double *normal,
                                    double *flux);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGSEM_H */
