/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef SVEM_H
#define SVEM_H

#include <stddef.h>
#include <stdint.h>

#define SVEM_OK 0

// A required pointer argument was null.
#define SVEM_ERR_NULL -1

// A Rust panic was caught at the boundary.
#define SVEM_ERR_PANIC -2

// A string argument was not valid UTF-8.
#define SVEM_ERR_UTF8 -3

#define SVEM_ERR_INVALID_ARGUMENT 2

#define SVEM_ERR_CONFIG 3

#define SVEM_ERR_IO 4

#define SVEM_ERR_MALFORMED_MESH 10

#define SVEM_ERR_INVALID_CELL 11

#define SVEM_ERR_ORIENTATION 12

#define SVEM_ERR_NON_SIMPLE 13

#define SVEM_ERR_NON_CONFORMING 14

#define SVEM_ERR_CONDITION_VIOLATION 20

#define SVEM_ERR_CONDITIONING 21

#define SVEM_ERR_UNSUPPORTED 22

#define SVEM_ERR_TRIANGULATION 23

#define SVEM_ERR_NOT_POSITIVE_DEFINITE 30

#define SVEM_ERR_LINEAR_SOLVE 31

#define SVEM_ERR_FUNCTION_DOMAIN 40

#define SVEM_ERR_SCALAR_NEWTON 41

#define SVEM_ERR_LOCAL_NEWTON 42

#define SVEM_ERR_COUPLED_ITERATION 43

#define SVEM_ERR_INTERNAL 99

#define SVEM_FAMILY_DISTORTED 0

#define SVEM_FAMILY_VORONOI 1

#define SVEM_FAMILY_NONCONVEX 2

// Manufactured solution `e^{-t} cos(pi x) cos(pi y)` with a rational reaction.
#define SVEM_PROBLEM_ACCURACY 0

// The same manufactured solution with `f = 0`.
#define SVEM_PROBLEM_HEAT 1

// `f = u^3 - u` with `eps = 0.01`.
#define SVEM_PROBLEM_ALLEN_CAHN 2

#define SVEM_SPLITTING_DRD 0

#define SVEM_SPLITTING_RDR 1

// Polygonal mesh of the unit square.
typedef struct SvemMesh SvemMesh;

// Discretization, problem and current state of one time integration.
typedef struct SvemSolver SvemSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *svem_version(void);

// Copies the message of the latest failure on this thread into `buf`,
// truncated and NUL-terminated. Returns the full message length without
// the terminator, so a call with `len == 0` queries the size.
//
// # Safety
// `buf` must be null or point to at least `len` writable bytes.
size_t svem_last_error(char *buf, size_t len);

// Fixture mesh `level` (0 is coarsest) of a generated family.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
int32_t svem_mesh_family(uint32_t family, uint32_t level, uint64_t seed, struct SvemMesh **out);

// Mesh from raw arrays: `vertices` holds `2 * num_vertices` coordinates
// `x0 y0 x1 y1 ...`; cell `c` lists the vertex indices
// `indices[offsets[c] .. offsets[c + 1]]` counter-clockwise.
//
// # Safety
// The arrays must hold `2 * num_vertices`, `num_cells + 1` and
// `offsets[num_cells]` elements respectively; `out` as in
// [`svem_mesh_family`].
int32_t svem_mesh_from_arrays(const double *vertices,
                              size_t num_vertices,
                              const uint32_t *offsets,
                              const uint32_t *indices,
                              size_t num_cells,
                              struct SvemMesh **out);

// Reads a mesh in the plain-text format of the `svem` tool.
//
// # Safety
// `path` must be a NUL-terminated string; `out` as in [`svem_mesh_family`].
int32_t svem_mesh_load(const char *path, struct SvemMesh **out);

// Number of cells, or 0 for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t svem_mesh_num_cells(const struct SvemMesh *mesh);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t svem_mesh_num_vertices(const struct SvemMesh *mesh);

// # Safety
// `mesh` must be null or a handle not freed before.
void svem_mesh_free(struct SvemMesh *mesh);

// Serendipity discretization of degree `k` on a copy of `mesh`, with the
// state set to the interpolated initial data of `problem` at `t = 0`.
//
// # Safety
// `mesh` must be a live handle; `out` as in [`svem_mesh_family`].
int32_t svem_solver_new(const struct SvemMesh *mesh,
                        uint32_t problem_kind,
                        uint32_t k,
                        uint32_t splitting,
                        double tau,
                        struct SvemSolver **out);

// Global DoF count, or 0 for a null handle.
//
// # Safety
// `solver` must be null or a live handle.
size_t svem_solver_num_dofs(const struct SvemSolver *solver);

// Time of the current state, or NaN for a null handle.
//
// # Safety
// `solver` must be null or a live handle.
double svem_solver_time(const struct SvemSolver *solver);

// Takes `steps` splitting steps. The diffusion operator is factorized once
// per call. On failure the state is left at the last completed step.
//
// # Safety
// `solver` must be a live handle.
int32_t svem_solver_advance(struct SvemSolver *solver, uint32_t steps);

// Copies the state coefficients into `buf`, which must hold exactly
// [`svem_solver_num_dofs`] values.
//
// # Safety
// `solver` must be a live handle and `buf` point to `len` writable doubles.
int32_t svem_solver_get_state(const struct SvemSolver *solver, double *buf, size_t len);

// Replaces the state with `len` coefficients at time `time`.
//
// # Safety
// `solver` must be a live handle and `buf` point to `len` readable doubles.
int32_t svem_solver_set_state(struct SvemSolver *solver,
                              const double *buf,
                              size_t len,
                              double time);

// L2 error of `Pi_0 u_h` against the exact solution at the current time.
// Only the accuracy problem has one; other problems give
// `SVEM_ERR_INVALID_ARGUMENT`.
//
// # Safety
// `solver` must be a live handle and `out` point to a writable double.
int32_t svem_solver_l2_error(const struct SvemSolver *solver, double *out);

// # Safety
// `solver` must be null or a handle not freed before.
void svem_solver_free(struct SvemSolver *solver);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SVEM_H */
