//! C interface to the svem solver.
//!
//! Meshes and solvers are opaque handles. Each `*_new`/`*_load` call that
//! succeeds hands ownership to the caller, who releases it with the matching
//! `*_free`. Fallible calls return `SVEM_OK` or a nonzero status; the message
//! of the latest failure on the calling thread is available through
//! [`svem_last_error`].
//!
//! Handles are not synchronized. Distinct handles may be used from distinct
//! threads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DVector;

use svem::assembly::{Discretization, StateVector};
use svem::fixtures::MeshFamily;
use svem::harness::{problem, ProblemKind};
use svem::mesh::{import_mesh, EtaStrategy, Point, PolygonalMesh};
use svem::projectors::SpaceKind;
use svem::timestep::{ProblemSpec, Splitting, SplittingConfig, Stepper};
use svem::Error;

pub const SVEM_OK: i32 = 0;
/// A required pointer argument was null.
pub const SVEM_ERR_NULL: i32 = -1;
/// A Rust panic was caught at the boundary.
pub const SVEM_ERR_PANIC: i32 = -2;
/// A string argument was not valid UTF-8.
pub const SVEM_ERR_UTF8: i32 = -3;
pub const SVEM_ERR_INVALID_ARGUMENT: i32 = 2;
pub const SVEM_ERR_CONFIG: i32 = 3;
pub const SVEM_ERR_IO: i32 = 4;
pub const SVEM_ERR_MALFORMED_MESH: i32 = 10;
pub const SVEM_ERR_INVALID_CELL: i32 = 11;
pub const SVEM_ERR_ORIENTATION: i32 = 12;
pub const SVEM_ERR_NON_SIMPLE: i32 = 13;
pub const SVEM_ERR_NON_CONFORMING: i32 = 14;
pub const SVEM_ERR_CONDITION_VIOLATION: i32 = 20;
pub const SVEM_ERR_CONDITIONING: i32 = 21;
pub const SVEM_ERR_UNSUPPORTED: i32 = 22;
pub const SVEM_ERR_TRIANGULATION: i32 = 23;
pub const SVEM_ERR_NOT_POSITIVE_DEFINITE: i32 = 30;
pub const SVEM_ERR_LINEAR_SOLVE: i32 = 31;
pub const SVEM_ERR_FUNCTION_DOMAIN: i32 = 40;
pub const SVEM_ERR_SCALAR_NEWTON: i32 = 41;
pub const SVEM_ERR_LOCAL_NEWTON: i32 = 42;
pub const SVEM_ERR_COUPLED_ITERATION: i32 = 43;
pub const SVEM_ERR_INTERNAL: i32 = 99;

pub const SVEM_FAMILY_DISTORTED: u32 = 0;
pub const SVEM_FAMILY_VORONOI: u32 = 1;
pub const SVEM_FAMILY_NONCONVEX: u32 = 2;

/// Manufactured solution `e^{-t} cos(pi x) cos(pi y)` with a rational reaction.
pub const SVEM_PROBLEM_ACCURACY: u32 = 0;
/// The same manufactured solution with `f = 0`.
pub const SVEM_PROBLEM_HEAT: u32 = 1;
/// `f = u^3 - u` with `eps = 0.01`.
pub const SVEM_PROBLEM_ALLEN_CAHN: u32 = 2;

pub const SVEM_SPLITTING_DRD: u32 = 0;
pub const SVEM_SPLITTING_RDR: u32 = 1;

/// Polygonal mesh of the unit square.
pub struct SvemMesh {
    mesh: PolygonalMesh,
}

/// Discretization, problem and current state of one time integration.
pub struct SvemSolver {
    disc: Discretization,
    problem: ProblemSpec,
    config: SplittingConfig,
    state: StateVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Utf8,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure::Core(Error::InvalidArgument(message.into()))
}

/// Runs `f`, converting its error or panic into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SVEM_OK,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            SVEM_ERR_NULL
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            SVEM_ERR_UTF8
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            e.code()
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SVEM_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn svem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the message of the latest failure on this thread into `buf`,
/// truncated and NUL-terminated. Returns the full message length without
/// the terminator, so a call with `len == 0` queries the size.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn svem_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Fixture mesh `level` (0 is coarsest) of a generated family.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_family(family: u32, level: u32, seed: u64, out: *mut *mut SvemMesh) -> i32 {
    guard(|| {
        let family = match family {
            SVEM_FAMILY_DISTORTED => MeshFamily::Distorted,
            SVEM_FAMILY_VORONOI => MeshFamily::Voronoi,
            SVEM_FAMILY_NONCONVEX => MeshFamily::Nonconvex,
            other => return Err(invalid(format!("unknown mesh family {other}"))),
        };
        let mesh = family.mesh(level as usize, seed)?;
        put(out, SvemMesh { mesh })
    })
}

/// Mesh from raw arrays: `vertices` holds `2 * num_vertices` coordinates
/// `x0 y0 x1 y1 ...`; cell `c` lists the vertex indices
/// `indices[offsets[c] .. offsets[c + 1]]` counter-clockwise.
///
/// # Safety
/// The arrays must hold `2 * num_vertices`, `num_cells + 1` and
/// `offsets[num_cells]` elements respectively; `out` as in
/// [`svem_mesh_family`].
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_from_arrays(
    vertices: *const f64,
    num_vertices: usize,
    offsets: *const u32,
    indices: *const u32,
    num_cells: usize,
    out: *mut *mut SvemMesh,
) -> i32 {
    guard(|| {
        let xy = slice(vertices, 2 * num_vertices, "vertices")?;
        let offsets = slice(offsets, num_cells + 1, "offsets")?;
        if offsets.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("cell offsets must be non-decreasing"));
        }
        let len = offsets.last().map_or(0, |&n| n as usize);
        let indices = slice(indices, len, "indices")?;
        let points = xy.chunks_exact(2).map(|p| Point::new(p[0], p[1])).collect();
        let cells = offsets
            .windows(2)
            .map(|w| indices[w[0] as usize..w[1] as usize].iter().map(|&i| i as usize).collect())
            .collect();
        let mesh = PolygonalMesh::new(points, cells)?;
        put(out, SvemMesh { mesh })
    })
}

/// Reads a mesh in the plain-text format of the `svem` tool.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as in [`svem_mesh_family`].
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_load(path: *const c_char, out: *mut *mut SvemMesh) -> i32 {
    guard(|| {
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| Failure::Utf8)?;
        let mesh = import_mesh(path)?;
        put(out, SvemMesh { mesh })
    })
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_num_cells(mesh: *const SvemMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.num_cells())
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_num_vertices(mesh: *const SvemMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.num_vertices())
}

/// # Safety
/// `mesh` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn svem_mesh_free(mesh: *mut SvemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Serendipity discretization of degree `k` on a copy of `mesh`, with the
/// state set to the interpolated initial data of `problem` at `t = 0`.
///
/// # Safety
/// `mesh` must be a live handle; `out` as in [`svem_mesh_family`].
#[no_mangle]
pub unsafe extern "C" fn svem_solver_new(
    mesh: *const SvemMesh,
    problem_kind: u32,
    k: u32,
    splitting: u32,
    tau: f64,
    out: *mut *mut SvemSolver,
) -> i32 {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let kind = match problem_kind {
            SVEM_PROBLEM_ACCURACY => ProblemKind::Accuracy,
            SVEM_PROBLEM_HEAT => ProblemKind::Heat,
            SVEM_PROBLEM_ALLEN_CAHN => ProblemKind::AllenCahn,
            other => return Err(invalid(format!("unknown problem {other}"))),
        };
        let variant = match splitting {
            SVEM_SPLITTING_DRD => Splitting::Drd,
            SVEM_SPLITTING_RDR => Splitting::Rdr,
            other => return Err(invalid(format!("unknown splitting {other}"))),
        };
        if !(1..=6).contains(&k) {
            return Err(Failure::Core(Error::Config(format!("degree k = {k} not within 1..=6"))));
        }
        let config = SplittingConfig::new(variant, tau, tau);
        config.validate()?;
        let disc = Discretization::new(mesh.mesh.clone(), k as usize, &EtaStrategy::default(), SpaceKind::Serendipity)?;
        let problem = problem(kind);
        let initial = &problem.initial;
        let state = disc.interpolate_state(|p| initial(p), 0.0);
        put(
            out,
            SvemSolver {
                disc,
                problem,
                config,
                state,
            },
        )
    })
}

/// Global DoF count, or 0 for a null handle.
///
/// # Safety
/// `solver` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_num_dofs(solver: *const SvemSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.disc.len())
}

/// Time of the current state, or NaN for a null handle.
///
/// # Safety
/// `solver` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_time(solver: *const SvemSolver) -> f64 {
    solver.as_ref().map_or(f64::NAN, |s| s.state.time)
}

/// Takes `steps` splitting steps. The diffusion operator is factorized once
/// per call. On failure the state is left at the last completed step.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_advance(solver: *mut SvemSolver, steps: u32) -> i32 {
    guard(|| {
        let s = deref_mut(solver, "solver")?;
        if steps == 0 {
            return Ok(());
        }
        let mut stepper = Stepper::new(&s.disc, &s.problem, s.config)?;
        for _ in 0..steps {
            s.state = stepper.step(&s.state)?;
        }
        Ok(())
    })
}

/// Copies the state coefficients into `buf`, which must hold exactly
/// [`svem_solver_num_dofs`] values.
///
/// # Safety
/// `solver` must be a live handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_get_state(solver: *const SvemSolver, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let s = deref(solver, "solver")?;
        if len != s.disc.len() {
            return Err(invalid(format!("buffer holds {len} values, the state {}", s.disc.len())));
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(s.state.values.as_slice());
        Ok(())
    })
}

/// Replaces the state with `len` coefficients at time `time`.
///
/// # Safety
/// `solver` must be a live handle and `buf` point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_set_state(solver: *mut SvemSolver, buf: *const f64, len: usize, time: f64) -> i32 {
    guard(|| {
        let s = deref_mut(solver, "solver")?;
        if len != s.disc.len() {
            return Err(invalid(format!("buffer holds {len} values, the state {}", s.disc.len())));
        }
        if !time.is_finite() {
            return Err(invalid("time must be finite"));
        }
        let values = slice(buf, len, "buf")?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("state values must be finite"));
        }
        s.state = StateVector::new(DVector::from_column_slice(values), time);
        Ok(())
    })
}

/// L2 error of `Pi_0 u_h` against the exact solution at the current time.
/// Only the accuracy problem has one; other problems give
/// `SVEM_ERR_INVALID_ARGUMENT`.
///
/// # Safety
/// `solver` must be a live handle and `out` point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_l2_error(solver: *const SvemSolver, out: *mut f64) -> i32 {
    guard(|| {
        let s = deref(solver, "solver")?;
        let out = deref_mut(out, "out")?;
        let exact = s.problem.exact.as_ref().ok_or_else(|| invalid("problem has no exact solution"))?;
        let t = s.state.time;
        *out = s.disc.l2_error(&s.state.values, |p| exact(p, t));
        Ok(())
    })
}

/// # Safety
/// `solver` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn svem_solver_free(solver: *mut SvemSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}
