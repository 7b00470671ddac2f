use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use svem::Error;
use svem_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe { svem_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn family_mesh(family: u32, level: u32) -> *mut SvemMesh {
    let mut mesh = ptr::null_mut();
    assert_eq!(unsafe { svem_mesh_family(family, level, 42, &mut mesh) }, SVEM_OK, "{}", last_error());
    mesh
}

fn solver(mesh: *const SvemMesh, problem: u32, k: u32, splitting: u32, tau: f64) -> *mut SvemSolver {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { svem_solver_new(mesh, problem, k, splitting, tau, &mut s) },
        SVEM_OK,
        "{}",
        last_error()
    );
    s
}

fn state(s: *const SvemSolver) -> Vec<f64> {
    let n = unsafe { svem_solver_num_dofs(s) };
    let mut u = vec![0.0; n];
    assert_eq!(unsafe { svem_solver_get_state(s, u.as_mut_ptr(), n) }, SVEM_OK);
    u
}

#[test]
fn mesh_lifecycle() {
    let m = family_mesh(SVEM_FAMILY_DISTORTED, 0);
    assert!(unsafe { svem_mesh_num_cells(m) } > 0);
    assert!(unsafe { svem_mesh_num_vertices(m) } > unsafe { svem_mesh_num_cells(m) });
    unsafe { svem_mesh_free(m) };
    // null handles are inert
    unsafe { svem_mesh_free(ptr::null_mut()) };
    unsafe { svem_solver_free(ptr::null_mut()) };
    assert_eq!(unsafe { svem_mesh_num_cells(ptr::null()) }, 0);
    assert!(unsafe { svem_solver_time(ptr::null()) }.is_nan());
}

#[test]
fn mesh_from_arrays() {
    // unit square split into two quads
    let v = [0.0, 0.0, 0.5, 0.0, 1.0, 0.0, 0.0, 1.0, 0.5, 1.0, 1.0, 1.0];
    let offsets = [0u32, 4, 8];
    let ccw = [0u32, 1, 4, 3, 1, 2, 5, 4];
    let mut m = ptr::null_mut();
    let status = unsafe { svem_mesh_from_arrays(v.as_ptr(), 6, offsets.as_ptr(), ccw.as_ptr(), 2, &mut m) };
    assert_eq!(status, SVEM_OK, "{}", last_error());
    assert_eq!(unsafe { svem_mesh_num_cells(m) }, 2);
    unsafe { svem_mesh_free(m) };

    let cw = [0u32, 3, 4, 1, 1, 2, 5, 4];
    let mut m = ptr::null_mut();
    let status = unsafe { svem_mesh_from_arrays(v.as_ptr(), 6, offsets.as_ptr(), cw.as_ptr(), 2, &mut m) };
    assert_eq!(status, SVEM_ERR_ORIENTATION);
    assert!(m.is_null());
    assert!(last_error().contains("clockwise"), "{}", last_error());

    let bad_offsets = [0u32, 5, 4];
    let status = unsafe { svem_mesh_from_arrays(v.as_ptr(), 6, bad_offsets.as_ptr(), ccw.as_ptr(), 2, &mut m) };
    assert_eq!(status, SVEM_ERR_INVALID_ARGUMENT);
}

#[test]
fn mesh_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.mesh");
    let mesh = svem::fixtures::MeshFamily::Voronoi.mesh(0, 7).unwrap();
    svem::mesh::export_mesh(&mesh, &path).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { svem_mesh_load(c.as_ptr(), &mut m) }, SVEM_OK, "{}", last_error());
    assert_eq!(unsafe { svem_mesh_num_cells(m) }, mesh.num_cells());
    unsafe { svem_mesh_free(m) };

    let missing = CString::new(dir.path().join("none.mesh").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { svem_mesh_load(missing.as_ptr(), &mut m) }, SVEM_ERR_IO);
    assert_eq!(unsafe { svem_mesh_load(ptr::null(), &mut m) }, SVEM_ERR_NULL);
}

#[test]
fn invalid_arguments() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { svem_mesh_family(9, 0, 0, &mut m) }, SVEM_ERR_INVALID_ARGUMENT);
    assert!(last_error().contains("family"));
    assert_eq!(unsafe { svem_mesh_family(0, 0, 0, ptr::null_mut()) }, SVEM_ERR_NULL);
    assert_eq!(unsafe { svem_mesh_family(0, 99, 0, &mut m) }, SVEM_ERR_INVALID_ARGUMENT);

    let mesh = family_mesh(SVEM_FAMILY_VORONOI, 0);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { svem_solver_new(mesh, 7, 2, 0, 0.1, &mut s) }, SVEM_ERR_INVALID_ARGUMENT);
    assert_eq!(unsafe { svem_solver_new(mesh, 0, 2, 7, 0.1, &mut s) }, SVEM_ERR_INVALID_ARGUMENT);
    assert_eq!(unsafe { svem_solver_new(mesh, 0, 7, 0, 0.1, &mut s) }, SVEM_ERR_CONFIG);
    assert_eq!(unsafe { svem_solver_new(mesh, 0, 2, 0, -1.0, &mut s) }, SVEM_ERR_CONFIG);
    assert_eq!(unsafe { svem_solver_new(ptr::null(), 0, 2, 0, 0.1, &mut s) }, SVEM_ERR_NULL);
    assert!(s.is_null());

    let s = solver(mesh, SVEM_PROBLEM_ALLEN_CAHN, 2, SVEM_SPLITTING_DRD, 0.1);
    let mut short = vec![0.0; 3];
    assert_eq!(
        unsafe { svem_solver_get_state(s, short.as_mut_ptr(), 3) },
        SVEM_ERR_INVALID_ARGUMENT
    );
    let mut err = 0.0;
    assert_eq!(unsafe { svem_solver_l2_error(s, &mut err) }, SVEM_ERR_INVALID_ARGUMENT);
    assert_eq!(unsafe { svem_solver_advance(ptr::null_mut(), 1) }, SVEM_ERR_NULL);
    unsafe { svem_solver_free(s) };
    unsafe { svem_mesh_free(mesh) };
}

#[test]
fn last_error_truncates() {
    let mut m = ptr::null_mut();
    unsafe { svem_mesh_family(9, 0, 0, &mut m) };
    let full = unsafe { svem_last_error(ptr::null_mut(), 0) };
    assert!(full > 8);
    let mut buf = [1 as c_char; 6];
    assert_eq!(unsafe { svem_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[5], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 5);
}

#[test]
fn accuracy_solve_matches_the_core_crate() {
    let mesh = family_mesh(SVEM_FAMILY_DISTORTED, 1);
    let tau = 0.01;
    let s = solver(mesh, SVEM_PROBLEM_ACCURACY, 2, SVEM_SPLITTING_RDR, tau);
    assert_eq!(unsafe { svem_solver_advance(s, 5) }, SVEM_OK, "{}", last_error());
    assert_eq!(unsafe { svem_solver_advance(s, 5) }, SVEM_OK);
    assert!((unsafe { svem_solver_time(s) } - 0.1).abs() < 1e-12);
    let mut err = f64::NAN;
    assert_eq!(unsafe { svem_solver_l2_error(s, &mut err) }, SVEM_OK);
    assert!(err > 0.0 && err < 1e-2, "{err}");

    // the same ten steps through the library
    use svem::assembly::Discretization;
    use svem::harness::{problem, ProblemKind};
    use svem::timestep::{Splitting, SplittingConfig, Stepper};
    let d = Discretization::new(
        svem::fixtures::MeshFamily::Distorted.mesh(1, 42).unwrap(),
        2,
        &svem::mesh::EtaStrategy::default(),
        svem::projectors::SpaceKind::Serendipity,
    )
    .unwrap();
    let p = problem(ProblemKind::Accuracy);
    let mut st = Stepper::new(&d, &p, SplittingConfig::new(Splitting::Rdr, tau, 0.1)).unwrap();
    let mut u = d.interpolate_state(|x| (p.initial)(x), 0.0);
    for _ in 0..10 {
        u = st.step(&u).unwrap();
    }
    let ffi = state(s);
    let diff = ffi.iter().zip(u.values.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff}");
    unsafe { svem_solver_free(s) };
    unsafe { svem_mesh_free(mesh) };
}

#[test]
fn set_state_then_advance() {
    let mesh = family_mesh(SVEM_FAMILY_VORONOI, 0);
    let s = solver(mesh, SVEM_PROBLEM_ALLEN_CAHN, 1, SVEM_SPLITTING_DRD, 0.05);
    let n = unsafe { svem_solver_num_dofs(s) };
    // u = 1 is a steady state: f(1) = 0 and constants carry no diffusion
    let ones = vec![1.0; n];
    assert_eq!(unsafe { svem_solver_set_state(s, ones.as_ptr(), n, 2.0) }, SVEM_OK);
    assert_eq!(unsafe { svem_solver_advance(s, 3) }, SVEM_OK);
    assert!((unsafe { svem_solver_time(s) } - 2.15).abs() < 1e-12);
    assert!(state(s).iter().all(|v| (v - 1.0).abs() < 1e-12));

    let bad = vec![f64::NAN; n];
    assert_eq!(
        unsafe { svem_solver_set_state(s, bad.as_ptr(), n, 0.0) },
        SVEM_ERR_INVALID_ARGUMENT
    );
    unsafe { svem_solver_free(s) };
    unsafe { svem_mesh_free(mesh) };
}

#[test]
fn status_codes_follow_the_core_errors() {
    let cases = [
        (Error::InvalidArgument(String::new()), SVEM_ERR_INVALID_ARGUMENT),
        (Error::Config(String::new()), SVEM_ERR_CONFIG),
        (Error::Io(std::io::Error::other("x")), SVEM_ERR_IO),
        (
            Error::MalformedMesh {
                line: 0,
                message: String::new(),
            },
            SVEM_ERR_MALFORMED_MESH,
        ),
        (
            Error::InvalidCell {
                cell: 0,
                reason: String::new(),
            },
            SVEM_ERR_INVALID_CELL,
        ),
        (
            Error::Orientation {
                cell: 0,
                signed_area: 0.0,
            },
            SVEM_ERR_ORIENTATION,
        ),
        (
            Error::NonSimple {
                cell: 0,
                first: 0,
                second: 0,
            },
            SVEM_ERR_NON_SIMPLE,
        ),
        (Error::NonConforming(String::new()), SVEM_ERR_NON_CONFORMING),
        (Error::ConditionViolation { cell: 0, k: 0, eta: 0 }, SVEM_ERR_CONDITION_VIOLATION),
        (
            Error::Conditioning {
                cell: 0,
                what: "",
                condition: 0.0,
            },
            SVEM_ERR_CONDITIONING,
        ),
        (
            Error::Unsupported {
                cell: 0,
                message: String::new(),
            },
            SVEM_ERR_UNSUPPORTED,
        ),
        (Error::Triangulation { cell: 0 }, SVEM_ERR_TRIANGULATION),
        (Error::NotPositiveDefinite { what: "", pivot: 0 }, SVEM_ERR_NOT_POSITIVE_DEFINITE),
        (
            Error::LinearSolve {
                residual: 0.0,
                iterations: 0,
            },
            SVEM_ERR_LINEAR_SOLVE,
        ),
        (Error::FunctionDomain { dof: 0, value: 0.0 }, SVEM_ERR_FUNCTION_DOMAIN),
        (Error::ScalarNewton { dof: 0, residual: 0.0 }, SVEM_ERR_SCALAR_NEWTON),
        (Error::LocalNewton { cell: 0, residual: 0.0 }, SVEM_ERR_LOCAL_NEWTON),
        (
            Error::CoupledIteration {
                increment: 0.0,
                iterations: 0,
            },
            SVEM_ERR_COUPLED_ITERATION,
        ),
        (Error::Internal(String::new()), SVEM_ERR_INTERNAL),
    ];
    for (e, code) in cases {
        assert_eq!(e.code(), code, "{e:?}");
    }
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_interface() {
    let text = std::fs::read_to_string(header_dir().join("svem.h")).unwrap();
    for name in [
        "svem_version",
        "svem_last_error",
        "svem_mesh_family",
        "svem_mesh_from_arrays",
        "svem_mesh_load",
        "svem_mesh_free",
        "svem_solver_new",
        "svem_solver_advance",
        "svem_solver_get_state",
        "svem_solver_set_state",
        "svem_solver_l2_error",
        "svem_solver_free",
        "typedef struct SvemMesh SvemMesh",
        "#define SVEM_ERR_ORIENTATION 12",
    ] {
        assert!(text.contains(name), "{name} missing from svem.h");
    }
    let version = unsafe { CStr::from_ptr(svem_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles the C example against the header, as C and as C++, and runs it
/// when the static library sits next to the test binary.
#[test]
fn c_program_builds_and_runs() {
    let Ok(cc) = which("cc") else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let dir = tempfile::tempdir().unwrap();
    let include = format!("-I{}", header_dir().display());
    let obj = dir.path().join("smoke.o");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-c", &include])
        .arg(&src)
        .arg("-o")
        .arg(&obj)
        .status()
        .unwrap();
    assert!(status.success());
    if let Ok(cxx) = which("c++") {
        let status = Command::new(cxx)
            .args(["-x", "c++", "-fsyntax-only", "-Wall", "-Werror", &include])
            .arg(&src)
            .status()
            .unwrap();
        assert!(status.success());
    }

    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).map(|d| d.join("libsvem_ffi.a"));
    let Some(lib) = lib.filter(|l| l.exists()) else {
        eprintln!("static library not found next to the test binary, skipping the run");
        return;
    };
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&obj)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("t = 0.02, dofs = "), "{stdout}");
}

fn which(tool: &str) -> Result<PathBuf, ()> {
    std::env::var_os("PATH")
        .and_then(|paths| std::env::split_paths(&paths).map(|p| p.join(tool)).find(|p| p.is_file()))
        .ok_or(())
}
