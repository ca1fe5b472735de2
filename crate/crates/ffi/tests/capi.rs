use std::ffi::{CStr, CString};
use std::ptr;

use dgsem_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        dgsem_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn new_solver(text: &str) -> Result<*mut DgsemSolver, DgsemStatus> {
    let c = CString::new(text).unwrap();
    let mut s = ptr::null_mut();
    match unsafe { dgsem_solver_new(c.as_ptr(), 2, &mut s) } {
        DgsemStatus::Ok => Ok(s),
        e => {
            assert!(s.is_null());
            Err(e)
        }
    }
}

#[test]
fn solver_lifecycle_conserves_mass() {
    let s = new_solver("mesh = box\nmesh elements = 2 2 2\npolynomial order = 3\ninitial condition = taylor-green\nflux = pirozzoli\nmax iterations = 5\n").unwrap();
    unsafe {
        let mut dofs = 0;
        assert_eq!(dgsem_solver_dofs(s, &mut dofs), DgsemStatus::Ok);
        assert_eq!(dofs, 8 * 64);
        let mut m0 = DgsemMonitors::default();
        assert_eq!(dgsem_solver_monitors(s, &mut m0), DgsemStatus::Ok);
        assert_eq!(dgsem_solver_step(s, 0.0), DgsemStatus::Ok);
        assert_eq!(dgsem_solver_step(s, 1e-3), DgsemStatus::Ok);
        let mut taken = 0;
        assert_eq!(dgsem_solver_run(s, &mut taken), DgsemStatus::Ok);
        assert_eq!(taken, 3);
        let mut t = 0.0;
        assert_eq!(dgsem_solver_time(s, &mut t), DgsemStatus::Ok);
        assert!(t > 1e-3);
        let mut m1 = DgsemMonitors::default();
        assert_eq!(dgsem_solver_monitors(s, &mut m1), DgsemStatus::Ok);
        assert_eq!(m1.step, 5);
        assert!(m1.kinetic_energy < m0.kinetic_energy * 1.001 && m1.kinetic_energy > 0.9 * m0.kinetic_energy);
        let mut u = [0.0; 5];
        assert_eq!(dgsem_solver_probe(s, [1.0, 2.0, 3.0].as_ptr(), u.as_mut_ptr()), DgsemStatus::Ok);
        assert!(u[0] > 0.9 && u[0] < 1.1);
        dgsem_solver_free(s);
    }
}

#[test]
fn bad_control_text_reports_configuration_error() {
    assert_eq!(new_solver("mesh = box\n").unwrap_err(), DgsemStatus::Configuration);
    assert!(last_error().contains("polynomial order"));
    assert_eq!(new_solver("mesh = box\npolynomial order = 2\nmax iterations = 1\nreimann solver = roe\n").unwrap_err(), DgsemStatus::Configuration);
    assert!(last_error().contains("riemann solver"));
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(dgsem_solver_new(ptr::null(), 0, &mut s), DgsemStatus::NullPointer);
        assert_eq!(dgsem_solver_step(ptr::null_mut(), 0.1), DgsemStatus::NullPointer);
        assert_eq!(dgsem_solver_time(ptr::null(), ptr::null_mut()), DgsemStatus::NullPointer);
        dgsem_solver_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn error_message_truncates_and_reports_length() {
    let _ = new_solver("mesh = box\n");
    unsafe {
        let full = dgsem_last_error_message(ptr::null_mut(), 0);
        assert!(full > 10);
        let mut buf = [1 as std::ffi::c_char; 6];
        assert_eq!(dgsem_last_error_message(buf.as_mut_ptr(), buf.len()), full);
        assert_eq!(buf[5], 0);
    }
}

#[test]
fn blow_up_keeps_last_good_state() {
    let s = new_solver("mesh = box\nmesh elements = 2 2 2\npolynomial order = 3\ninitial condition = taylor-green\nmach number = 0.5\nriemann solver = central\nmax iterations = 100\n").unwrap();
    unsafe {
        let mut status = DgsemStatus::Ok;
        for _ in 0..50 {
            status = dgsem_solver_step(s, 5.0);
            if status != DgsemStatus::Ok {
                break;
            }
        }
        assert_eq!(status, DgsemStatus::Admissibility, "{}", last_error());
        let mut m = DgsemMonitors::default();
        assert_eq!(dgsem_solver_monitors(s, &mut m), DgsemStatus::Ok);
        assert!(m.min_density > 0.0 && m.min_pressure > 0.0);
        dgsem_solver_free(s);
    }
}

#[test]
fn quadrature_matches_closed_forms() {
    let mut x = [0.0; 3];
    let mut w = [0.0; 3];
    unsafe {
        assert_eq!(dgsem_quadrature(2, DgsemNodeKind::GaussLobatto, x.as_mut_ptr(), w.as_mut_ptr(), 3), DgsemStatus::Ok);
    }
    let expect_w = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
    for i in 0..3 {
        assert!((x[i] - [-1.0, 0.0, 1.0][i]).abs() < 1e-15);
        assert!((w[i] - expect_w[i]).abs() < 1e-15);
    }
    unsafe {
        assert_eq!(dgsem_quadrature(1, DgsemNodeKind::Gauss, x.as_mut_ptr(), w.as_mut_ptr(), 3), DgsemStatus::Ok);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15 && (w[0] - 1.0).abs() < 1e-15);
        assert_eq!(dgsem_quadrature(5, DgsemNodeKind::Gauss, x.as_mut_ptr(), w.as_mut_ptr(), 3), DgsemStatus::BufferTooSmall);
    }
}

#[test]
fn riemann_flux_of_equal_states_is_the_physical_flux() {
    let (g, rho, v, p) = (1.4, 1.2, [0.3, -0.1, 0.2], 0.9);
    let e = p / (g - 1.0) + 0.5 * rho * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    let u = [rho, rho * v[0], rho * v[1], rho * v[2], e];
    let n = [0.0, 0.6, 0.8];
    let vn = v[1] * 0.6 + v[2] * 0.8;
    let want = [rho * vn, rho * v[0] * vn, rho * v[1] * vn + p * 0.6, rho * v[2] * vn + p * 0.8, (e + p) * vn];
    for solver in [DgsemRiemannSolver::Central, DgsemRiemannSolver::LaxFriedrichs, DgsemRiemannSolver::Rusanov, DgsemRiemannSolver::Roe] {
        let mut f = [0.0; 5];
        let st = unsafe { dgsem_riemann_flux(solver, g, u.as_ptr(), u.as_ptr(), n.as_ptr(), f.as_mut_ptr()) };
        assert_eq!(st, DgsemStatus::Ok);
        for c in 0..5 {
            assert!((f[c] - want[c]).abs() < 1e-14, "{solver:?} {c}");
        }
    }
    let bad = [-1.0, 0.0, 0.0, 0.0, 1.0];
    let mut f = [0.0; 5];
    let st = unsafe { dgsem_riemann_flux(DgsemRiemannSolver::Roe, g, bad.as_ptr(), u.as_ptr(), n.as_ptr(), f.as_mut_ptr()) };
    assert_eq!(st, DgsemStatus::Admissibility);
}

#[test]
fn generated_header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/dgsem.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["dgsem_solver_new", "dgsem_solver_free", "dgsem_solver_step", "dgsem_last_error_message", "DGSEM_STATUS_ADMISSIBILITY"] {
        assert!(text.contains(name), "{name}");
    }
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        eprintln!("no C compiler available; skipped compile check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
