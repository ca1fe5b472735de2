//! C ABI over the dgsem solver: an opaque solver handle driven by
//! control-file text, plus quadrature and interface-flux helpers.
//!
//! Every function returns a `DgsemStatus`. On failure the message is kept
//! per thread and can be fetched with `dgsem_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dgsem::basis::{basis, NodeKind};
use dgsem::driver::{parse_control_file, Simulation};
use dgsem::error::Error;
use dgsem::physics::{riemann_flux, GasProperties, RiemannSolver, State};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgsemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Configuration = 3,
    Parameter = 4,
    Admissibility = 5,
    Numerical = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgsemNodeKind {
    Gauss = 0,
    GaussLobatto = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgsemRiemannSolver {
    Central = 0,
    LaxFriedrichs = 1,
    Rusanov = 2,
    Roe = 3,
}

/// Scalar monitor values; probes are read with `dgsem_solver_probe`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DgsemMonitors {
    pub step: u64,
    pub time: f64,
    pub kinetic_energy: f64,
    pub entropy: f64,
    pub entropy_rate: f64,
    pub max_residual: f64,
    pub min_density: f64,
    pub min_pressure: f64,
}

/// Opaque solver handle.
pub struct DgsemSolver {
    sim: Simulation,
    pool: rayon::ThreadPool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> DgsemStatus {
    match err {
        Error::Admissibility { .. } => DgsemStatus::Admissibility,
        Error::NumericalValidity { .. } => DgsemStatus::Numerical,
        Error::Stage { source, .. } => status_of(source),
        Error::Io { .. } => DgsemStatus::Io,
        Error::Parameter(_) | Error::Order(_) => DgsemStatus::Parameter,
        _ => DgsemStatus::Configuration,
    }
}

fn fail(status: DgsemStatus, msg: impl Into<String>) -> DgsemStatus {
    set_error(msg.into());
    status
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), DgsemStatus>) -> DgsemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgsemStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DgsemStatus::Panic, "internal panic"),
    }
}

fn check(err: Error) -> DgsemStatus {
    let s = status_of(&err);
    fail(s, err.to_string())
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), DgsemStatus> {
    if p.is_null() {
        Err(fail(DgsemStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn dgsem_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parse control-file text and set up the case. `threads = 0` uses the
/// default worker count.
///
/// # Safety
/// `control` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_new(control: *const c_char, threads: usize, out: *mut *mut DgsemSolver) -> DgsemStatus {
    guard(|| {
        non_null(control, "control")?;
        non_null(out, "out")?;
        *out = std::ptr::null_mut();
        let text = CStr::from_ptr(control)
            .to_str()
            .map_err(|e| fail(DgsemStatus::InvalidUtf8, format!("control text is not UTF-8: {e}")))?;
        let config = parse_control_file(text).map_err(check)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| fail(DgsemStatus::Parameter, format!("cannot start worker pool: {e}")))?;
        let sim = pool.install(|| Simulation::new(config, None)).map_err(check)?;
        *out = Box::into_raw(Box::new(DgsemSolver { sim, pool }));
        Ok(())
    })
}

/// Release a handle from `dgsem_solver_new`. Null is ignored.
///
/// # Safety
/// `solver` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_free(solver: *mut DgsemSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Advance one step. `dt <= 0` uses the configured step (fixed or CFL).
/// On failure the state is left at its value before the step.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_step(solver: *mut DgsemSolver, dt: f64) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        let s = &mut *solver;
        let DgsemSolver { sim, pool } = s;
        pool.install(|| {
            let dt = if dt > 0.0 { dt } else { sim.next_dt()? };
            sim.advance(dt)
        })
        .map_err(check)
    })
}

/// Step until the configured final time or iteration limit; `steps_taken`
/// (optional) receives the number of steps taken by this call.
///
/// # Safety
/// `solver` must be a live handle; `steps_taken` null or valid.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_run(solver: *mut DgsemSolver, steps_taken: *mut u64) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        let DgsemSolver { sim, pool } = &mut *solver;
        let start = sim.step_count();
        let result = pool.install(|| {
            while !sim.finished() {
                let dt = sim.next_dt()?;
                sim.advance(dt)?;
            }
            Ok(())
        });
        if !steps_taken.is_null() {
            *steps_taken = (sim.step_count() - start) as u64;
        }
        result.map_err(check)
    })
}

/// Current simulation time.
///
/// # Safety
/// `solver` must be a live handle and `time` valid.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_time(solver: *const DgsemSolver, time: *mut f64) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        non_null(time, "time")?;
        *time = (*solver).sim.time();
        Ok(())
    })
}

/// Total number of solution nodes over all elements.
///
/// # Safety
/// `solver` must be a live handle and `dofs` valid.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_dofs(solver: *const DgsemSolver, dofs: *mut u64) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        non_null(dofs, "dofs")?;
        *dofs = (*solver).sim.field().orders().total_dofs() as u64;
        Ok(())
    })
}

/// Evaluate the monitor quantities for the current state.
///
/// # Safety
/// `solver` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_monitors(solver: *const DgsemSolver, out: *mut DgsemMonitors) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        non_null(out, "out")?;
        let s = &*solver;
        let r = s.pool.install(|| s.sim.monitors()).map_err(check)?;
        *out = DgsemMonitors {
            step: r.step as u64,
            time: r.time,
            kinetic_energy: r.kinetic_energy,
            entropy: r.entropy,
            entropy_rate: r.entropy_rate,
            max_residual: r.max_residual,
            min_density: r.min_density,
            min_pressure: r.min_pressure,
        };
        Ok(())
    })
}

/// Conservative state (ρ, ρu, ρv, ρw, ρE) at a point in undeformed box
/// coordinates.
///
/// # Safety
/// `solver` must be a live handle, `point` valid for 3 reads and `state`
/// for 5 writes.
#[no_mangle]
pub unsafe extern "C" fn dgsem_solver_probe(solver: *const DgsemSolver, point: *const f64, state: *mut f64) -> DgsemStatus {
    guard(|| {
        non_null(solver, "solver")?;
        non_null(point, "point")?;
        non_null(state, "state")?;
        let s = &*solver;
        let x = [*point, *point.add(1), *point.add(2)];
        let u = dgsem::driver::probe_state(s.sim.discretization(), s.sim.field(), x).map_err(check)?;
        std::ptr::copy_nonoverlapping(u.0.as_ptr(), state, 5);
        Ok(())
    })
}

/// Quadrature nodes and weights on [-1, 1] for polynomial `order`; both
/// buffers need `order + 1` entries.
///
/// # Safety
/// `nodes` and `weights` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dgsem_quadrature(
    order: usize,
    kind: DgsemNodeKind,
    nodes: *mut f64,
    weights: *mut f64,
    len: usize,
) -> DgsemStatus {
    guard(|| {
        non_null(nodes, "nodes")?;
        non_null(weights, "weights")?;
        if len < order + 1 {
            return Err(fail(DgsemStatus::BufferTooSmall, format!("need {} entries, got {len}", order + 1)));
        }
        let kind = match kind {
            DgsemNodeKind::Gauss => NodeKind::Gauss,
            DgsemNodeKind::GaussLobatto => NodeKind::GaussLobatto,
        };
        let b = basis(order, kind).map_err(check)?;
        std::ptr::copy_nonoverlapping(b.nodes().as_ptr(), nodes, order + 1);
        std::ptr::copy_nonoverlapping(b.weights().as_ptr(), weights, order + 1);
        Ok(())
    })
}

/// Interface flux between conservative states `left` and `right` along the
/// unit normal, for an inviscid gas with ratio of specific heats `gamma`.
///
/// # Safety
/// `left`, `right` valid for 5 reads, `normal` for 3, `flux` for 5 writes.
#[no_mangle]
pub unsafe extern "C" fn dgsem_riemann_flux(
    solver: DgsemRiemannSolver,
    gamma: f64,
    left: *const f64,
    right: *const f64,
    normal: *const f64,
    flux: *mut f64,
) -> DgsemStatus {
    guard(|| {
        non_null(left, "left")?;
        non_null(right, "right")?;
        non_null(normal, "normal")?;
        non_null(flux, "flux")?;
        let gas = GasProperties::inviscid(gamma);
        gas.validate().map_err(check)?;
        let read = |p: *const f64| {
            let mut s = State::ZERO;
            std::ptr::copy_nonoverlapping(p, s.0.as_mut_ptr(), 5);
            s
        };
        let n = [*normal, *normal.add(1), *normal.add(2)];
        let solver = match solver {
            DgsemRiemannSolver::Central => RiemannSolver::Central,
            DgsemRiemannSolver::LaxFriedrichs => RiemannSolver::LaxFriedrichs,
            DgsemRiemannSolver::Rusanov => RiemannSolver::Rusanov,
            DgsemRiemannSolver::Roe => RiemannSolver::Roe,
        };
        let f = riemann_flux(solver, &read(left), &read(right), n, &gas).map_err(check)?;
        std::ptr::copy_nonoverlapping(f.0.as_ptr(), flux, 5);
        Ok(())
    })
}
