//! Case setup and the main loop: step, monitor, adapt, write.

mod config;
mod initial;
mod monitors;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

pub use config::{parse_control_file, AdaptationSettings, InitialCondition, RunConfig, SnapshotFormat, TimeStep, KEYS};
pub use initial::{initial_condition, initial_state, isentropic_vortex, taylor_green};
pub use monitors::{compute_monitors, monitor_header, monitor_line, probe_state, write_monitors, MonitorRecord};
pub use output::{read_restart, snapshot_columns, write_restart, write_snapshot};

use crate::adaptation::{adapt, OrderMap};
use crate::dg::{DgConfig, Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::mesh::build_box_mesh;
use crate::time_integration::{compute_dt_cfl, Stepper};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output directory`.
    pub output_dir: Option<PathBuf>,
    /// Resume from this restart file instead of the initial condition.
    pub restart: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub steps: usize,
    pub time: f64,
    pub wall: Duration,
    pub records: Vec<MonitorRecord>,
    pub field: SolutionField,
    pub discretization: Discretization,
    pub output_dir: PathBuf,
}

impl RunReport {
    pub fn last(&self) -> Option<&MonitorRecord> {
        self.records.last()
    }
}

/// Mesh, metrics and numerical setup for `orders`.
pub fn build_discretization(config: &RunConfig, orders: OrderMap) -> Result<Discretization> {
    let mesh = Arc::new(build_box_mesh(&config.mesh)?);
    let mut dg = DgConfig::new(config.gas, config.geometry_order);
    dg.kind = config.kind;
    dg.volume = config.volume;
    dg.riemann = config.riemann;
    dg.boundaries = config.boundaries.clone();
    dg.shock_capturing = config.shock_capturing;
    Discretization::new(mesh, orders, dg)
}

fn initial_orders(config: &RunConfig) -> Result<OrderMap> {
    let n: usize = config.mesh.counts.iter().product();
    OrderMap::uniform(n, config.orders, config.min_order, config.max_order)
}

/// Build the discretization and the starting field, from the initial
/// condition or a restart file. Returns the starting step as well.
pub fn setup(config: &RunConfig, restart: Option<&Path>) -> Result<(Discretization, SolutionField, usize)> {
    match restart {
        None => {
            let disc = build_discretization(config, initial_orders(config)?)?;
            let field = initial_condition(&config.initial, &disc)?;
            Ok((disc, field, 0))
        }
        Some(path) => {
            let (step, field) = read_restart(path)?;
            let n: usize = config.mesh.counts.iter().product();
            if field.orders().len() != n {
                return Err(Error::Configuration(format!(
                    "restart file has {} elements but the mesh has {n}",
                    field.orders().len()
                )));
            }
            let disc = build_discretization(config, field.orders().clone())?;
            field.check_admissible(disc.gas())?;
            Ok((disc, field, step))
        }
    }
}

struct Writer {
    dir: PathBuf,
    monitors: BufWriter<File>,
}

impl Writer {
    fn new(dir: &Path, probes: usize) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("monitors.csv");
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut monitors = BufWriter::new(f);
        writeln!(monitors, "{}", monitor_header(probes)).map_err(|e| Error::io(&path, e))?;
        Ok(Writer { dir: dir.to_path_buf(), monitors })
    }

    fn record(&mut self, r: &MonitorRecord) -> Result<()> {
        let path = self.dir.join("monitors.csv");
        writeln!(self.monitors, "{}", monitor_line(r)).and_then(|_| self.monitors.flush()).map_err(|e| Error::io(&path, e))
    }

    fn snapshot(&self, config: &RunConfig, disc: &Discretization, field: &SolutionField, name: &str) -> Result<()> {
        let ext = match config.snapshot_format {
            SnapshotFormat::Table => "dat",
            SnapshotFormat::Vtk => "vtk",
        };
        let path = self.dir.join(format!("{name}.{ext}"));
        write_snapshot(disc, field, &path, config.snapshot_format, config.visualization_order, config.snapshot_gradients)
    }
}

fn finished(config: &RunConfig, step: usize, time: f64) -> bool {
    if config.max_iterations.is_some_and(|m| step >= m) {
        return true;
    }
    config.final_time.is_some_and(|t| time >= t - 1e-12 * t.abs().max(1.0))
}

/// A case in memory: discretization, state and stepper, advanced one step at
/// a time without touching the file system.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: RunConfig,
    disc: Discretization,
    field: SolutionField,
    stepper: Stepper,
    step: usize,
}

impl Simulation {
    pub fn new(config: RunConfig, restart: Option<&Path>) -> Result<Self> {
        let (disc, field, step) = setup(&config, restart)?;
        let stepper = Stepper::new(config.scheme);
        Ok(Simulation { config, disc, field, stepper, step })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn field(&self) -> &SolutionField {
        &self.field
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.field.time
    }

    /// Final time or iteration limit reached.
    pub fn finished(&self) -> bool {
        finished(&self.config, self.step, self.field.time)
    }

    /// Configured step size, clipped so the final time is hit exactly.
    pub fn next_dt(&self) -> Result<f64> {
        let mut dt = match self.config.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl { cfl, dfl } => compute_dt_cfl(&self.disc, &self.field, cfl, dfl)?,
        };
        if let Some(t_end) = self.config.final_time {
            dt = dt.min(t_end - self.field.time);
        }
        Ok(dt)
    }

    /// Advance one step of size `dt`, then adapt if due. On failure the
    /// state is left at its value before the step.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let backup = self.field.clone();
        if let Err(err) = self.stepper.step(&self.disc, &mut self.field, dt) {
            self.field = backup;
            return Err(err);
        }
        self.step += 1;
        if let Some(a) = &self.config.adaptation {
            if self.step % a.interval == 0 {
                let (d, f) = adapt(&self.disc, &self.field, a.mode)?;
                self.disc = d;
                self.field = f;
            }
        }
        Ok(())
    }

    pub fn monitors(&self) -> Result<MonitorRecord> {
        compute_monitors(&self.disc, &self.field, self.step, &self.config.probes)
    }
}

/// Run the configured case to completion. Runtime failures (inadmissible
/// states) dump the last good state as `failure.*` before returning the error.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let dir = options.output_dir.clone().unwrap_or_else(|| config.output_dir.clone());
    let mut sim = Simulation::new(config.clone(), options.restart.as_deref())?;
    let mut out = Writer::new(&dir, config.probes.len())?;
    let mut records = Vec::new();
    let first_step = sim.step;

    let first = sim.monitors()?;
    out.record(&first)?;
    records.push(first);
    out.snapshot(config, &sim.disc, &sim.field, &format!("snapshot_{first_step:08}"))?;

    while !sim.finished() {
        if let Err(err) = sim.next_dt().and_then(|dt| sim.advance(dt)) {
            out.snapshot(config, &sim.disc, &sim.field, "failure")?;
            write_restart(&dir.join("failure.dgsm"), &sim.field, sim.step)?;
            return Err(err);
        }
        let step = sim.step;
        let last = sim.finished();
        if step % config.monitor_interval == 0 || last {
            let r = sim.monitors()?;
            if !r.is_finite() {
                return Err(Error::Parameter(format!("non-finite monitor values at step {step}")));
            }
            out.record(&r)?;
            records.push(r);
        }
        if config.snapshot_interval > 0 && step % config.snapshot_interval == 0 && !last {
            out.snapshot(config, &sim.disc, &sim.field, &format!("snapshot_{step:08}"))?;
        }
        if config.restart_interval > 0 && step % config.restart_interval == 0 && !last {
            write_restart(&dir.join(format!("restart_{step:08}.dgsm")), &sim.field, step)?;
        }
    }
    let step = sim.step;
    if step > first_step {
        out.snapshot(config, &sim.disc, &sim.field, &format!("snapshot_{step:08}"))?;
    }
    write_restart(&dir.join(format!("restart_{step:08}.dgsm")), &sim.field, step)?;

    Ok(RunReport {
        steps: step,
        time: sim.field.time,
        wall: start.elapsed(),
        records,
        field: sim.field,
        discretization: sim.disc,
        output_dir: dir,
    })
}

/// Process exit code for an error: 2 for runtime admissibility failures,
/// 1 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Admissibility { .. } | Error::NumericalValidity { .. } => 2,
        Error::Stage { source, .. } => exit_code(source),
        _ => 1,
    }
}
