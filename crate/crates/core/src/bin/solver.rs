use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dgsem::driver::{exit_code, parse_control_file, run, RunOptions};
use dgsem::error::Error;

/// Run a DGSEM case described by a control file.
#[derive(Parser, Debug)]
#[command(name = "solver", version)]
struct Cli {
    /// Control file (`key = value` lines).
    control: PathBuf,
    /// Worker threads for element-parallel sections.
    #[arg(long, env = "DGSEM_THREADS")]
    threads: Option<usize>,
    /// Overrides `output directory` from the control file.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Resume from a restart file.
    #[arg(long)]
    restart: Option<PathBuf>,
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let text = std::fs::read_to_string(&cli.control).map_err(|e| Error::io(&cli.control, e))?;
    let config = parse_control_file(&text)?;
    let options = RunOptions { output_dir: cli.output_dir.clone(), restart: cli.restart.clone() };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Parameter("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let report = pool.install(|| run(&config, &options))?;
    eprintln!(
        "finished: {} steps, t = {:.6e}, wall {:.3} s, output in {}",
        report.steps,
        report.time,
        report.wall.as_secs_f64(),
        report.output_dir.display()
    );
    if let Some(r) = report.last() {
        eprintln!(
            "final monitors: kinetic energy {:.10e}, entropy {:.10e}, max residual {:.3e}, min density {:.6e}, min pressure {:.6e}",
            r.kinetic_energy, r.entropy, r.max_residual, r.min_density, r.min_pressure
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Control(items)) => {
            eprintln!("error: invalid control file {}:", cli.control.display());
            for item in items {
                eprintln!("  {item}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
