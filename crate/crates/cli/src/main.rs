//! Command line front end: solves the boundary control problem, runs
//! parameter sweeps and spectrum surveys, and writes the results as
//! commented CSV, JSON, and optional SVG files.
//!
//! Exit codes: 0 on success, 2 for configuration errors (the message
//! names the offending key), 3 when no cell of a run produced a usable
//! solution, 1 for everything else.

mod config;
mod outputs;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use helmcloak::experiments::{
    default_pk_wavenumbers, pk_scan, run_sweep, svd_study, AxisGrid, CellOutcome, SweepAxis,
};
use helmcloak::fields::{evaluate_field, PROXIMITY_LIMIT};
use helmcloak::problem::Problem;
use helmcloak::regularize::{lemma_bounds_check, near_operator_norm, MorozovSolution};
use helmcloak::Error;

use config::{Format, RunConfig};
use outputs::{FieldSample, Manifest, SolutionDocument};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "helmcloak", version, about = "Minimal-energy boundary control solver")]
struct Cli {
    /// TOML run configuration; every key defaults to the reference
    /// problem, so the flag can be omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Noise seed (overrides noise.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread count; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output formats, repeatable (overrides output.formats).
    #[arg(long, global = true, value_enum)]
    format: Vec<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the control problem once and write the boundary density.
    Solve,
    /// Two-axis parameter sweep with per-cell noise sensitivity.
    Sweep,
    /// Singular-spectrum survey over standoff distances.
    Svd {
        /// Standoff distances, comma separated; defaults to a log grid
        /// over [0.001, 0.03].
        #[arg(long, value_delimiter = ',')]
        standoffs: Vec<f64>,
        /// Wavenumbers for the summary surface; defaults to physics.k.
        #[arg(long, value_delimiter = ',')]
        wavenumbers: Vec<f64>,
    },
    /// Monotonicity thresholds of the discrepancy curve per wavenumber.
    Pkscan {
        /// Wavenumbers, comma separated; defaults to 1, 6, ..., 96.
        #[arg(long, value_delimiter = ',')]
        wavenumbers: Vec<f64>,
        /// Lower end of the scanned regularization window.
        #[arg(long, default_value_t = 1e-9)]
        window_lo: f64,
        /// Upper end of the scanned regularization window.
        #[arg(long, default_value_t = 1.0)]
        window_hi: f64,
    },
    /// Radiated field of the solved density on a Cartesian grid.
    Fieldmap {
        /// Half-width of the square map around the origin.
        #[arg(long, default_value_t = 0.025)]
        extent: f64,
        /// Samples per side.
        #[arg(long, default_value_t = 121)]
        resolution: usize,
    },
}

/// A run failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) => 2,
            Error::NoRoot { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    config.apply_overrides(cli.out.as_ref(), cli.seed, &cli.format);
    let formats = config.formats()?;
    let out_dir = config.output.directory.clone();
    std::fs::create_dir_all(&out_dir).map_err(Error::from)?;

    let context = Context {
        config,
        formats,
        out_dir,
        started: Instant::now(),
    };
    match cli.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Failure {
                    code: 2,
                    message: format!("--threads: {e}"),
                })?;
            pool.install(|| dispatch(&cli.command, &context))
        }
        None => dispatch(&cli.command, &context),
    }
}

struct Context {
    config: RunConfig,
    formats: BTreeSet<Format>,
    out_dir: PathBuf,
    started: Instant,
}

impl Context {
    fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    fn finish(
        &self,
        command: &str,
        outputs: Vec<PathBuf>,
        warnings: &[String],
        cells: Option<(usize, usize)>,
    ) -> Result<(), Failure> {
        let mut names: Vec<String> = outputs
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        if self.wants(Format::Json) {
            let manifest = Manifest {
                command,
                version: VERSION,
                seed: self.config.noise.seed,
                elapsed_seconds: self.started.elapsed().as_secs_f64(),
                outputs: names.clone(),
                warnings,
                cells_ok: cells.map(|c| c.0),
                cells_failed: cells.map(|c| c.1),
                config: &self.config,
            };
            outputs::write_manifest(&self.out_dir, &manifest)?;
            names.push("manifest.json".to_string());
        }
        println!(
            "{command}: wrote {} to {}",
            names.join(", "),
            self.out_dir.display()
        );
        Ok(())
    }
}

fn dispatch(command: &Command, context: &Context) -> Result<(), Failure> {
    match command {
        Command::Solve => cmd_solve(context),
        Command::Sweep => cmd_sweep(context),
        Command::Svd {
            standoffs,
            wavenumbers,
        } => cmd_svd(context, standoffs, wavenumbers),
        Command::Pkscan {
            wavenumbers,
            window_lo,
            window_hi,
        } => cmd_pkscan(context, wavenumbers, (*window_lo, *window_hi)),
        Command::Fieldmap { extent, resolution } => cmd_fieldmap(context, *extent, *resolution),
    }
}

/// Solves once, honoring noise.epsilon (0 means clean data).
fn solve_configured(problem: &Problem) -> Result<(helmcloak::problem::Assembly, MorozovSolution, f64), Error> {
    let assembly = problem.assemble()?;
    let (solution, perturbation_norm) = if problem.epsilon > 0.0 {
        let (solution, noisy) = assembly.solve_noisy(
            problem.delta,
            problem.epsilon,
            problem.seed,
            problem.noise_model,
            &problem.search,
        )?;
        (solution, noisy.perturbation_norm)
    } else {
        (
            assembly.solve_clean(problem.delta, &problem.search)?,
            0.0,
        )
    };
    Ok((assembly, solution, perturbation_norm))
}

fn cmd_solve(context: &Context) -> Result<(), Failure> {
    let problem = context.config.problem()?;
    let (assembly, solution, perturbation_norm) = solve_configured(&problem)?;
    let lemma = lemma_bounds_check(
        &solution,
        &assembly.f1,
        problem.delta,
        near_operator_norm(&assembly.operator),
    );
    let warnings = assembly.warnings(&problem);

    let mut outputs = Vec::new();
    if context.wants(Format::Json) {
        let document = SolutionDocument {
            version: VERSION,
            seed: problem.seed,
            epsilon: problem.epsilon,
            perturbation_norm,
            warnings: &warnings,
            solution: &solution,
            lemma: &lemma,
            config: &context.config,
        };
        outputs.push(outputs::write_solution_json(&context.out_dir, &document)?);
    }
    if context.wants(Format::Csv) {
        outputs.push(outputs::write_phi_csv(
            &context.out_dir,
            &context.config,
            problem.seed,
            &assembly.antenna.params,
            &solution.phi_alpha,
        )?);
    }
    println!(
        "alpha = {:.6e}, near_rel = {:.4}, far_avg = {:.3e}, phi_norm = {:.6e}",
        solution.alpha, solution.near_rel, solution.far_avg, solution.phi_norm
    );
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    context.finish("solve", outputs, &warnings, None)
}

fn cmd_sweep(context: &Context) -> Result<(), Failure> {
    let spec = context.config.sweep_spec()?;
    let cells = run_sweep(&spec)?;
    let ok = cells
        .iter()
        .filter(|c| matches!(c.outcome, CellOutcome::Ok { .. }))
        .count();
    let failed = cells.len() - ok;

    let mut outputs = Vec::new();
    if context.wants(Format::Csv) {
        outputs.push(outputs::write_sweep_csv(
            &context.out_dir,
            &context.config,
            &spec,
            &cells,
        )?);
    }
    context.finish("sweep", outputs, &[], Some((ok, failed)))?;
    if ok == 0 {
        let first = cells.iter().find_map(|c| match &c.outcome {
            CellOutcome::Failed { message } => Some(message.clone()),
            CellOutcome::Ok { .. } => None,
        });
        return Err(Failure {
            code: 3,
            message: format!(
                "all {} sweep cells failed; first: {}",
                cells.len(),
                first.unwrap_or_default()
            ),
        });
    }
    Ok(())
}

fn cmd_svd(context: &Context, standoffs: &[f64], wavenumbers: &[f64]) -> Result<(), Failure> {
    let problem = context.config.problem()?;
    let standoffs = if standoffs.is_empty() {
        AxisGrid::default_for(SweepAxis::Standoff).values
    } else {
        standoffs.to_vec()
    };
    let wavenumbers = if wavenumbers.is_empty() {
        vec![problem.wavenumber]
    } else {
        wavenumbers.to_vec()
    };
    let study = svd_study(&problem, &standoffs, &wavenumbers)?;
    let mut outputs = Vec::new();
    if context.wants(Format::Csv) {
        outputs.extend(outputs::write_svd_csvs(
            &context.out_dir,
            &context.config,
            problem.seed,
            &study,
        )?);
    }
    context.finish("svd", outputs, &[], None)
}

fn cmd_pkscan(
    context: &Context,
    wavenumbers: &[f64],
    window: (f64, f64),
) -> Result<(), Failure> {
    let problem = context.config.problem()?;
    let wavenumbers = if wavenumbers.is_empty() {
        default_pk_wavenumbers()
    } else {
        wavenumbers.to_vec()
    };
    let rows = pk_scan(&problem, &wavenumbers, problem.epsilon, window)?;
    let mut outputs = Vec::new();
    if context.wants(Format::Csv) {
        outputs.push(outputs::write_pk_csv(
            &context.out_dir,
            &context.config,
            problem.seed,
            &rows,
        )?);
    }
    context.finish("pkscan", outputs, &[], None)
}

fn cmd_fieldmap(context: &Context, extent: f64, resolution: usize) -> Result<(), Failure> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Failure {
            code: 2,
            message: format!("--extent must be positive and finite, got {extent}"),
        });
    }
    if resolution < 2 {
        return Err(Failure {
            code: 2,
            message: format!("--resolution must be at least 2, got {resolution}"),
        });
    }
    let problem = context.config.problem()?;
    let (assembly, solution, _) = solve_configured(&problem)?;
    let warnings = assembly.warnings(&problem);

    // Row-major grid, y innermost in memory order x + resolution * y.
    let coordinate =
        |i: usize| -extent + 2.0 * extent * i as f64 / (resolution - 1) as f64;
    let mut samples: Vec<FieldSample> = Vec::with_capacity(resolution * resolution);
    let mut points = Vec::new();
    let mut slots = Vec::new();
    let a = problem.geometry.antenna_radius();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let (x, y) = (coordinate(ix), coordinate(iy));
            let sample = FieldSample { x, y, value: None };
            // Skip the band around the radiating circle where the
            // quadrature is unreliable; those cells stay empty.
            if (x.hypot(y) - a).abs() >= PROXIMITY_LIMIT {
                slots.push(samples.len());
                points.push([x, y]);
            }
            samples.push(sample);
        }
    }
    let values: Vec<Complex64> = evaluate_field(
        &assembly.antenna,
        &solution.phi_alpha,
        &points,
        problem.wavenumber,
    )?;
    for (slot, value) in slots.into_iter().zip(values) {
        samples[slot].value = Some(value);
    }

    let mut outputs = Vec::new();
    if context.wants(Format::Csv) {
        outputs.push(outputs::write_field_csv(
            &context.out_dir,
            &context.config,
            problem.seed,
            &samples,
        )?);
    }
    if context.wants(Format::Svg) {
        outputs.push(outputs::write_field_svg(
            &context.out_dir,
            &samples,
            resolution,
        )?);
    }
    context.finish("fieldmap", outputs, &warnings, None)
}
