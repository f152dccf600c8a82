//! `ctdecomp` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or runtime failure, 2 invalid flags,
//! 3 solver did not converge (outputs are still written).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_benchmark, summary_line, write_csv, BenchConfig};
use crate::bregman::{BregmanParams, UUpdate};
use crate::chambolle::ProjectorParams;
use crate::decompose::{
    decompose, DecompParams, InnerParams, Method, DEFAULT_MAX_OUTER, DEFAULT_OUTER_TOL,
};
use crate::error::Error;
use crate::grid::ScalarField;
use crate::imageio::{load_pgm, save_f64, save_pgm, visualize_texture};
use crate::synthetic::{generate_synthetic, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ctdecomp",
    version,
    about = "Cartoon + texture image decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a PGM image into cartoon and texture layers.
    Decompose(DecomposeArgs),
    /// Write a synthetic disk + sinusoid test image.
    Synth(SynthArgs),
    /// Run both methods on one input and report timings as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Chambolle,
    Bregman,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Chambolle => Method::Chambolle,
            MethodArg::Bregman => Method::Bregman,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UUpdateArg {
    Fourier,
    GaussSeidel,
}

impl From<UUpdateArg> for UUpdate {
    fn from(u: UUpdateArg) -> Self {
        match u {
            UUpdateArg::Fourier => UUpdate::Fourier,
            UUpdateArg::GaussSeidel => UUpdate::GaussSeidel,
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Fidelity weight.
    #[arg(long, default_value_t = 1000.0)]
    lambda: f64,
    /// G-ball radius for the texture layer.
    #[arg(long, default_value_t = 1000.0)]
    mu: f64,
    /// Split Bregman weight as a multiple of each ROF fidelity coefficient (bregman only).
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Dual step of the projector, must be below 1/8 (chambolle only).
    #[arg(long, default_value_t = 0.124)]
    tau: f64,
    /// Outer relative-change tolerance; inner solvers use a tenth of it.
    #[arg(long, default_value_t = DEFAULT_OUTER_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_OUTER)]
    max_outer: usize,
    /// Iteration cap for each inner solve.
    #[arg(long)]
    max_inner: Option<usize>,
    #[arg(long, value_enum, default_value_t = UUpdateArg::Fourier)]
    u_update: UUpdateArg,
    /// Gauss-Seidel sweeps per Bregman iteration.
    #[arg(long, default_value_t = 1)]
    gs_sweeps: usize,
    /// Worker threads for FFT passes (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl SolverArgs {
    fn projector(&self) -> ProjectorParams {
        let mut p = ProjectorParams {
            mu: self.mu,
            tau: self.tau,
            tol: self.tol / 10.0,
            ..Default::default()
        };
        if let Some(n) = self.max_inner {
            p.max_iters = n;
        }
        p
    }

    fn bregman(&self) -> BregmanParams {
        let mut p = BregmanParams {
            eta_ratio: self.eta,
            tol: self.tol / 10.0,
            u_update: self.u_update.into(),
            gs_sweeps: self.gs_sweeps,
            ..Default::default()
        };
        if let Some(n) = self.max_inner {
            p.max_iters = n;
        }
        p
    }

    fn decomp_params(&self, method: Method) -> DecompParams {
        let inner = match method {
            Method::Chambolle => InnerParams::Chambolle(self.projector()),
            Method::Bregman => InnerParams::Bregman(self.bregman()),
        };
        DecompParams {
            lambda: self.lambda,
            mu: self.mu,
            outer_tol: self.tol,
            max_outer: self.max_outer,
            inner,
        }
    }

    fn bench_config(&self) -> BenchConfig {
        BenchConfig {
            lambda: self.lambda,
            mu: self.mu,
            outer_tol: self.tol,
            max_outer: self.max_outer,
            projector: self.projector(),
            bregman: self.bregman(),
        }
    }

    /// Rejects bad flags for either method before any input is read.
    fn validate(&self) -> Result<(), Error> {
        self.decomp_params(Method::Chambolle).validate()?;
        self.decomp_params(Method::Bregman).validate()
    }

    fn pool(&self) -> Result<rayon::ThreadPool, Error> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::param(format!("thread pool: {e}")))
    }
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Bregman)]
    method: MethodArg,
    #[command(flatten)]
    solver: SolverArgs,
    /// Input PGM (P2 or P5).
    input: PathBuf,
    /// Output prefix; writes <prefix>_cartoon.pgm, _texture.pgm, _texture.f64, _residual.f64.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 64)]
    width: usize,
    /// Disk radius as a fraction of the shorter side.
    #[arg(long, default_value_t = 0.3)]
    radius: f64,
    /// Sinusoid cycles across the width.
    #[arg(long, default_value_t = 8.0)]
    freq: f64,
    #[arg(long, default_value_t = 0.2)]
    amp: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <prefix>.pgm, _cartoon_truth.f64, _texture_truth.f64.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    solver: SolverArgs,
    /// Side length of a square synthetic input, used when no INPUT is given.
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Input PGM; a synthetic image is generated when omitted.
    input: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParam(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Decompose(a) => run_decompose(&a, stdout),
        Command::Synth(a) => run_synth(&a),
        Command::Bench(a) => run_bench(&a, stdout, stderr),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            error_code(&e)
        }
    }
}

fn run_decompose(args: &DecomposeArgs, stdout: &mut dyn Write) -> Result<i32, Error> {
    let method: Method = args.method.into();
    args.solver.validate()?;
    let params = args.solver.decomp_params(method);
    let f = load_pgm(&args.input)?;
    let result = args.solver.pool()?.install(|| decompose(&f, &params))?;

    let out = &args.output;
    save_pgm(&with_suffix(out, "_cartoon.pgm"), &result.cartoon, 255)?;
    save_pgm(
        &with_suffix(out, "_texture.pgm"),
        &visualize_texture(&result.texture),
        255,
    )?;
    save_f64(&with_suffix(out, "_texture.f64"), &result.texture)?;
    save_f64(&with_suffix(out, "_residual.f64"), &result.residual)?;

    let s = &result.stats;
    let line = format!(
        "method={} outer={} inner={} time_s={:.6} converged={}",
        method,
        s.outer_iters,
        s.inner_iters_total,
        s.wall_time_s(),
        s.converged
    );
    writeln!(stdout, "{line}").map_err(stdout_error)?;
    Ok(if s.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn stdout_error(source: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source,
    }
}

fn run_synth(args: &SynthArgs) -> Result<i32, Error> {
    let spec = SyntheticSpec {
        height: args.height,
        width: args.width,
        disk_radius_frac: args.radius,
        texture_freq: args.freq,
        texture_amp: args.amp,
        noise_std: args.noise,
        seed: args.seed,
    };
    let s = generate_synthetic(&spec)?;
    save_pgm(&with_suffix(&args.output, ".pgm"), &s.image, 255)?;
    save_f64(
        &with_suffix(&args.output, "_cartoon_truth.f64"),
        &s.cartoon_truth,
    )?;
    save_f64(
        &with_suffix(&args.output, "_texture_truth.f64"),
        &s.texture_truth,
    )?;
    Ok(EXIT_OK)
}

fn bench_input(args: &BenchArgs) -> Result<ScalarField, Error> {
    match &args.input {
        Some(path) => load_pgm(path),
        None => Ok(generate_synthetic(&SyntheticSpec {
            height: args.size,
            width: args.size,
            seed: args.seed,
            ..Default::default()
        })?
        .image),
    }
}

fn run_bench(
    args: &BenchArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let config = args.solver.bench_config();
    for m in [Method::Chambolle, Method::Bregman] {
        config.params(m).validate()?;
    }
    let f = bench_input(args)?;
    let rows = args.solver.pool()?.install(|| run_benchmark(&f, &config))?;

    let summary = summary_line(&rows);
    match &args.csv {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            write_csv(&rows, file)?;
            writeln!(stdout, "{summary}").map_err(stdout_error)?;
        }
        None => {
            write_csv(&rows, &mut *stdout)?;
            writeln!(stderr, "{summary}").map_err(stdout_error)?;
        }
    }
    Ok(if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}
