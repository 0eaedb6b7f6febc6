//! `fracflow`: Mittag-Leffler and Fox H evaluation, fundamental kernels,
//! spectral and grid solves, and the decay experiments.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use fracflow::fox_h::FoxHSpec;
use fracflow::kernels::FracParams;

use commands::{ExperimentName, KernelChoice, SolveArgs, WeakArgs};
use config::RunConfig;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "fracflow", version, about = "Fundamental solutions and decay rates of fractional diffusion")]
struct Cli {
    /// output directory for file-producing commands (FRACFLOW_OUT takes precedence)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Params {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
}

impl Params {
    fn build(&self) -> CliResult<FracParams> {
        Ok(FracParams::new(self.alpha, self.beta, self.d)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mittag-Leffler function E_{α,β}(z)
    Ml {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Fox H-function, either from explicit parameters or a kernel family
    Foxh {
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// upper parameters as shift:scale pairs
        #[arg(long, default_value = "")]
        upper: String,
        /// lower parameters as shift:scale pairs
        #[arg(long, default_value = "")]
        lower: String,
        /// use the Z or Y kernel spec instead (needs --alpha, --beta, --d)
        #[arg(long, value_enum)]
        kernel: Option<KernelChoice>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, required = true, value_delimiter = ',')]
        z: Vec<f64>,
    },
    /// Z or Y at time t over a list of radii
    Kernel {
        #[arg(long, value_enum)]
        kind: KernelChoice,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        t: f64,
        #[arg(long, required = true, value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// Spectral solve from a Gaussian initial datum
    Solve {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, default_value_t = 64.0)]
        half_extent: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        lp: f64,
    },
    /// Grid solve with a general kernel and the energy inequality
    Weak {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// λ/Λ of the random kernel modulation; 1 is the exact operator
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        width: f64,
    },
    /// Decay experiments; `all` runs every fixture
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        /// JSON run configuration
        config: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let out = |config: Option<&std::path::Path>| config::output_dir(cli.out.as_deref(), config);
    let report_paths = |paths: Vec<PathBuf>| {
        for path in paths {
            println!("{}", path.display());
        }
    };
    match &cli.command {
        Command::Ml { alpha, beta, z } => print!("{}", commands::ml(*alpha, *beta, z)?),
        Command::Foxh { m, n, upper, lower, kernel, alpha, beta, d, z } => {
            let spec = match kernel {
                Some(kind) => {
                    let (Some(alpha), Some(beta)) = (alpha, beta) else {
                        return Err(CliError::Usage("--kernel needs --alpha and --beta".into()));
                    };
                    let p = FracParams::new(*alpha, *beta, *d)?;
                    match kind {
                        KernelChoice::Z => fracflow::kernels::z_spec(&p)?,
                        KernelChoice::Y => fracflow::kernels::y_spec(&p)?,
                    }
                }
                None => FoxHSpec::new(*m, *n, commands::parse_pairs(upper)?, commands::parse_pairs(lower)?)?,
            };
            print!("{}", commands::foxh(&spec, z)?);
        }
        Command::Kernel { kind, params, t, r } => print!("{}", commands::kernel(*kind, &params.build()?, *t, r)?),
        Command::Solve { params, points, half_extent, width, times, lp } => {
            let args =
                SolveArgs { points: *points, half_extent: *half_extent, width: *width, times: times.clone(), lp: *lp };
            report_paths(commands::solve(&params.build()?, &args, &out(None))?);
        }
        Command::Weak { params, points, spacing, dt, steps, ratio, seed, width } => {
            let args = WeakArgs {
                points: *points,
                spacing: *spacing,
                dt: *dt,
                steps: *steps,
                ratio: *ratio,
                seed: *seed,
                width: *width,
            };
            report_paths(commands::weak(&params.build()?, &args, &out(None))?);
        }
        Command::Experiment { name, config } => {
            let cfg = match config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            let outcome = commands::experiment(*name, &cfg, &out(cfg.output_dir.as_deref()))?;
            for line in &outcome.lines {
                println!("{line}");
            }
            if !outcome.failed.is_empty() {
                return Err(CliError::CheckFailed(outcome.failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
