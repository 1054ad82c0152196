use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fresnel_mgsa_cli::{run, RunConfig, StrategyChoice};

/// Fresnel-domain phase retrieval with the modified Gerchberg-Saxton
/// algorithm.
///
/// Takes two square 8-bit grayscale images (binary PGM or PNG) measured in
/// two planes and recovers the phase masks linking them, using zero,
/// constant (swept) or variable padding for the part of the computational
/// domain that carries no measurement.
#[derive(Debug, Parser)]
#[command(name = "fresnel-mgsa", version)]
struct Cli {
    /// Input-plane image.
    #[arg(long)]
    input: PathBuf,

    /// Output-plane image (same size as the input).
    #[arg(long)]
    output: PathBuf,

    /// Wavelength in µm.
    #[arg(long, default_value_t = 0.633)]
    wavelength: f64,

    /// Propagation distance in µm.
    #[arg(long, default_value_t = 1500.0)]
    distance: f64,

    /// Pixel pitch in µm (identical in both planes).
    #[arg(long, default_value_t = 1.0)]
    pitch: f64,

    /// Padding strategy to run, or `all` for a comparison of the three.
    #[arg(long, value_enum, default_value_t = StrategyChoice::Variable)]
    strategy: StrategyChoice,

    /// Smallest constant fill amplitude of the sweep.
    #[arg(long, default_value_t = 0.1)]
    cmin: f64,

    /// Largest constant fill amplitude of the sweep.
    #[arg(long, default_value_t = 1.0)]
    cmax: f64,

    /// Sweep step.
    #[arg(long, default_value_t = 0.1)]
    cstep: f64,

    /// Retrieval iterations per run.
    #[arg(long, default_value_t = 100)]
    iterations: usize,

    /// Seed of the random start phase.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Directory receiving all output files.
    #[arg(long, default_value = "mgsa-out")]
    outdir: PathBuf,

    /// Interpret pixel values as intensity (amplitude = sqrt(value)); pass
    /// `false` to use pixel values as amplitudes directly.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    intensity_input: bool,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        RunConfig {
            input_image: cli.input,
            output_image: cli.output,
            wavelength: cli.wavelength,
            distance: cli.distance,
            pitch: cli.pitch,
            strategy: cli.strategy,
            c_min: cli.cmin,
            c_max: cli.cmax,
            c_step: cli.cstep,
            iterations: cli.iterations,
            seed: cli.seed,
            outdir: cli.outdir,
            intensity_input: cli.intensity_input,
        }
    }
}

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    match run(&config) {
        Ok(summary) => {
            print!("{}", summary.render());
            if let Some(path) = &summary.comparison_path {
                println!("comparison written to {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
