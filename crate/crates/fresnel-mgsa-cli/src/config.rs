//! Run configuration shared by the binary and the library entry point.

use std::path::PathBuf;

use crate::CliError;

/// Which padding strategy (or all of them) a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyChoice {
    Zero,
    Constant,
    Variable,
    All,
}

impl std::fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            StrategyChoice::Zero => "zero",
            StrategyChoice::Constant => "constant",
            StrategyChoice::Variable => "variable",
            StrategyChoice::All => "all",
        };
        f.write_str(name)
    }
}

/// Everything one invocation needs. Lengths are in µm.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Measured image in the input plane.
    pub input_image: PathBuf,
    /// Measured image in the output plane.
    pub output_image: PathBuf,
    pub wavelength: f64,
    pub distance: f64,
    pub pitch: f64,
    pub strategy: StrategyChoice,
    /// Constant-strategy sweep bounds and step.
    pub c_min: f64,
    pub c_max: f64,
    pub c_step: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Directory receiving all output files; created if missing.
    pub outdir: PathBuf,
    /// Interpret pixel values as intensity (amplitude = sqrt) rather than
    /// as amplitude directly.
    pub intensity_input: bool,
}

impl RunConfig {
    pub(crate) fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("distance", self.distance),
            ("pitch", self.pitch),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if matches!(self.strategy, StrategyChoice::Constant | StrategyChoice::All) {
            let range_ok = self.c_min > 0.0 && self.c_step > 0.0 && self.c_min <= self.c_max;
            if !range_ok {
                return Err(CliError::Config(format!(
                    "invalid sweep range: cmin {} cmax {} cstep {}",
                    self.c_min, self.c_max, self.c_step
                )));
            }
            if self.iterations == 0 {
                return Err(CliError::Config(
                    "the constant-padding sweep needs at least one iteration".into(),
                ));
            }
        }
        Ok(())
    }
}
