//! Orchestration: build the retrieval problem from a [`RunConfig`], execute
//! the requested strategy (or all three), and write the per-run artifacts.
//!
//! Every run directory receives `phi1.raw`/`phi1.png`, `phi2.raw`/`phi2.png`
//! (recovered phase masks), `recon_input.png`/`recon_output.png` (cropped,
//! rescaled amplitudes of the raw propagated fields), `trace.csv` and
//! `summary.txt`. Running `all` places each strategy in its own
//! subdirectory and adds a top-level comparison summary.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use fresnel_mgsa::{
    crop, run_mgsa, sweep_constant, OpticalSetup, PaddingStrategy, RetrievalProblem,
    RetrievalResult,
};

use crate::config::{RunConfig, StrategyChoice};
use crate::io::{export_phase, format_corr, load_amplitude, save_amplitude_png, write_trace_csv};
use crate::CliError;

/// Outcome of one executed strategy.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    /// `zero`, `constant` or `variable`.
    pub label: &'static str,
    /// Winning fill amplitude, for the constant strategy.
    pub best_c: Option<f64>,
    /// Final input/output correlations (absent with zero iterations).
    pub corr_input: Option<f64>,
    pub corr_output: Option<f64>,
    /// Directory holding this run's files.
    pub dir: PathBuf,
}

/// Everything a caller needs to inspect or print after [`run`].
#[derive(Debug)]
pub struct RunSummary {
    pub reports: Vec<StrategyReport>,
    /// Path of the top-level comparison summary (`all` runs only).
    pub comparison_path: Option<PathBuf>,
}

impl RunSummary {
    /// Human-readable result lines for stdout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.reports.len() > 1 {
            out.push_str("strategy    corr_input     corr_output\n");
        }
        for r in &self.reports {
            let ci = r.corr_input.map(format_corr).unwrap_or_else(|| "n/a".into());
            let co = r.corr_output.map(format_corr).unwrap_or_else(|| "n/a".into());
            if self.reports.len() > 1 {
                let suffix = r
                    .best_c
                    .map(|c| format!("   (best c = {c:.3})"))
                    .unwrap_or_default();
                out.push_str(&format!("{:<11} {:<14} {}{}\n", r.label, ci, co, suffix));
            } else {
                out.push_str(&format!(
                    "strategy={} corr_input={} corr_output={}{}\n",
                    r.label,
                    ci,
                    co,
                    r.best_c
                        .map(|c| format!(" best_c={c:.3}"))
                        .unwrap_or_default()
                ));
            }
        }
        out
    }
}

/// Execute the configured run end to end.
pub fn run(config: &RunConfig) -> Result<RunSummary, CliError> {
    config.validate()?;
    let a1 = load_amplitude(&config.input_image, config.intensity_input)?;
    let a2 = load_amplitude(&config.output_image, config.intensity_input)?;
    if a1.dim() != a2.dim() {
        return Err(CliError::Config(format!(
            "input and output images must have the same size, got {}x{} and {}x{}",
            a1.nrows(),
            a1.ncols(),
            a2.nrows(),
            a2.ncols()
        )));
    }
    let setup = OpticalSetup::new(config.wavelength, config.distance, config.pitch, a1.nrows())?;
    fs::create_dir_all(&config.outdir)?;

    let base_problem = |strategy: PaddingStrategy| RetrievalProblem {
        a1: a1.clone(),
        a2: a2.clone(),
        setup,
        strategy,
        iterations: config.iterations,
        seed: config.seed,
        stop_tolerance: None,
    };

    let execute = |choice: StrategyChoice, dir: &Path| -> Result<StrategyReport, CliError> {
        fs::create_dir_all(dir)?;
        let (label, best_c, result): (&'static str, Option<f64>, RetrievalResult) = match choice {
            StrategyChoice::Zero => ("zero", None, run_mgsa(&base_problem(PaddingStrategy::Zero))?),
            StrategyChoice::Variable => (
                "variable",
                None,
                run_mgsa(&base_problem(PaddingStrategy::Variable))?,
            ),
            StrategyChoice::Constant => {
                let outcome = sweep_constant(
                    &base_problem(PaddingStrategy::Constant(config.c_min)),
                    config.c_min,
                    config.c_max,
                    config.c_step,
                )?;
                write_sweep_table(&outcome.all, &dir.join("sweep.csv"))?;
                ("constant", Some(outcome.best_c), outcome.best)
            }
            StrategyChoice::All => unreachable!("expanded by the caller"),
        };
        write_run_outputs(dir, config, &setup, label, best_c, &result)?;
        let last = result.trace.last();
        Ok(StrategyReport {
            label,
            best_c,
            corr_input: last.map(|r| r.corr_input),
            corr_output: last.map(|r| r.corr_output),
            dir: dir.to_path_buf(),
        })
    };

    match config.strategy {
        StrategyChoice::All => {
            let mut reports = Vec::new();
            for choice in [
                StrategyChoice::Zero,
                StrategyChoice::Constant,
                StrategyChoice::Variable,
            ] {
                let dir = config.outdir.join(choice.to_string());
                reports.push(execute(choice, &dir)?);
            }
            let comparison_path = config.outdir.join("summary.txt");
            write_comparison(&reports, config, &setup, &comparison_path)?;
            Ok(RunSummary {
                reports,
                comparison_path: Some(comparison_path),
            })
        }
        choice => {
            let report = execute(choice, &config.outdir)?;
            Ok(RunSummary {
                reports: vec![report],
                comparison_path: None,
            })
        }
    }
}

fn write_sweep_table(all: &[(f64, f64)], path: &Path) -> Result<(), CliError> {
    let mut text = String::from("c,final_corr_input\n");
    for (c, corr) in all {
        text.push_str(&format!("{c:.3},{}\n", format_corr(*corr)));
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_run_outputs(
    dir: &Path,
    config: &RunConfig,
    setup: &OpticalSetup,
    label: &str,
    best_c: Option<f64>,
    result: &RetrievalResult,
) -> Result<(), CliError> {
    export_phase(&result.phi1, &dir.join("phi1.raw"), &dir.join("phi1.png"))?;
    export_phase(&result.phi2, &dir.join("phi2.raw"), &dir.join("phi2.png"))?;

    let recon_input: Array2<f64> = crop(&result.u1_final, setup)?;
    let recon_output: Array2<f64> = crop(&result.u2_final, setup)?;
    save_amplitude_png(&recon_input, &dir.join("recon_input.png"))?;
    save_amplitude_png(&recon_output, &dir.join("recon_output.png"))?;

    write_trace_csv(&result.trace, &dir.join("trace.csv"))?;

    let mut summary = String::new();
    summary.push_str(&format!("strategy: {label}\n"));
    if let Some(c) = best_c {
        summary.push_str(&format!("best_c: {c:.3}\n"));
    }
    summary.push_str(&format!("wavelength_um: {}\n", config.wavelength));
    summary.push_str(&format!("distance_um: {}\n", config.distance));
    summary.push_str(&format!("pitch_um: {}\n", config.pitch));
    summary.push_str(&format!("image_side_px: {}\n", setup.image_side()));
    summary.push_str(&format!("domain_side_px: {}\n", setup.domain_side()));
    summary.push_str(&format!("iterations: {}\n", config.iterations));
    summary.push_str(&format!("seed: {}\n", config.seed));
    match result.trace.last() {
        Some(rec) => {
            summary.push_str(&format!("corr_input: {}\n", format_corr(rec.corr_input)));
            summary.push_str(&format!("corr_output: {}\n", format_corr(rec.corr_output)));
        }
        None => {
            summary.push_str("corr_input: n/a\ncorr_output: n/a\n");
        }
    }
    fs::write(dir.join("summary.txt"), summary)?;
    Ok(())
}

fn write_comparison(
    reports: &[StrategyReport],
    config: &RunConfig,
    setup: &OpticalSetup,
    path: &Path,
) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&format!(
        "correlation comparison after {} iterations (wavelength {} um, \
         distance {} um, pitch {} um, domain {} px)\n",
        config.iterations,
        config.wavelength,
        config.distance,
        config.pitch,
        setup.domain_side()
    ));
    text.push_str("strategy    corr_input     corr_output\n");
    for r in reports {
        let ci = r.corr_input.map(format_corr).unwrap_or_else(|| "n/a".into());
        let co = r.corr_output.map(format_corr).unwrap_or_else(|| "n/a".into());
        let suffix = r
            .best_c
            .map(|c| format!("   (best c = {c:.3})"))
            .unwrap_or_default();
        text.push_str(&format!("{:<11} {:<14} {}{}\n", r.label, ci, co, suffix));
    }
    fs::write(path, text)?;
    Ok(())
}
