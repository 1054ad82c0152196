//! File formats: grayscale image input, phase-mask export, amplitude
//! visualizations and the per-iteration trace.
//!
//! Phase masks are written twice: a lossless raw file (8-byte header: the
//! magic `PHI1` and the side as little-endian u32, then row-major 32-bit
//! little-endian floats) and an 8-bit visualization mapping `[-π, π)` to
//! `[0, 255]` by flooring.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use image::{DynamicImage, GrayImage};
use ndarray::Array2;

use fresnel_mgsa::ConvergenceTrace;

use crate::CliError;

pub const PHASE_MAGIC: &[u8; 4] = b"PHI1";

/// Load an 8-bit grayscale image (binary PGM or grayscale PNG) as values
/// normalized to `[0, 1]`.
pub fn load_gray(path: &Path) -> Result<Array2<f64>, CliError> {
    let img = image::open(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let gray: GrayImage = match img {
        DynamicImage::ImageLuma8(g) => g,
        other => {
            return Err(CliError::Config(format!(
                "{}: expected 8-bit grayscale, got {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    let (w, h) = gray.dimensions();
    if w != h {
        return Err(CliError::Config(format!(
            "{}: image must be square, got {w}x{h}",
            path.display()
        )));
    }
    Ok(Array2::from_shape_fn((h as usize, w as usize), |(r, c)| {
        gray.get_pixel(c as u32, r as u32).0[0] as f64 / 255.0
    }))
}

/// Load a measurement as an amplitude map in `[0, 1]`. With
/// `pixels_are_intensity` the stored values are intensities and the
/// amplitude is their square root; otherwise they are used directly.
pub fn load_amplitude(path: &Path, pixels_are_intensity: bool) -> Result<Array2<f64>, CliError> {
    let values = load_gray(path)?;
    Ok(if pixels_are_intensity {
        values.mapv(f64::sqrt)
    } else {
        values
    })
}

/// Map a wrapped phase to its 8-bit visualization value.
fn phase_to_pixel(phi: f64) -> u8 {
    let scaled = ((phi + std::f64::consts::PI) / std::f64::consts::TAU * 256.0).floor();
    scaled.clamp(0.0, 255.0) as u8
}

/// Write a phase map as a raw float file and an 8-bit visualization image.
pub fn export_phase(phi: &Array2<f64>, raw_path: &Path, png_path: &Path) -> Result<(), CliError> {
    let (rows, cols) = phi.dim();
    if rows != cols {
        return Err(CliError::Config(format!(
            "phase map must be square, got {rows}x{cols}"
        )));
    }
    for &p in phi.iter() {
        if !p.is_finite() || !(-std::f64::consts::PI..std::f64::consts::PI).contains(&p) {
            return Err(CliError::Numerical(format!(
                "phase value {p} outside the wrap interval [-pi, pi)"
            )));
        }
    }

    let mut raw = Vec::with_capacity(8 + rows * cols * 4);
    raw.extend_from_slice(PHASE_MAGIC);
    raw.extend_from_slice(&(rows as u32).to_le_bytes());
    for &p in phi.iter() {
        raw.extend_from_slice(&(p as f32).to_le_bytes());
    }
    fs::write(raw_path, raw)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", raw_path.display())))?;

    let img = GrayImage::from_fn(cols as u32, rows as u32, |c, r| {
        image::Luma([phase_to_pixel(phi[[r as usize, c as usize]])])
    });
    img.save(png_path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", png_path.display())))?;
    Ok(())
}

/// Read back a raw phase file written by [`export_phase`].
pub fn read_phase_raw(path: &Path) -> Result<(usize, Vec<f32>), CliError> {
    let mut file = fs::File::open(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut header = [0u8; 8];
    file.read_exact(&mut header)
        .map_err(|e| CliError::Config(format!("{}: truncated header: {e}", path.display())))?;
    if &header[0..4] != PHASE_MAGIC {
        return Err(CliError::Config(format!(
            "{}: bad magic, not a phase file",
            path.display()
        )));
    }
    let side = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    file.read_to_end(&mut body)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if body.len() != side * side * 4 {
        return Err(CliError::Config(format!(
            "{}: expected {} payload bytes, found {}",
            path.display(),
            side * side * 4,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok((side, values))
}

/// Write an amplitude map as an 8-bit image, rescaled to the per-file
/// min/max range. A constant map renders as black.
pub fn save_amplitude_png(values: &Array2<f64>, path: &Path) -> Result<(), CliError> {
    let (rows, cols) = values.dim();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let img = GrayImage::from_fn(cols as u32, rows as u32, |c, r| {
        let v = values[[r as usize, c as usize]];
        let scaled = if span > 0.0 { (v - lo) / span * 255.0 } else { 0.0 };
        image::Luma([scaled.round().clamp(0.0, 255.0) as u8])
    });
    img.save(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Format a correlation with the fixed precision used in the trace and the
/// summary, so the two are textually comparable.
pub fn format_corr(value: f64) -> String {
    format!("{value:.9}")
}

/// Write the convergence trace as CSV, header included even when empty.
pub fn write_trace_csv(trace: &ConvergenceTrace, path: &Path) -> Result<(), CliError> {
    let mut out = String::from("iteration,corr_input,corr_output\n");
    for rec in &trace.records {
        out.push_str(&format!(
            "{},{},{}\n",
            rec.iteration,
            format_corr(rec.corr_input),
            format_corr(rec.corr_output)
        ));
    }
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
