//! Deterministic synthetic grayscale images for driver and acceptance
//! tests, plus small file helpers.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use image::GrayImage;
use ndarray::Array2;

/// Smooth blob-and-texture pattern, full dynamic range.
pub fn scene_blobs(side: u32) -> GrayImage {
    GrayImage::from_fn(side, side, |c, r| {
        let x = c as f64 / side as f64;
        let y = r as f64 / side as f64;
        let v = 0.45
            + 0.27 * (5.2 * std::f64::consts::PI * x).sin() * (3.1 * std::f64::consts::PI * y).sin()
            + 0.30 * (-((x - 0.35).powi(2) + (y - 0.40).powi(2)) / 0.040).exp()
            - 0.22 * (-((x - 0.70).powi(2) + (y - 0.65).powi(2)) / 0.018).exp()
            + 0.05 * (13.0 * x + 5.0 * y).cos();
        image::Luma([(v.clamp(0.0, 1.0) * 255.0).round() as u8])
    })
}

/// Rings and stripes with a gentle gradient; structurally unrelated to
/// [`scene_blobs`].
pub fn scene_rings(side: u32) -> GrayImage {
    GrayImage::from_fn(side, side, |c, r| {
        let x = c as f64 / side as f64;
        let y = r as f64 / side as f64;
        let radius = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
        let v = 0.50 + 0.28 * (10.0 * std::f64::consts::PI * radius).cos()
            + 0.14 * (7.0 * std::f64::consts::PI * x).sin()
            - 0.10 * y;
        image::Luma([(v.clamp(0.0, 1.0) * 255.0).round() as u8])
    })
}

/// Write an image into `dir` and return its path.
pub fn write_png(dir: &Path, name: &str, img: &GrayImage) -> PathBuf {
    let path = dir.join(name);
    img.save(&path).expect("write test image");
    path
}

/// The amplitude map the driver derives from a stored image with the
/// default intensity interpretation.
pub fn amplitude_of(img: &GrayImage) -> Array2<f64> {
    let side = img.width() as usize;
    Array2::from_shape_fn((side, side), |(r, c)| {
        (img.get_pixel(c as u32, r as u32).0[0] as f64 / 255.0).sqrt()
    })
}
