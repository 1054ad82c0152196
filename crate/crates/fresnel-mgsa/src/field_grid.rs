//! Complex field lattices, physical geometry, and the embed/crop mapping
//! between the real image region and the larger computational domain.
//!
//! All grids are square with a physical pixel pitch, centered so that index
//! `N/2` sits at the physical origin. When the computational domain is
//! larger than the image (`N > n`), the image occupies the centered block
//! `[offset, offset + n)` per axis with `offset = (N - n) / 2`; for odd
//! `N - n` the extra padding pixel goes to the high-index side.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{fresnel, Error, Result};

/// Square lattice of complex field samples with a physical pixel pitch.
///
/// Invariants enforced on construction: the sample array is square with at
/// least one sample per axis, the pitch is positive, and every sample is
/// finite. Values are immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    samples: Array2<Complex64>,
    pitch: f64,
}

impl FieldGrid {
    /// Wrap a sample array, validating the grid invariants.
    pub fn new(samples: Array2<Complex64>, pitch: f64) -> Result<Self> {
        let (rows, cols) = samples.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyGrid);
        }
        if pitch.is_nan() || pitch <= 0.0 {
            return Err(Error::NonPositivePitch(pitch));
        }
        for ((r, c), v) in samples.indexed_iter() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        Ok(Self { samples, pitch })
    }

    /// All-zero grid of the given side.
    pub fn zeros(side: usize, pitch: f64) -> Result<Self> {
        Self::new(Array2::zeros((side, side)), pitch)
    }

    pub fn side(&self) -> usize {
        self.samples.nrows()
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn samples(&self) -> &Array2<Complex64> {
        &self.samples
    }

    pub fn into_samples(self) -> Array2<Complex64> {
        self.samples
    }

    /// Per-sample modulus.
    pub fn amplitude(&self) -> Array2<f64> {
        self.samples.mapv(|v| v.norm())
    }

    /// Per-sample argument wrapped to `[-π, π)`.
    pub fn phase(&self) -> Array2<f64> {
        self.samples.mapv(|v| wrap_phase(v.arg()))
    }
}

/// Map an angle returned by `atan2` (range `(-π, π]`) into `[-π, π)`.
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    if phi >= std::f64::consts::PI {
        phi - 2.0 * std::f64::consts::PI
    } else {
        phi
    }
}

/// Physical geometry of one retrieval configuration.
///
/// Couples the wavelength `λ`, propagation distance `z` and pixel pitch `δx`
/// (identical in both planes) with the image side `n` and the derived
/// domain side `N` from the Fresnel sampling condition. Lengths are in µm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSetup {
    wavelength: f64,
    distance: f64,
    pitch: f64,
    image_side: usize,
    domain_side: usize,
    offset: usize,
}

impl OpticalSetup {
    /// Build a setup for an `n x n` image, deriving the domain side from
    /// the sampling condition `N = λz/δx²` (rounded to the nearest even
    /// integer). Fails when the image does not fit in that domain.
    pub fn new(wavelength: f64, distance: f64, pitch: f64, image_side: usize) -> Result<Self> {
        let domain_side = fresnel::required_samples(wavelength, distance, pitch, image_side)?;
        Ok(Self {
            wavelength,
            distance,
            pitch,
            image_side,
            domain_side,
            offset: (domain_side - image_side) / 2,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Image side `n` in pixels.
    pub fn image_side(&self) -> usize {
        self.image_side
    }

    /// Domain side `N` in pixels.
    pub fn domain_side(&self) -> usize {
        self.domain_side
    }

    /// Pixels from the domain edge to the image region, per axis.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Physical width `p = n·δx` of the image region.
    pub fn image_width(&self) -> f64 {
        self.image_side as f64 * self.pitch
    }

    /// Physical width `P = N·δx` of the computational domain.
    pub fn computational_width(&self) -> f64 {
        self.domain_side as f64 * self.pitch
    }

    /// Physical position of lattice index `index`: `(index - N/2)·δx`.
    /// The zero coordinate lies at index `N/2`.
    pub fn coordinate(&self, index: usize) -> Result<f64> {
        if index >= self.domain_side {
            return Err(Error::IndexOutOfRange {
                index,
                side: self.domain_side,
            });
        }
        Ok(centered_coordinate(index, self.domain_side, self.pitch))
    }
}

/// `(index - side/2) * pitch` with integer division for `side/2`.
pub(crate) fn centered_coordinate(index: usize, side: usize, pitch: f64) -> f64 {
    (index as f64 - (side / 2) as f64) * pitch
}

/// Copy an `n x n` amplitude image into the centered image region of an
/// `N x N` grid, setting every padding-zone sample to `fill`.
pub fn embed(image: &Array2<f64>, setup: &OpticalSetup, fill: Complex64) -> Result<FieldGrid> {
    let (rows, cols) = image.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows != setup.image_side() {
        return Err(Error::SideMismatch {
            got: rows,
            expected: setup.image_side(),
            context: "embed image vs setup image side",
        });
    }
    let n = setup.domain_side();
    let off = setup.offset();
    let mut samples = Array2::from_elem((n, n), fill);
    for ((r, c), &v) in image.indexed_iter() {
        samples[[off + r, off + c]] = Complex64::new(v, 0.0);
    }
    FieldGrid::new(samples, setup.pitch())
}

/// Extract the `n x n` image-region amplitudes of a domain-sized grid.
///
/// Inverse of [`embed`] on the image region: `crop(embed(img, s, fill), s)`
/// returns `img` bit-exactly for any fill value.
pub fn crop(grid: &FieldGrid, setup: &OpticalSetup) -> Result<Array2<f64>> {
    if grid.side() != setup.domain_side() {
        return Err(Error::SideMismatch {
            got: grid.side(),
            expected: setup.domain_side(),
            context: "crop grid vs setup domain side",
        });
    }
    let n = setup.image_side();
    let off = setup.offset();
    Ok(grid
        .samples()
        .slice(ndarray::s![off..off + n, off..off + n])
        .mapv(|v| v.norm()))
}
