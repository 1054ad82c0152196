//! Discrete Fresnel transform (FRT) and its exact inverse via the FFT,
//! plus the sampling-condition arithmetic.
//!
//! # Discrete convention
//!
//! For an `N x N` grid (even `N`) with input pitch `δx`, wavelength `λ` and
//! distance `z`, the forward transform is
//!
//! ```text
//! u2[m] = A · exp(iπ|r2(m)|²/(λz)) · Σ_n u1[n] · exp(iπ|r1(n)|²/(λz))
//!                                        · exp(-i2π f(m)·r1(n))
//! ```
//!
//! with centered coordinates and frequencies
//!
//! * `r1(j) = (j - N/2)·δx` in the input plane,
//! * `f(m) = (m - N/2)/(N·δx)`, the centered DFT frequency,
//! * `r2(m) = λz·f(m) = (m - N/2)·δx_out`, `δx_out = λz/(N·δx)`, the
//!   frequency-to-position mapping of the output plane.
//!
//! Because `δx · δx_out · N = λz`, the Fourier kernel reduces per axis to
//! the plain DFT kernel `exp(-i2π(m - N/2)(n - N/2)/N)`, so the double sum
//! factors through a center-shifted FFT. The scalar
//! `A = e^{i2πz/λ}·δx²/(iλ·z_FT)` carries the propagation phase and the
//! integral's area element; its amplitude normalization is evaluated at the
//! sampling-condition distance `z_FT = N·δx²/λ` rather than `z`, which makes
//! `|A| = 1/N` and the transform exactly unitary in the sample-energy sense
//! `Σ|u2|² = Σ|u1|²`. When `N = λz/δx²` holds exactly, `z_FT = z` and the
//! two normalizations coincide; the rounding of `N` perturbs them by at most
//! `1/(2N)` relative.
//!
//! [`crate::oracle::direct_fresnel`] evaluates the same formula as an
//! explicit double sum; the definitions here are the single normative
//! statement of the convention shared by both paths.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field_grid::{centered_coordinate, FieldGrid, OpticalSetup};
use crate::{Error, Result};

/// `(-1)^k` lookup for the parity factors below.
const PARITY_SIGN: [f64; 2] = [1.0, -1.0];

/// Number of samples `N = λz/δx²` dictated by the Fresnel sampling
/// condition, rounded to the nearest even integer.
///
/// Fails when the image of side `image_side` does not fit in the resulting
/// domain; no padding choice can fix that (the physics parameters simply do
/// not support the image size).
pub fn required_samples(
    wavelength: f64,
    distance: f64,
    pitch: f64,
    image_side: usize,
) -> Result<usize> {
    for (name, value) in [
        ("wavelength", wavelength),
        ("distance", distance),
        ("pitch", pitch),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    if image_side == 0 {
        return Err(Error::EmptyGrid);
    }
    let ideal = wavelength * distance / (pitch * pitch);
    let even = 2.0 * (ideal / 2.0).round();
    if !even.is_finite() || even < image_side as f64 {
        return Err(Error::DomainTooSmall {
            required: even.max(0.0) as usize,
            image_side,
        });
    }
    Ok(even as usize)
}

/// The unique distance `z_FT = P1·P2/(Nλ)` at which the forward and inverse
/// discrete Fresnel transforms both satisfy the Nyquist criterion, for
/// computational widths `P1`, `P2` and `n` samples per axis (`n` may be
/// non-integer when evaluating the condition continuously).
pub fn sampling_distance(p1: f64, p2: f64, n: f64, wavelength: f64) -> f64 {
    debug_assert!(p1 > 0.0 && p2 > 0.0 && n > 0.0 && wavelength > 0.0);
    p1 * p2 / (n * wavelength)
}

/// Output-plane pitch `δx_out = λz/(N·δx)` of the frequency-to-position
/// mapping. Equals the input pitch exactly when `N = λz/δx²`.
pub fn output_pitch(setup: &OpticalSetup) -> f64 {
    setup.wavelength() * setup.distance() / (setup.domain_side() as f64 * setup.pitch())
}

/// Scalar factor applied to the (plain, centered) DFT sum, including the
/// `δx²` area element: `e^{i2πz/λ}·δx²/(iλ·z_FT)` with `z_FT = N·δx²/λ`.
pub fn transform_scale(setup: &OpticalSetup) -> Complex64 {
    let wavelength = setup.wavelength();
    let pitch = setup.pitch();
    let z_ft = sampling_distance(
        setup.computational_width(),
        setup.computational_width(),
        setup.domain_side() as f64,
        wavelength,
    );
    let phase = 2.0 * std::f64::consts::PI * setup.distance() / wavelength;
    Complex64::from_polar(1.0, phase) * pitch * pitch / (Complex64::i() * wavelength * z_ft)
}

/// Precomputed chirps, scale factor and FFT plans for one setup.
///
/// Immutable after construction and reusable across iterations and threads.
pub struct FresnelKernel {
    setup: OpticalSetup,
    input_chirp: Array2<Complex64>,
    output_chirp: Array2<Complex64>,
    prefactor: Complex64,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl FresnelKernel {
    /// Evaluate the chirps at the centered lattice coordinates and plan the
    /// FFTs for this domain side.
    pub fn new(setup: &OpticalSetup) -> Self {
        let n = setup.domain_side();
        debug_assert!(n.is_multiple_of(2), "centered shift requires an even domain side");
        let lambda_z = setup.wavelength() * setup.distance();

        let chirp_1d = |pitch: f64| -> Vec<Complex64> {
            (0..n)
                .map(|j| {
                    let r = centered_coordinate(j, n, pitch);
                    Complex64::from_polar(1.0, std::f64::consts::PI * r * r / lambda_z)
                })
                .collect()
        };
        let cin = chirp_1d(setup.pitch());
        let cout = chirp_1d(output_pitch(setup));

        let mut planner = FftPlanner::new();
        Self {
            setup: *setup,
            input_chirp: Array2::from_shape_fn((n, n), |(r, c)| cin[r] * cin[c]),
            output_chirp: Array2::from_shape_fn((n, n), |(r, c)| cout[r] * cout[c]),
            prefactor: transform_scale(setup),
            fft_forward: planner.plan_fft_forward(n),
            fft_inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn setup(&self) -> &OpticalSetup {
        &self.setup
    }

    pub fn input_chirp(&self) -> &Array2<Complex64> {
        &self.input_chirp
    }

    pub fn output_chirp(&self) -> &Array2<Complex64> {
        &self.output_chirp
    }

    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    fn check_side(&self, grid: &FieldGrid, context: &'static str) -> Result<()> {
        if grid.side() != self.setup.domain_side() {
            return Err(Error::SideMismatch {
                got: grid.side(),
                expected: self.setup.domain_side(),
                context,
            });
        }
        Ok(())
    }

    /// Forward Fresnel transform of a domain-sized field.
    ///
    /// The centered DFT is evaluated through a plain FFT by absorbing the
    /// index-origin shifts into exact `(-1)^(i+j)` parity factors on both
    /// sides: for even `N`,
    /// `Σ_n g[n]·ω^((m-N/2)(n-N/2)) = (-1)^(m+N/2)·FFT{(-1)^n g[n]}[m]`
    /// per axis, and the `(-1)^(N/2)` constants of the two axes cancel.
    pub fn frt(&self, u1: &FieldGrid) -> Result<FieldGrid> {
        self.check_side(u1, "frt input vs kernel domain side")?;
        let mut work = u1.samples().clone();
        apply_factors(&mut work, &self.input_chirp, Complex64::new(1.0, 0.0), false);
        fft2_in_place(&mut work, &self.fft_forward);
        apply_factors(&mut work, &self.output_chirp, self.prefactor, false);
        FieldGrid::new(work, self.setup.pitch())
    }

    /// Exact algebraic inverse of [`Self::frt`]: conjugate chirps, inverse
    /// DFT, reciprocal scale. Round trips are exact up to roundoff.
    pub fn ifrt(&self, u2: &FieldGrid) -> Result<FieldGrid> {
        self.check_side(u2, "ifrt input vs kernel domain side")?;
        let n2 = (self.setup.domain_side() * self.setup.domain_side()) as f64;
        let back_scale = Complex64::new(1.0, 0.0) / (self.prefactor * n2);
        let mut work = u2.samples().clone();
        apply_factors(&mut work, &self.output_chirp, Complex64::new(1.0, 0.0), true);
        fft2_in_place(&mut work, &self.fft_inverse);
        apply_factors(&mut work, &self.input_chirp, back_scale, true);
        FieldGrid::new(work, self.setup.pitch())
    }
}

/// Multiply every sample by the (optionally conjugated) chirp, a constant
/// scale, and the `(-1)^(row+col)` parity factor of the centered DFT.
fn apply_factors(
    work: &mut Array2<Complex64>,
    chirp: &Array2<Complex64>,
    scale: Complex64,
    conjugate: bool,
) {
    let n = work.ncols();
    let w = work.as_slice_mut().expect("row-major layout");
    let c = chirp.as_slice().expect("row-major layout");
    for (row, (wr, cr)) in w.chunks_exact_mut(n).zip(c.chunks_exact(n)).enumerate() {
        for (col, (wv, cv)) in wr.iter_mut().zip(cr.iter()).enumerate() {
            let factor = if conjugate { cv.conj() } else { *cv };
            *wv *= factor * scale * PARITY_SIGN[(row + col) & 1];
        }
    }
}

/// In-place 2D FFT: FFT the rows, transpose, FFT again, transpose back.
fn fft2_in_place(a: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
    let n = a.nrows();
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let data = a.as_slice_mut().expect("row-major layout");
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    let mut flipped = vec![Complex64::default(); n * n];
    transpose::transpose(data, &mut flipped, n, n);
    for row in flipped.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose::transpose(&flipped, data, n, n);
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(setup: &OpticalSetup, seed: u64) -> FieldGrid {
        let n = setup.domain_side();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = Array2::from_shape_fn((n, n), |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        FieldGrid::new(samples, setup.pitch()).unwrap()
    }

    #[test]
    fn required_samples_desk_configuration() {
        // 0.633 * 1500 / 1 = 949.5, rounded to the nearest even integer.
        assert_eq!(required_samples(0.633, 1500.0, 1.0, 512).unwrap(), 950);
    }

    #[test]
    fn required_samples_exact_integer() {
        assert_eq!(required_samples(0.5, 1000.0, 1.0, 100).unwrap(), 500);
    }

    #[test]
    fn required_samples_domain_too_small() {
        // 0.633 * 100 / 1 = 63.3 < 512.
        assert!(matches!(
            required_samples(0.633, 100.0, 1.0, 512),
            Err(Error::DomainTooSmall { image_side: 512, .. })
        ));
    }

    #[test]
    fn required_samples_rejects_bad_parameters() {
        assert!(required_samples(0.0, 1.0, 1.0, 4).is_err());
        assert!(required_samples(0.5, -1.0, 1.0, 4).is_err());
        assert!(required_samples(0.5, 1.0, f64::NAN, 4).is_err());
    }

    #[test]
    fn sampling_distance_ideal_count_recovers_distance() {
        // Continuous N = 949.5: the condition is met exactly at z = 1500.
        let z = sampling_distance(949.5, 949.5, 949.5, 0.633);
        assert!((z - 1500.0).abs() / 1500.0 < 1e-12);
    }

    #[test]
    fn sampling_distance_rounded_count() {
        let z = sampling_distance(950.0, 950.0, 950.0, 0.633);
        assert!((z - 950.0 / 0.633).abs() < 1e-9);
        assert!((z - 1500.79).abs() < 0.01);
    }

    #[test]
    fn sampling_distance_scales_with_widths() {
        let z1 = sampling_distance(100.0, 100.0, 64.0, 0.5);
        let z2 = sampling_distance(200.0, 200.0, 64.0, 0.5);
        assert!((z2 / z1 - 4.0).abs() < 1e-12);
    }

    /// 16 x 16 setup with λz/δx² = 16 exactly, so δx_out = δx and z_FT = z.
    fn small_setup() -> OpticalSetup {
        OpticalSetup::new(0.5, 32.0, 1.0, 16).unwrap()
    }

    #[test]
    fn chirp_center_is_unity() {
        let k = FresnelKernel::new(&small_setup());
        assert_eq!(k.input_chirp()[[8, 8]], Complex64::new(1.0, 0.0));
        assert_eq!(k.output_chirp()[[8, 8]], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn chirp_is_unit_modulus() {
        let setup = OpticalSetup::new(0.633, 1500.0, 1.0, 512).unwrap();
        let k = FresnelKernel::new(&setup);
        for &v in k.input_chirp().iter().chain(k.output_chirp().iter()) {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chirp_value_one_pixel_from_center() {
        // exp(iπ r²/(λz)) at r = 1 µm.
        let setup = OpticalSetup::new(0.633, 1500.0, 1.0, 512).unwrap();
        let k = FresnelKernel::new(&setup);
        let expected = std::f64::consts::PI / (0.633 * 1500.0);
        let got = k.input_chirp()[[475, 476]];
        assert!((got.arg() - expected).abs() < 1e-12);
    }

    #[test]
    fn chirp_centro_symmetric() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let n = setup.domain_side();
        let c = n / 2;
        for d in 1..c {
            assert_eq!(k.input_chirp()[[c + d, c]], k.input_chirp()[[c - d, c]]);
            assert_eq!(k.output_chirp()[[c, c + d]], k.output_chirp()[[c, c - d]]);
        }
    }

    #[test]
    fn frt_of_zeros_is_zeros() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = FieldGrid::zeros(16, 1.0).unwrap();
        let out = k.frt(&u).unwrap();
        assert!(out.samples().iter().all(|v| v.norm() == 0.0));
        let back = k.ifrt(&out).unwrap();
        assert!(back.samples().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn frt_scales_linearly() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = random_grid(&setup, 7);
        let c = Complex64::new(-0.7, 1.3);
        let scaled = FieldGrid::new(u.samples().mapv(|v| v * c), setup.pitch()).unwrap();
        let a = k.frt(&u).unwrap();
        let b = k.frt(&scaled).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples().iter()) {
            assert!((x * c - y).norm() <= 1e-12 * x.norm().max(1e-300));
        }
    }

    #[test]
    fn frt_is_additive() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = random_grid(&setup, 11);
        let v = random_grid(&setup, 12);
        let sum = FieldGrid::new(u.samples() + v.samples(), setup.pitch()).unwrap();
        let fu = k.frt(&u).unwrap();
        let fv = k.frt(&v).unwrap();
        let fsum = k.frt(&sum).unwrap();
        let mut max_err: f64 = 0.0;
        for ((a, b), s) in fu
            .samples()
            .iter()
            .zip(fv.samples().iter())
            .zip(fsum.samples().iter())
        {
            max_err = max_err.max((a + b - s).norm());
        }
        assert!(max_err < 1e-12);
    }

    #[test]
    fn round_trip_recovers_field() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = random_grid(&setup, 3);
        let back = k.ifrt(&k.frt(&u).unwrap()).unwrap();
        let mut max_err: f64 = 0.0;
        let mut max_val: f64 = 0.0;
        for (a, b) in u.samples().iter().zip(back.samples().iter()) {
            max_err = max_err.max((a - b).norm());
            max_val = max_val.max(a.norm());
        }
        assert!(max_err / max_val < 1e-12);
    }

    #[test]
    fn energy_is_preserved() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = random_grid(&setup, 5);
        let out = k.frt(&u).unwrap();
        let e_in: f64 = u.samples().iter().map(|v| v.norm_sqr()).sum();
        let e_out: f64 = out.samples().iter().map(|v| v.norm_sqr()).sum();
        assert!((e_in - e_out).abs() / e_in < 1e-12);
    }

    #[test]
    fn frt_rejects_side_mismatch() {
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let u = FieldGrid::zeros(8, 1.0).unwrap();
        assert!(matches!(k.frt(&u), Err(Error::SideMismatch { .. })));
        assert!(matches!(k.ifrt(&u), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn impulse_at_center_transforms_to_flat_modulus() {
        // Single-term sums of unit-modulus phasors: |u2| = |prefactor|.
        let setup = small_setup();
        let k = FresnelKernel::new(&setup);
        let n = setup.domain_side();
        let mut samples = Array2::<Complex64>::zeros((n, n));
        samples[[n / 2, n / 2]] = Complex64::new(1.0, 0.0);
        let u = FieldGrid::new(samples, setup.pitch()).unwrap();
        let out = k.frt(&u).unwrap();
        let expected = k.prefactor().norm();
        for v in out.samples().iter() {
            assert!((v.norm() - expected).abs() < 1e-12);
        }
    }
}
