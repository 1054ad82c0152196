//! Brute-force direct quadrature of the discrete Fresnel transform for
//! validating the FFT path on small grids.
//!
//! [`direct_fresnel`] evaluates, for every output sample `m`,
//!
//! ```text
//! u2[m] = prefactor · exp(iπ|r2(m)|²/(λz))
//!         · Σ_n u1[n] · exp(iπ|r1(n)|²/(λz)) · exp(-i2π f(m)·r1(n))
//! ```
//!
//! as an explicit double sum over the full grid, with `f(m) = r2(m)/(λz)`
//! and the coordinate and scale conventions of [`crate::fresnel`] (the
//! normative statement lives there). No fast transform is used anywhere, so
//! agreement with [`crate::fresnel::FresnelKernel::frt`] exercises the FFT
//! factorization and the center-shift handling. The `O(N⁴)` cost is guarded
//! by [`MAX_ORACLE_SIDE`].

use ndarray::Array2;
use num_complex::Complex64;

use crate::field_grid::{centered_coordinate, FieldGrid, OpticalSetup};
use crate::fresnel::{output_pitch, transform_scale};
use crate::{Error, Result};

/// Largest domain side the quadrature accepts.
pub const MAX_ORACLE_SIDE: usize = 64;

/// Setup wrapper enforcing the small-grid cost guard.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    setup: OpticalSetup,
}

impl OracleConfig {
    pub fn new(setup: OpticalSetup) -> Result<Self> {
        if setup.domain_side() > MAX_ORACLE_SIDE {
            return Err(Error::OracleTooLarge(setup.domain_side()));
        }
        Ok(Self { setup })
    }

    pub fn setup(&self) -> &OpticalSetup {
        &self.setup
    }
}

/// Forward Fresnel transform by direct summation.
pub fn direct_fresnel(u1: &FieldGrid, config: &OracleConfig) -> Result<FieldGrid> {
    let setup = config.setup();
    let n = setup.domain_side();
    if u1.side() != n {
        return Err(Error::SideMismatch {
            got: u1.side(),
            expected: n,
            context: "oracle input vs setup domain side",
        });
    }

    let lambda_z = setup.wavelength() * setup.distance();
    let pitch_in = setup.pitch();
    let pitch_out = output_pitch(setup);
    let scale = transform_scale(setup);

    let r1: Vec<f64> = (0..n).map(|j| centered_coordinate(j, n, pitch_in)).collect();
    let r2: Vec<f64> = (0..n).map(|m| centered_coordinate(m, n, pitch_out)).collect();
    let freq: Vec<f64> = r2.iter().map(|x| x / lambda_z).collect();

    // Input field with its chirp applied, evaluated from the literal
    // formula (not reusing the kernel's separable tables).
    let chirped = Array2::from_shape_fn((n, n), |(i, j)| {
        let r_sq = r1[i] * r1[i] + r1[j] * r1[j];
        u1.samples()[[i, j]] * Complex64::from_polar(1.0, std::f64::consts::PI * r_sq / lambda_z)
    });

    // One axis of the Fourier kernel, exp(-i2π f(m) x1(k)); the 2D kernel
    // is the product of the row and column factors.
    let fourier = Array2::from_shape_fn((n, n), |(m, k)| {
        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * freq[m] * r1[k])
    });

    let mut out = Array2::<Complex64>::zeros((n, n));
    for mi in 0..n {
        for mj in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for ni in 0..n {
                let row_factor = fourier[[mi, ni]];
                for nj in 0..n {
                    acc += chirped[[ni, nj]] * row_factor * fourier[[mj, nj]];
                }
            }
            let r_sq = r2[mi] * r2[mi] + r2[mj] * r2[mj];
            let out_chirp = Complex64::from_polar(1.0, std::f64::consts::PI * r_sq / lambda_z);
            out[[mi, mj]] = scale * out_chirp * acc;
        }
    }
    FieldGrid::new(out, setup.pitch())
}
