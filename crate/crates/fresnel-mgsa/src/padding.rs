//! Amplitude-constraint application: how the measured amplitude is imposed
//! in the image region and what happens to the padding zone at each MGSA
//! half step.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field_grid::{embed, FieldGrid, OpticalSetup};
use crate::{Error, Result};

/// Treatment of the padding zone (samples outside the image region).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaddingStrategy {
    /// Padding amplitude forced to zero each half step.
    Zero,
    /// Padding filled with a fixed amplitude `c > 0`, keeping the computed
    /// phase.
    Constant(f64),
    /// Padding kept exactly as the propagation produced it; only the image
    /// region is constrained.
    Variable,
}

impl PaddingStrategy {
    fn validate(&self) -> Result<()> {
        if let PaddingStrategy::Constant(c) = *self {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::InvalidPaddingAmplitude(c));
            }
        }
        Ok(())
    }
}

/// Replace the modulus of `value` by `amplitude`, keeping its argument.
/// Zero-modulus samples have no defined phase; the convention is arg = 0,
/// so the result is the real value `amplitude`.
fn with_amplitude(value: Complex64, amplitude: f64) -> Complex64 {
    let norm = value.norm();
    if norm == 0.0 {
        Complex64::new(amplitude, 0.0)
    } else {
        value * (amplitude / norm)
    }
}

/// Impose the measured amplitude on the image region of `u` (keeping the
/// computed phase) and handle the padding zone per `strategy`.
pub fn apply_constraint(
    u: &FieldGrid,
    measured: &Array2<f64>,
    setup: &OpticalSetup,
    strategy: &PaddingStrategy,
) -> Result<FieldGrid> {
    strategy.validate()?;
    if u.side() != setup.domain_side() {
        return Err(Error::SideMismatch {
            got: u.side(),
            expected: setup.domain_side(),
            context: "constraint field vs setup domain side",
        });
    }
    let (rows, cols) = measured.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows != setup.image_side() {
        return Err(Error::SideMismatch {
            got: rows,
            expected: setup.image_side(),
            context: "measured amplitudes vs setup image side",
        });
    }
    for ((r, c), &v) in measured.indexed_iter() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NegativeAmplitude { row: r, col: c, value: v });
        }
    }

    let samples = match *strategy {
        PaddingStrategy::Zero => {
            constrained_samples(u, measured, setup, |_| Complex64::new(0.0, 0.0))
        }
        PaddingStrategy::Constant(fill) => {
            constrained_samples(u, measured, setup, move |v| with_amplitude(v, fill))
        }
        PaddingStrategy::Variable => constrained_samples(u, measured, setup, |v| v),
    };
    FieldGrid::new(samples, u.pitch())
}

/// Row-wise constraint pass: the image-region block gets the measured
/// amplitude with the computed phase, everything else goes through `pad`.
fn constrained_samples(
    u: &FieldGrid,
    measured: &Array2<f64>,
    setup: &OpticalSetup,
    pad: impl Fn(Complex64) -> Complex64,
) -> Array2<Complex64> {
    let off = setup.offset();
    let n = setup.image_side();
    let side = u.side();
    let mut samples = u.samples().clone();
    for (r, mut row) in samples.rows_mut().into_iter().enumerate() {
        let row = row.as_slice_mut().expect("row-major layout");
        if (off..off + n).contains(&r) {
            for v in &mut row[..off] {
                *v = pad(*v);
            }
            let m_row = measured.row(r - off);
            for (v, &m) in row[off..off + n].iter_mut().zip(m_row.iter()) {
                *v = with_amplitude(*v, m);
            }
            for v in &mut row[off + n..side] {
                *v = pad(*v);
            }
        } else {
            for v in row.iter_mut() {
                *v = pad(*v);
            }
        }
    }
    samples
}

/// Starting field of the retrieval loop.
///
/// Zero and constant strategies embed the measured input amplitude with the
/// strategy's fill value and multiply the whole domain by `exp(iφ₀)` with
/// φ₀ drawn i.i.d. uniform on `[0, 2π)`, one draw per sample in row-major
/// order from a generator seeded by `seed` (so identical seeds give
/// bit-identical fields). The variable strategy starts with zero phase and
/// zero padding: the field is the embedded amplitude itself, real valued;
/// from the first propagation on, its padding evolves freely.
pub fn initial_field(
    a1: &Array2<f64>,
    setup: &OpticalSetup,
    strategy: &PaddingStrategy,
    seed: u64,
) -> Result<FieldGrid> {
    strategy.validate()?;
    let fill = match *strategy {
        PaddingStrategy::Zero | PaddingStrategy::Variable => 0.0,
        PaddingStrategy::Constant(c) => c,
    };
    let embedded = embed(a1, setup, Complex64::new(fill, 0.0))?;
    if matches!(strategy, PaddingStrategy::Variable) {
        return Ok(embedded);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = embedded.into_samples().mapv(|v| {
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        v * Complex64::from_polar(1.0, phi)
    });
    FieldGrid::new(samples, setup.pitch())
}
