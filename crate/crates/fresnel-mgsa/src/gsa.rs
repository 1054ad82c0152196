//! The MGSA retrieval loop and the constant-fill sweep driver.
//!
//! One iteration propagates the input-plane field forward, records the
//! output correlation from the raw diffraction pattern, imposes the output
//! amplitude constraint, propagates back, records the input correlation
//! from the raw back-propagated field, and imposes the input constraint.
//! Termination is a fixed iteration count; the correlations of the final
//! raw fields are exactly the last trace record.

use ndarray::Array2;
use rayon::prelude::*;

use crate::field_grid::{crop, FieldGrid, OpticalSetup};
use crate::fresnel::FresnelKernel;
use crate::metrics::correlation;
use crate::padding::{apply_constraint, initial_field, PaddingStrategy};
use crate::{Error, Result};

/// One complete retrieval instance: the two measured amplitude images, the
/// geometry, the padding strategy, and the loop controls.
#[derive(Debug, Clone)]
pub struct RetrievalProblem {
    pub a1: Array2<f64>,
    pub a2: Array2<f64>,
    pub setup: OpticalSetup,
    pub strategy: PaddingStrategy,
    /// Upper bound on the number of iterations; always exhausted unless
    /// `stop_tolerance` is set.
    pub iterations: usize,
    pub seed: u64,
    /// Optional early termination: stop once the input correlation changes
    /// between consecutive iterations by no more than this amount relative
    /// to the larger of the two values. `None` runs the full count.
    pub stop_tolerance: Option<f64>,
}

impl RetrievalProblem {
    fn validate(&self) -> Result<()> {
        for (name, img) in [("a1", &self.a1), ("a2", &self.a2)] {
            let (rows, cols) = img.dim();
            if rows != cols {
                return Err(Error::NotSquare { rows, cols });
            }
            if rows != self.setup.image_side() {
                return Err(Error::SideMismatch {
                    got: rows,
                    expected: self.setup.image_side(),
                    context: match name {
                        "a1" => "input amplitudes vs setup image side",
                        _ => "output amplitudes vs setup image side",
                    },
                });
            }
            for ((r, c), &v) in img.indexed_iter() {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::AmplitudeOutOfRange { row: r, col: c, value: v });
                }
            }
        }
        Ok(())
    }
}

/// Correlations recorded after one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration count.
    pub iteration: usize,
    /// Correlation between the image-region amplitude of the raw
    /// back-propagated field and the measured input amplitude.
    pub corr_input: f64,
    /// Correlation between the image-region amplitude of the raw forward
    /// diffraction pattern and the measured output amplitude.
    pub corr_output: f64,
}

/// Per-iteration convergence history, one record per completed iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

/// Outcome of a retrieval run.
///
/// `u1_final` is the raw back-propagated input-plane field of the last
/// iteration (before the input constraint) and `u2_final` the raw forward
/// diffraction pattern (before the output constraint); `phi1`/`phi2` are
/// their phases wrapped to `[-π, π)`. Applying the amplitude constraint to
/// either field reproduces the loop state that would seed the next
/// iteration. With zero iterations the result holds the initial field, a
/// zero output plane and an empty trace.
#[derive(Debug, Clone)]
pub struct RetrievalResult {
    pub phi1: Array2<f64>,
    pub phi2: Array2<f64>,
    pub u1_final: FieldGrid,
    pub u2_final: FieldGrid,
    pub trace: ConvergenceTrace,
}

/// Run the retrieval loop for the configured number of iterations.
pub fn run_mgsa(problem: &RetrievalProblem) -> Result<RetrievalResult> {
    problem.validate()?;
    let kernel = FresnelKernel::new(&problem.setup);
    run_with_kernel(problem, &kernel)
}

/// As [`run_mgsa`], reusing an already built kernel (the chirps and FFT
/// plans only depend on the setup, so sweep members share one kernel).
pub fn run_with_kernel(problem: &RetrievalProblem, kernel: &FresnelKernel) -> Result<RetrievalResult> {
    problem.validate()?;
    let setup = &problem.setup;
    let mut u1 = initial_field(&problem.a1, setup, &problem.strategy, problem.seed)?;

    if problem.iterations == 0 {
        let zeros = FieldGrid::zeros(setup.domain_side(), setup.pitch())?;
        return Ok(RetrievalResult {
            phi1: u1.phase(),
            phi2: zeros.phase(),
            u1_final: u1,
            u2_final: zeros,
            trace: ConvergenceTrace::default(),
        });
    }

    let mut records = Vec::with_capacity(problem.iterations);
    let mut u1_raw = u1.clone();
    let mut u2_raw = FieldGrid::zeros(setup.domain_side(), setup.pitch())?;
    for iteration in 1..=problem.iterations {
        // Forward propagation; the grid constructor rejects non-finite
        // samples, so a diverging field aborts here with a diagnostic.
        u2_raw = kernel.frt(&u1)?;
        let corr_output = correlation(&crop(&u2_raw, setup)?, &problem.a2)?.value();

        let u2 = apply_constraint(&u2_raw, &problem.a2, setup, &problem.strategy)?;
        u1_raw = kernel.ifrt(&u2)?;
        let corr_input = correlation(&crop(&u1_raw, setup)?, &problem.a1)?.value();

        records.push(TraceRecord {
            iteration,
            corr_input,
            corr_output,
        });
        u1 = apply_constraint(&u1_raw, &problem.a1, setup, &problem.strategy)?;

        if let (Some(tolerance), true) = (problem.stop_tolerance, records.len() >= 2) {
            let prev = records[records.len() - 2].corr_input;
            let scale = corr_input.abs().max(prev.abs()).max(f64::EPSILON);
            if (corr_input - prev).abs() <= tolerance * scale {
                break;
            }
        }
    }

    Ok(RetrievalResult {
        phi1: u1_raw.phase(),
        phi2: u2_raw.phase(),
        u1_final: u1_raw,
        u2_final: u2_raw,
        trace: ConvergenceTrace { records },
    })
}

/// Result of sweeping the constant padding amplitude.
#[derive(Debug)]
pub struct SweepOutcome {
    /// Fill amplitude with the highest final input correlation (ties go to
    /// the smaller amplitude).
    pub best_c: f64,
    /// Full result of the winning run.
    pub best: RetrievalResult,
    /// `(c, final corr_input)` for every swept amplitude, in sweep order.
    pub all: Vec<(f64, f64)>,
}

/// Run the retrieval once per fill amplitude `c ∈ {c_min, c_min + step, …}`
/// up to `c_max`, all with the constant strategy and the problem's seed, and
/// pick the best. Members run in parallel; each is independent and
/// deterministic, so the outcome does not depend on scheduling.
pub fn sweep_constant(
    problem: &RetrievalProblem,
    c_min: f64,
    c_max: f64,
    step: f64,
) -> Result<SweepOutcome> {
    let range_ok = c_min > 0.0 && step > 0.0 && c_min <= c_max;
    if !range_ok {
        return Err(Error::EmptySweep { c_min, c_max, step });
    }
    if problem.iterations == 0 {
        return Err(Error::SweepWithoutIterations);
    }
    // Tolerant count so that ranges like [0.1, 1.0] in steps of 0.1 yield
    // exactly ten members despite inexact decimal arithmetic.
    let count = ((c_max - c_min) / step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|k| c_min + k as f64 * step).collect();

    let kernel = FresnelKernel::new(&problem.setup);
    let runs: Vec<Result<(f64, RetrievalResult)>> = values
        .par_iter()
        .map(|&c| {
            let member = RetrievalProblem {
                strategy: PaddingStrategy::Constant(c),
                ..problem.clone()
            };
            run_with_kernel(&member, &kernel).map(|r| (c, r))
        })
        .collect();

    let mut all = Vec::with_capacity(count);
    let mut best: Option<(f64, RetrievalResult)> = None;
    for run in runs {
        let (c, result) = run?;
        let final_corr = result
            .trace
            .last()
            .map(|r| r.corr_input)
            .expect("iterations >= 1 guarantees a trace record");
        all.push((c, final_corr));
        let better = match &best {
            None => true,
            Some((best_c, best_result)) => {
                let best_corr = best_result.trace.last().unwrap().corr_input;
                final_corr > best_corr || (final_corr == best_corr && c < *best_c)
            }
        };
        if better {
            best = Some((c, result));
        }
    }
    let (best_c, best) = best.expect("sweep set verified non-empty");
    Ok(SweepOutcome { best_c, best, all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_grid::embed;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 32 px image inside a 64-sample domain (λz/δx² = 64).
    fn small_setup() -> OpticalSetup {
        OpticalSetup::new(0.5, 128.0, 1.0, 32).unwrap()
    }

    fn textured_image(side: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((side, side), |(r, c)| {
            let x = c as f64 / side as f64;
            let y = r as f64 / side as f64;
            let v = 0.55
                + 0.25 * (6.1 * x + 2.0 * y).sin() * (4.3 * y).cos()
                + 0.1 * rng.gen::<f64>();
            v.clamp(0.05, 1.0)
        })
    }

    /// Synthesize an output amplitude by forward-propagating `a1` with a
    /// known random phase, then rescale the pair so amplitudes stay in
    /// [0, 1]. Correlation and relative-error metrics are unaffected by the
    /// common scale.
    fn self_consistent_problem(
        setup: OpticalSetup,
        strategy: PaddingStrategy,
        iterations: usize,
    ) -> RetrievalProblem {
        let a1 = textured_image(setup.image_side(), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let embedded = embed(&a1, &setup, Complex64::new(0.0, 0.0)).unwrap();
        let phased = embedded.samples().mapv(|v| {
            v * Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
        });
        let u1 = FieldGrid::new(phased, setup.pitch()).unwrap();
        let kernel = FresnelKernel::new(&setup);
        let a2 = crop(&kernel.frt(&u1).unwrap(), &setup).unwrap();
        let peak = a2.iter().cloned().fold(0.0f64, f64::max).max(1.0);
        RetrievalProblem {
            a1: a1.mapv(|v| v / peak),
            a2: a2.mapv(|v| v / peak),
            setup,
            strategy,
            iterations,
            seed: 0,
            stop_tolerance: None,
        }
    }

    #[test]
    fn zero_iterations_yields_initial_phases_and_empty_trace() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Variable,
            iterations: 0,
            seed: 0,
            stop_tolerance: None,
        };
        let result = run_mgsa(&problem).unwrap();
        assert!(result.trace.is_empty());
        // Variable start: real non-negative field, so the phase is zero.
        assert!(result.phi1.iter().all(|&p| p == 0.0));
        assert!(result.phi2.iter().all(|&p| p == 0.0));
        let init = initial_field(&problem.a1, &setup, &problem.strategy, 0).unwrap();
        assert_eq!(result.u1_final.samples(), init.samples());
    }

    #[test]
    fn traces_are_bit_identical_across_runs() {
        let setup = small_setup();
        for strategy in [
            PaddingStrategy::Zero,
            PaddingStrategy::Constant(0.3),
            PaddingStrategy::Variable,
        ] {
            let problem = RetrievalProblem {
                a1: textured_image(32, 1),
                a2: textured_image(32, 2),
                setup,
                strategy,
                iterations: 8,
                seed: 99,
                stop_tolerance: None,
            };
            let a = run_mgsa(&problem).unwrap();
            let b = run_mgsa(&problem).unwrap();
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.u1_final.samples(), b.u1_final.samples());
        }
    }

    #[test]
    fn constraint_of_final_field_restores_input_amplitude() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Variable,
            iterations: 5,
            seed: 0,
            stop_tolerance: None,
        };
        let result = run_mgsa(&problem).unwrap();
        let constrained =
            apply_constraint(&result.u1_final, &problem.a1, &setup, &problem.strategy).unwrap();
        let cropped = crop(&constrained, &setup).unwrap();
        for (&got, &want) in cropped.iter().zip(problem.a1.iter()) {
            assert!((got - want).abs() <= 4.0 * f64::EPSILON * want.max(1.0));
        }
    }

    #[test]
    fn phases_are_wrapped() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Zero,
            iterations: 3,
            seed: 7,
            stop_tolerance: None,
        };
        let result = run_mgsa(&problem).unwrap();
        for &p in result.phi1.iter().chain(result.phi2.iter()) {
            assert!(p.is_finite());
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&p));
        }
    }

    #[test]
    fn trace_iterations_count_up_from_one() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Variable,
            iterations: 6,
            seed: 0,
            stop_tolerance: None,
        };
        let result = run_mgsa(&problem).unwrap();
        assert_eq!(result.trace.len(), 6);
        for (k, rec) in result.trace.records.iter().enumerate() {
            assert_eq!(rec.iteration, k + 1);
        }
    }

    #[test]
    fn self_consistent_problem_is_recovered() {
        let problem = self_consistent_problem(small_setup(), PaddingStrategy::Variable, 100);
        let result = run_mgsa(&problem).unwrap();
        let final_corr = result.trace.last().unwrap().corr_input;
        assert!(final_corr >= 0.99, "corr_input after 100 iterations: {final_corr}");
    }

    #[test]
    fn stop_tolerance_terminates_early() {
        let mut problem = self_consistent_problem(small_setup(), PaddingStrategy::Variable, 100);
        problem.stop_tolerance = Some(1e-9);
        let result = run_mgsa(&problem).unwrap();
        let n = result.trace.len();
        assert!((2..100).contains(&n), "expected early stop, ran {n} iterations");
        let last = result.trace.records[n - 1].corr_input;
        let prev = result.trace.records[n - 2].corr_input;
        assert!((last - prev).abs() <= 1e-9 * last.abs().max(prev.abs()));

        problem.stop_tolerance = None;
        assert_eq!(run_mgsa(&problem).unwrap().trace.len(), 100);
    }

    #[test]
    fn correlation_does_not_degrade_with_more_iterations() {
        let problem = self_consistent_problem(small_setup(), PaddingStrategy::Variable, 100);
        let result = run_mgsa(&problem).unwrap();
        let at_10 = result.trace.records[9].corr_input;
        let at_100 = result.trace.records[99].corr_input;
        assert!(at_100 >= at_10, "corr at 100 ({at_100}) < corr at 10 ({at_10})");
    }

    #[test]
    fn rejects_out_of_range_amplitudes() {
        let setup = small_setup();
        let mut a1 = textured_image(32, 1);
        a1[[3, 4]] = 1.5;
        let problem = RetrievalProblem {
            a1,
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Variable,
            iterations: 1,
            seed: 0,
            stop_tolerance: None,
        };
        assert!(matches!(
            run_mgsa(&problem),
            Err(Error::AmplitudeOutOfRange { row: 3, col: 4, .. })
        ));
    }

    #[test]
    fn rejects_mismatched_images() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(16, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Variable,
            iterations: 1,
            seed: 0,
            stop_tolerance: None,
        };
        assert!(matches!(run_mgsa(&problem), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn sweep_enumerates_the_expected_amplitudes() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Constant(0.1),
            iterations: 2,
            seed: 0,
            stop_tolerance: None,
        };
        let outcome = sweep_constant(&problem, 0.1, 1.0, 0.1).unwrap();
        assert_eq!(outcome.all.len(), 10);
        for (k, (c, _)) in outcome.all.iter().enumerate() {
            assert!((c - (0.1 + 0.1 * k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_sweep_returns_its_only_member() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Constant(0.1),
            iterations: 2,
            seed: 0,
            stop_tolerance: None,
        };
        let outcome = sweep_constant(&problem, 0.4, 0.4, 0.1).unwrap();
        assert_eq!(outcome.all.len(), 1);
        assert_eq!(outcome.best_c, 0.4);
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let setup = small_setup();
        let problem = RetrievalProblem {
            a1: textured_image(32, 1),
            a2: textured_image(32, 2),
            setup,
            strategy: PaddingStrategy::Constant(0.1),
            iterations: 2,
            seed: 0,
            stop_tolerance: None,
        };
        assert!(matches!(
            sweep_constant(&problem, 0.5, 0.1, 0.1),
            Err(Error::EmptySweep { .. })
        ));
        assert!(matches!(
            sweep_constant(&problem, 0.1, 1.0, 0.0),
            Err(Error::EmptySweep { .. })
        ));
        let zero_iter = RetrievalProblem {
            iterations: 0,
            ..problem
        };
        assert!(matches!(
            sweep_constant(&zero_iter, 0.1, 1.0, 0.1),
            Err(Error::SweepWithoutIterations)
        ));
    }

    #[test]
    fn sweep_best_matches_reported_list() {
        let problem = self_consistent_problem(small_setup(), PaddingStrategy::Constant(0.1), 10);
        let outcome = sweep_constant(&problem, 0.2, 0.8, 0.3).unwrap();
        let listed_best = outcome
            .all
            .iter()
            .cloned()
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (c, corr)| {
                if corr > acc.1 { (c, corr) } else { acc }
            });
        assert_eq!(outcome.best_c, listed_best.0);
        assert_eq!(
            outcome.best.trace.last().unwrap().corr_input,
            listed_best.1
        );
    }
}
