//! Ordered-statistics CFAR detector for measured signatures.
//!
//! Each cell is compared against `scale` times the k-th smallest value of the
//! training cells in a square annulus (training band of `train` cells beyond
//! `guard` cells on every side). Thresholding happens on linear power, so dB
//! inputs are converted first. At matrix edges the annulus shrinks and the
//! rank is clamped to the cells available.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signatures::SignatureMatrix;

#[derive(Debug, Clone, Copy)]
pub struct CfarParams {
    /// Guard cells per side, both axes.
    pub guard: usize,
    /// Training cells per side beyond the guard band, both axes.
    pub train: usize,
    /// 1-based rank of the order statistic (k-th smallest training cell).
    pub rank: usize,
    /// Threshold scale applied to the order statistic (linear power).
    pub scale: f64,
}

/// Training-cell count of a fully interior cell for the given matrix shape.
pub fn interior_training_count(rows: usize, cols: usize, params: &CfarParams) -> usize {
    let span = |dim: usize, half: usize| (2 * half + 1).min(dim);
    let outer = span(rows, params.guard + params.train) * span(cols, params.guard + params.train);
    let inner = span(rows, params.guard) * span(cols, params.guard);
    outer - inner
}

/// Runs the detector on a signature (dB values), returning the boolean mask.
pub fn os_cfar(matrix: &SignatureMatrix, params: &CfarParams) -> Result<DMatrix<bool>> {
    if params.train == 0 {
        return Err(Error::Parameter("at least one training cell required".into()));
    }
    if !(params.scale > 0.0) {
        return Err(Error::Parameter("CFAR scale must be positive".into()));
    }
    let rows = matrix.rows();
    let cols = matrix.cols();
    let nominal = interior_training_count(rows, cols, params);
    if params.rank < 1 || params.rank > nominal {
        return Err(Error::Parameter(format!(
            "rank {} outside 1..={nominal} training cells",
            params.rank
        )));
    }

    let power = matrix.to_linear_power();
    let reach = (params.guard + params.train) as isize;
    let guard = params.guard as isize;
    let mut mask = DMatrix::from_element(rows, cols, false);
    let mut training: Vec<f64> = Vec::with_capacity(nominal);
    for r in 0..rows as isize {
        for c in 0..cols as isize {
            training.clear();
            for dr in -reach..=reach {
                for dc in -reach..=reach {
                    if dr.abs() <= guard && dc.abs() <= guard {
                        continue;
                    }
                    let (rr, cc) = (r + dr, c + dc);
                    if rr < 0 || cc < 0 || rr >= rows as isize || cc >= cols as isize {
                        continue;
                    }
                    training.push(power[(rr as usize, cc as usize)]);
                }
            }
            if training.is_empty() {
                continue;
            }
            let k = params.rank.min(training.len());
            let (_, kth, _) = training
                .select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
            let threshold = params.scale * *kth;
            mask[(r as usize, c as usize)] = power[(r as usize, c as usize)] > threshold;
        }
    }
    Ok(mask)
}

/// False-alarm probability of OS-CFAR on unit-mean exponential noise with a
/// full window of `train_count` cells:
/// `prod_{i=0}^{rank-1} (T - i) / (T - i + scale)`.
pub fn design_false_alarm_rate(train_count: usize, rank: usize, scale: f64) -> f64 {
    (0..rank)
        .map(|i| {
            let t = (train_count - i) as f64;
            t / (t + scale)
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::{AxisScale, SignatureKind, Window};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn matrix_from_power(power: DMatrix<f64>) -> SignatureMatrix {
        SignatureMatrix {
            kind: SignatureKind::RangeDoppler,
            values_db: power.map(|p| 10.0 * p.max(1e-300).log10()),
            row_axis: AxisScale {
                label: "range_m",
                start: 0.0,
                step: 1.0,
            },
            col_axis: AxisScale {
                label: "doppler_hz",
                start: 0.0,
                step: 1.0,
            },
            window: Window::Hann,
        }
    }

    #[test]
    fn lone_spike_is_the_only_detection() {
        let mut power = DMatrix::from_element(24, 24, 1.0);
        power[(11, 7)] = 1000.0; // +30 dB
        let matrix = matrix_from_power(power);
        let mask = os_cfar(
            &matrix,
            &CfarParams {
                guard: 1,
                train: 4,
                rank: 20,
                scale: 8.0,
            },
        )
        .unwrap();
        let detections: Vec<(usize, usize)> = (0..24)
            .flat_map(|r| (0..24).map(move |c| (r, c)))
            .filter(|&(r, c)| mask[(r, c)])
            .collect();
        assert_eq!(detections, vec![(11, 7)]);
    }

    #[test]
    fn constant_field_yields_empty_mask() {
        let matrix = matrix_from_power(DMatrix::from_element(16, 16, 2.5));
        let mask = os_cfar(
            &matrix,
            &CfarParams {
                guard: 1,
                train: 3,
                rank: 10,
                scale: 1.5,
            },
        )
        .unwrap();
        assert!(mask.iter().all(|&d| !d));
    }

    #[test]
    fn parameter_validation() {
        let matrix = matrix_from_power(DMatrix::from_element(8, 8, 1.0));
        let bad_rank = CfarParams {
            guard: 1,
            train: 2,
            rank: 1000,
            scale: 2.0,
        };
        assert!(matches!(os_cfar(&matrix, &bad_rank), Err(Error::Parameter(_))));
        let no_train = CfarParams {
            guard: 1,
            train: 0,
            rank: 1,
            scale: 2.0,
        };
        assert!(os_cfar(&matrix, &no_train).is_err());
    }

    #[test]
    fn design_rate_matches_closed_forms() {
        // T=1, k=1: P(X > a Y) for unit exponentials = 1/(1+a).
        for a in [0.5, 1.0, 4.0] {
            assert!((design_false_alarm_rate(1, 1, a) - 1.0 / (1.0 + a)).abs() < 1e-15);
        }
        // T=2, k=2 (maximum of two): 2 / ((1+a)(2+a)).
        let a = 3.0;
        let expected = 2.0 / ((1.0 + a) * (2.0 + a));
        assert!((design_false_alarm_rate(2, 2, a) - expected).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_false_alarm_rate_tracks_design_rate() {
        // Row-shaped field: the 2-D annulus degenerates to 2*train cells.
        let params = CfarParams {
            guard: 1,
            train: 8,
            rank: 12,
            scale: 4.0,
        };
        let cells: usize = 200_000;
        let edge = params.guard + params.train;
        let mut rng = StdRng::seed_from_u64(0x0_5cfa);
        let power = DMatrix::from_fn(1, cells + 2 * edge, |_, _| {
            -(rng.random_range(f64::EPSILON..1.0f64)).ln()
        });
        let matrix = matrix_from_power(power);
        let mask = os_cfar(&matrix, &params).unwrap();
        let hits = (edge..edge + cells).filter(|&c| mask[(0, c)]).count();
        let empirical = hits as f64 / cells as f64;
        let design = design_false_alarm_rate(2 * params.train, params.rank, params.scale);
        let sigma = (design * (1.0 - design) / cells as f64).sqrt();
        assert!(
            (empirical - design).abs() < 3.0 * sigma,
            "empirical {empirical:.5e} vs design {design:.5e} (3 sigma = {:.2e})",
            3.0 * sigma
        );
    }
}
