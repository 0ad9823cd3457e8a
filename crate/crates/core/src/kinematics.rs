//! Resampling of marker tracks and RCS series from video frame rate to the
//! radar pulse repetition frequency.
//!
//! Interpolation is a natural cubic spline per coordinate per marker, on
//! linear RCS (the regression consumes sqrt(sigma) linearly). The output grid
//! is `p * pri` for p = 1..=span; the requested span must stay inside the
//! source time range, extrapolation is refused.

use nalgebra::Point3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::markers::MarkerTrackSet;
use crate::sbr::RcsSeries;
use crate::spline::NaturalCubicSpline;

/// Marker positions and radar-relative ranges on the PRI grid.
#[derive(Debug, Clone)]
pub struct PrfTrackSet {
    pub pri_s: f64,
    pub radar_position: Point3<f64>,
    /// `positions[pri][marker]`, times `(start_pri + 1 + i) * pri_s`.
    positions: Vec<Vec<Point3<f64>>>,
    /// `ranges[pri][marker]`, meters from the radar.
    ranges: Vec<Vec<f64>>,
}

impl PrfTrackSet {
    /// Builds a track set directly from per-PRI positions (synthetic fixtures
    /// and stage-isolated runs); ranges are computed against `radar_position`.
    pub fn from_positions(
        pri_s: f64,
        radar_position: Point3<f64>,
        positions: Vec<Vec<Point3<f64>>>,
    ) -> Result<PrfTrackSet> {
        if pri_s <= 0.0 {
            return Err(Error::Parameter("PRI must be positive".into()));
        }
        let markers = positions.first().map_or(0, |f| f.len());
        if markers == 0 {
            return Err(Error::Parameter("at least one marker required".into()));
        }
        let mut ranges = Vec::with_capacity(positions.len());
        for (p, frame) in positions.iter().enumerate() {
            if frame.len() != markers {
                return Err(Error::ShapeMismatch(format!(
                    "PRI {p} carries {} markers, expected {markers}",
                    frame.len()
                )));
            }
            let rs: Vec<f64> = frame.iter().map(|pos| (pos - radar_position).norm()).collect();
            if rs.iter().any(|&r| r <= 0.0) {
                return Err(Error::Parameter(format!(
                    "marker coincides with the radar position at PRI {}",
                    p + 1
                )));
            }
            ranges.push(rs);
        }
        Ok(PrfTrackSet {
            pri_s,
            radar_position,
            positions,
            ranges,
        })
    }

    pub fn pri_count(&self) -> usize {
        self.positions.len()
    }

    pub fn marker_count(&self) -> usize {
        self.positions.first().map_or(0, |f| f.len())
    }

    pub fn positions(&self, pri: usize) -> &[Point3<f64>] {
        &self.positions[pri]
    }

    /// Range of marker `b` at PRI index `pri` (0-based into this set).
    pub fn range(&self, pri: usize, marker: usize) -> f64 {
        self.ranges[pri][marker]
    }

    pub fn ranges(&self, pri: usize) -> &[f64] {
        &self.ranges[pri]
    }

    /// Contiguous sub-block of `count` PRIs starting at `start` (0-based).
    pub fn window(&self, start: usize, count: usize) -> Result<PrfTrackSet> {
        if start + count > self.pri_count() {
            return Err(Error::SpanOutOfRange(format!(
                "window {start}..{} of {} PRIs",
                start + count,
                self.pri_count()
            )));
        }
        Ok(PrfTrackSet {
            pri_s: self.pri_s,
            radar_position: self.radar_position,
            positions: self.positions[start..start + count].to_vec(),
            ranges: self.ranges[start..start + count].to_vec(),
        })
    }
}

/// Spline-interpolates marker tracks to the PRI grid `p * pri_s`, p = 1..=span.
pub fn interpolate_tracks(
    markers: &MarkerTrackSet,
    radar_position: Point3<f64>,
    pri_s: f64,
    span: usize,
) -> Result<PrfTrackSet> {
    if pri_s <= 0.0 {
        return Err(Error::Parameter("PRI must be positive".into()));
    }
    if span == 0 {
        return Err(Error::Parameter("span must be at least one PRI".into()));
    }
    let t_last = span as f64 * pri_s;
    if t_last > markers.duration() {
        return Err(Error::SpanOutOfRange(format!(
            "span of {span} PRIs ends at {t_last:.6} s, tracks end at {:.6} s",
            markers.duration()
        )));
    }
    let times: Vec<f64> = (0..markers.frame_count()).map(|f| markers.timestamp(f)).collect();

    let per_marker: Vec<Result<Vec<Point3<f64>>>> = (0..markers.marker_count())
        .into_par_iter()
        .map(|m| {
            let (xs, ys, zs) = markers.marker_series(m);
            let sx = NaturalCubicSpline::fit(&times, &xs)?;
            let sy = NaturalCubicSpline::fit(&times, &ys)?;
            let sz = NaturalCubicSpline::fit(&times, &zs)?;
            (1..=span)
                .map(|p| {
                    let t = p as f64 * pri_s;
                    Ok(Point3::new(sx.eval(t)?, sy.eval(t)?, sz.eval(t)?))
                })
                .collect()
        })
        .collect();
    let per_marker = per_marker.into_iter().collect::<Result<Vec<_>>>()?;

    let mut positions = vec![Vec::with_capacity(markers.marker_count()); span];
    let mut ranges = vec![Vec::with_capacity(markers.marker_count()); span];
    for track in &per_marker {
        for (p, pos) in track.iter().enumerate() {
            let r = (pos - radar_position).norm();
            if r <= 0.0 {
                return Err(Error::Parameter(format!(
                    "marker coincides with the radar position at PRI {}",
                    p + 1
                )));
            }
            positions[p].push(*pos);
            ranges[p].push(r);
        }
    }
    Ok(PrfTrackSet {
        pri_s,
        radar_position,
        positions,
        ranges,
    })
}

/// Spline-interpolates one RCS series to the PRI grid; negative spline
/// overshoots are clamped to zero.
pub fn interpolate_rcs(series: &RcsSeries, pri_s: f64, span: usize) -> Result<Vec<f64>> {
    if pri_s <= 0.0 {
        return Err(Error::Parameter("PRI must be positive".into()));
    }
    if span == 0 {
        return Err(Error::Parameter("span must be at least one PRI".into()));
    }
    if series.values.len() < 2 {
        return Err(Error::Parameter("RCS series needs at least two frames".into()));
    }
    let duration = (series.values.len() - 1) as f64 / series.frame_rate_hz;
    let t_last = span as f64 * pri_s;
    if t_last > duration {
        return Err(Error::SpanOutOfRange(format!(
            "span of {span} PRIs ends at {t_last:.6} s, series ends at {duration:.6} s"
        )));
    }
    let times: Vec<f64> = (0..series.values.len())
        .map(|f| f as f64 / series.frame_rate_hz)
        .collect();
    let spline = NaturalCubicSpline::fit(&times, &series.values)?;
    (1..=span)
        .map(|p| Ok(spline.eval(p as f64 * pri_s)?.max(0.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markers::MarkerTrackSet;

    fn linear_walker(frames: usize, rate: f64, velocity: f64) -> MarkerTrackSet {
        let positions = (0..frames)
            .map(|f| {
                let t = f as f64 / rate;
                vec![Point3::new(5.0 - velocity * t, 0.0, 1.0)]
            })
            .collect();
        MarkerTrackSet::new(rate, positions).unwrap()
    }

    #[test]
    fn linear_motion_interpolates_exactly() {
        let markers = linear_walker(121, 60.0, 1.0);
        let pri = 61.2e-6;
        let span = 16_000; // ~0.98 s
        let set = interpolate_tracks(&markers, Point3::origin(), pri, span).unwrap();
        assert_eq!(set.pri_count(), span);
        for p in [0usize, 777, 15_999] {
            let t = (p + 1) as f64 * pri;
            let expected = Point3::new(5.0 - t, 0.0, 1.0);
            let got = set.positions(p)[0];
            assert!((got - expected).norm() < 1e-12, "PRI {p}: {got:?}");
            assert!((set.range(p, 0) - expected.coords.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn sinusoidal_track_matches_analytic_oracle() {
        let rate = 60.0;
        let amp = 0.3;
        let hz = 2.0;
        let positions = (0..=120)
            .map(|f| {
                let t = f as f64 / rate;
                vec![Point3::new(
                    4.0 + amp * (2.0 * std::f64::consts::PI * hz * t).sin(),
                    0.0,
                    1.0,
                )]
            })
            .collect();
        let markers = MarkerTrackSet::new(rate, positions).unwrap();
        let pri = 61.2e-6;
        let span = 32_000;
        let set = interpolate_tracks(&markers, Point3::origin(), pri, span).unwrap();
        let mut max_err = 0.0f64;
        for p in 0..span {
            let t = (p + 1) as f64 * pri;
            let exact = 4.0 + amp * (2.0 * std::f64::consts::PI * hz * t).sin();
            max_err = max_err.max((set.positions(p)[0].x - exact).abs());
        }
        assert!(max_err < 1e-4, "max interpolation error {max_err:.2e} m");
    }

    #[test]
    fn span_past_the_data_is_refused() {
        let markers = linear_walker(10, 60.0, 1.0);
        let err = interpolate_tracks(&markers, Point3::origin(), 61.2e-6, 10_000).unwrap_err();
        assert!(matches!(err, Error::SpanOutOfRange(_)), "{err}");
    }

    #[test]
    fn rcs_constant_and_linear_series_reproduce() {
        let constant = RcsSeries {
            frame_rate_hz: 60.0,
            values: vec![2.5; 30],
        };
        let out = interpolate_rcs(&constant, 1e-3, 400).unwrap();
        assert!(out.iter().all(|&v| (v - 2.5).abs() < 1e-12));

        let linear = RcsSeries {
            frame_rate_hz: 60.0,
            values: (0..30).map(|f| 0.1 * f as f64).collect(),
        };
        let out = interpolate_rcs(&linear, 1e-3, 400).unwrap();
        for (p, v) in out.iter().enumerate() {
            let t = (p + 1) as f64 * 1e-3;
            assert!((v - 0.1 * 60.0 * t).abs() < 1e-12, "PRI {p}");
        }
    }

    #[test]
    fn rcs_values_at_source_instants_match_input() {
        let rate = 60.0;
        let series = RcsSeries {
            frame_rate_hz: rate,
            values: (0..40)
                .map(|f| (1.0 + (f as f64 * 0.7).sin()).powi(2))
                .collect(),
        };
        // PRI chosen so every 1000th output lands exactly on a source frame.
        let pri = 1.0 / (rate * 1000.0);
        let out = interpolate_rcs(&series, pri, 30_000).unwrap();
        for f in 1..30 {
            let p_index = f * 1000 - 1; // p = f * 1000 -> t = f / rate
            let err = (out[p_index] - series.values[f]).abs();
            assert!(err < 1e-9, "frame {f}: knot mismatch {err:.2e}");
        }
    }

    #[test]
    fn negative_overshoots_clamp_to_zero() {
        let series = RcsSeries {
            frame_rate_hz: 60.0,
            values: vec![0.0, 0.0, 1.0, 0.0, 0.0],
        };
        let out = interpolate_rcs(&series, 1e-4, 600).unwrap();
        assert!(out.iter().all(|&v| v >= 0.0));
        // The spike must still be there.
        assert!(out.iter().cloned().fold(0.0, f64::max) > 0.5);
    }
}
