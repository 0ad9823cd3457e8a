//! MoCap marker tracks: CSV ingestion and validation.
//!
//! The file starts with a `time` column (seconds) followed by three columns
//! per marker (`m01_x,m01_y,m01_z,...`), meters. Rows must be uniformly
//! spaced in time.

use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};

/// Relative tolerance on frame spacing uniformity.
const SPACING_TOLERANCE: f64 = 1e-6;

/// Time series of B marker positions at video frame rate.
#[derive(Debug, Clone)]
pub struct MarkerTrackSet {
    frame_rate_hz: f64,
    /// `positions[frame][marker]`
    positions: Vec<Vec<Point3<f64>>>,
}

impl MarkerTrackSet {
    pub fn new(frame_rate_hz: f64, positions: Vec<Vec<Point3<f64>>>) -> Result<Self> {
        if frame_rate_hz <= 0.0 {
            return Err(Error::Parameter("frame rate must be positive".into()));
        }
        let marker_count = positions.first().map_or(0, |f| f.len());
        if marker_count == 0 {
            return Err(Error::MarkerFormat("at least one marker required".into()));
        }
        if let Some(bad) = positions.iter().position(|f| f.len() != marker_count) {
            return Err(Error::MarkerFormat(format!(
                "frame {bad} carries {} markers, expected {marker_count}",
                positions[bad].len()
            )));
        }
        Ok(MarkerTrackSet {
            frame_rate_hz,
            positions,
        })
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn frame_count(&self) -> usize {
        self.positions.len()
    }

    pub fn marker_count(&self) -> usize {
        self.positions[0].len()
    }

    pub fn frame(&self, f: usize) -> &[Point3<f64>] {
        &self.positions[f]
    }

    pub fn timestamp(&self, f: usize) -> f64 {
        f as f64 / self.frame_rate_hz
    }

    /// Time of the last frame; interpolation must stay at or below this.
    pub fn duration(&self) -> f64 {
        (self.frame_count() - 1) as f64 / self.frame_rate_hz
    }

    /// Per-marker coordinate series, `(xs, ys, zs)` over frames.
    pub fn marker_series(&self, marker: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(self.frame_count());
        let mut ys = Vec::with_capacity(self.frame_count());
        let mut zs = Vec::with_capacity(self.frame_count());
        for f in &self.positions {
            xs.push(f[marker].x);
            ys.push(f[marker].y);
            zs.push(f[marker].z);
        }
        (xs, ys, zs)
    }
}

/// Loads a marker CSV. The marker count is inferred from the header; frame
/// spacing must be uniform and strictly increasing.
pub fn load_marker_tracks(path: impl AsRef<Path>) -> Result<MarkerTrackSet> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_marker_csv(&text)
}

pub(crate) fn parse_marker_csv(text: &str) -> Result<MarkerTrackSet> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::MarkerFormat("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.first() != Some(&"time") {
        return Err(Error::MarkerFormat(
            "first column must be `time`".into(),
        ));
    }
    if columns.len() < 4 || (columns.len() - 1) % 3 != 0 {
        return Err(Error::MarkerFormat(format!(
            "{} data columns do not form x/y/z triples",
            columns.len() - 1
        )));
    }
    let marker_count = (columns.len() - 1) / 3;

    let mut times: Vec<f64> = Vec::new();
    let mut positions: Vec<Vec<Point3<f64>>> = Vec::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::MarkerFormat(format!(
                "line {}: {} fields, expected {}",
                lineno + 1,
                fields.len(),
                columns.len()
            )));
        }
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            values.push(f.parse::<f64>().map_err(|_| {
                Error::MarkerFormat(format!("line {}: bad number `{f}`", lineno + 1))
            })?);
        }
        times.push(values[0]);
        positions.push(
            (0..marker_count)
                .map(|m| Point3::new(values[1 + 3 * m], values[2 + 3 * m], values[3 + 3 * m]))
                .collect(),
        );
    }
    if times.len() < 2 {
        return Err(Error::MarkerFormat(
            "at least two frames required".into(),
        ));
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err(Error::MarkerOrdering(format!(
            "frames 0 and 1 are {dt} s apart"
        )));
    }
    for w in times.windows(2) {
        let step = w[1] - w[0];
        if step <= 0.0 {
            return Err(Error::MarkerOrdering(format!(
                "timestamp {} does not increase past {}",
                w[1], w[0]
            )));
        }
        if (step - dt).abs() > SPACING_TOLERANCE * dt {
            return Err(Error::MarkerFormat(format!(
                "non-uniform frame spacing: {step} s vs {dt} s"
            )));
        }
    }
    MarkerTrackSet::new(1.0 / dt, positions)
}
