//! Range-time, Doppler-time and range-Doppler signatures of a data cube.
//!
//! Every transform is a windowed DFT with zero-centered bin ordering
//! (indices -N/2 .. N/2-1 after the shift) and is normalized by the window's
//! coherent gain, so an isolated unit scatterer peaks at its reflectivity
//! magnitude and the dB values read as dBsm. Values are floored at -300 dB
//! internally; display thresholds (e.g. -40 dBsm) are applied only on export.

use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::radar::RadarDataCube;

/// Magic bytes of the real-valued binary matrix format.
pub const SIGNATURE_MAGIC: &[u8; 4] = b"SIG1";

/// Amplitude floor corresponding to -300 dB.
const AMPLITUDE_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rect,
    Hann,
    Hamming,
    Blackman,
}

impl Window {
    pub fn name(&self) -> &'static str {
        match self {
            Window::Rect => "rect",
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Blackman => "blackman",
        }
    }

    /// Symmetric window coefficients.
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        if len <= 1 {
            return vec![1.0; len];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|i| {
                let x = i as f64 / denom;
                match self {
                    Window::Rect => 1.0,
                    Window::Hann => 0.5 - 0.5 * (2.0 * std::f64::consts::PI * x).cos(),
                    Window::Hamming => 0.54 - 0.46 * (2.0 * std::f64::consts::PI * x).cos(),
                    Window::Blackman => {
                        0.42 - 0.5 * (2.0 * std::f64::consts::PI * x).cos()
                            + 0.08 * (4.0 * std::f64::consts::PI * x).cos()
                    }
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rect" | "rectangular" => Ok(Window::Rect),
            "hann" => Ok(Window::Hann),
            "hamming" => Ok(Window::Hamming),
            "blackman" => Ok(Window::Blackman),
            other => Err(Error::Parameter(format!("unknown window `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureKind {
    RangeTime,
    DopplerTime,
    RangeDoppler,
}

impl SignatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignatureKind::RangeTime => "range_time",
            SignatureKind::DopplerTime => "doppler_time",
            SignatureKind::RangeDoppler => "range_doppler",
        }
    }
}

/// Uniform axis annotation: the value of row/column `i` is `start + i * step`.
#[derive(Debug, Clone, Copy)]
pub struct AxisScale {
    pub label: &'static str,
    pub start: f64,
    pub step: f64,
}

/// A real dB-valued signature with axis annotations.
#[derive(Debug, Clone)]
pub struct SignatureMatrix {
    pub kind: SignatureKind,
    pub values_db: DMatrix<f64>,
    pub row_axis: AxisScale,
    pub col_axis: AxisScale,
    pub window: Window,
}

impl SignatureMatrix {
    pub fn rows(&self) -> usize {
        self.values_db.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values_db.ncols()
    }

    /// Copy with every value below `floor_db` clamped to it.
    pub fn floored(&self, floor_db: f64) -> SignatureMatrix {
        let mut out = self.clone();
        for v in out.values_db.iter_mut() {
            if *v < floor_db {
                *v = floor_db;
            }
        }
        out
    }

    /// Element-wise `10^(v/10)` linear power.
    pub fn to_linear_power(&self) -> DMatrix<f64> {
        self.values_db.map(|v| 10f64.powf(v / 10.0))
    }

    /// `(row, col)` of the maximum value.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = f64::NEG_INFINITY;
        for c in 0..self.cols() {
            for r in 0..self.rows() {
                let v = self.values_db[(r, c)];
                if v > best_v {
                    best_v = v;
                    best = (r, c);
                }
            }
        }
        best
    }

    /// Writes `# key=value` comment headers followed by one CSV row per
    /// matrix row, values in dB with fixed formatting.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        writeln!(
            out,
            "# kind={} rows={} cols={} window={}",
            self.kind.name(),
            self.rows(),
            self.cols(),
            self.window.name()
        )
        .unwrap();
        writeln!(
            out,
            "# row_axis={} start={:.9e} step={:.9e}",
            self.row_axis.label, self.row_axis.start, self.row_axis.step
        )
        .unwrap();
        writeln!(
            out,
            "# col_axis={} start={:.9e} step={:.9e}",
            self.col_axis.label, self.col_axis.start, self.col_axis.step
        )
        .unwrap();
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                if c > 0 {
                    out.push(',');
                }
                write!(out, "{:.6e}", self.values_db[(r, c)]).unwrap();
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Binary export: 16-byte header (magic `SIG1`, rows, cols as
    /// little-endian u32, reserved u32), then row-major little-endian f32.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::with_capacity(16 + self.rows() * self.cols() * 4);
        buf.extend_from_slice(SIGNATURE_MAGIC);
        buf.extend_from_slice(&(self.rows() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.cols() as u32).to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                buf.extend_from_slice(&(self.values_db[(r, c)] as f32).to_le_bytes());
            }
        }
        let mut file =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        file.write_all(&buf)
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Reads the `SIG1` binary payload back as a bare dB matrix.
    pub fn read_binary_values(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let mut file = std::fs::File::open(path).map_err(|e| Error::io(display.clone(), e))?;
        let mut header = [0u8; 16];
        file.read_exact(&mut header)
            .map_err(|e| Error::io(display.clone(), e))?;
        if &header[0..4] != SIGNATURE_MAGIC {
            return Err(Error::BinaryFormat {
                path: display,
                message: "bad magic, expected SIG1".into(),
            });
        }
        let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let mut payload = Vec::new();
        file.read_to_end(&mut payload)
            .map_err(|e| Error::io(display.clone(), e))?;
        if payload.len() != rows * cols * 4 {
            return Err(Error::BinaryFormat {
                path: display,
                message: format!("payload does not match {rows} x {cols} f32"),
            });
        }
        Ok(DMatrix::from_fn(rows, cols, |r, c| {
            let at = (r * cols + c) * 4;
            f32::from_le_bytes(payload[at..at + 4].try_into().unwrap()) as f64
        }))
    }

    /// 8-bit binary PGM heatmap mapping [floor_db, max] to [0, 255], plus a
    /// text sidecar (`<path>.axes.txt`) with the axis metadata.
    pub fn write_pgm(&self, path: impl AsRef<Path>, floor_db: f64) -> Result<()> {
        let path = path.as_ref();
        let max_db = self
            .values_db
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .max(floor_db + 1e-9);
        let span = max_db - floor_db;
        let mut buf = format!("P5\n{} {}\n255\n", self.cols(), self.rows()).into_bytes();
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let v = (self.values_db[(r, c)] - floor_db) / span;
                buf.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))?;

        let sidecar = format!("{}.axes.txt", path.display());
        let mut meta = String::new();
        writeln!(meta, "kind: {}", self.kind.name()).unwrap();
        writeln!(meta, "rows: {}", self.rows()).unwrap();
        writeln!(meta, "cols: {}", self.cols()).unwrap();
        writeln!(
            meta,
            "row_axis: {} start={:.9e} step={:.9e}",
            self.row_axis.label, self.row_axis.start, self.row_axis.step
        )
        .unwrap();
        writeln!(
            meta,
            "col_axis: {} start={:.9e} step={:.9e}",
            self.col_axis.label, self.col_axis.start, self.col_axis.step
        )
        .unwrap();
        writeln!(meta, "floor_db: {floor_db:.6e}").unwrap();
        writeln!(meta, "max_db: {max_db:.6e}").unwrap();
        writeln!(meta, "window: {}", self.window.name()).unwrap();
        std::fs::write(&sidecar, meta).map_err(|e| Error::io(sidecar, e))
    }
}

/// Windowed DFT of one snapshot, zero-centered bins, coherent-gain
/// normalized, and converted to dB amplitudes.
fn windowed_db_spectrum(
    signal: &[Complex64],
    coeffs: &[f64],
    fft: &dyn rustfft::Fft<f64>,
) -> Vec<f64> {
    let (spectrum, gain) = windowed_spectrum(signal, coeffs, fft);
    let n = spectrum.len();
    let mut out = vec![0.0; n];
    for (i, value) in spectrum.iter().enumerate() {
        let shifted = (i + n / 2) % n; // bin -N/2 lands on row 0
        out[shifted] = 20.0 * (value.norm() / gain).max(AMPLITUDE_FLOOR).log10();
    }
    out
}

/// Raw windowed DFT (natural bin order) and the window's coherent gain.
pub(crate) fn windowed_spectrum(
    signal: &[Complex64],
    coeffs: &[f64],
    fft: &dyn rustfft::Fft<f64>,
) -> (Vec<Complex64>, f64) {
    let mut buffer: Vec<Complex64> = signal
        .iter()
        .zip(coeffs)
        .map(|(s, w)| s * w)
        .collect();
    fft.process(&mut buffer);
    (buffer, coeffs.iter().sum())
}

/// Range-time signature: per-PRI windowed transform along fast time.
pub fn range_time(cube: &RadarDataCube, window: Window) -> Result<SignatureMatrix> {
    let n = cube.fast_len();
    let coeffs = window.coefficients(n);
    let fft = FftPlanner::new().plan_fft_forward(n);
    let columns: Vec<Vec<f64>> = (0..cube.slow_len())
        .into_par_iter()
        .map(|p| windowed_db_spectrum(cube.column(p), &coeffs, fft.as_ref()))
        .collect();
    let values_db = DMatrix::from_fn(n, cube.slow_len(), |r, c| columns[c][r]);
    let dr = cube.params.range_resolution();
    Ok(SignatureMatrix {
        kind: SignatureKind::RangeTime,
        values_db,
        row_axis: AxisScale {
            label: "range_m",
            start: -((n / 2) as f64) * dr,
            step: dr,
        },
        col_axis: AxisScale {
            label: "time_s",
            start: cube.params.pri_s,
            step: cube.params.pri_s,
        },
        window,
    })
}

/// Doppler-time signature: per-CPI windowed transform of the first fast-time
/// sample along slow time (taken literally; no range gating).
pub fn doppler_time(cube: &RadarDataCube, window: Window) -> Result<SignatureMatrix> {
    let p_len = cube.params.chirps_per_cpi;
    if cube.slow_len() < p_len {
        return Err(Error::SpanOutOfRange(format!(
            "cube holds {} PRIs, one CPI needs {p_len}",
            cube.slow_len()
        )));
    }
    let cpis = cube.slow_len() / p_len;
    let coeffs = window.coefficients(p_len);
    let fft = FftPlanner::new().plan_fft_forward(p_len);
    let columns: Vec<Vec<f64>> = (0..cpis)
        .into_par_iter()
        .map(|l| {
            let slow: Vec<Complex64> = (0..p_len)
                .map(|i| cube.get(0, l * p_len + i))
                .collect();
            windowed_db_spectrum(&slow, &coeffs, fft.as_ref())
        })
        .collect();
    let values_db = DMatrix::from_fn(p_len, cpis, |r, c| columns[c][r]);
    let dfd = cube.params.doppler_resolution();
    let cpi_duration = p_len as f64 * cube.params.pri_s;
    Ok(SignatureMatrix {
        kind: SignatureKind::DopplerTime,
        values_db,
        row_axis: AxisScale {
            label: "doppler_hz",
            start: -((p_len / 2) as f64) * dfd,
            step: dfd,
        },
        col_axis: AxisScale {
            label: "time_s",
            start: 0.5 * cpi_duration,
            step: cpi_duration,
        },
        window,
    })
}

/// Range-Doppler map of one CPI (1-based `cpi_index`), separable 2-D window.
pub fn range_doppler(
    cube: &RadarDataCube,
    cpi_index: usize,
    window: Window,
) -> Result<SignatureMatrix> {
    let n = cube.fast_len();
    let p_len = cube.params.chirps_per_cpi;
    let cpis = cube.slow_len() / p_len;
    if cpi_index < 1 || cpi_index > cpis {
        return Err(Error::Parameter(format!(
            "CPI index {cpi_index} outside 1..={cpis}"
        )));
    }
    let fast_coeffs = window.coefficients(n);
    let slow_coeffs = window.coefficients(p_len);
    let fast_fft = FftPlanner::new().plan_fft_forward(n);
    let slow_fft = FftPlanner::new().plan_fft_forward(p_len);

    // Fast-time transforms of the CPI block, slow-time window applied as a
    // per-column weight (separable 2-D window).
    let start = (cpi_index - 1) * p_len;
    let stage1: Vec<Vec<Complex64>> = (0..p_len)
        .into_par_iter()
        .map(|j| {
            let mut buffer: Vec<Complex64> = cube
                .column(start + j)
                .iter()
                .zip(&fast_coeffs)
                .map(|(s, w)| s * w * slow_coeffs[j])
                .collect();
            fast_fft.process(&mut buffer);
            buffer
        })
        .collect();

    let gain = fast_coeffs.iter().sum::<f64>() * slow_coeffs.iter().sum::<f64>();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|g| {
            let mut slow: Vec<Complex64> = (0..p_len).map(|j| stage1[j][g]).collect();
            slow_fft.process(&mut slow);
            let mut out = vec![0.0; p_len];
            for (d, value) in slow.iter().enumerate() {
                let shifted = (d + p_len / 2) % p_len;
                out[shifted] = 20.0 * (value.norm() / gain).max(AMPLITUDE_FLOOR).log10();
            }
            out
        })
        .collect();
    // Shift the range axis as well.
    let values_db = DMatrix::from_fn(n, p_len, |r, c| {
        let g = (r + n / 2) % n;
        rows[g][c]
    });
    let dr = cube.params.range_resolution();
    let dfd = cube.params.doppler_resolution();
    Ok(SignatureMatrix {
        kind: SignatureKind::RangeDoppler,
        values_db,
        row_axis: AxisScale {
            label: "range_m",
            start: -((n / 2) as f64) * dr,
            step: dr,
        },
        col_axis: AxisScale {
            label: "doppler_hz",
            start: -((p_len / 2) as f64) * dfd,
            step: dfd,
        },
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::ScattererSet;
    use crate::kinematics::PrfTrackSet;
    use crate::radar::{synthesize_cube, RadarParams};
    use crate::SPEED_OF_LIGHT;
    use nalgebra::Point3;

    fn params(chirps: usize, cpis: usize) -> RadarParams {
        RadarParams::derive(77e9, 2e9, 10e6, 51.2e-6, 61.2e-6, chirps, cpis).unwrap()
    }

    fn scatterers(targets: &[(f64, f64, Complex64)], params: &RadarParams) -> ScattererSet {
        let lp = params.block_pris();
        let positions: Vec<Vec<Point3<f64>>> = (0..lp)
            .map(|p| {
                let t = (p + 1) as f64 * params.pri_s;
                targets
                    .iter()
                    .map(|&(r0, v, _)| Point3::new(r0 + v * t, 0.0, 0.0))
                    .collect()
            })
            .collect();
        ScattererSet {
            reflectivities: targets.iter().map(|&(_, _, a)| a).collect(),
            tracks: PrfTrackSet::from_positions(params.pri_s, Point3::origin(), positions)
                .unwrap(),
            residual: 0.0,
            valid_span: (0, lp),
        }
    }

    fn range_row(matrix: &SignatureMatrix, bin: i64) -> usize {
        ((bin as f64 - matrix.row_axis.start / matrix.row_axis.step).round()) as usize
    }

    #[test]
    fn static_scatterer_ridge_at_bin_50() {
        let params = params(32, 1);
        let set = scatterers(&[(3.75, 0.0, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let rt = range_time(&cube, Window::Hann).unwrap();
        assert_eq!(rt.rows(), 512);
        assert_eq!(rt.cols(), 32);
        let expected_row = range_row(&rt, 50);
        for p in 0..rt.cols() {
            let peak = (0..rt.rows())
                .max_by(|&a, &b| rt.values_db[(a, p)].partial_cmp(&rt.values_db[(b, p)]).unwrap())
                .unwrap();
            assert_eq!(peak, expected_row, "PRI {p}");
        }
    }

    #[test]
    fn zero_cube_sits_on_the_floor() {
        let params = params(8, 1);
        let cube = crate::radar::RadarDataCube::zeroed(params);
        let rt = range_time(&cube, Window::Hann).unwrap();
        assert!(rt.values_db.iter().all(|&v| (v + 300.0).abs() < 1e-9));
    }

    #[test]
    fn adjacent_scatterers_resolve_under_rect_but_merge_under_blackman() {
        let params = params(4, 1);
        let dr = params.range_resolution();
        let set = scatterers(
            &[
                (50.0 * dr, 0.0, Complex64::new(1.0, 0.0)),
                (51.0 * dr, 0.0, Complex64::new(1.0, 0.0)),
            ],
            &params,
        );
        let cube = synthesize_cube(&set, &params).unwrap();
        // Isolation margin: how far the occupied bin pair rises above its
        // immediate neighbors. Exact-bin tones under a rect window have
        // Dirichlet zeros outside, so the margin is enormous; the wide
        // Blackman mainlobe leaves shoulders only a few dB down.
        let isolation = |m: &SignatureMatrix| {
            let (a, b) = (range_row(m, 50), range_row(m, 51));
            let col = 0;
            let inside = m.values_db[(a, col)].min(m.values_db[(b, col)]);
            let outside = m.values_db[(a - 1, col)].max(m.values_db[(b + 1, col)]);
            inside - outside
        };
        let rect = range_time(&cube, Window::Rect).unwrap();
        let blackman = range_time(&cube, Window::Blackman).unwrap();
        assert!(
            isolation(&rect) > 100.0,
            "rect window should isolate adjacent bins, margin {:.1} dB",
            isolation(&rect)
        );
        assert!(
            isolation(&blackman) < 12.0,
            "blackman window should smear adjacent bins, margin {:.1} dB",
            isolation(&blackman)
        );
    }

    #[test]
    fn doppler_time_needs_a_full_cpi() {
        let params = RadarParams::derive(77e9, 2e9, 10e6, 51.2e-6, 61.2e-6, 64, 1).unwrap();
        // Hand a shorter cube to the transform.
        let truncated = crate::radar::RadarDataCube::from_parts(
            params,
            512,
            16,
            vec![Complex64::default(); 512 * 16],
        )
        .unwrap();
        assert!(matches!(
            doppler_time(&truncated, Window::Hann),
            Err(Error::SpanOutOfRange(_))
        ));
    }

    #[test]
    fn doppler_peak_matches_closing_speed() {
        let params = params(1024, 1);
        let set = scatterers(&[(5.0, -1.5, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let dt = doppler_time(&cube, Window::Hann).unwrap();
        assert_eq!(dt.rows(), 1024);
        assert_eq!(dt.cols(), 1);
        let peak = (0..dt.rows())
            .max_by(|&a, &b| dt.values_db[(a, 0)].partial_cmp(&dt.values_db[(b, 0)]).unwrap())
            .unwrap();
        let doppler_hz = 2.0 * 1.5 * params.carrier_hz / SPEED_OF_LIGHT;
        let expected_bin = (doppler_hz / params.doppler_resolution()).round() as i64;
        let expected_row =
            ((expected_bin as f64) - dt.row_axis.start / dt.row_axis.step).round() as usize;
        assert!(
            (peak as i64 - expected_row as i64).abs() <= 1,
            "Doppler peak row {peak} vs oracle {expected_row}"
        );
    }

    #[test]
    fn static_and_receding_scatterers_mirror_in_doppler() {
        let params = params(256, 1);
        let still = scatterers(&[(4.0, 0.0, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&still, &params).unwrap();
        let dt = doppler_time(&cube, Window::Hann).unwrap();
        let peak = (0..dt.rows())
            .max_by(|&a, &b| dt.values_db[(a, 0)].partial_cmp(&dt.values_db[(b, 0)]).unwrap())
            .unwrap();
        let zero_row = (-dt.row_axis.start / dt.row_axis.step).round() as usize;
        assert_eq!(peak, zero_row, "static scatterer must sit at zero Doppler");

        let closing = scatterers(&[(4.0, -0.8, Complex64::new(1.0, 0.0))], &params);
        let receding = scatterers(&[(4.0, 0.8, Complex64::new(1.0, 0.0))], &params);
        let dt_c = doppler_time(&synthesize_cube(&closing, &params).unwrap(), Window::Hann).unwrap();
        let dt_r = doppler_time(&synthesize_cube(&receding, &params).unwrap(), Window::Hann).unwrap();
        let peak_of = |m: &SignatureMatrix| {
            (0..m.rows())
                .max_by(|&a, &b| m.values_db[(a, 0)].partial_cmp(&m.values_db[(b, 0)]).unwrap())
                .unwrap() as i64
                - zero_row as i64
        };
        assert_eq!(peak_of(&dt_c), -peak_of(&dt_r), "Doppler sign symmetry");
        assert!(peak_of(&dt_c) > 0, "closing target must be positive Doppler");
    }

    #[test]
    fn range_doppler_joint_peak() {
        let params = params(1024, 1);
        let set = scatterers(&[(3.75, -1.5, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let rd = range_doppler(&cube, 1, Window::Hann).unwrap();
        let (peak_row, peak_col) = rd.argmax();
        let expected_row = range_row(&rd, 50);
        let doppler_hz = 2.0 * 1.5 * params.carrier_hz / SPEED_OF_LIGHT;
        let expected_col = ((doppler_hz / params.doppler_resolution())
            - rd.col_axis.start / rd.col_axis.step)
            .round() as usize;
        // The scatterer closes ~0.09 m over the 63 ms CPI, so the joint peak
        // sits at the CPI-mean range, within one bin of the start range.
        assert!((peak_row as i64 - expected_row as i64).abs() <= 1);
        assert!((peak_col as i64 - expected_col as i64).abs() <= 1);
        assert!(range_doppler(&cube, 2, Window::Hann).is_err(), "only one CPI");
    }

    #[test]
    fn two_scatterers_same_range_mirror_in_range_doppler() {
        let params = params(512, 1);
        let set = scatterers(
            &[
                (4.0, -1.0, Complex64::new(1.0, 0.0)),
                (4.0, 1.0, Complex64::new(1.0, 0.0)),
            ],
            &params,
        );
        let cube = synthesize_cube(&set, &params).unwrap();
        let rd = range_doppler(&cube, 1, Window::Hann).unwrap();
        let zero_col = (-rd.col_axis.start / rd.col_axis.step).round() as usize;
        let range_row = rd.argmax().0;
        // Find the two strongest Doppler columns on the peak range row.
        let mut cols: Vec<(usize, f64)> = (0..rd.cols())
            .map(|c| (c, rd.values_db[(range_row, c)]))
            .collect();
        cols.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let (c1, c2) = (cols[0].0 as i64, cols[1].0 as i64);
        assert_eq!(
            c1 - zero_col as i64,
            -(c2 - zero_col as i64),
            "peaks must mirror around zero Doppler"
        );
    }

    #[test]
    fn parseval_holds_per_transform() {
        let params = params(64, 1);
        let set = scatterers(&[(3.2, -1.1, Complex64::new(0.8, 0.3))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let n = cube.fast_len();
        let coeffs = Window::Hann.coefficients(n);
        let fft = FftPlanner::new().plan_fft_forward(n);
        for p in [0usize, 17, 63] {
            let (spectrum, _) = windowed_spectrum(cube.column(p), &coeffs, fft.as_ref());
            let lhs: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
            let rhs: f64 = cube
                .column(p)
                .iter()
                .zip(&coeffs)
                .map(|(s, w)| (s * w).norm_sqr())
                .sum::<f64>()
                * n as f64;
            assert!(
                (lhs - rhs).abs() <= 1e-9 * rhs.max(1e-300),
                "PRI {p}: Parseval violated ({lhs} vs {rhs})"
            );
        }
    }

    #[test]
    fn peak_bin_is_window_invariant_for_isolated_scatterers() {
        let params = params(16, 1);
        let dr = params.range_resolution();
        let set = scatterers(
            &[
                (40.0 * dr, 0.0, Complex64::new(1.0, 0.0)),
                (70.0 * dr, 0.0, Complex64::new(0.5, 0.0)),
            ],
            &params,
        );
        let cube = synthesize_cube(&set, &params).unwrap();
        let mut peaks = Vec::new();
        for window in [Window::Rect, Window::Hann, Window::Hamming, Window::Blackman] {
            let rt = range_time(&cube, window).unwrap();
            let peak = (0..rt.rows())
                .max_by(|&a, &b| rt.values_db[(a, 0)].partial_cmp(&rt.values_db[(b, 0)]).unwrap())
                .unwrap();
            peaks.push(peak);
        }
        assert!(peaks.windows(2).all(|w| w[0] == w[1]), "peaks moved: {peaks:?}");
    }

    #[test]
    fn marginals_agree_with_joint_map() {
        let params = params(1024, 1);
        let set = scatterers(&[(6.0, -2.0, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let rt = range_time(&cube, Window::Hann).unwrap();
        let dt = doppler_time(&cube, Window::Hann).unwrap();
        let rd = range_doppler(&cube, 1, Window::Hann).unwrap();
        let (rd_row, rd_col) = rd.argmax();
        // Compare against the range-time column at the CPI center; the joint
        // map integrates the whole CPI, so its range centroid sits there.
        let mid = rt.cols() / 2;
        let rt_peak = (0..rt.rows())
            .max_by(|&a, &b| {
                rt.values_db[(a, mid)].partial_cmp(&rt.values_db[(b, mid)]).unwrap()
            })
            .unwrap();
        let dt_peak = (0..dt.rows())
            .max_by(|&a, &b| dt.values_db[(a, 0)].partial_cmp(&dt.values_db[(b, 0)]).unwrap())
            .unwrap();
        assert!((rd_row as i64 - rt_peak as i64).abs() <= 1, "range marginal");
        assert!((rd_col as i64 - dt_peak as i64).abs() <= 1, "Doppler marginal");
    }

    #[test]
    fn unknown_window_name_is_a_config_error() {
        assert!(matches!(
            "kaiser".parse::<Window>().unwrap_err(),
            Error::Parameter(_)
        ));
    }

    #[test]
    fn exports_round_trip_and_are_deterministic() {
        let params = params(8, 1);
        let set = scatterers(&[(3.75, 0.0, Complex64::new(1.0, 0.0))], &params);
        let cube = synthesize_cube(&set, &params).unwrap();
        let rt = range_time(&cube, Window::Hann).unwrap();
        let dir = tempfile::tempdir().unwrap();

        let bin_path = dir.path().join("rt.sig");
        rt.write_binary(&bin_path).unwrap();
        let values = SignatureMatrix::read_binary_values(&bin_path).unwrap();
        assert_eq!(values.nrows(), rt.rows());
        for (a, b) in rt.values_db.iter().zip(values.iter()) {
            assert!((a - b).abs() < 1e-4, "f32 round trip");
        }

        let csv_a = dir.path().join("a.csv");
        let csv_b = dir.path().join("b.csv");
        rt.write_csv(&csv_a).unwrap();
        rt.write_csv(&csv_b).unwrap();
        assert_eq!(std::fs::read(&csv_a).unwrap(), std::fs::read(&csv_b).unwrap());

        let pgm = dir.path().join("rt.pgm");
        rt.write_pgm(&pgm, -40.0).unwrap();
        let bytes = std::fs::read(&pgm).unwrap();
        assert!(bytes.starts_with(b"P5\n8 512\n255\n"));
        assert!(std::fs::read_to_string(format!("{}.axes.txt", pgm.display()))
            .unwrap()
            .contains("range_m"));
    }
}
