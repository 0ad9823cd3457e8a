//! FMCW waveform parameters and synthesis of the received data cube.
//!
//! The cube entry for fast-time sample n (1-based, tau = n Ts) of PRI p is the
//! dechirped beat signal of every scatterer:
//!
//! ```text
//!   Y[n,p] = sum_b a_b rect_b[n,p]
//!            exp(-j 2 pi f_c d) exp(+j 2 pi gamma n Ts d) exp(-j pi gamma d^2)
//! ```
//!
//! with `d = 2 r_b[p] / c` the round-trip delay. `rect_b` zeroes samples taken
//! before the delayed chirp arrives (`n Ts >= d`); the fast-time Fourier
//! transform then peaks at range bin `r / (c / 2 BW)`. The residual video
//! phase term is retained. Only the N upchirp samples are stored per PRI, the
//! dead time carries none.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimation::ScattererSet;
use crate::SPEED_OF_LIGHT;

/// Magic bytes of the binary cube format.
pub const CUBE_MAGIC: &[u8; 4] = b"RDC1";

/// FMCW radar configuration. Only primary quantities are stored; resolutions
/// and sample counts are always recomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarParams {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub sampling_hz: f64,
    pub upchirp_s: f64,
    pub pri_s: f64,
    /// Chirps per coherent processing interval (P).
    pub chirps_per_cpi: usize,
    /// CPIs per reflectivity block (L).
    pub cpis_per_block: usize,
}

impl RadarParams {
    /// Validates and returns the configuration.
    pub fn derive(
        carrier_hz: f64,
        bandwidth_hz: f64,
        sampling_hz: f64,
        upchirp_s: f64,
        pri_s: f64,
        chirps_per_cpi: usize,
        cpis_per_block: usize,
    ) -> Result<Self> {
        for (name, v) in [
            ("carrier", carrier_hz),
            ("bandwidth", bandwidth_hz),
            ("sampling frequency", sampling_hz),
            ("upchirp duration", upchirp_s),
            ("PRI", pri_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive")));
            }
        }
        if upchirp_s > pri_s {
            return Err(Error::Parameter(format!(
                "upchirp {upchirp_s} s exceeds the PRI {pri_s} s"
            )));
        }
        if chirps_per_cpi < 1 || cpis_per_block < 1 {
            return Err(Error::Parameter(
                "chirps per CPI and CPIs per block must be at least 1".into(),
            ));
        }
        let params = RadarParams {
            carrier_hz,
            bandwidth_hz,
            sampling_hz,
            upchirp_s,
            pri_s,
            chirps_per_cpi,
            cpis_per_block,
        };
        if params.fast_time_samples() < 2 {
            return Err(Error::Parameter(
                "fewer than 2 fast-time samples per upchirp".into(),
            ));
        }
        Ok(params)
    }

    /// 77 GHz automotive preset (2 GHz sweep, 61.2 us PRI, 1024-chirp CPI).
    pub fn automotive_77ghz() -> Self {
        RadarParams::derive(77e9, 2e9, 10e6, 51.2e-6, 61.2e-6, 1024, 2).expect("preset is valid")
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sampling_hz
    }

    /// Chirp rate, Hz/s.
    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth_hz / self.upchirp_s
    }

    /// Fast-time samples per upchirp (N).
    pub fn fast_time_samples(&self) -> usize {
        (self.sampling_hz * self.upchirp_s).round() as usize
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Range resolution c / (2 BW), meters.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz)
    }

    /// Doppler resolution 1 / (P T_PRI), Hz.
    pub fn doppler_resolution(&self) -> f64 {
        1.0 / (self.chirps_per_cpi as f64 * self.pri_s)
    }

    /// PRIs per reflectivity block (LP).
    pub fn block_pris(&self) -> usize {
        self.chirps_per_cpi * self.cpis_per_block
    }

    /// Duration of one reflectivity block, seconds.
    pub fn block_duration(&self) -> f64 {
        self.block_pris() as f64 * self.pri_s
    }

    /// Unambiguous range N * delta_r, meters.
    pub fn unambiguous_range(&self) -> f64 {
        self.fast_time_samples() as f64 * self.range_resolution()
    }
}

/// Complex fast-time x slow-time matrix for one block.
#[derive(Debug, Clone)]
pub struct RadarDataCube {
    pub params: RadarParams,
    n_fast: usize,
    n_slow: usize,
    /// Column-major: the N fast-time samples of each PRI are contiguous.
    samples: Vec<Complex64>,
}

impl RadarDataCube {
    pub fn zeroed(params: RadarParams) -> Self {
        let n_fast = params.fast_time_samples();
        let n_slow = params.block_pris();
        RadarDataCube {
            params,
            n_fast,
            n_slow,
            samples: vec![Complex64::default(); n_fast * n_slow],
        }
    }

    pub fn from_parts(params: RadarParams, n_fast: usize, n_slow: usize, samples: Vec<Complex64>) -> Result<Self> {
        if n_fast != params.fast_time_samples() || samples.len() != n_fast * n_slow {
            return Err(Error::ShapeMismatch(format!(
                "cube {n_fast} x {n_slow} with {} samples does not match the configuration (N = {})",
                samples.len(),
                params.fast_time_samples()
            )));
        }
        Ok(RadarDataCube {
            params,
            n_fast,
            n_slow,
            samples,
        })
    }

    /// Fast-time sample count (N).
    pub fn fast_len(&self) -> usize {
        self.n_fast
    }

    /// Slow-time sample count (LP).
    pub fn slow_len(&self) -> usize {
        self.n_slow
    }

    /// `(n, p)` indexing, 0-based.
    pub fn get(&self, n: usize, p: usize) -> Complex64 {
        self.samples[p * self.n_fast + n]
    }

    pub fn column(&self, p: usize) -> &[Complex64] {
        &self.samples[p * self.n_fast..(p + 1) * self.n_fast]
    }

    pub fn column_mut(&mut self, p: usize) -> &mut [Complex64] {
        &mut self.samples[p * self.n_fast..(p + 1) * self.n_fast]
    }

    /// Writes the binary format: 16-byte header (magic `RDC1`, N, LP as
    /// little-endian u32, reserved u32) then row-major (fast-time major)
    /// complex64 pairs of little-endian f32, real then imaginary.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf =
            Vec::with_capacity(16 + self.n_fast * self.n_slow * 8);
        buf.extend_from_slice(CUBE_MAGIC);
        buf.extend_from_slice(&(self.n_fast as u32).to_le_bytes());
        buf.extend_from_slice(&(self.n_slow as u32).to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        for n in 0..self.n_fast {
            for p in 0..self.n_slow {
                let v = self.get(n, p);
                buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                buf.extend_from_slice(&(v.im as f32).to_le_bytes());
            }
        }
        let mut file =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        file.write_all(&buf)
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Reads the binary format and attaches the given parameters.
    pub fn read_binary(path: impl AsRef<Path>, params: RadarParams) -> Result<Self> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let mut file = std::fs::File::open(path).map_err(|e| Error::io(display.clone(), e))?;
        let mut header = [0u8; 16];
        file.read_exact(&mut header)
            .map_err(|e| Error::io(display.clone(), e))?;
        if &header[0..4] != CUBE_MAGIC {
            return Err(Error::BinaryFormat {
                path: display,
                message: "bad magic, expected RDC1".into(),
            });
        }
        let n_fast = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let n_slow = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let mut payload = Vec::new();
        file.read_to_end(&mut payload)
            .map_err(|e| Error::io(display.clone(), e))?;
        if payload.len() != n_fast * n_slow * 8 {
            return Err(Error::BinaryFormat {
                path: display,
                message: format!(
                    "payload of {} bytes does not match {n_fast} x {n_slow} complex64",
                    payload.len()
                ),
            });
        }
        let mut samples = vec![Complex64::default(); n_fast * n_slow];
        for n in 0..n_fast {
            for p in 0..n_slow {
                let at = (n * n_slow + p) * 8;
                let re = f32::from_le_bytes(payload[at..at + 4].try_into().unwrap());
                let im = f32::from_le_bytes(payload[at + 4..at + 8].try_into().unwrap());
                samples[p * n_fast + n] = Complex64::new(re as f64, im as f64);
            }
        }
        RadarDataCube::from_parts(params, n_fast, n_slow, samples)
    }
}

/// Synthesizes the received cube for one block from solved scatterers.
///
/// Columns are independent and evaluated in parallel; the output is
/// deterministic for any worker count. Scatterers beyond the unambiguous
/// range are kept (their beat frequency aliases) and counted in a warning.
pub fn synthesize_cube(scatterers: &ScattererSet, params: &RadarParams) -> Result<RadarDataCube> {
    let lp = params.block_pris();
    if scatterers.tracks.pri_count() < lp {
        return Err(Error::SpanOutOfRange(format!(
            "block needs {lp} PRIs of tracks, {} available",
            scatterers.tracks.pri_count()
        )));
    }
    if scatterers.reflectivities.len() != scatterers.tracks.marker_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} reflectivities for {} markers",
            scatterers.reflectivities.len(),
            scatterers.tracks.marker_count()
        )));
    }
    let n_fast = params.fast_time_samples();
    let ts = params.sample_period();
    let chirp_rate = params.chirp_rate();
    let carrier = params.carrier_hz;
    let r_max = params.unambiguous_range();

    let mut cube = RadarDataCube::zeroed(*params);
    let aliased: u64 = {
        let n_total = cube.n_fast;
        cube.samples
            .par_chunks_mut(n_total)
            .enumerate()
            .map(|(p, column)| {
                let mut aliased = 0u64;
                for (b, &amplitude) in scatterers.reflectivities.iter().enumerate() {
                    let range = scatterers.tracks.range(p, b);
                    if range > r_max {
                        aliased += 1;
                    }
                    let delay = 2.0 * range / SPEED_OF_LIGHT;
                    // First 1-based sample index with n Ts >= delay.
                    let first_n = (delay / ts).ceil().max(1.0) as usize;
                    if first_n > n_fast {
                        continue;
                    }
                    let base_phase = -2.0 * std::f64::consts::PI * carrier * delay
                        - std::f64::consts::PI * chirp_rate * delay * delay;
                    let beat_step = 2.0 * std::f64::consts::PI * chirp_rate * ts * delay;
                    let mut rotor = Complex64::from_polar(
                        1.0,
                        base_phase + first_n as f64 * beat_step,
                    );
                    let step = Complex64::from_polar(1.0, beat_step);
                    for n in first_n..=n_fast {
                        column[n - 1] += amplitude * rotor;
                        rotor *= step;
                    }
                }
                aliased
            })
            .sum()
    };
    if aliased > 0 {
        log::warn!(
            "{aliased} scatterer-PRI pairs beyond the unambiguous range {r_max:.2} m; their beat frequencies alias"
        );
    }
    Ok(cube)
}

/// Adds deterministic complex white Gaussian noise (detector test mode).
pub fn add_noise(cube: &mut RadarDataCube, std_dev: f64, seed: u64) {
    if std_dev <= 0.0 {
        return;
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let scale = std_dev / 2.0f64.sqrt();
    for sample in cube.samples.iter_mut() {
        // Box-Muller on two uniform draws.
        let u1: f64 = rng.random_range(f64::EPSILON..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        let mag = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        *sample += Complex64::new(
            scale * mag * angle.cos(),
            scale * mag * angle.sin(),
        );
    }
}
