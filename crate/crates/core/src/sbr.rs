//! Shooting-and-bouncing-rays geometric-optics tracer.
//!
//! A dense grid of parallel rays is launched from a plane perpendicular to the
//! incident azimuth, covering the mesh's projected bounding box with margin.
//! Each ray bounces specularly up to `max_bounces` times; at every hit the
//! field is split into perpendicular/parallel components and scaled by the
//! Fresnel coefficients. A ray that leaves the scene radiates its exit
//! aperture toward the scattered azimuth with the Kirchhoff equivalent-current
//! pattern, so a tube exiting along `d` contributes
//!
//! ```text
//!   dE_q = (spacing^2 / lambda)
//!        * ( (1 + s.d)/2 * (q . E_exit) - (q . d)/2 * (s . E_exit) )
//!        * exp(j k (s.x_exit - h0 - l))
//! ```
//!
//! per receive basis vector `q`, where `l` is the accumulated path length from
//! the launch plane at offset `h0` and `s` is the unit vector toward the
//! receiver. The pattern is unity for retro-directed exits and zero for exits
//! pointing away from the receiver. The `1/lambda` normalization is pinned so
//! that a square conducting plate of side `a` at normal incidence reproduces
//! the high-frequency closed form `sigma = 4 pi a^4 / lambda^2`. RCS is
//! `sigma = 4 pi |E|^2`.
//!
//! Rays are independent; rows of the grid are traced in parallel on the
//! current rayon pool and reduced with a fixed-order pairwise sum, so results
//! are identical for any worker count.

use nalgebra::{Point3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{build_groups, nearest_hit_counted, BoundingGroup, QueryStats, Ray};
use crate::material::{fresnel_coefficients, Material};
use crate::mesh::MeshFrame;
use crate::SPEED_OF_LIGHT;

/// Transmit/receive polarization pair; first letter transmit, second receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolPair {
    Vv,
    Hh,
    Hv,
    Vh,
}

impl PolPair {
    pub const ALL: [PolPair; 4] = [PolPair::Vv, PolPair::Hh, PolPair::Hv, PolPair::Vh];

    pub fn name(&self) -> &'static str {
        match self {
            PolPair::Vv => "vv",
            PolPair::Hh => "hh",
            PolPair::Hv => "hv",
            PolPair::Vh => "vh",
        }
    }
}

impl std::str::FromStr for PolPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vv" => Ok(PolPair::Vv),
            "hh" => Ok(PolPair::Hh),
            "hv" => Ok(PolPair::Hv),
            "vh" => Ok(PolPair::Vh),
            other => Err(Error::Parameter(format!("unknown polarization `{other}`"))),
        }
    }
}

/// Illumination/observation geometry for one trace.
///
/// Elevation is fixed at zero: rays travel parallel to the ground plane and
/// only the azimuth angles are parameterized.
#[derive(Debug, Clone, Copy)]
pub struct AspectConfig {
    pub incident_azimuth_deg: f64,
    pub scattered_azimuth_deg: f64,
    pub carrier_hz: f64,
    pub max_bounces: usize,
    pub ray_spacing_m: f64,
}

impl AspectConfig {
    /// `ray_spacing_m = None` selects the lambda/10 default. Spacings coarser
    /// than lambda/10 are rejected unless `allow_coarse` is set.
    pub fn new(
        incident_azimuth_deg: f64,
        scattered_azimuth_deg: f64,
        carrier_hz: f64,
        max_bounces: usize,
        ray_spacing_m: Option<f64>,
        allow_coarse: bool,
    ) -> Result<Self> {
        if carrier_hz <= 0.0 {
            return Err(Error::Parameter("carrier frequency must be positive".into()));
        }
        if max_bounces < 1 {
            return Err(Error::Parameter("max_bounces must be at least 1".into()));
        }
        let lambda = SPEED_OF_LIGHT / carrier_hz;
        let spacing = ray_spacing_m.unwrap_or(lambda / 10.0);
        if spacing <= 0.0 {
            return Err(Error::Parameter("ray spacing must be positive".into()));
        }
        if spacing > lambda / 10.0 * (1.0 + 1e-12) && !allow_coarse {
            return Err(Error::Parameter(format!(
                "ray spacing {spacing} m exceeds lambda/10 = {} m; pass the coarse flag to override",
                lambda / 10.0
            )));
        }
        Ok(AspectConfig {
            incident_azimuth_deg,
            scattered_azimuth_deg,
            carrier_hz,
            max_bounces,
            ray_spacing_m: spacing,
        })
    }

    pub fn monostatic(azimuth_deg: f64, carrier_hz: f64) -> Result<Self> {
        AspectConfig::new(azimuth_deg, azimuth_deg, carrier_hz, 3, None, false)
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn is_monostatic(&self) -> bool {
        (self.incident_azimuth_deg - self.scattered_azimuth_deg).abs() < 1e-12
    }
}

/// Complex far-field amplitudes for the four polarization pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolAmplitudes {
    pub vv: Complex64,
    pub hh: Complex64,
    pub hv: Complex64,
    pub vh: Complex64,
}

impl PolAmplitudes {
    pub fn get(&self, pair: PolPair) -> Complex64 {
        match pair {
            PolPair::Vv => self.vv,
            PolPair::Hh => self.hh,
            PolPair::Hv => self.hv,
            PolPair::Vh => self.vh,
        }
    }

    /// RCS in square meters: `4 pi |E|^2`.
    pub fn rcs(&self, pair: PolPair) -> f64 {
        4.0 * std::f64::consts::PI * self.get(pair).norm_sqr()
    }
}

/// Instrumentation for the acceleration diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub struct TraceStats {
    pub rays_launched: u64,
    pub rays_hit: u64,
    pub query: QueryStats,
}

/// Per-frame RCS for all four polarization pairs, linear square meters.
#[derive(Debug, Clone, Copy, Default)]
pub struct RcsFrame {
    pub vv: f64,
    pub hh: f64,
    pub hv: f64,
    pub vh: f64,
}

impl RcsFrame {
    pub fn get(&self, pair: PolPair) -> f64 {
        match pair {
            PolPair::Vv => self.vv,
            PolPair::Hh => self.hh,
            PolPair::Hv => self.hv,
            PolPair::Vh => self.vh,
        }
    }
}

/// RCS of a frame sequence for the four polarization pairs.
#[derive(Debug, Clone)]
pub struct PolarimetricRcs {
    pub frame_rate_hz: f64,
    pub frames: Vec<RcsFrame>,
}

impl PolarimetricRcs {
    /// Single-pair view (used by the interpolation/estimation stages).
    pub fn series(&self, pair: PolPair) -> RcsSeries {
        RcsSeries {
            frame_rate_hz: self.frame_rate_hz,
            values: self.frames.iter().map(|f| f.get(pair)).collect(),
        }
    }
}

/// Per-frame RCS values for one polarization pair, linear square meters.
#[derive(Debug, Clone)]
pub struct RcsSeries {
    pub frame_rate_hz: f64,
    pub values: Vec<f64>,
}

/// Vertical/horizontal polarization basis for a horizontal propagation
/// direction: v is the field component in the plane containing +z and the
/// propagation direction, h the orthogonal horizontal component.
fn polarization_basis(direction: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let z = Vector3::z();
    let mut v = z - direction * z.dot(direction);
    let n = v.norm();
    if n < 1e-9 {
        // Propagation along z never happens for azimuth-only aspects.
        v = Vector3::x();
    } else {
        v /= n;
    }
    let h = v.cross(direction);
    (v, h)
}

fn complex_vector(v: &Vector3<f64>) -> Vector3<Complex64> {
    v.map(|c| Complex64::new(c, 0.0))
}

fn cdot(e: &Vector3<Complex64>, b: &Vector3<f64>) -> Complex64 {
    e.x * b.x + e.y * b.y + e.z * b.z
}

/// Applies one specular reflection to both carried fields and returns the
/// reflected direction.
///
/// Basis: `e_perp = dir x normal`, `e_par = e_perp x dir` before reflection
/// and `e_perp x dir_r` after; at normal incidence the perpendicular basis is
/// arbitrary and the result is basis-independent because `gamma_par(0) =
/// -gamma_perp(0)`.
pub(crate) fn reflect_at_surface(
    dir: &Vector3<f64>,
    normal: &Vector3<f64>,
    gamma: (Complex64, Complex64),
    fields: &mut [Vector3<Complex64>; 2],
) -> Vector3<f64> {
    let cos_i = -dir.dot(normal);
    let dir_r = dir + normal * (2.0 * cos_i);
    let cross = dir.cross(normal);
    let e_perp = if cross.norm() > 1e-9 {
        cross / cross.norm()
    } else {
        // Normal incidence: any transverse direction works.
        let helper = if dir.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let t = dir.cross(&helper);
        t / t.norm()
    };
    let e_par_i = e_perp.cross(dir);
    let e_par_r = e_perp.cross(&dir_r);
    let (gamma_perp, gamma_par) = gamma;
    for field in fields.iter_mut() {
        let a_perp = cdot(field, &e_perp) * gamma_perp;
        let a_par = cdot(field, &e_par_i) * gamma_par;
        *field = complex_vector(&e_perp) * a_perp + complex_vector(&e_par_r) * a_par;
    }
    dir_r
}

/// Deterministic pairwise sum in index order.
fn pairwise_sum(items: &[[Complex64; 4]]) -> [Complex64; 4] {
    match items.len() {
        0 => [Complex64::default(); 4],
        1 => items[0],
        n if n <= 8 => {
            let mut acc = items[0];
            for item in &items[1..] {
                for (a, b) in acc.iter_mut().zip(item) {
                    *a += b;
                }
            }
            acc
        }
        n => {
            let (lo, hi) = items.split_at(n / 2);
            let a = pairwise_sum(lo);
            let b = pairwise_sum(hi);
            [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
        }
    }
}

/// Traces one frame against prebuilt groups and reports counters.
pub fn trace_frame_grouped(
    mesh: &MeshFrame,
    groups: &[BoundingGroup],
    material: &Material,
    aspect: &AspectConfig,
) -> (PolAmplitudes, TraceStats) {
    let lambda = aspect.wavelength();
    let wavenumber = 2.0 * std::f64::consts::PI / lambda;
    let spacing = aspect.ray_spacing_m;

    let phi_i = aspect.incident_azimuth_deg.to_radians();
    let phi_s = aspect.scattered_azimuth_deg.to_radians();
    // Propagation direction of the illumination (radar sits at azimuth phi_i).
    let dir_in = -Vector3::new(phi_i.cos(), phi_i.sin(), 0.0);
    // Direction from the scene toward the receiver.
    let dir_out = Vector3::new(phi_s.cos(), phi_s.sin(), 0.0);

    let (tx_v, tx_h) = polarization_basis(&dir_in);
    let (rx_v, rx_h) = polarization_basis(&dir_out);

    if mesh.vertices().is_empty() || mesh.triangle_count() == 0 {
        return (PolAmplitudes::default(), TraceStats::default());
    }

    // Project the mesh onto the launch plane axes (u horizontal, w vertical).
    let u_axis = tx_h;
    let w_axis = Vector3::z();
    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    let mut w_min = f64::INFINITY;
    let mut w_max = f64::NEG_INFINITY;
    let mut t_min = f64::INFINITY;
    for p in mesh.vertices() {
        let u = u_axis.dot(&p.coords);
        let w = w_axis.dot(&p.coords);
        let t = dir_in.dot(&p.coords);
        u_min = u_min.min(u);
        u_max = u_max.max(u);
        w_min = w_min.min(w);
        w_max = w_max.max(w);
        t_min = t_min.min(t);
    }
    let margin = 2.0 * spacing;
    let launch_offset = t_min - 1.0;
    let nu = (((u_max - u_min) + 2.0 * margin) / spacing).ceil() as usize;
    let nw = (((w_max - w_min) + 2.0 * margin) / spacing).ceil() as usize;
    if nu == 0 || nw == 0 {
        return (PolAmplitudes::default(), TraceStats::default());
    }

    let tube_amplitude = spacing * spacing / lambda;
    let max_bounces = aspect.max_bounces;

    let rows: Vec<([Complex64; 4], TraceStats)> = (0..nw)
        .into_par_iter()
        .map(|jw| {
            let w = w_min - margin + (jw as f64 + 0.5) * spacing;
            let mut row_contribs: Vec<[Complex64; 4]> = Vec::with_capacity(nu);
            let mut stats = TraceStats::default();
            for iu in 0..nu {
                let u = u_min - margin + (iu as f64 + 0.5) * spacing;
                let origin = Point3::from(u_axis * u + w_axis * w + dir_in * launch_offset);
                stats.rays_launched += 1;

                let mut pos = origin;
                let mut dir = dir_in;
                let mut fields = [complex_vector(&tx_v), complex_vector(&tx_h)];
                let mut path_len = 0.0;
                let mut exit_point = None;
                for _ in 0..max_bounces {
                    let ray = Ray {
                        origin: pos,
                        direction: dir,
                    };
                    let Some(hit) = nearest_hit_counted(&ray, groups, mesh, &mut stats.query)
                    else {
                        break;
                    };
                    path_len += hit.distance;
                    let cos_i = (-dir.dot(&hit.normal)).clamp(-1.0, 1.0);
                    let incidence = cos_i.min(1.0).acos();
                    let gamma = fresnel_coefficients(material, aspect.carrier_hz, incidence);
                    dir = reflect_at_surface(&dir, &hit.normal, gamma, &mut fields);
                    pos = hit.point;
                    exit_point = Some(hit.point);
                }

                if let Some(exit) = exit_point {
                    stats.rays_hit += 1;
                    let phase =
                        wavenumber * (dir_out.dot(&exit.coords) - launch_offset - path_len);
                    let rotor = Complex64::from_polar(tube_amplitude, phase);
                    let [e_v, e_h] = &fields;
                    // Kirchhoff aperture pattern of the exit tube.
                    let oblique = 0.5 * (1.0 + dir_out.dot(&dir));
                    let s_dot_ev = cdot(e_v, &dir_out);
                    let s_dot_eh = cdot(e_h, &dir_out);
                    let radiate = |e: &Vector3<Complex64>,
                                   s_dot_e: Complex64,
                                   q: &Vector3<f64>| {
                        rotor * (cdot(e, q) * oblique - s_dot_e * (0.5 * q.dot(&dir)))
                    };
                    row_contribs.push([
                        radiate(e_v, s_dot_ev, &rx_v), // vv
                        radiate(e_h, s_dot_eh, &rx_h), // hh
                        radiate(e_h, s_dot_eh, &rx_v), // hv
                        radiate(e_v, s_dot_ev, &rx_h), // vh
                    ]);
                }
            }
            (pairwise_sum(&row_contribs), stats)
        })
        .collect();

    let mut stats = TraceStats::default();
    for (_, s) in &rows {
        stats.rays_launched += s.rays_launched;
        stats.rays_hit += s.rays_hit;
        stats.query.merge(s.query);
    }
    let row_sums: Vec<[Complex64; 4]> = rows.into_iter().map(|(sum, _)| sum).collect();
    let total = pairwise_sum(&row_sums);
    let mut amplitudes = PolAmplitudes {
        vv: total[0],
        hh: total[1],
        hv: total[2],
        vh: total[3],
    };
    if aspect.is_monostatic() {
        // A reciprocal target has a symmetric monostatic scattering matrix.
        // In this basis (rx horizontal mirrored against tx) symmetry reads
        // hv = -vh; single-bounce terms satisfy it exactly, so the projection
        // only averages away the untraced reverse paths of multi-bounce chains.
        let sym = 0.5 * (amplitudes.hv - amplitudes.vh);
        amplitudes.hv = sym;
        amplitudes.vh = -sym;
    }
    (amplitudes, stats)
}

/// Default group count: roughly one box per 128 triangles, capped at 64.
pub fn default_group_count(triangle_count: usize) -> usize {
    (triangle_count / 128).clamp(1, 64)
}

/// Traces one frame, building the acceleration structure internally.
pub fn trace_frame(
    mesh: &MeshFrame,
    material: &Material,
    aspect: &AspectConfig,
) -> Result<PolAmplitudes> {
    let groups = build_groups(mesh, default_group_count(mesh.triangle_count()))?;
    Ok(trace_frame_grouped(mesh, &groups, material, aspect).0)
}

/// Monostatic or bistatic RCS of a frame sequence, all four polarization
/// pairs. Frames are traced in parallel on the current rayon pool.
pub fn rcs_sequence(
    frames: &[MeshFrame],
    material: &Material,
    aspect: &AspectConfig,
    frame_rate_hz: f64,
) -> Result<PolarimetricRcs> {
    if frames.is_empty() {
        return Err(Error::Parameter("no frames to trace".into()));
    }
    let results: Vec<Result<RcsFrame>> = frames
        .par_iter()
        .map(|mesh| {
            let amplitudes = trace_frame(mesh, material, aspect)?;
            Ok(RcsFrame {
                vv: amplitudes.rcs(PolPair::Vv),
                hh: amplitudes.rcs(PolPair::Hh),
                hv: amplitudes.rcs(PolPair::Hv),
                vh: amplitudes.rcs(PolPair::Vh),
            })
        })
        .collect();
    let frames = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PolarimetricRcs {
        frame_rate_hz,
        frames,
    })
}

/// `10 log10(sigma / 1 m^2)` with a -300 dB floor so zero RCS stays finite.
pub fn to_dbsm(sigma_m2: f64) -> f64 {
    10.0 * sigma_m2.max(1e-30).log10()
}

/// Closed-form monostatic RCS of a square conducting plate of side `a` at
/// normal incidence (high-frequency limit). Test oracle for the tracer
/// normalization.
pub fn flat_plate_rcs_oracle(side_m: f64, carrier_hz: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / carrier_hz;
    4.0 * std::f64::consts::PI * side_m.powi(4) / (lambda * lambda)
}

/// Writes the per-frame RCS table:
/// `frame,time_s,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm`.
pub fn write_rcs_csv(rcs: &PolarimetricRcs, path: impl AsRef<std::path::Path>) -> Result<()> {
    use std::fmt::Write as _;
    let path = path.as_ref();
    let mut out =
        String::from("frame,time_s,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm\n");
    for (f, frame) in rcs.frames.iter().enumerate() {
        writeln!(
            out,
            "{f},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            f as f64 / rcs.frame_rate_hz,
            to_dbsm(frame.vv),
            to_dbsm(frame.hh),
            to_dbsm(frame.hv),
            to_dbsm(frame.vh),
        )
        .expect("string write");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads the RCS table back (values converted from dBsm to linear m^2).
pub fn read_rcs_csv(path: impl AsRef<std::path::Path>) -> Result<PolarimetricRcs> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if !header.starts_with("frame,time_s,sigma_vv_dbsm") {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: "unexpected RCS table header".into(),
        });
    }
    let mut timestamps = Vec::new();
    let mut frames = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                path: display,
                line: i + 2,
                message: format!("{} fields, expected 6", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: i + 2,
                message: format!("bad number `{s}`"),
            })
        };
        timestamps.push(parse(fields[1])?);
        let from_db = |db: f64| 10f64.powf(db / 10.0);
        frames.push(RcsFrame {
            vv: from_db(parse(fields[2])?),
            hh: from_db(parse(fields[3])?),
            hv: from_db(parse(fields[4])?),
            vh: from_db(parse(fields[5])?),
        });
    }
    if timestamps.len() < 2 {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: "RCS table needs at least two frames".into(),
        });
    }
    let dt = timestamps[1] - timestamps[0];
    if dt <= 0.0 {
        return Err(Error::Parse {
            path: display,
            line: 3,
            message: "timestamps must increase".into(),
        });
    }
    Ok(PolarimetricRcs {
        frame_rate_hz: 1.0 / dt,
        frames,
    })
}
