//! Flat `key = value` run configuration with bracketed section headers.
//!
//! Every key is listed in [`KEY_DOCS`]; the same table drives parsing
//! validation and the reference text shown by `--help`. Unknown sections or
//! keys are rejected with their line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::Point3;
use pedrad_core::estimation::SolveMode;
use pedrad_core::metrics::MetricDomain;
use pedrad_core::radar::RadarParams;
use pedrad_core::sbr::PolPair;
use pedrad_core::signatures::Window;
use pedrad_core::Material;

/// Documentation entry for one configuration key.
pub struct KeyDoc {
    pub section: &'static str,
    pub key: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

pub const KEY_DOCS: &[KeyDoc] = &[
    KeyDoc { section: "paths", key: "mesh_pattern", default: "(none)", doc: "mesh frame files, e.g. data/frame_%04d.obj" },
    KeyDoc { section: "paths", key: "markers", default: "(none)", doc: "marker track CSV (time,m01_x,m01_y,m01_z,...)" },
    KeyDoc { section: "paths", key: "output_dir", default: "out", doc: "directory for all generated artifacts" },
    KeyDoc { section: "radar", key: "carrier_hz", default: "77e9", doc: "carrier frequency f_c" },
    KeyDoc { section: "radar", key: "bandwidth_hz", default: "2e9", doc: "sweep bandwidth BW" },
    KeyDoc { section: "radar", key: "sampling_hz", default: "10e6", doc: "fast-time sampling frequency f_s" },
    KeyDoc { section: "radar", key: "upchirp_s", default: "51.2e-6", doc: "upchirp duration" },
    KeyDoc { section: "radar", key: "pri_s", default: "61.2e-6", doc: "pulse repetition interval" },
    KeyDoc { section: "radar", key: "chirps_per_cpi", default: "1024", doc: "chirps per coherent processing interval (P)" },
    KeyDoc { section: "radar", key: "cpis_per_block", default: "2", doc: "CPIs per reflectivity block (L)" },
    KeyDoc { section: "radar", key: "radar_position", default: "0 0 0.65", doc: "sensor position in meters, `x y z`" },
    KeyDoc { section: "aspect", key: "incident_azimuth_deg", default: "0", doc: "illumination azimuth phi_i" },
    KeyDoc { section: "aspect", key: "scattered_azimuth_deg", default: "0", doc: "observation azimuth phi_s (equal to phi_i for monostatic)" },
    KeyDoc { section: "aspect", key: "mesh_frame_rate_hz", default: "60", doc: "video frame rate of the mesh sequence" },
    KeyDoc { section: "aspect", key: "material", default: "skin_77ghz", doc: "skin_77ghz | body_24ghz | pec | custom" },
    KeyDoc { section: "aspect", key: "relative_permittivity", default: "6.63", doc: "eps_r for material = custom" },
    KeyDoc { section: "aspect", key: "conductivity_s_per_m", default: "38.1", doc: "sigma_c for material = custom" },
    KeyDoc { section: "aspect", key: "max_bounces", default: "3", doc: "specular bounce cap per ray" },
    KeyDoc { section: "aspect", key: "ray_spacing_m", default: "auto", doc: "grid spacing; auto = lambda/10" },
    KeyDoc { section: "aspect", key: "allow_coarse", default: "false", doc: "permit spacing coarser than lambda/10" },
    KeyDoc { section: "estimation", key: "pri_stride", default: "80", doc: "PRI stride M between regression rows" },
    KeyDoc { section: "estimation", key: "polarization", default: "vv", doc: "RCS pair feeding the regression (vv/hh/hv/vh)" },
    KeyDoc { section: "estimation", key: "solve_mode", default: "hermitian", doc: "hermitian | transpose_literal" },
    KeyDoc { section: "estimation", key: "strict", default: "true", doc: "reject underdetermined systems (K < B)" },
    KeyDoc { section: "estimation", key: "sweep_strides", default: "40,80,160", doc: "comma-separated M candidates for `sweep`" },
    KeyDoc { section: "estimation", key: "sweep_cpi_counts", default: "2", doc: "comma-separated L candidates for `sweep`" },
    KeyDoc { section: "signature", key: "window", default: "hann", doc: "1-D window: rect | hann | hamming | blackman" },
    KeyDoc { section: "signature", key: "window_2d", default: "hann", doc: "separable 2-D window for range-Doppler maps" },
    KeyDoc { section: "signature", key: "display_floor_dbsm", default: "-40", doc: "export/display threshold; stored data is not clipped" },
    KeyDoc { section: "synthesis", key: "noise_std", default: "0", doc: "additive complex noise sigma (0 = noise-free)" },
    KeyDoc { section: "synthesis", key: "noise_seed", default: "0", doc: "seed for the optional noise generator" },
    KeyDoc { section: "compare", key: "domain", default: "db", doc: "metric domain: db (floored) | linear" },
    KeyDoc { section: "compare", key: "apply_cfar", default: "true", doc: "mask measured signatures with OS-CFAR before the metrics" },
    KeyDoc { section: "compare", key: "cfar_guard", default: "2", doc: "OS-CFAR guard cells per side" },
    KeyDoc { section: "compare", key: "cfar_train", default: "16", doc: "OS-CFAR training cells per side" },
    KeyDoc { section: "compare", key: "cfar_rank", default: "24", doc: "OS-CFAR order statistic rank k" },
    KeyDoc { section: "compare", key: "cfar_scale", default: "6", doc: "OS-CFAR threshold scale alpha" },
];

/// Reference text appended to `--help`.
pub fn config_reference() -> String {
    let mut out = String::from(
        "CONFIG FILE REFERENCE (flat `key = value` entries under [section] headers):\n",
    );
    let mut section = "";
    for key in KEY_DOCS {
        if key.section != section {
            section = key.section;
            writeln!(out, "\n  [{section}]").unwrap();
        }
        writeln!(
            out,
            "    {:<22} default: {:<10} {}",
            key.key, key.default, key.doc
        )
        .unwrap();
    }
    out
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mesh_pattern: Option<String>,
    pub markers: Option<PathBuf>,
    pub output_dir: PathBuf,

    pub radar: RadarParams,
    pub radar_position: Point3<f64>,

    pub incident_azimuth_deg: f64,
    pub scattered_azimuth_deg: f64,
    pub mesh_frame_rate_hz: f64,
    pub material: Material,
    pub material_name: String,
    pub max_bounces: usize,
    pub ray_spacing_m: Option<f64>,
    pub allow_coarse: bool,

    pub pri_stride: usize,
    pub polarization: PolPair,
    pub solve_mode: SolveMode,
    pub strict: bool,
    pub sweep_strides: Vec<usize>,
    pub sweep_cpi_counts: Vec<usize>,

    pub window: Window,
    pub window_2d: Window,
    pub display_floor_dbsm: f64,

    pub noise_std: f64,
    pub noise_seed: u64,

    pub metric_domain: MetricDomain,
    pub apply_cfar: bool,
    pub cfar_guard: usize,
    pub cfar_train: usize,
    pub cfar_rank: usize,
    pub cfar_scale: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config `{}`", path.display()))?;
        let raw = parse_sections(&text, &path.display().to_string())?;
        RunConfig::from_raw(raw)
    }

    fn from_raw(raw: BTreeMap<String, String>) -> Result<RunConfig> {
        let get = |section: &str, key: &str| raw.get(&format!("{section}.{key}")).cloned();
        let f64_or = |section: &str, key: &str, default: f64| -> Result<f64> {
            match get(section, key) {
                Some(v) => v
                    .parse()
                    .map_err(|_| anyhow!("[{section}] {key}: bad number `{v}`")),
                None => Ok(default),
            }
        };
        let usize_or = |section: &str, key: &str, default: usize| -> Result<usize> {
            match get(section, key) {
                Some(v) => v
                    .parse()
                    .map_err(|_| anyhow!("[{section}] {key}: bad integer `{v}`")),
                None => Ok(default),
            }
        };
        let bool_or = |section: &str, key: &str, default: bool| -> Result<bool> {
            match get(section, key) {
                Some(v) => match v.as_str() {
                    "true" | "yes" | "1" => Ok(true),
                    "false" | "no" | "0" => Ok(false),
                    other => bail!("[{section}] {key}: bad boolean `{other}`"),
                },
                None => Ok(default),
            }
        };
        let list_or = |section: &str, key: &str, default: &[usize]| -> Result<Vec<usize>> {
            match get(section, key) {
                Some(v) => v
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| anyhow!("[{section}] {key}: bad integer `{t}`"))
                    })
                    .collect(),
                None => Ok(default.to_vec()),
            }
        };

        let radar = RadarParams::derive(
            f64_or("radar", "carrier_hz", 77e9)?,
            f64_or("radar", "bandwidth_hz", 2e9)?,
            f64_or("radar", "sampling_hz", 10e6)?,
            f64_or("radar", "upchirp_s", 51.2e-6)?,
            f64_or("radar", "pri_s", 61.2e-6)?,
            usize_or("radar", "chirps_per_cpi", 1024)?,
            usize_or("radar", "cpis_per_block", 2)?,
        )?;

        let radar_position = match get("radar", "radar_position") {
            Some(v) => {
                let parts: Vec<f64> = v
                    .split_whitespace()
                    .map(|t| t.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| anyhow!("[radar] radar_position: bad vector `{v}`"))?;
                if parts.len() != 3 {
                    bail!("[radar] radar_position: need three components");
                }
                Point3::new(parts[0], parts[1], parts[2])
            }
            None => Point3::new(0.0, 0.0, 0.65),
        };

        let material_name = get("aspect", "material").unwrap_or_else(|| "skin_77ghz".into());
        let material = match material_name.as_str() {
            "skin_77ghz" => Material::skin_77_ghz(),
            "body_24ghz" => Material::body_24_ghz(),
            "pec" => Material::perfect_conductor(),
            "custom" => Material::dielectric(
                f64_or("aspect", "relative_permittivity", 6.63)?,
                f64_or("aspect", "conductivity_s_per_m", 38.1)?,
            )?,
            other => bail!("[aspect] material: unknown `{other}`"),
        };

        let ray_spacing_m = match get("aspect", "ray_spacing_m") {
            None => None,
            Some(v) if v == "auto" => None,
            Some(v) => Some(
                v.parse::<f64>()
                    .map_err(|_| anyhow!("[aspect] ray_spacing_m: bad value `{v}`"))?,
            ),
        };

        Ok(RunConfig {
            mesh_pattern: get("paths", "mesh_pattern"),
            markers: get("paths", "markers").map(PathBuf::from),
            output_dir: PathBuf::from(get("paths", "output_dir").unwrap_or_else(|| "out".into())),
            radar,
            radar_position,
            incident_azimuth_deg: f64_or("aspect", "incident_azimuth_deg", 0.0)?,
            scattered_azimuth_deg: f64_or("aspect", "scattered_azimuth_deg", 0.0)?,
            mesh_frame_rate_hz: f64_or("aspect", "mesh_frame_rate_hz", 60.0)?,
            material,
            material_name,
            max_bounces: usize_or("aspect", "max_bounces", 3)?,
            ray_spacing_m,
            allow_coarse: bool_or("aspect", "allow_coarse", false)?,
            pri_stride: usize_or("estimation", "pri_stride", 80)?,
            polarization: get("estimation", "polarization")
                .unwrap_or_else(|| "vv".into())
                .parse()?,
            solve_mode: get("estimation", "solve_mode")
                .unwrap_or_else(|| "hermitian".into())
                .parse()?,
            strict: bool_or("estimation", "strict", true)?,
            sweep_strides: list_or("estimation", "sweep_strides", &[40, 80, 160])?,
            sweep_cpi_counts: list_or("estimation", "sweep_cpi_counts", &[2])?,
            window: get("signature", "window").unwrap_or_else(|| "hann".into()).parse()?,
            window_2d: get("signature", "window_2d")
                .unwrap_or_else(|| "hann".into())
                .parse()?,
            display_floor_dbsm: f64_or("signature", "display_floor_dbsm", -40.0)?,
            noise_std: f64_or("synthesis", "noise_std", 0.0)?,
            noise_seed: f64_or("synthesis", "noise_seed", 0.0)? as u64,
            metric_domain: get("compare", "domain").unwrap_or_else(|| "db".into()).parse()?,
            apply_cfar: bool_or("compare", "apply_cfar", true)?,
            cfar_guard: usize_or("compare", "cfar_guard", 2)?,
            cfar_train: usize_or("compare", "cfar_train", 16)?,
            cfar_rank: usize_or("compare", "cfar_rank", 24)?,
            cfar_scale: f64_or("compare", "cfar_scale", 6.0)?,
        })
    }

    /// The aspect for the configured geometry.
    pub fn aspect(&self) -> Result<pedrad_core::AspectConfig> {
        Ok(pedrad_core::AspectConfig::new(
            self.incident_azimuth_deg,
            self.scattered_azimuth_deg,
            self.radar.carrier_hz,
            self.max_bounces,
            self.ray_spacing_m,
            self.allow_coarse,
        )?)
    }

    pub fn require_mesh_pattern(&self) -> Result<&str> {
        let pattern = self
            .mesh_pattern
            .as_deref()
            .ok_or_else(|| anyhow!("[paths] mesh_pattern is required for this command"))?;
        let first = pedrad_core::mesh::expand_pattern(pattern, 0)?;
        if !Path::new(&first).exists() {
            bail!("mesh pattern `{pattern}`: first frame `{first}` does not exist");
        }
        Ok(pattern)
    }

    pub fn require_markers(&self) -> Result<&Path> {
        let path = self
            .markers
            .as_deref()
            .ok_or_else(|| anyhow!("[paths] markers is required for this command"))?;
        if !path.exists() {
            bail!("marker file `{}` does not exist", path.display());
        }
        Ok(path)
    }
}

fn parse_sections(text: &str, path: &str) -> Result<BTreeMap<String, String>> {
    let known: std::collections::BTreeSet<(&str, &str)> =
        KEY_DOCS.iter().map(|k| (k.section, k.key)).collect();
    let sections: std::collections::BTreeSet<&str> = KEY_DOCS.iter().map(|k| k.section).collect();
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|rest| rest.strip_suffix(']')) {
            if !sections.contains(name) {
                bail!("{path}:{lineno}: unknown section [{name}]");
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{path}:{lineno}: expected `key = value`");
        };
        let key = key.trim();
        let value = value.trim();
        if section.is_empty() {
            bail!("{path}:{lineno}: key `{key}` before any [section]");
        }
        if !known.contains(&(section.as_str(), key)) {
            bail!("{path}:{lineno}: unknown key `{key}` in [{section}]");
        }
        if out.insert(format!("{section}.{key}"), value.to_string()).is_some() {
            bail!("{path}:{lineno}: duplicate key `{key}` in [{section}]");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_apply_for_empty_config() {
        let cfg = RunConfig::from_raw(BTreeMap::new()).unwrap();
        assert_eq!(cfg.radar.chirps_per_cpi, 1024);
        assert_eq!(cfg.pri_stride, 80);
        assert_eq!(cfg.radar_position, Point3::new(0.0, 0.0, 0.65));
        assert_eq!(cfg.window, Window::Hann);
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err = parse_sections("[radar]\nchirps = 8\n", "test.cfg").unwrap_err();
        assert!(err.to_string().contains("test.cfg:2"), "{err}");
    }

    #[test]
    fn sections_parse_and_override() {
        let raw = parse_sections(
            "# comment\n[radar]\nchirps_per_cpi = 256\n\n[estimation]\npri_stride = 20\n",
            "t",
        )
        .unwrap();
        let cfg = RunConfig::from_raw(raw).unwrap();
        assert_eq!(cfg.radar.chirps_per_cpi, 256);
        assert_eq!(cfg.pri_stride, 20);
    }

    #[test]
    fn every_documented_key_parses() {
        let mut text = String::new();
        let mut section = "";
        for key in KEY_DOCS {
            if key.section != section {
                section = key.section;
                text.push_str(&format!("[{section}]\n"));
            }
            if key.default != "(none)" {
                text.push_str(&format!("{} = {}\n", key.key, key.default));
            }
        }
        let raw = parse_sections(&text, "defaults").unwrap();
        RunConfig::from_raw(raw).unwrap();
    }
}
