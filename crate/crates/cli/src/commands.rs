//! Subcommand implementations.
//!
//! Every stage writes its artifact into the configured output directory so
//! that any later stage can be re-run standalone from files: `rcs` produces
//! the RCS table, `estimate` the coefficient table, `synth` the block cubes,
//! `signature` the matrices, `compare` the metric reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use pedrad_core::cfar::{os_cfar, CfarParams};
use pedrad_core::estimation::{
    assemble_system, read_coefficients_csv, row_count_for, solve_reflectivities,
    sweep_parameters, BlockCoefficients, ScattererSet,
};
use pedrad_core::kinematics::{interpolate_rcs, interpolate_tracks, PrfTrackSet};
use pedrad_core::markers::load_marker_tracks;
use pedrad_core::mesh::load_mesh_sequence;
use pedrad_core::metrics::{nmse, ssim, BlockMetrics, ComparisonReport};
use pedrad_core::radar::{add_noise, synthesize_cube, RadarDataCube};
use pedrad_core::sbr::{
    rcs_sequence, read_rcs_csv, to_dbsm, trace_frame, write_rcs_csv, AspectConfig, PolPair,
    RcsSeries,
};
use pedrad_core::signatures::{doppler_time, range_doppler, range_time, SignatureMatrix};
use pedrad_core::MarkerTrackSet;

use crate::config::RunConfig;

/// Every block of the run failed numerically; maps to exit code 2.
#[derive(Debug)]
pub struct AllBlocksFailed(pub usize);

impl std::fmt::Display for AllBlocksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "all {} blocks failed to solve", self.0)
    }
}

impl std::error::Error for AllBlocksFailed {}

/// Bistatic sweep request: `start:stop:step` in degrees.
#[derive(Debug, Clone, Copy)]
pub struct AzimuthSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl std::str::FromStr for AzimuthSweep {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("sweep must be start:stop:step, got `{s}`");
        }
        let parse = |t: &str| -> Result<f64> {
            t.parse().map_err(|_| anyhow!("bad sweep component `{t}`"))
        };
        let sweep = AzimuthSweep {
            start: parse(parts[0])?,
            stop: parse(parts[1])?,
            step: parse(parts[2])?,
        };
        if sweep.step <= 0.0 || sweep.stop < sweep.start {
            bail!("sweep `{s}` must run forward with a positive step");
        }
        Ok(sweep)
    }
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("cannot create `{}`", cfg.output_dir.display()))
}

/// Ray tracing over the mesh sequence; optionally a bistatic sweep of one
/// frame instead of the frame series.
pub fn cmd_rcs(
    cfg: &RunConfig,
    sweep: Option<AzimuthSweep>,
    frame_index: usize,
    out: Option<PathBuf>,
) -> Result<()> {
    let pattern = cfg.require_mesh_pattern()?;
    ensure_output_dir(cfg)?;
    let frames = load_mesh_sequence(pattern, cfg.mesh_frame_rate_hz)?;
    log::info!("loaded {} mesh frames", frames.len());

    if let Some(sweep) = sweep {
        let frame = frames
            .get(frame_index)
            .ok_or_else(|| anyhow!("frame {frame_index} outside 0..{}", frames.len()))?;
        let path = out.unwrap_or_else(|| cfg.output_dir.join("rcs_bistatic.csv"));
        let mut out_text =
            String::from("phi_s_deg,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm\n");
        let mut phi_s = sweep.start;
        while phi_s <= sweep.stop + 1e-9 {
            let aspect = AspectConfig::new(
                cfg.incident_azimuth_deg,
                phi_s,
                cfg.radar.carrier_hz,
                cfg.max_bounces,
                cfg.ray_spacing_m,
                cfg.allow_coarse,
            )?;
            let amplitudes = trace_frame(frame, &cfg.material, &aspect)?;
            writeln!(
                out_text,
                "{phi_s:.4},{:.9e},{:.9e},{:.9e},{:.9e}",
                to_dbsm(amplitudes.rcs(PolPair::Vv)),
                to_dbsm(amplitudes.rcs(PolPair::Hh)),
                to_dbsm(amplitudes.rcs(PolPair::Hv)),
                to_dbsm(amplitudes.rcs(PolPair::Vh)),
            )
            .unwrap();
            phi_s += sweep.step;
        }
        std::fs::write(&path, out_text)
            .with_context(|| format!("cannot write `{}`", path.display()))?;
        println!("wrote {}", path.display());
        return Ok(());
    }

    let rcs = rcs_sequence(&frames, &cfg.material, &cfg.aspect()?, cfg.mesh_frame_rate_hz)?;
    let path = out.unwrap_or_else(|| cfg.output_dir.join("rcs.csv"));
    write_rcs_csv(&rcs, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Tracks plus per-PRI RCS resampled over all whole blocks of the motion.
struct PrfData {
    tracks: PrfTrackSet,
    sigma: Vec<f64>,
    blocks: usize,
}

fn resample_to_prf(
    cfg: &RunConfig,
    markers: &MarkerTrackSet,
    series: &RcsSeries,
) -> Result<PrfData> {
    let lp = cfg.radar.block_pris();
    let series_duration = (series.values.len().saturating_sub(1)) as f64 / series.frame_rate_hz;
    let duration = markers.duration().min(series_duration);
    let total_pris = (duration / cfg.radar.pri_s).floor() as usize;
    let blocks = total_pris / lp;
    if blocks == 0 {
        bail!(
            "motion covers {duration:.3} s, one block needs {:.3} s",
            cfg.radar.block_duration()
        );
    }
    let span = blocks * lp;
    let tracks = interpolate_tracks(markers, cfg.radar_position, cfg.radar.pri_s, span)?;
    let sigma = interpolate_rcs(series, cfg.radar.pri_s, span)?;
    Ok(PrfData {
        tracks,
        sigma,
        blocks,
    })
}

/// Per-block solves; failed blocks are logged and skipped.
fn solve_blocks(
    cfg: &RunConfig,
    data: &PrfData,
) -> Result<(Vec<BlockCoefficients>, Vec<ScattererSet>, Vec<usize>)> {
    let lp = cfg.radar.block_pris();
    let scatterer_count = data.tracks.marker_count();
    let rows = row_count_for(cfg.pri_stride, cfg.radar.cpis_per_block, cfg.radar.chirps_per_cpi);
    if cfg.strict && rows < scatterer_count {
        bail!(
            "stride {} gives {rows} rows for {scatterer_count} scatterers; \
             lower [estimation] pri_stride or disable strict",
            cfg.pri_stride
        );
    }
    // Blocks are independent; solve them in parallel, collect in order.
    use rayon::prelude::*;
    let results: Vec<_> = (0..data.blocks)
        .into_par_iter()
        .map(|block| {
            let window = data.tracks.window(block * lp, lp)?;
            let sigma = &data.sigma[block * lp..(block + 1) * lp];
            let solution = assemble_system(
                &window,
                sigma,
                cfg.radar.carrier_hz,
                cfg.pri_stride,
                cfg.radar.cpis_per_block,
                cfg.radar.chirps_per_cpi,
                cfg.strict,
            )
            .and_then(|system| solve_reflectivities(&system, cfg.solve_mode))?;
            Ok((block, window, solution))
        })
        .collect();

    let mut solved = Vec::new();
    let mut sets = Vec::new();
    let mut failed = Vec::new();
    for (block, result) in results.into_iter().enumerate() {
        match result {
            Ok((block, window, solution)) => {
                solved.push(BlockCoefficients {
                    block,
                    coefficients: solution.coefficients.iter().cloned().collect(),
                    residual: solution.residual,
                });
                sets.push(ScattererSet {
                    reflectivities: solution.coefficients.iter().cloned().collect(),
                    tracks: window,
                    residual: solution.residual,
                    valid_span: (block * lp, lp),
                });
            }
            Err(err) => {
                let err: pedrad_core::Error = err;
                log::warn!("block {block}: {err}");
                failed.push(block);
            }
        }
    }
    Ok((solved, sets, failed))
}

/// Reflectivity estimation from an existing RCS table.
pub fn cmd_estimate(cfg: &RunConfig, rcs_path: Option<PathBuf>) -> Result<()> {
    let markers = load_marker_tracks(cfg.require_markers()?)?;
    ensure_output_dir(cfg)?;
    let rcs_path = rcs_path.unwrap_or_else(|| cfg.output_dir.join("rcs.csv"));
    let table = read_rcs_csv(&rcs_path)?;
    let data = resample_to_prf(cfg, &markers, &table.series(cfg.polarization))?;
    let (solved, _, failed) = solve_blocks(cfg, &data)?;
    if solved.is_empty() {
        return Err(anyhow::Error::new(AllBlocksFailed(data.blocks)));
    }
    let path = cfg.output_dir.join("coefficients.csv");
    pedrad_core::estimation::write_coefficients_csv(&solved, &path)?;
    println!(
        "wrote {} ({} blocks solved, {} failed)",
        path.display(),
        solved.len(),
        failed.len()
    );
    Ok(())
}

/// Cube synthesis from an existing coefficient table.
pub fn cmd_synth(
    cfg: &RunConfig,
    coefficients_path: Option<PathBuf>,
    only_block: Option<usize>,
) -> Result<()> {
    let markers = load_marker_tracks(cfg.require_markers()?)?;
    ensure_output_dir(cfg)?;
    let path = coefficients_path.unwrap_or_else(|| cfg.output_dir.join("coefficients.csv"));
    let blocks = read_coefficients_csv(&path)?;
    if blocks.is_empty() {
        bail!("`{}` holds no blocks", path.display());
    }
    let lp = cfg.radar.block_pris();
    let last_block = blocks.iter().map(|b| b.block).max().unwrap();
    let span = (last_block + 1) * lp;
    let tracks = interpolate_tracks(&markers, cfg.radar_position, cfg.radar.pri_s, span)?;
    for entry in &blocks {
        if let Some(only) = only_block {
            if entry.block != only {
                continue;
            }
        }
        let set = ScattererSet {
            reflectivities: entry.coefficients.clone(),
            tracks: tracks.window(entry.block * lp, lp)?,
            residual: entry.residual,
            valid_span: (entry.block * lp, lp),
        };
        let cube_path = write_block_cube(cfg, entry.block, &set)?;
        println!("wrote {}", cube_path.display());
    }
    Ok(())
}

fn write_block_cube(cfg: &RunConfig, block: usize, set: &ScattererSet) -> Result<PathBuf> {
    let mut cube = synthesize_cube(set, &cfg.radar)?;
    if cfg.noise_std > 0.0 {
        add_noise(&mut cube, cfg.noise_std, cfg.noise_seed ^ block as u64);
    }
    let path = cfg.output_dir.join(format!("block_{block:04}.rdc"));
    cube.write_binary(&path)?;
    Ok(path)
}

/// The three signatures of one cube (range-Doppler for its first CPI).
fn block_signatures(
    cfg: &RunConfig,
    cube: &RadarDataCube,
) -> Result<(SignatureMatrix, SignatureMatrix, Vec<SignatureMatrix>)> {
    let rt = range_time(cube, cfg.window)?;
    let dt = doppler_time(cube, cfg.window)?;
    let cpis = cube.slow_len() / cfg.radar.chirps_per_cpi;
    let rd = (1..=cpis)
        .map(|l| range_doppler(cube, l, cfg.window_2d))
        .collect::<pedrad_core::Result<Vec<_>>>()?;
    Ok((rt, dt, rd))
}

fn export_signature(cfg: &RunConfig, matrix: &SignatureMatrix, stem: &str) -> Result<()> {
    matrix.write_csv(cfg.output_dir.join(format!("{stem}.csv")))?;
    matrix
        .floored(cfg.display_floor_dbsm)
        .write_pgm(cfg.output_dir.join(format!("{stem}.pgm")), cfg.display_floor_dbsm)?;
    Ok(())
}

/// Signature generation for one cube file.
pub fn cmd_signature(
    cfg: &RunConfig,
    cube_path: &Path,
    kind: &str,
    cpi: usize,
    out_stem: Option<String>,
) -> Result<()> {
    ensure_output_dir(cfg)?;
    let cube = RadarDataCube::read_binary(cube_path, cfg.radar)?;
    let stem_base = out_stem.unwrap_or_else(|| {
        cube_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "cube".into())
    });
    let matrix = match kind {
        "range_time" => range_time(&cube, cfg.window)?,
        "doppler_time" => doppler_time(&cube, cfg.window)?,
        "range_doppler" => range_doppler(&cube, cpi, cfg.window_2d)?,
        other => bail!("unknown signature kind `{other}` (range_time, doppler_time, range_doppler)"),
    };
    let stem = format!("{stem_base}_{kind}");
    export_signature(cfg, &matrix, &stem)?;
    matrix.write_binary(cfg.output_dir.join(format!("{stem}.sig")))?;
    println!("wrote {}", cfg.output_dir.join(format!("{stem}.{{csv,pgm,sig}}")).display());
    Ok(())
}

/// Stride/CPI-count sweep over the whole motion.
pub fn cmd_sweep(cfg: &RunConfig, rcs_path: Option<PathBuf>) -> Result<()> {
    let markers = load_marker_tracks(cfg.require_markers()?)?;
    ensure_output_dir(cfg)?;
    let rcs_path = rcs_path.unwrap_or_else(|| cfg.output_dir.join("rcs.csv"));
    let table = read_rcs_csv(&rcs_path)?;
    let series = table.series(cfg.polarization);

    // Resample over the longest span any candidate can use.
    let series_duration = (series.values.len() - 1) as f64 / series.frame_rate_hz;
    let duration = markers.duration().min(series_duration);
    let span = (duration / cfg.radar.pri_s).floor() as usize;
    if span == 0 {
        bail!("motion too short for any block");
    }
    let tracks = interpolate_tracks(&markers, cfg.radar_position, cfg.radar.pri_s, span)?;
    let sigma = interpolate_rcs(&series, cfg.radar.pri_s, span)?;

    let sweep = sweep_parameters(
        &tracks,
        &sigma,
        cfg.radar.carrier_hz,
        &cfg.sweep_strides,
        &cfg.sweep_cpi_counts,
        cfg.radar.chirps_per_cpi,
    );
    let mut out = String::new();
    for (stride, cpis, reason) in &sweep.skipped {
        writeln!(out, "# skipped M={stride} L={cpis}: {reason}").unwrap();
    }
    out.push_str("pri_stride,cpi_count,row_count,mean_residual,blocks,failed_blocks\n");
    for row in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{:.9e},{},{}",
            row.pri_stride,
            row.cpi_count,
            row.row_count,
            row.mean_residual,
            row.blocks_evaluated,
            row.blocks_failed
        )
        .unwrap();
    }
    let path = cfg.output_dir.join("sweep.csv");
    std::fs::write(&path, out).with_context(|| format!("cannot write `{}`", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Full chain: trace, estimate, synthesize, transform, export, and compare
/// when a measured cube is supplied.
pub fn cmd_pipeline(cfg: &RunConfig, measured: Option<PathBuf>) -> Result<()> {
    let pattern = cfg.require_mesh_pattern()?;
    let marker_path = cfg.require_markers()?;
    ensure_output_dir(cfg)?;

    let frames = load_mesh_sequence(pattern, cfg.mesh_frame_rate_hz)?;
    let markers = load_marker_tracks(marker_path)?;
    log::info!(
        "{} mesh frames, {} markers over {:.2} s",
        frames.len(),
        markers.marker_count(),
        markers.duration()
    );

    let rcs = rcs_sequence(&frames, &cfg.material, &cfg.aspect()?, cfg.mesh_frame_rate_hz)?;
    write_rcs_csv(&rcs, cfg.output_dir.join("rcs.csv"))?;

    let data = resample_to_prf(cfg, &markers, &rcs.series(cfg.polarization))?;
    let (solved, sets, failed) = solve_blocks(cfg, &data)?;
    pedrad_core::estimation::write_coefficients_csv(&solved, cfg.output_dir.join("coefficients.csv"))?;

    let mut sim_signatures = Vec::new();
    for set in &sets {
        let block = set.valid_span.0 / cfg.radar.block_pris();
        let cube_path = write_block_cube(cfg, block, set)?;
        let cube = RadarDataCube::read_binary(&cube_path, cfg.radar)?;
        let (rt, dt, rd) = block_signatures(cfg, &cube)?;
        export_signature(cfg, &rt, &format!("block_{block:04}_range_time"))?;
        export_signature(cfg, &dt, &format!("block_{block:04}_doppler_time"))?;
        for (l, map) in rd.iter().enumerate() {
            export_signature(cfg, map, &format!("block_{block:04}_range_doppler_cpi{}", l + 1))?;
        }
        sim_signatures.push((block, rt, dt, rd));
    }

    write_run_metadata(cfg, frames.len(), data.blocks, &failed)?;

    if let Some(measured_path) = measured {
        compare_signatures(cfg, &sim_signatures, &measured_path)?;
    }

    if sets.is_empty() {
        return Err(anyhow::Error::new(AllBlocksFailed(data.blocks)));
    }
    println!(
        "pipeline complete: {} of {} blocks in {}",
        sets.len(),
        data.blocks,
        cfg.output_dir.display()
    );
    Ok(())
}

/// Compares previously simulated block cubes against a measured cube file.
pub fn cmd_compare(cfg: &RunConfig, sim_dir: &Path, measured_path: &Path) -> Result<()> {
    ensure_output_dir(cfg)?;
    let mut sim_signatures = Vec::new();
    for block in 0.. {
        let path = sim_dir.join(format!("block_{block:04}.rdc"));
        if !path.exists() {
            break;
        }
        let cube = RadarDataCube::read_binary(&path, cfg.radar)?;
        let (rt, dt, rd) = block_signatures(cfg, &cube)?;
        sim_signatures.push((block, rt, dt, rd));
    }
    if sim_signatures.is_empty() {
        bail!("no block_%04d.rdc cubes found in `{}`", sim_dir.display());
    }
    compare_signatures(cfg, &sim_signatures, measured_path)
}

type BlockSignatures = (usize, SignatureMatrix, SignatureMatrix, Vec<SignatureMatrix>);

/// Applies OS-CFAR to the measured signatures only, then reports NMSE/SSIM
/// per kind and per block.
fn compare_signatures(
    cfg: &RunConfig,
    sim: &[BlockSignatures],
    measured_path: &Path,
) -> Result<()> {
    let measured = RadarDataCube::read_binary(measured_path, cfg.radar)?;
    let lp = cfg.radar.block_pris();
    if measured.slow_len() % lp != 0 {
        bail!(
            "measured cube holds {} PRIs, not a whole number of {lp}-PRI blocks",
            measured.slow_len()
        );
    }
    let measured_blocks = measured.slow_len() / lp;
    let compare_count = sim.len().min(measured_blocks);
    if compare_count < sim.len() || compare_count < measured_blocks {
        log::warn!(
            "comparing {compare_count} blocks ({} simulated vs {measured_blocks} measured)",
            sim.len()
        );
    }
    let cfar = CfarParams {
        guard: cfg.cfar_guard,
        train: cfg.cfar_train,
        rank: cfg.cfar_rank,
        scale: cfg.cfar_scale,
    };

    let mut reports: [(&str, ComparisonReport); 3] = [
        ("range_time", ComparisonReport::default()),
        ("doppler_time", ComparisonReport::default()),
        ("range_doppler", ComparisonReport::default()),
    ];
    for (i, (block, rt, dt, rd)) in sim.iter().take(compare_count).enumerate() {
        // Carve the matching block out of the measured cube.
        let mut block_cube = RadarDataCube::zeroed(cfg.radar);
        for p in 0..lp {
            block_cube
                .column_mut(p)
                .copy_from_slice(measured.column(i * lp + p));
        }
        let (mrt, mdt, mrd) = block_signatures(cfg, &block_cube)?;
        let pairs = [
            (0usize, rt, &mrt),
            (1, dt, &mdt),
            (2, &rd[0], &mrd[0]),
        ];
        for (slot, sim_matrix, meas_matrix) in pairs {
            let reference = if cfg.apply_cfar {
                cfar_masked(meas_matrix, &cfar, cfg.display_floor_dbsm)?
            } else {
                meas_matrix.clone()
            };
            reports[slot].1.blocks.push(BlockMetrics {
                block: *block,
                nmse: nmse(sim_matrix, &reference, cfg.metric_domain, cfg.display_floor_dbsm)?,
                ssim: ssim(sim_matrix, &reference, cfg.metric_domain, cfg.display_floor_dbsm)?,
            });
        }
    }
    for (kind, report) in &reports {
        let path = cfg.output_dir.join(format!("compare_{kind}.csv"));
        report.write_csv(&path)?;
        let mean_nmse =
            report.blocks.iter().map(|b| b.nmse).sum::<f64>() / report.blocks.len() as f64;
        let mean_ssim =
            report.blocks.iter().map(|b| b.ssim).sum::<f64>() / report.blocks.len() as f64;
        println!("{kind}: mean NMSE {mean_nmse:.4}, mean SSIM {mean_ssim:.4} -> {}", path.display());
    }
    Ok(())
}

/// Keeps detected cells, pushes everything else to the display floor.
fn cfar_masked(
    matrix: &SignatureMatrix,
    params: &CfarParams,
    floor_db: f64,
) -> Result<SignatureMatrix> {
    let mask = os_cfar(matrix, params)?;
    let mut out = matrix.clone();
    for r in 0..out.rows() {
        for c in 0..out.cols() {
            if !mask[(r, c)] {
                out.values_db[(r, c)] = floor_db;
            }
        }
    }
    Ok(out)
}

/// Deterministic run record: configuration echo plus every modelling
/// divergence flag that applies to this run. No timestamps.
fn write_run_metadata(
    cfg: &RunConfig,
    frame_count: usize,
    blocks: usize,
    failed: &[usize],
) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "[run]").unwrap();
    writeln!(out, "mesh_frames = {frame_count}").unwrap();
    writeln!(out, "blocks_total = {blocks}").unwrap();
    writeln!(out, "blocks_failed = {}", failed.len()).unwrap();
    if !failed.is_empty() {
        let list: Vec<String> = failed.iter().map(|b| b.to_string()).collect();
        writeln!(out, "failed_block_indices = {}", list.join(",")).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "[flags]").unwrap();
    writeln!(out, "rcs_interpolation_domain = linear_power").unwrap();
    writeln!(out, "row_count_rounding = nearest_integer").unwrap();
    writeln!(
        out,
        "block_duration_s = {:.9} (computed as LP * T_PRI)",
        cfg.radar.block_duration()
    )
    .unwrap();
    writeln!(out, "solve_mode = {:?}", cfg.solve_mode).unwrap();
    writeln!(out, "rhs_model = real_magnitudes_against_complex_phases").unwrap();
    writeln!(out, "metric_domain = {:?}", cfg.metric_domain).unwrap();
    writeln!(out, "cfar_on_measured = {}", cfg.apply_cfar).unwrap();
    writeln!(out, "doppler_time_input = first_fast_time_sample_only").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[radar]").unwrap();
    writeln!(out, "carrier_hz = {}", cfg.radar.carrier_hz).unwrap();
    writeln!(out, "bandwidth_hz = {}", cfg.radar.bandwidth_hz).unwrap();
    writeln!(out, "sampling_hz = {}", cfg.radar.sampling_hz).unwrap();
    writeln!(out, "upchirp_s = {}", cfg.radar.upchirp_s).unwrap();
    writeln!(out, "pri_s = {}", cfg.radar.pri_s).unwrap();
    writeln!(out, "chirps_per_cpi = {}", cfg.radar.chirps_per_cpi).unwrap();
    writeln!(out, "cpis_per_block = {}", cfg.radar.cpis_per_block).unwrap();
    writeln!(out, "range_resolution_m = {}", cfg.radar.range_resolution()).unwrap();
    writeln!(out, "doppler_resolution_hz = {}", cfg.radar.doppler_resolution()).unwrap();
    writeln!(out, "fast_time_samples = {}", cfg.radar.fast_time_samples()).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "[aspect]").unwrap();
    writeln!(out, "incident_azimuth_deg = {}", cfg.incident_azimuth_deg).unwrap();
    writeln!(out, "scattered_azimuth_deg = {}", cfg.scattered_azimuth_deg).unwrap();
    writeln!(out, "material = {}", cfg.material_name).unwrap();
    writeln!(out, "max_bounces = {}", cfg.max_bounces).unwrap();
    writeln!(
        out,
        "ray_spacing_m = {}",
        cfg.ray_spacing_m
            .map(|s| s.to_string())
            .unwrap_or_else(|| "auto (lambda/10)".into())
    )
    .unwrap();
    writeln!(out, "polarization = {}", cfg.polarization.name()).unwrap();
    writeln!(out, "pri_stride = {}", cfg.pri_stride).unwrap();
    let path = cfg.output_dir.join("run_metadata.txt");
    std::fs::write(&path, out).with_context(|| format!("cannot write `{}`", path.display()))
}
