//! Linear regression of point-scatterer reflectivities from RCS magnitudes.
//!
//! Over one block of `LP` PRIs the reflectivities are assumed constant while
//! the scatterer ranges move. Sampling K rows spread across the block builds
//! `Phi A = Psi` with unit-modulus phase entries `exp(-j 2 pi f_c 2 r_b[p]/c)`
//! and `Psi_k = sqrt(sigma[p_k])`; the least-squares solution is computed from
//! a singular value decomposition rather than explicit normal equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::PrfTrackSet;
use crate::SPEED_OF_LIGHT;

/// Condition-number gate for the least-squares solve.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Complex least-squares semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Proper complex least squares (conjugate-transpose semantics) via SVD.
    #[default]
    Hermitian,
    /// Literal plain-transpose normal equations `(Phi^T Phi)^-1 Phi^T Psi`,
    /// provided for comparison; incorrect for complex data.
    TransposeLiteral,
}

impl std::str::FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermitian" => Ok(SolveMode::Hermitian),
            "transpose_literal" => Ok(SolveMode::TransposeLiteral),
            other => Err(Error::Parameter(format!("unknown solve mode `{other}`"))),
        }
    }
}

/// The assembled regression system for one block.
#[derive(Debug, Clone)]
pub struct RegressionSystem {
    /// K x B unit-modulus phase matrix.
    pub phi: DMatrix<Complex64>,
    /// Right-hand side; real non-negative when assembled from RCS data.
    pub psi: DVector<Complex64>,
    /// 1-based PRI index actually sampled per row.
    pub row_pri_indices: Vec<usize>,
    pub pri_stride: usize,
    pub cpi_count: usize,
    pub chirps_per_cpi: usize,
}

impl RegressionSystem {
    pub fn row_count(&self) -> usize {
        self.phi.nrows()
    }

    pub fn scatterer_count(&self) -> usize {
        self.phi.ncols()
    }
}

/// Reflectivities solved for one block, with the tracks they apply to.
#[derive(Debug, Clone)]
pub struct ScattererSet {
    pub reflectivities: Vec<Complex64>,
    pub tracks: PrfTrackSet,
    /// Normalized residual of the solve, `|Psi - Phi A|^2 / |Psi|^2`.
    pub residual: f64,
    /// `(first_pri, pri_count)` of the block within the full motion, 0-based.
    pub valid_span: (usize, usize),
}

/// Result of one least-squares solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: DVector<Complex64>,
    /// `|Psi - Phi A|^2 / |Psi|^2`.
    pub residual: f64,
    /// Singular-value condition estimate of Phi.
    pub condition: f64,
}

/// Number of regression rows for a block: `LP / M` rounded to nearest.
///
/// The worked operating point (P = 1024, L = 2, M = 80) yields K = 26 = B + 3,
/// which only holds under nearest-integer rounding.
pub fn row_count_for(pri_stride: usize, cpi_count: usize, chirps_per_cpi: usize) -> usize {
    let lp = (cpi_count * chirps_per_cpi) as f64;
    ((lp / pri_stride as f64).round() as usize).max(1)
}

/// Builds the regression system from one block of tracks and per-PRI RCS.
///
/// Rows are spread uniformly over the block (row k samples PRI
/// `1 + round(k (LP-1)/(K-1))`), preserving the `T_short ~ M T_PRI` spacing
/// for every K. With `strict`, K < B is rejected as underdetermined.
pub fn assemble_system(
    tracks: &PrfTrackSet,
    sigma_pri: &[f64],
    carrier_hz: f64,
    pri_stride: usize,
    cpi_count: usize,
    chirps_per_cpi: usize,
    strict: bool,
) -> Result<RegressionSystem> {
    if pri_stride < 1 || cpi_count < 1 || chirps_per_cpi < 1 {
        return Err(Error::Parameter(
            "stride, CPI count and chirps per CPI must be at least 1".into(),
        ));
    }
    let lp = cpi_count * chirps_per_cpi;
    if tracks.pri_count() < lp {
        return Err(Error::SpanOutOfRange(format!(
            "block needs {lp} PRIs of tracks, {} available",
            tracks.pri_count()
        )));
    }
    if sigma_pri.len() < lp {
        return Err(Error::SpanOutOfRange(format!(
            "block needs {lp} PRIs of RCS, {} available",
            sigma_pri.len()
        )));
    }
    let scatterers = tracks.marker_count();
    let rows = row_count_for(pri_stride, cpi_count, chirps_per_cpi);
    if strict && rows < scatterers {
        return Err(Error::Underdetermined {
            rows,
            columns: scatterers,
        });
    }

    let row_pri_indices: Vec<usize> = if rows == 1 {
        vec![1]
    } else {
        (0..rows)
            .map(|k| 1 + ((k * (lp - 1)) as f64 / (rows - 1) as f64).round() as usize)
            .collect()
    };

    let phase_scale = -4.0 * std::f64::consts::PI * carrier_hz / SPEED_OF_LIGHT;
    let mut phi = DMatrix::zeros(rows, scatterers);
    let mut psi = DVector::zeros(rows);
    for (k, &p) in row_pri_indices.iter().enumerate() {
        let pri = p - 1;
        for b in 0..scatterers {
            phi[(k, b)] = Complex64::from_polar(1.0, phase_scale * tracks.range(pri, b));
        }
        psi[k] = Complex64::new(sigma_pri[pri].max(0.0).sqrt(), 0.0);
    }
    Ok(RegressionSystem {
        phi,
        psi,
        row_pri_indices,
        pri_stride,
        cpi_count,
        chirps_per_cpi,
    })
}

/// Solves the block system for the reflectivities.
pub fn solve_reflectivities(system: &RegressionSystem, mode: SolveMode) -> Result<Solution> {
    let phi = &system.phi;
    let psi = &system.psi;

    let svd = phi.clone().svd(true, true);
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let s_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::Singular { condition });
    }

    let coefficients = match mode {
        SolveMode::Hermitian => svd
            .solve(psi, s_max * 1e-15)
            .map_err(|_| Error::Singular { condition })?
            .column(0)
            .into_owned(),
        SolveMode::TransposeLiteral => {
            let gram = phi.transpose() * phi; // plain transpose, no conjugation
            let rhs = phi.transpose() * psi;
            gram.lu()
                .solve(&rhs)
                .ok_or(Error::Singular { condition })?
                .column(0)
                .into_owned()
        }
    };

    let misfit = psi - phi * &coefficients;
    let psi_norm = psi.norm_squared();
    let residual = if psi_norm > 0.0 {
        misfit.norm_squared() / psi_norm
    } else {
        0.0
    };
    Ok(Solution {
        coefficients,
        residual,
        condition,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub pri_stride: usize,
    pub cpi_count: usize,
    pub row_count: usize,
    pub mean_residual: f64,
    pub blocks_evaluated: usize,
    pub blocks_failed: usize,
}

/// Sweep output: rows sorted by mean residual, infeasible combos noted.
#[derive(Debug, Clone, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<(usize, usize, String)>,
}

/// Evaluates every (stride, CPI-count) candidate over all full blocks of the
/// motion and averages the solve residual per candidate.
pub fn sweep_parameters(
    tracks: &PrfTrackSet,
    sigma_pri: &[f64],
    carrier_hz: f64,
    stride_candidates: &[usize],
    cpi_candidates: &[usize],
    chirps_per_cpi: usize,
) -> SweepTable {
    let mut table = SweepTable::default();
    for &cpi_count in cpi_candidates {
        for &stride in stride_candidates {
            let lp = cpi_count * chirps_per_cpi;
            if lp == 0 || stride == 0 {
                table
                    .skipped
                    .push((stride, cpi_count, "zero-sized candidate".into()));
                continue;
            }
            let block_count = tracks.pri_count().min(sigma_pri.len()) / lp;
            if block_count == 0 {
                table.skipped.push((
                    stride,
                    cpi_count,
                    format!("block of {lp} PRIs exceeds the data span"),
                ));
                continue;
            }
            let results: Vec<Option<f64>> = (0..block_count)
                .into_par_iter()
                .map(|block| {
                    let window = tracks.window(block * lp, lp).ok()?;
                    let sigma = &sigma_pri[block * lp..(block + 1) * lp];
                    let system = assemble_system(
                        &window,
                        sigma,
                        carrier_hz,
                        stride,
                        cpi_count,
                        chirps_per_cpi,
                        false,
                    )
                    .ok()?;
                    solve_reflectivities(&system, SolveMode::Hermitian)
                        .ok()
                        .map(|s| s.residual)
                })
                .collect();
            let ok: Vec<f64> = results.iter().flatten().cloned().collect();
            let failed = results.len() - ok.len();
            if ok.is_empty() {
                table.skipped.push((
                    stride,
                    cpi_count,
                    format!("all {block_count} blocks failed to solve"),
                ));
                continue;
            }
            table.rows.push(SweepRow {
                pri_stride: stride,
                cpi_count,
                row_count: row_count_for(stride, cpi_count, chirps_per_cpi),
                mean_residual: ok.iter().sum::<f64>() / ok.len() as f64,
                blocks_evaluated: block_count,
                blocks_failed: failed,
            });
        }
    }
    table
        .rows
        .sort_by(|a, b| a.mean_residual.partial_cmp(&b.mean_residual).unwrap());
    table
}

/// One solved block for the coefficient table.
#[derive(Debug, Clone)]
pub struct BlockCoefficients {
    pub block: usize,
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
}

/// Writes the coefficient table: `block_index,b,re_a,im_a,abs_a,residual`
/// with 1-based scatterer indices.
pub fn write_coefficients_csv(
    blocks: &[BlockCoefficients],
    path: impl AsRef<std::path::Path>,
) -> Result<()> {
    use std::fmt::Write as _;
    let path = path.as_ref();
    let mut out = String::from("block_index,b,re_a,im_a,abs_a,residual\n");
    for block in blocks {
        for (b, a) in block.coefficients.iter().enumerate() {
            writeln!(
                out,
                "{},{},{:.12e},{:.12e},{:.12e},{:.9e}",
                block.block,
                b + 1,
                a.re,
                a.im,
                a.norm(),
                block.residual
            )
            .expect("string write");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads the coefficient table back, grouped by block index.
pub fn read_coefficients_csv(path: impl AsRef<std::path::Path>) -> Result<Vec<BlockCoefficients>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut lines = text.lines();
    if lines.next() != Some("block_index,b,re_a,im_a,abs_a,residual") {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: "unexpected coefficient table header".into(),
        });
    }
    let mut blocks: Vec<BlockCoefficients> = Vec::new();
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
        let block_index = parse(fields[0])? as usize;
        let coefficient = Complex64::new(parse(fields[2])?, parse(fields[3])?);
        let residual = parse(fields[5])?;
        match blocks.last_mut() {
            Some(last) if last.block == block_index => last.coefficients.push(coefficient),
            _ => blocks.push(BlockCoefficients {
                block: block_index,
                coefficients: vec![coefficient],
                residual,
            }),
        }
    }
    Ok(blocks)
}
