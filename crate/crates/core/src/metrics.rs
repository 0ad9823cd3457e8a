//! NMSE and global SSIM between two signatures.
//!
//! Both metrics operate on the matrix values as given; the caller picks the
//! domain (floored dB by default, linear power behind a flag). NMSE treats
//! its second argument as the reference and is asymmetric; SSIM is exactly
//! symmetric. The SSIM here is the constant-free global-statistics form;
//! stabilization constants activate only when a denominator vanishes.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signatures::SignatureMatrix;

/// Domain on which the comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricDomain {
    /// dB values with a common display floor applied (default).
    #[default]
    FlooredDb,
    /// Linear power values.
    LinearPower,
}

impl std::str::FromStr for MetricDomain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "db" => Ok(MetricDomain::FlooredDb),
            "linear" => Ok(MetricDomain::LinearPower),
            other => Err(Error::Parameter(format!("unknown metric domain `{other}`"))),
        }
    }
}

fn check_shapes(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// Normalized mean square error `|sim - reference|^2 / |reference|^2`.
pub fn nmse_values(sim: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<f64> {
    check_shapes(sim, reference)?;
    let denom: f64 = reference.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = sim
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(num / denom)
}

/// Global SSIM from means, variances and covariance of the two matrices.
pub fn ssim_values(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    check_shapes(a, b)?;
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut covar = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let da = x - mean_a;
        let db = y - mean_b;
        var_a += da * da;
        var_b += db * db;
        covar += da * db;
    }
    var_a /= n;
    var_b /= n;
    covar /= n;

    // Dynamic range for the stabilization constants, used only on underflow.
    let hi = a.iter().chain(b.iter()).cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = a.iter().chain(b.iter()).cloned().fold(f64::INFINITY, f64::min);
    let range = hi - lo;

    let luminance = stabilized(2.0 * mean_a * mean_b, mean_a * mean_a + mean_b * mean_b, {
        let c1 = 0.01 * range;
        c1 * c1
    });
    let structure = stabilized(2.0 * covar, var_a + var_b, {
        let c2 = 0.03 * range;
        c2 * c2
    });
    Ok(luminance * structure)
}

/// `num/den`, falling back to the stabilized ratio when `den` vanishes and to
/// 1 when the constant vanishes too (identical constant inputs).
fn stabilized(num: f64, den: f64, constant: f64) -> f64 {
    if den != 0.0 {
        num / den
    } else if constant != 0.0 {
        (num + constant) / (den + constant)
    } else {
        1.0
    }
}

fn domain_values(matrix: &SignatureMatrix, domain: MetricDomain, floor_db: f64) -> DMatrix<f64> {
    match domain {
        MetricDomain::FlooredDb => matrix.floored(floor_db).values_db,
        MetricDomain::LinearPower => matrix.to_linear_power(),
    }
}

/// NMSE between a simulated signature and a measured reference.
pub fn nmse(
    sim: &SignatureMatrix,
    reference: &SignatureMatrix,
    domain: MetricDomain,
    floor_db: f64,
) -> Result<f64> {
    nmse_values(
        &domain_values(sim, domain, floor_db),
        &domain_values(reference, domain, floor_db),
    )
}

/// SSIM between two signatures.
pub fn ssim(
    a: &SignatureMatrix,
    b: &SignatureMatrix,
    domain: MetricDomain,
    floor_db: f64,
) -> Result<f64> {
    ssim_values(
        &domain_values(a, domain, floor_db),
        &domain_values(b, domain, floor_db),
    )
}

/// Metrics of one block.
#[derive(Debug, Clone, Copy)]
pub struct BlockMetrics {
    pub block: usize,
    pub nmse: f64,
    pub ssim: f64,
}

/// Per-block comparison series (one row per reflectivity block).
#[derive(Debug, Clone, Default)]
pub struct ComparisonReport {
    pub blocks: Vec<BlockMetrics>,
}

impl ComparisonReport {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("block,nmse,ssim\n");
        for row in &self.blocks {
            writeln!(out, "{},{:.9e},{:.9e}", row.block, row.nmse, row.ssim).unwrap();
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Compares matching per-block signatures; the second slice is the reference.
pub fn compare_blocks(
    sims: &[SignatureMatrix],
    references: &[SignatureMatrix],
    domain: MetricDomain,
    floor_db: f64,
) -> Result<ComparisonReport> {
    if sims.len() != references.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} simulated blocks vs {} reference blocks",
            sims.len(),
            references.len()
        )));
    }
    let mut report = ComparisonReport::default();
    for (i, (s, m)) in sims.iter().zip(references).enumerate() {
        report.blocks.push(BlockMetrics {
            block: i,
            nmse: nmse(s, m, domain, floor_db)?,
            ssim: ssim(s, m, domain, floor_db)?,
        });
    }
    Ok(report)
}
