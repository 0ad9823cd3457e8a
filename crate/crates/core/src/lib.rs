//! Hybrid radar signature simulation for walking humans.
//!
//! The pipeline chains five stages: polarimetric shooting-and-bouncing-rays
//! RCS of a triangulated body mesh, spline resampling of marker tracks and
//! RCS from video frame rate to the radar PRF, complex least-squares
//! estimation of point-scatterer reflectivities, FMCW data-cube synthesis,
//! and range/Doppler signature generation with NMSE/SSIM comparison metrics.

pub mod cfar;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod kinematics;
pub mod markers;
pub mod material;
pub mod mesh;
pub mod metrics;
pub mod radar;
pub mod sbr;
pub mod shapes;
pub mod signatures;
pub mod spline;

/// Propagation speed used for all range/phase conversions, m/s.
///
/// The rounded value keeps the advertised radar resolutions exact
/// (c / (2 * 2 GHz) = 7.5 cm); one constant is used everywhere so the
/// tracer, estimator and synthesizer stay mutually consistent.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub use cfar::{os_cfar, CfarParams};
pub use error::{Error, Result};
pub use estimation::{
    assemble_system, solve_reflectivities, sweep_parameters, RegressionSystem, ScattererSet,
    SolveMode,
};
pub use geometry::{build_groups, nearest_hit, BoundingGroup, Hit, Ray};
pub use kinematics::{interpolate_rcs, interpolate_tracks, PrfTrackSet};
pub use markers::{load_marker_tracks, MarkerTrackSet};
pub use material::{fresnel_coefficients, Material};
pub use mesh::{load_mesh, load_mesh_sequence, write_mesh, MeshFrame};
pub use metrics::{compare_blocks, nmse, ssim, ComparisonReport, MetricDomain};
pub use radar::{synthesize_cube, RadarDataCube, RadarParams};
pub use sbr::{
    rcs_sequence, trace_frame, trace_frame_grouped, AspectConfig, PolAmplitudes, PolPair,
    PolarimetricRcs, RcsSeries,
};
pub use signatures::{doppler_time, range_doppler, range_time, SignatureMatrix, Window};
