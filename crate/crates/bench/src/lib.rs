//! Shared fixtures for the benchmark targets.

use nalgebra::Point3;
use num_complex::Complex64;
use pedrad_core::estimation::ScattererSet;
use pedrad_core::kinematics::PrfTrackSet;
use pedrad_core::radar::RadarParams;

/// Body-sized ellipsoid with a facet count comparable to a rendered human.
pub fn body_mesh() -> pedrad_core::MeshFrame {
    pedrad_core::shapes::uv_ellipsoid(0.25, 0.15, 0.9, 25, 64)
}

/// One walking-speed point scatterer covering a whole block.
pub fn walking_scatterer(params: &RadarParams) -> ScattererSet {
    let lp = params.block_pris();
    let positions: Vec<Vec<Point3<f64>>> = (0..lp)
        .map(|p| {
            let t = (p + 1) as f64 * params.pri_s;
            vec![Point3::new(3.75 - 1.5 * t, 0.0, 0.0)]
        })
        .collect();
    ScattererSet {
        reflectivities: vec![Complex64::new(1.0, 0.0)],
        tracks: PrfTrackSet::from_positions(params.pri_s, Point3::origin(), positions).unwrap(),
        residual: 0.0,
        valid_span: (0, lp),
    }
}
