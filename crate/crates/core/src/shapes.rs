//! Canonical calibration targets.
//!
//! Flat plates pin the tracer normalization against the classic
//! high-frequency closed form; the ellipsoid stands in for a body-sized
//! target in acceleration and scaling checks.

use nalgebra::Point3;

use crate::mesh::MeshFrame;

/// Square plate of the given side in the y-z plane (normal along +x),
/// centered at `(x_offset, 0, 0)`. Two triangles.
pub fn square_plate(side: f64, x_offset: f64) -> MeshFrame {
    let h = side / 2.0;
    let verts = vec![
        Point3::new(x_offset, -h, -h),
        Point3::new(x_offset, h, -h),
        Point3::new(x_offset, h, h),
        Point3::new(x_offset, -h, h),
    ];
    let tris = vec![[0, 1, 2], [0, 2, 3]];
    MeshFrame::new(0.0, verts, tris).expect("plate is always valid")
}

/// UV-tessellated ellipsoid with semi-axes `(a, b, c)` centered at the origin.
/// Produces `2 * (stacks - 1) * slices` triangles.
pub fn uv_ellipsoid(a: f64, b: f64, c: f64, stacks: usize, slices: usize) -> MeshFrame {
    assert!(stacks >= 2 && slices >= 3);
    let mut verts = Vec::new();
    // Rings from pole to pole, excluding the poles themselves.
    for i in 1..stacks {
        let theta = std::f64::consts::PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / slices as f64;
            verts.push(Point3::new(
                a * theta.sin() * phi.cos(),
                b * theta.sin() * phi.sin(),
                c * theta.cos(),
            ));
        }
    }
    let north = verts.len();
    verts.push(Point3::new(0.0, 0.0, c));
    let south = verts.len();
    verts.push(Point3::new(0.0, 0.0, -c));

    let ring = |i: usize, j: usize| (i - 1) * slices + (j % slices);
    let mut tris = Vec::new();
    for j in 0..slices {
        tris.push([north, ring(1, j), ring(1, j + 1)]);
        tris.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            tris.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            tris.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    MeshFrame::new(0.0, verts, tris).expect("ellipsoid is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipsoid_triangle_count() {
        let m = uv_ellipsoid(0.25, 0.15, 0.9, 25, 64);
        assert_eq!(m.triangle_count(), 2 * 24 * 64);
        assert!(m.triangle_count() >= 3000, "body proxy must be >= 3000 facets");
    }

    #[test]
    fn plate_area() {
        let m = square_plate(2.0, 0.0);
        let area: f64 = (0..m.triangle_count())
            .map(|t| {
                let [a, b, c] = m.triangle_vertices(t);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum();
        assert!((area - 4.0).abs() < 1e-12);
    }
}
