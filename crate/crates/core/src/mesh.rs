//! Triangulated body poses and the ASCII OBJ subset used to exchange them.
//!
//! The accepted format is deliberately narrow: `v x y z` and `f i j k` lines
//! only, 1-based indices, triangles only. Coordinates are meters on an x-y
//! ground plane with height along +z.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};

/// Triangles with an area below this are rejected as degenerate (m^2).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// One time-stamped triangulated body pose.
#[derive(Debug, Clone)]
pub struct MeshFrame {
    pub timestamp: f64,
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[usize; 3]>,
}

impl MeshFrame {
    /// Validates index ranges and triangle non-degeneracy.
    pub fn new(
        timestamp: f64,
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        if !triangles.is_empty() && vertices.is_empty() {
            return Err(Error::InvalidMesh(
                "triangles present but no vertices".into(),
            ));
        }
        for (i, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {i} references vertex {v} of {}",
                        vertices.len()
                    )));
                }
            }
            let e1 = vertices[tri[1]] - vertices[tri[0]];
            let e2 = vertices[tri[2]] - vertices[tri[0]];
            if 0.5 * e1.cross(&e2).norm() < MIN_TRIANGLE_AREA {
                return Err(Error::InvalidMesh(format!("triangle {i} is degenerate")));
            }
        }
        Ok(MeshFrame {
            timestamp,
            vertices,
            triangles,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, index: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[index];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Rigidly rotates the mesh about the z axis (radians).
    pub fn rotated_z(&self, angle: f64) -> MeshFrame {
        let (s, c) = angle.sin_cos();
        let vertices = self
            .vertices
            .iter()
            .map(|p| Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z))
            .collect();
        MeshFrame {
            timestamp: self.timestamp,
            vertices,
            triangles: self.triangles.clone(),
        }
    }

    /// Rigidly translates the mesh.
    pub fn translated(&self, offset: nalgebra::Vector3<f64>) -> MeshFrame {
        MeshFrame {
            timestamp: self.timestamp,
            vertices: self.vertices.iter().map(|p| p + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Merges another mesh into this one (indices re-based).
    pub fn merged(&self, other: &MeshFrame) -> MeshFrame {
        let base = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(other.triangles.iter().map(|t| t.map(|v| v + base)));
        MeshFrame {
            timestamp: self.timestamp,
            vertices,
            triangles,
        }
    }
}

/// Parses one OBJ file of the accepted subset.
pub fn load_mesh(path: impl AsRef<Path>, timestamp: f64) -> Result<MeshFrame> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_obj(&text, &path.display().to_string(), timestamp)
}

fn parse_obj(text: &str, path: &str, timestamp: f64) -> Result<MeshFrame> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = fields.next().ok_or_else(|| Error::Parse {
                        path: path.into(),
                        line: lineno,
                        message: "vertex line needs three coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| Error::Parse {
                        path: path.into(),
                        line: lineno,
                        message: format!("bad coordinate `{tok}`"),
                    })?;
                }
                if fields.next().is_some() {
                    return Err(Error::Parse {
                        path: path.into(),
                        line: lineno,
                        message: "vertex line has more than three coordinates".into(),
                    });
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<&str> = fields.collect();
                if idx.len() != 3 {
                    return Err(Error::UnsupportedGeometry {
                        path: path.into(),
                        line: lineno,
                        message: format!("face with {} vertices; only triangles accepted", idx.len()),
                    });
                }
                let mut tri = [0usize; 3];
                for (slot, tok) in tri.iter_mut().zip(&idx) {
                    let one_based: usize = tok.parse().map_err(|_| Error::Parse {
                        path: path.into(),
                        line: lineno,
                        message: format!("bad face index `{tok}`"),
                    })?;
                    if one_based == 0 || one_based > vertices.len() {
                        return Err(Error::Parse {
                            path: path.into(),
                            line: lineno,
                            message: format!("face index {one_based} out of range"),
                        });
                    }
                    *slot = one_based - 1;
                }
                triangles.push(tri);
            }
            Some(other) => {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno,
                    message: format!("unsupported line type `{other}`"),
                });
            }
            None => {}
        }
    }
    MeshFrame::new(timestamp, vertices, triangles)
}

/// Writes a mesh in the same OBJ subset. Coordinates use shortest
/// round-trip formatting, so load(write(m)) reproduces them bit-exactly.
pub fn write_mesh(mesh: &MeshFrame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for v in mesh.vertices() {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).expect("string write");
    }
    for t in mesh.triangles() {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).expect("string write");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Loads `frame_%04d.obj`-style sequences; timestamps are `index / frame_rate`.
///
/// `path_pattern` must contain a single `%0Nd` placeholder. Frames are loaded
/// from index 0 upward until the first missing file; at least one frame must
/// exist.
pub fn load_mesh_sequence(path_pattern: &str, frame_rate_hz: f64) -> Result<Vec<MeshFrame>> {
    if frame_rate_hz <= 0.0 {
        return Err(Error::Parameter("frame rate must be positive".into()));
    }
    let mut frames = Vec::new();
    loop {
        let path = expand_pattern(path_pattern, frames.len())?;
        if !Path::new(&path).exists() {
            break;
        }
        frames.push(load_mesh(&path, frames.len() as f64 / frame_rate_hz)?);
    }
    if frames.is_empty() {
        return Err(Error::Parameter(format!(
            "no mesh frames found for pattern `{path_pattern}`"
        )));
    }
    Ok(frames)
}

/// Expands a `%0Nd` (or `%d`) placeholder with a frame index.
pub fn expand_pattern(pattern: &str, index: usize) -> Result<String> {
    let Some(start) = pattern.find('%') else {
        return Err(Error::Parameter(format!(
            "mesh pattern `{pattern}` lacks a %d placeholder"
        )));
    };
    let rest = &pattern[start + 1..];
    let digits_end = rest
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(rest.len());
    let (width_str, after) = rest.split_at(digits_end);
    if !after.starts_with('d') {
        return Err(Error::Parameter(format!(
            "mesh pattern `{pattern}` has a malformed placeholder"
        )));
    }
    let width: usize = if width_str.is_empty() {
        0
    } else {
        width_str
            .trim_start_matches('0')
            .parse()
            .or_else(|_| width_str.parse())
            .map_err(|_| Error::Parameter(format!("bad placeholder width in `{pattern}`")))?
    };
    Ok(format!(
        "{}{:0width$}{}",
        &pattern[..start],
        index,
        &after[1..],
        width = width
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_single_triangle() {
        let mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "mem", 0.0).unwrap();
        assert_eq!(mesh.triangle_count(), 1);
        assert_eq!(mesh.vertices().len(), 3);
    }

    #[test]
    fn quad_rejected() {
        let err = parse_obj(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n",
            "mem",
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedGeometry { line: 5, .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_obj("v 0 0 0\nv 1 0 zero\n", "mem", 0.0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn degenerate_triangle_rejected_at_load() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n", "mem", 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)), "{err}");
    }

    #[test]
    fn sequence_timestamps_follow_frame_rate() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..69 {
            let path = dir.path().join(format!("frame_{i:04}.obj"));
            std::fs::write(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        }
        let pattern = dir.path().join("frame_%04d.obj");
        let frames = load_mesh_sequence(pattern.to_str().unwrap(), 60.0).unwrap();
        assert_eq!(frames.len(), 69);
        assert!((frames[0].timestamp - 0.0).abs() < 1e-15);
        assert!((frames[68].timestamp - 68.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn missing_sequence_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let pattern = dir.path().join("frame_%04d.obj");
        assert!(load_mesh_sequence(pattern.to_str().unwrap(), 60.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn write_load_round_trip_is_bit_exact(
            coords in proptest::collection::vec(
                (-100.0f64..100.0, -100.0f64..100.0, 0.0f64..2.0), 3..30)
        ) {
            let verts: Vec<Point3<f64>> = coords.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
            let tris: Vec<[usize; 3]> = (0..verts.len() / 3)
                .map(|i| [3 * i, 3 * i + 1, 3 * i + 2])
                .filter(|&[a, b, c]| {
                    let e1 = verts[b] - verts[a];
                    let e2 = verts[c] - verts[a];
                    0.5 * e1.cross(&e2).norm() >= MIN_TRIANGLE_AREA
                })
                .collect();
            let mesh = MeshFrame::new(0.0, verts, tris).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("roundtrip.obj");
            write_mesh(&mesh, &path).unwrap();
            let back = load_mesh(&path, 0.0).unwrap();
            prop_assert_eq!(mesh.vertices().len(), back.vertices().len());
            for (a, b) in mesh.vertices().iter().zip(back.vertices()) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
                prop_assert_eq!(a.z.to_bits(), b.z.to_bits());
            }
            prop_assert_eq!(mesh.triangles(), back.triangles());
        }
    }
}
