//! Ray/triangle primitives and the bounding-box acceleration structure.
//!
//! The mesh is partitioned into a flat list of axis-aligned groups (recursive
//! spatial median split on the longest box axis). A ray is tested against every
//! group box; only on a box hit are the member triangles tested. This keeps the
//! query result identical to an exhaustive per-triangle search while skipping
//! most triangle tests.

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::MeshFrame;

/// Self-intersection guard distance in meters (far below lambda/10 at 77 GHz).
pub const HIT_EPSILON: f64 = 1e-9;

/// A ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Point3<f64>,
    pub direction: Vector3<f64>,
}

impl Ray {
    /// Builds a ray, normalizing `direction`.
    ///
    /// Returns a parameter error for a zero-length direction.
    pub fn new(origin: Point3<f64>, direction: Vector3<f64>) -> Result<Self> {
        let norm = direction.norm();
        if norm < 1e-300 {
            return Err(Error::Parameter("ray direction must be non-zero".into()));
        }
        Ok(Ray {
            origin,
            direction: direction / norm,
        })
    }
}

/// Result of a ray/triangle or ray/mesh query.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    /// Distance from the ray origin to the intersection point.
    pub distance: f64,
    pub point: Point3<f64>,
    /// Unit normal oriented against the incoming ray (`normal . direction < 0`).
    pub normal: Vector3<f64>,
    /// Index of the intersected triangle in the source mesh.
    pub triangle: usize,
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn grow(&mut self, p: &Point3<f64>) {
        for a in 0..3 {
            self.min[a] = self.min[a].min(p[a]);
            self.max[a] = self.max[a].max(p[a]);
        }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn longest_axis(&self) -> usize {
        let d = self.max - self.min;
        if d.x >= d.y && d.x >= d.z {
            0
        } else if d.y >= d.z {
            1
        } else {
            2
        }
    }

    /// Slab test; returns true when the ray crosses the box at any t >= 0.
    pub fn intersects_ray(&self, ray: &Ray) -> bool {
        let mut t_near = 0.0f64;
        let mut t_far = f64::INFINITY;
        for a in 0..3 {
            let d = ray.direction[a];
            let o = ray.origin[a];
            if d.abs() < 1e-300 {
                if o < self.min[a] || o > self.max[a] {
                    return false;
                }
            } else {
                let inv = 1.0 / d;
                let mut t0 = (self.min[a] - o) * inv;
                let mut t1 = (self.max[a] - o) * inv;
                if t0 > t1 {
                    std::mem::swap(&mut t0, &mut t1);
                }
                t_near = t_near.max(t0);
                t_far = t_far.min(t1);
                if t_near > t_far {
                    return false;
                }
            }
        }
        true
    }
}

/// One partition cell: a shrink-wrapped box plus the indices of its triangles.
#[derive(Debug, Clone)]
pub struct BoundingGroup {
    pub bounds: Aabb,
    pub members: Vec<usize>,
}

/// Counters for the acceleration-gain diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub struct QueryStats {
    pub box_tests: u64,
    pub triangle_tests: u64,
}

impl QueryStats {
    pub fn merge(&mut self, other: QueryStats) {
        self.box_tests += other.box_tests;
        self.triangle_tests += other.triangle_tests;
    }
}

/// Moller-Trumbore intersection against triangle `(v0, v1, v2)`.
///
/// A hit is reported only for crossings of the triangle interior at a distance
/// greater than [`HIT_EPSILON`]; the returned normal faces the incoming ray.
pub fn intersect_ray_triangle(
    ray: &Ray,
    v0: &Point3<f64>,
    v1: &Point3<f64>,
    v2: &Point3<f64>,
) -> Option<(f64, Point3<f64>, Vector3<f64>)> {
    let edge1 = v1 - v0;
    let edge2 = v2 - v0;
    let pvec = ray.direction.cross(&edge2);
    let det = edge1.dot(&pvec);
    // Near-zero determinant: ray parallel to the triangle plane.
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = ray.origin - v0;
    let u = tvec.dot(&pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&edge1);
    let v = ray.direction.dot(&qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = edge2.dot(&qvec) * inv_det;
    if t <= HIT_EPSILON {
        return None;
    }
    let point = ray.origin + ray.direction * t;
    let mut normal = edge1.cross(&edge2);
    let norm = normal.norm();
    if norm < 1e-300 {
        return None;
    }
    normal /= norm;
    if normal.dot(&ray.direction) > 0.0 {
        normal = -normal;
    }
    Some((t, point, normal))
}

/// Partitions the mesh triangles into `target_group_count` shrink-wrapped boxes.
///
/// Recursive median split on the longest axis of the triangle-centroid box.
/// Groups partition the triangle set: each triangle lands in exactly one group.
pub fn build_groups(mesh: &MeshFrame, target_group_count: usize) -> Result<Vec<BoundingGroup>> {
    if target_group_count < 1 {
        return Err(Error::Parameter(
            "target_group_count must be at least 1".into(),
        ));
    }
    let centroids: Vec<Point3<f64>> = (0..mesh.triangle_count())
        .map(|t| {
            let [a, b, c] = mesh.triangle_vertices(t);
            Point3::from((a.coords + b.coords + c.coords) / 3.0)
        })
        .collect();

    let mut partitions: Vec<Vec<usize>> = vec![(0..mesh.triangle_count()).collect()];
    // Split the largest partition until the target count is reached (or every
    // partition holds a single triangle).
    while partitions.len() < target_group_count {
        let (widest, _) = match partitions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.len() > 1)
            .max_by_key(|(_, p)| p.len())
        {
            Some((i, p)) => (i, p.len()),
            None => break,
        };
        let mut part = partitions.swap_remove(widest);
        let mut cbox = Aabb::empty();
        for &t in &part {
            cbox.grow(&centroids[t]);
        }
        let axis = cbox.longest_axis();
        part.sort_by(|&a, &b| {
            centroids[a][axis]
                .partial_cmp(&centroids[b][axis])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let right = part.split_off(part.len() / 2);
        partitions.push(part);
        partitions.push(right);
    }

    let mut groups = Vec::with_capacity(partitions.len());
    for mut members in partitions {
        members.sort_unstable();
        let mut bounds = Aabb::empty();
        for &t in &members {
            for v in mesh.triangle_vertices(t) {
                bounds.grow(&v);
            }
        }
        groups.push(BoundingGroup { bounds, members });
    }
    // Deterministic group order regardless of split history.
    groups.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    Ok(groups)
}

/// Nearest intersection of `ray` with the grouped mesh (shadowing rule: only
/// the closest hit counts). Identical result to an exhaustive search.
pub fn nearest_hit(ray: &Ray, groups: &[BoundingGroup], mesh: &MeshFrame) -> Option<Hit> {
    nearest_hit_counted(ray, groups, mesh, &mut QueryStats::default())
}

/// Same as [`nearest_hit`] but accumulates box/triangle test counters.
pub fn nearest_hit_counted(
    ray: &Ray,
    groups: &[BoundingGroup],
    mesh: &MeshFrame,
    stats: &mut QueryStats,
) -> Option<Hit> {
    let mut best: Option<Hit> = None;
    for group in groups {
        stats.box_tests += 1;
        if !group.bounds.intersects_ray(ray) {
            continue;
        }
        for &t in &group.members {
            stats.triangle_tests += 1;
            let [a, b, c] = mesh.triangle_vertices(t);
            if let Some((distance, point, normal)) = intersect_ray_triangle(ray, &a, &b, &c) {
                if best.map_or(true, |h| distance < h.distance) {
                    best = Some(Hit {
                        distance,
                        point,
                        normal,
                        triangle: t,
                    });
                }
            }
        }
    }
    best
}
