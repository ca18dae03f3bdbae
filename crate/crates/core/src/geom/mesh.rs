//! Indexed triangle mesh with load-time cleanup and watertightness tracking.

use nalgebra::{Point3, Vector3};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Triangles thinner than this are dropped during cleanup (area in m²).
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
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
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn merge(&mut self, other: &Aabb) {
        self.grow(&other.min);
        self.grow(&other.max);
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn diagonal(&self) -> Vector3<f64> {
        self.max - self.min
    }

    /// Squared distance from `p` to the box (0 inside).
    pub fn dist2(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for k in 0..3 {
            let v = if p[k] < self.min[k] {
                self.min[k] - p[k]
            } else if p[k] > self.max[k] {
                p[k] - self.max[k]
            } else {
                0.0
            };
            d2 += v * v;
        }
        d2
    }

    pub fn intersection(&self, other: &Aabb) -> Option<Aabb> {
        let mut min = Point3::origin();
        let mut max = Point3::origin();
        for k in 0..3 {
            min[k] = self.min[k].max(other.min[k]);
            max[k] = self.max[k].min(other.max[k]);
            if min[k] >= max[k] {
                return None;
            }
        }
        Some(Aabb { min, max })
    }
}

/// Indexed triangle surface. All coordinates are meters.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Option<Vec<Vector3<f64>>>,
    watertight: bool,
}

impl TriMesh {
    /// Build a mesh, validating indices and computing the watertightness flag.
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no geometry".into()));
        }
        let n = vertices.len() as u32;
        for (i, t) in triangles.iter().enumerate() {
            if t[0] >= n || t[1] >= n || t[2] >= n {
                return Err(Error::InvalidMesh(format!(
                    "triangle {i} references vertex out of range"
                )));
            }
        }
        let watertight = edges_closed(&triangles);
        Ok(TriMesh {
            vertices,
            triangles,
            normals: None,
            watertight,
        })
    }

    /// Build and immediately drop degenerate triangles (area ≤ 1e-12 m²).
    pub fn new_cleaned(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let mut mesh = TriMesh::new(vertices, triangles)?;
        mesh.cleanup();
        Ok(mesh)
    }

    /// Remove degenerate triangles and recompute the watertightness flag.
    pub fn cleanup(&mut self) {
        self.triangles.retain(|t| {
            let [a, b, c] = tri_points(&self.vertices, t);
            triangle_area(&a, &b, &c) > DEGENERATE_AREA
        });
        self.watertight = !self.triangles.is_empty() && edges_closed(&self.triangles);
    }

    /// True iff every edge is shared by exactly two consistently oriented triangles.
    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    pub fn triangle(&self, i: usize) -> [Point3<f64>; 3] {
        tri_points(&self.vertices, &self.triangles[i])
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        triangle_area(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|i| self.triangle_area(i)).sum()
    }

    pub fn aabb(&self) -> Aabb {
        let mut bb = Aabb::empty();
        for v in &self.vertices {
            bb.grow(v);
        }
        bb
    }

    /// Area-weighted centroid of the surface.
    pub fn surface_centroid(&self) -> Point3<f64> {
        let mut acc = Vector3::zeros();
        let mut area = 0.0;
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(i);
            let w = triangle_area(&a, &b, &c);
            let centroid = (a.coords + b.coords + c.coords) / 3.0;
            acc += w * centroid;
            area += w;
        }
        Point3::from(acc / area)
    }

    /// Enclosed volume by the divergence theorem; meaningful for watertight meshes.
    pub fn signed_volume(&self) -> f64 {
        let mut v = 0.0;
        for t in &self.triangles {
            let [a, b, c] = tri_points(&self.vertices, t);
            v += a.coords.dot(&(b.coords - a.coords).cross(&(c.coords - a.coords))) / 6.0;
        }
        v
    }

    /// Apply `f` to every vertex in place, keeping topology.
    pub fn map_vertices(&mut self, mut f: impl FnMut(&Point3<f64>) -> Point3<f64>) {
        for v in &mut self.vertices {
            *v = f(v);
        }
    }

    /// Same topology (and watertightness flag) with replaced vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Point3<f64>>) -> TriMesh {
        assert_eq!(vertices.len(), self.vertices.len());
        TriMesh {
            vertices,
            triangles: self.triangles.clone(),
            normals: None,
            watertight: self.watertight,
        }
    }

    /// Copy with transformed vertices.
    pub fn transformed(&self, f: impl Fn(&Point3<f64>) -> Point3<f64>) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(&f).collect(),
            triangles: self.triangles.clone(),
            normals: None,
            watertight: self.watertight,
        }
    }

    /// Scale all vertices by `s` about `center`.
    pub fn scale_about(&mut self, s: f64, center: &Point3<f64>) {
        self.map_vertices(|v| center + (v - center) * s);
    }

    /// Face normal area vector (non-normalized: 2·area·n̂).
    pub fn face_area_normal(&self, i: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle(i);
        (b - a).cross(&(c - a))
    }
}

pub(crate) fn tri_points(vertices: &[Point3<f64>], t: &[u32; 3]) -> [Point3<f64>; 3] {
    [
        vertices[t[0] as usize],
        vertices[t[1] as usize],
        vertices[t[2] as usize],
    ]
}

pub fn triangle_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Every undirected edge must be used exactly twice, once in each direction.
fn edges_closed(triangles: &[[u32; 3]]) -> bool {
    // i32 balance: +1 for (a,b) with a<b, -1 for the reverse; closed manifold
    // needs count == 2 and balance == 0 on every edge.
    let mut edges: HashMap<(u32, u32), (u32, i32)> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let a = t[k];
            let b = t[(k + 1) % 3];
            if a == b {
                return false;
            }
            let (key, dir) = if a < b { ((a, b), 1) } else { ((b, a), -1) };
            let e = edges.entry(key).or_insert((0, 0));
            e.0 += 1;
            e.1 += dir;
        }
    }
    edges.values().all(|&(count, balance)| count == 2 && balance == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> (Vec<Point3<f64>>, Vec<[u32; 3]>) {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let t = vec![[0, 1, 2], [0, 2, 3]];
        (v, t)
    }

    #[test]
    fn rejects_empty_mesh() {
        assert!(matches!(
            TriMesh::new(vec![], vec![]),
            Err(Error::InvalidMesh(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_index() {
        let (v, _) = quad();
        assert!(TriMesh::new(v, vec![[0, 1, 9]]).is_err());
    }

    #[test]
    fn open_quad_is_not_watertight() {
        let (v, t) = quad();
        let mesh = TriMesh::new(v, t).unwrap();
        assert!(!mesh.is_watertight());
    }

    #[test]
    fn tetrahedron_is_watertight() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        // Outward-oriented faces.
        let t = vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
        let mesh = TriMesh::new(v, t).unwrap();
        assert!(mesh.is_watertight());
        assert!((mesh.signed_volume() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn cleanup_drops_degenerate_triangles() {
        let (mut v, mut t) = quad();
        v.push(Point3::new(2.0, 2.0, 0.0));
        t.push([2, 2, 4]); // zero area
        let mesh = TriMesh::new_cleaned(v, t).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
    }
}
