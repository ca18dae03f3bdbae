//! Signed distance queries against triangle meshes.
//!
//! Distance comes from the BVH nearest-triangle search; the sign from the
//! generalized winding number (≥ 0.5 means inside). Gradients follow the
//! nearest-point direction away from the surface and fall back to the
//! angle-weighted pseudo-normal when the query sits on the surface itself.

use nalgebra::{Point3, Vector3};
use std::collections::HashMap;

use super::bvh::Bvh;
use super::mesh::TriMesh;
use super::tri::TriFeature;
use super::winding::WindingIndex;
use crate::error::{Error, Result};

/// Queries closer to the surface than this take the pseudo-normal gradient.
const SURFACE_EPS: f64 = 1e-9;

/// One signed-distance query result.
#[derive(Debug, Clone, Copy)]
pub struct SdfResult {
    /// Signed distance in meters, negative inside.
    pub value: f64,
    /// Unit direction of increasing distance.
    pub gradient: Vector3<f64>,
    /// Closest point on the mesh surface.
    pub nearest: Point3<f64>,
}

/// Angle-weighted pseudo-normals for faces, edges, and vertices.
struct PseudoNormals {
    face: Vec<Vector3<f64>>,
    edge: HashMap<(u32, u32), Vector3<f64>>,
    vertex: Vec<Vector3<f64>>,
}

impl PseudoNormals {
    fn build(mesh: &TriMesh) -> Self {
        let mut face = Vec::with_capacity(mesh.triangles.len());
        let mut edge: HashMap<(u32, u32), Vector3<f64>> = HashMap::new();
        let mut vertex = vec![Vector3::zeros(); mesh.vertices.len()];

        for (i, t) in mesh.triangles.iter().enumerate() {
            let [a, b, c] = mesh.triangle(i);
            let n = (b - a).cross(&(c - a));
            let n_unit = if n.norm() > 0.0 { n.normalize() } else { n };
            face.push(n_unit);

            for k in 0..3 {
                let (va, vb) = (t[k], t[(k + 1) % 3]);
                let key = if va < vb { (va, vb) } else { (vb, va) };
                *edge.entry(key).or_insert_with(Vector3::zeros) += n_unit;
            }

            let corners = [a, b, c];
            for k in 0..3 {
                let prev = corners[(k + 2) % 3];
                let cur = corners[k];
                let next = corners[(k + 1) % 3];
                let u = next - cur;
                let v = prev - cur;
                let angle = u.angle(&v);
                vertex[t[k] as usize] += angle * n_unit;
            }
        }

        for n in edge.values_mut() {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        for n in vertex.iter_mut() {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        PseudoNormals { face, edge, vertex }
    }
}

/// Bundled index for repeated distance queries against one mesh.
pub struct SdfIndex {
    bvh: Bvh,
    winding: WindingIndex,
    pseudo: PseudoNormals,
    triangles: Vec<[u32; 3]>,
    watertight: bool,
}

impl SdfIndex {
    pub fn build(mesh: &TriMesh) -> Result<Self> {
        Ok(SdfIndex {
            bvh: Bvh::build(mesh)?,
            winding: WindingIndex::build(mesh),
            pseudo: PseudoNormals::build(mesh),
            triangles: mesh.triangles.clone(),
            watertight: mesh.is_watertight(),
        })
    }

    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub fn winding(&self) -> &WindingIndex {
        &self.winding
    }

    /// Unsigned distance (value ≥ 0) with the same gradient conventions.
    pub fn unsigned(&self, q: &Point3<f64>) -> SdfResult {
        let hit = self.bvh.nearest(q);
        let gradient = if hit.dist > SURFACE_EPS {
            (q - hit.point) / hit.dist
        } else {
            self.feature_normal(hit.tri, hit.feature)
        };
        SdfResult {
            value: hit.dist,
            gradient,
            nearest: hit.point,
        }
    }

    /// Signed distance; requires a watertight mesh.
    pub fn signed(&self, q: &Point3<f64>) -> Result<SdfResult> {
        if !self.watertight {
            return Err(Error::SignRequiresWatertight);
        }
        let hit = self.bvh.nearest(q);
        if hit.dist <= SURFACE_EPS {
            return Ok(SdfResult {
                value: 0.0,
                gradient: self.feature_normal(hit.tri, hit.feature),
                nearest: hit.point,
            });
        }
        let inside = self.winding.is_inside(q);
        let value = if inside { -hit.dist } else { hit.dist };
        // Outside: away from the surface. Inside: toward the surface, i.e.
        // still the direction in which the signed value increases.
        let gradient = (q - hit.point) / value;
        Ok(SdfResult {
            value,
            gradient,
            nearest: hit.point,
        })
    }

    /// Inside test (winding ≥ 0.5); requires a watertight mesh.
    pub fn inside(&self, q: &Point3<f64>) -> Result<bool> {
        if !self.watertight {
            return Err(Error::SignRequiresWatertight);
        }
        Ok(self.winding.is_inside(q))
    }

    fn feature_normal(&self, tri: u32, feature: TriFeature) -> Vector3<f64> {
        let t = &self.triangles[tri as usize];
        match feature {
            TriFeature::Face => self.pseudo.face[tri as usize],
            TriFeature::Edge(k) => {
                let (a, b) = (t[k as usize], t[(k as usize + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                self.pseudo.edge[&key]
            }
            TriFeature::Vertex(k) => self.pseudo.vertex[t[k as usize] as usize],
        }
    }
}

/// Convenience wrappers matching the kernel-level call shapes.
pub fn build_bvh(mesh: &TriMesh) -> Result<Bvh> {
    Bvh::build(mesh)
}

pub fn signed_distance(index: &SdfIndex, query: &Point3<f64>) -> Result<SdfResult> {
    index.signed(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives::{box_mesh, icosphere};
    use rand::{Rng, SeedableRng};

    /// Max chordal deviation of a tessellated sphere: how far the planar
    /// faces dip below the true radius.
    fn chordal_tolerance(mesh: &TriMesh, radius: f64) -> f64 {
        let mut min_plane_dist = f64::INFINITY;
        for i in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle(i);
            let centroid = (a.coords + b.coords + c.coords) / 3.0;
            min_plane_dist = min_plane_dist.min(centroid.norm());
        }
        radius - min_plane_dist
    }

    #[test]
    fn sphere_exterior_distance_is_analytic() {
        let mesh = icosphere(1.0, 3);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let tol = chordal_tolerance(&mesh, 1.0) + 1e-6;
        let r = sdf.signed(&Point3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((r.value - 1.0).abs() <= tol, "value {} tol {}", r.value, tol);
        assert!(r.gradient.dot(&Vector3::z()) > 0.99);
    }

    #[test]
    fn query_on_vertex_is_zero() {
        let mesh = icosphere(1.0, 2);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let v = mesh.vertices[17];
        let r = sdf.signed(&v).unwrap();
        assert!(r.value.abs() <= 1e-9);
        assert!((r.gradient.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_cube_center_is_minus_half() {
        let mesh = box_mesh(1.0, 1.0, 1.0);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let r = sdf.signed(&Point3::origin()).unwrap();
        assert!((r.value + 0.5).abs() <= 1e-9);
    }

    #[test]
    fn box_interior_matches_analytic_sdf() {
        let mesh = box_mesh(1.0, 1.0, 1.0);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q: Point3<f64> = Point3::new(
                rng.gen_range(-0.75..0.75),
                rng.gen_range(-0.75..0.75),
                rng.gen_range(-0.75..0.75),
            );
            // Analytic box SDF for half-extent 0.5.
            let d = Vector3::new(q.x.abs() - 0.5, q.y.abs() - 0.5, q.z.abs() - 0.5);
            let outside = Vector3::new(d.x.max(0.0), d.y.max(0.0), d.z.max(0.0)).norm();
            let inside = d.x.max(d.y).max(d.z).min(0.0);
            let expected = outside + inside;
            let got = sdf.signed(&q).unwrap().value;
            assert!(
                (got - expected).abs() < 1e-9,
                "at {q:?}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn unwatertight_mesh_rejects_signed_queries() {
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let sdf = SdfIndex::build(&mesh).unwrap();
        assert!(matches!(
            sdf.signed(&Point3::new(0.0, 0.0, 1.0)),
            Err(Error::SignRequiresWatertight)
        ));
        // Unsigned queries still work.
        let r = sdf.unsigned(&Point3::new(0.25, 0.25, 2.0));
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mesh = icosphere(0.8, 3);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let h = 1e-5;
        let mut checked = 0;
        while checked < 500 {
            let q = Point3::new(
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            );
            let r = sdf.signed(&q).unwrap();
            // Off the surface and away from the center (the medial axis).
            if r.value.abs() < 1e-3 || q.coords.norm() < 0.2 {
                continue;
            }
            let mut fd = Vector3::zeros();
            for k in 0..3 {
                let mut qp = q;
                let mut qm = q;
                qp[k] += h;
                qm[k] -= h;
                fd[k] = (sdf.signed(&qp).unwrap().value - sdf.signed(&qm).unwrap().value)
                    / (2.0 * h);
            }
            let err = (r.gradient - fd).norm() / fd.norm();
            assert!(err <= 1e-3, "gradient error {err} at {q:?}");
            checked += 1;
        }
    }

    #[test]
    fn sign_flips_match_ray_parity() {
        let mesh = icosphere(0.6, 3);
        let sdf = SdfIndex::build(&mesh).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let origin = Point3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let dir = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if dir.norm() < 1e-3 || origin.coords.norm() < 0.7 {
                continue;
            }
            let crossings = sdf.bvh().ray_crossings(&origin, &dir, 0.0);
            let inside = sdf.inside(&origin).unwrap();
            assert_eq!(
                inside,
                crossings % 2 == 1,
                "parity mismatch at {origin:?} dir {dir:?} ({crossings} crossings)"
            );
        }
    }
}
