//! Generalized winding numbers for inside/outside classification.
//!
//! The exact number sums the signed solid angle of every triangle
//! (van Oosterom–Strackee). The fast path clusters triangles into a tree and
//! replaces far clusters by their area-weighted normal dipole, which keeps
//! classification against the 0.5 threshold reliable while making voxel
//! sweeps tractable on dense meshes.

use nalgebra::{Point3, Vector3};

use super::mesh::TriMesh;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
/// Far-field acceptance factor: a cluster is approximated when the query is
/// farther than `BETA` times the cluster radius from its weighted centroid.
const BETA: f64 = 2.3;
const LEAF_SIZE: usize = 8;

struct TriData {
    corners: [Point3<f64>; 3],
    centroid: Point3<f64>,
    area_normal: Vector3<f64>, // n̂ · area
}

struct Cluster {
    // Leaf: range into `order`; inner: child indices.
    left: u32,
    right: u32,
    leaf: bool,
    weighted_centroid: Point3<f64>,
    dipole: Vector3<f64>,
    radius: f64,
}

/// Winding-number evaluator over a fixed mesh.
pub struct WindingIndex {
    tris: Vec<TriData>,
    order: Vec<u32>,
    clusters: Vec<Cluster>,
}

impl WindingIndex {
    pub fn build(mesh: &TriMesh) -> Self {
        let tris: Vec<TriData> = (0..mesh.triangles.len())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                let area_normal = 0.5 * (b - a).cross(&(c - a));
                TriData {
                    corners: [a, b, c],
                    centroid: Point3::from((a.coords + b.coords + c.coords) / 3.0),
                    area_normal,
                }
            })
            .collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut clusters = Vec::with_capacity(2 * tris.len());
        build_cluster(&mut clusters, &mut order, 0, tris.len(), &tris);
        WindingIndex {
            tris,
            order,
            clusters,
        }
    }

    /// Exact generalized winding number of `q`.
    pub fn exact(&self, q: &Point3<f64>) -> f64 {
        let mut acc = 0.0;
        for t in &self.tris {
            acc += solid_angle(q, &t.corners);
        }
        acc / FOUR_PI
    }

    /// Dipole-accelerated winding number of `q`.
    pub fn fast(&self, q: &Point3<f64>) -> f64 {
        self.eval_cluster(0, q) / FOUR_PI
    }

    /// Inside test with the 0.5 threshold.
    pub fn is_inside(&self, q: &Point3<f64>) -> bool {
        self.fast(q) >= 0.5
    }

    fn eval_cluster(&self, ci: u32, q: &Point3<f64>) -> f64 {
        let c = &self.clusters[ci as usize];
        let r = q - c.weighted_centroid;
        let dist = r.norm();
        if dist > BETA * c.radius {
            // First-order multipole: area-weighted normal dipole at the centroid.
            return -c.dipole.dot(&r) / (dist * dist * dist);
        }
        if c.leaf {
            let mut acc = 0.0;
            for &ti in &self.order[c.left as usize..c.right as usize] {
                acc += solid_angle(q, &self.tris[ti as usize].corners);
            }
            acc
        } else {
            self.eval_cluster(c.left, q) + self.eval_cluster(c.right, q)
        }
    }
}

fn build_cluster(
    clusters: &mut Vec<Cluster>,
    order: &mut [u32],
    start: usize,
    end: usize,
    tris: &[TriData],
) -> u32 {
    let mut area = 0.0;
    let mut centroid = Vector3::zeros();
    let mut dipole = Vector3::zeros();
    for &ti in &order[start..end] {
        let t = &tris[ti as usize];
        let a = t.area_normal.norm();
        area += a;
        centroid += a * t.centroid.coords;
        dipole += t.area_normal;
    }
    let weighted_centroid = if area > 0.0 {
        Point3::from(centroid / area)
    } else {
        tris[order[start] as usize].centroid
    };
    let mut radius: f64 = 0.0;
    for &ti in &order[start..end] {
        for p in &tris[ti as usize].corners {
            radius = radius.max((p - weighted_centroid).norm());
        }
    }

    let idx = clusters.len() as u32;
    clusters.push(Cluster {
        left: start as u32,
        right: end as u32,
        leaf: true,
        weighted_centroid,
        dipole,
        radius,
    });
    if end - start <= LEAF_SIZE {
        return idx;
    }

    // Median split along the widest centroid axis.
    let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &ti in &order[start..end] {
        let c = tris[ti as usize].centroid;
        for k in 0..3 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let ext = hi - lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        tris[a as usize].centroid[axis]
            .partial_cmp(&tris[b as usize].centroid[axis])
            .unwrap()
    });

    let left = build_cluster(clusters, order, start, mid, tris);
    let right = build_cluster(clusters, order, mid, end, tris);
    clusters[idx as usize].left = left;
    clusters[idx as usize].right = right;
    clusters[idx as usize].leaf = false;
    idx
}

/// Signed solid angle subtended by a triangle as seen from `q`.
fn solid_angle(q: &Point3<f64>, corners: &[Point3<f64>; 3]) -> f64 {
    let a = corners[0] - q;
    let b = corners[1] - q;
    let c = corners[2] - q;
    let la = a.norm();
    let lb = b.norm();
    let lc = c.norm();
    let numer = a.dot(&b.cross(&c));
    let denom = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
    2.0 * numer.atan2(denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives::{box_mesh, icosphere};
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_winding_classifies_sphere() {
        let mesh = icosphere(1.0, 3);
        let w = WindingIndex::build(&mesh);
        assert!(w.exact(&Point3::origin()) > 0.99);
        assert!(w.exact(&Point3::new(0.0, 0.0, 2.0)).abs() < 0.01);
        assert!(w.exact(&Point3::new(0.5, 0.3, -0.2)) > 0.99);
    }

    #[test]
    fn fast_matches_exact_on_random_queries() {
        let mesh = icosphere(0.35, 4);
        let w = WindingIndex::build(&mesh);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let q = Point3::new(
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
            );
            let exact = w.exact(&q);
            let fast = w.fast(&q);
            assert!(
                (exact - fast).abs() < 0.05,
                "winding mismatch at {q:?}: exact {exact}, fast {fast}"
            );
            assert_eq!(exact >= 0.5, fast >= 0.5, "classification flip at {q:?}");
        }
    }

    #[test]
    fn overlapping_union_counts_double_inside() {
        // Two overlapping boxes: winding ≈ 2 in the overlap, still inside.
        let a = box_mesh(1.0, 1.0, 1.0);
        let mut b = box_mesh(1.0, 1.0, 1.0);
        b.map_vertices(|v| Point3::new(v.x + 0.4, v.y, v.z));
        let mut verts = a.vertices.clone();
        let mut tris = a.triangles.clone();
        let off = verts.len() as u32;
        verts.extend_from_slice(&b.vertices);
        tris.extend(b.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        let union = TriMesh::new(verts, tris).unwrap();
        let w = WindingIndex::build(&union);
        let overlap_point = Point3::new(0.2, 0.0, 0.0);
        assert!(w.exact(&overlap_point) > 1.5);
        assert!(w.is_inside(&overlap_point));
    }
}
