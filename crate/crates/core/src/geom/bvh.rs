//! Bounding-volume hierarchy over mesh triangles.
//!
//! Supports nearest-triangle queries (branch and bound on box distance) and
//! ray-intersection counting. Construction is single-writer; queries are
//! read-only and safe to issue concurrently.

use nalgebra::{Point3, Vector3};

use super::mesh::{Aabb, TriMesh};
use super::tri::{self, TriFeature};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    // Leaf: range into `order`. Inner: child node indices.
    left: u32,
    right: u32,
    leaf: bool,
}

/// Acceleration index over a mesh's triangles.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    // Flattened triangle corners in `order`-independent (original) indexing.
    tris: Vec<[Point3<f64>; 3]>,
}

/// Result of a nearest-triangle query.
#[derive(Debug, Clone, Copy)]
pub struct NearestHit {
    pub tri: u32,
    pub point: Point3<f64>,
    pub dist: f64,
    pub feature: TriFeature,
}

impl Bvh {
    /// Build the index. Fails on an empty mesh.
    pub fn build(mesh: &TriMesh) -> Result<Self> {
        if mesh.triangles.is_empty() {
            return Err(Error::InvalidMesh("cannot index an empty mesh".into()));
        }
        let tris: Vec<[Point3<f64>; 3]> =
            (0..mesh.triangles.len()).map(|i| mesh.triangle(i)).collect();
        let boxes: Vec<Aabb> = tris
            .iter()
            .map(|t| {
                let mut bb = Aabb::empty();
                bb.grow(&t[0]);
                bb.grow(&t[1]);
                bb.grow(&t[2]);
                bb
            })
            .collect();
        let centers: Vec<Point3<f64>> = boxes.iter().map(|b| b.center()).collect();

        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len());
        build_node(&mut nodes, &mut order, 0, tris.len(), &boxes, &centers);
        Ok(Bvh { nodes, order, tris })
    }

    pub fn root_aabb(&self) -> Aabb {
        self.nodes[0].aabb
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf).count()
    }

    /// Closest point on the mesh surface to `p`.
    pub fn nearest(&self, p: &Point3<f64>) -> NearestHit {
        let mut best = NearestHit {
            tri: 0,
            point: self.tris[0][0],
            dist: f64::INFINITY,
            feature: TriFeature::Vertex(0),
        };
        let mut best_d2 = f64::INFINITY;
        // Manual stack ordered by near-child-first traversal.
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.dist2(p) >= best_d2 {
                continue;
            }
            if node.leaf {
                for &ti in &self.order[node.left as usize..node.right as usize] {
                    let t = &self.tris[ti as usize];
                    let (cp, feature) = tri::closest_point(p, &t[0], &t[1], &t[2]);
                    let d2 = (p - cp).norm_squared();
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = NearestHit {
                            tri: ti,
                            point: cp,
                            dist: d2.sqrt(),
                            feature,
                        };
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].aabb.dist2(p);
                let dr = self.nodes[r as usize].aabb.dist2(p);
                // Push the farther child first so the nearer is explored next.
                if dl <= dr {
                    if dr < best_d2 {
                        stack.push(r);
                    }
                    stack.push(l);
                } else {
                    if dl < best_d2 {
                        stack.push(l);
                    }
                    stack.push(r);
                }
            }
        }
        best
    }

    /// Number of triangles intersected by the ray (t > t_min), for parity tests.
    pub fn ray_crossings(&self, origin: &Point3<f64>, dir: &Vector3<f64>, t_min: f64) -> usize {
        let mut count = 0;
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !ray_box(origin, dir, &node.aabb) {
                continue;
            }
            if node.leaf {
                for &ti in &self.order[node.left as usize..node.right as usize] {
                    let t = &self.tris[ti as usize];
                    if let Some(hit) = tri::ray_intersect(origin, dir, &t[0], &t[1], &t[2]) {
                        if hit > t_min {
                            count += 1;
                        }
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        count
    }

    /// Indices of triangles whose AABB overlaps `bb`.
    pub fn triangles_in_aabb(&self, bb: &Aabb) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.intersection(bb).is_none() {
                // Touching boxes count as overlap for this query.
                let overlaps = (0..3).all(|k| {
                    node.aabb.min[k] <= bb.max[k] && node.aabb.max[k] >= bb.min[k]
                });
                if !overlaps {
                    continue;
                }
            }
            if node.leaf {
                out.extend_from_slice(&self.order[node.left as usize..node.right as usize]);
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        out
    }

    pub(crate) fn tri_corners(&self, i: u32) -> &[Point3<f64>; 3] {
        &self.tris[i as usize]
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    start: usize,
    end: usize,
    boxes: &[Aabb],
    centers: &[Point3<f64>],
) -> u32 {
    let mut aabb = Aabb::empty();
    for &ti in &order[start..end] {
        aabb.merge(&boxes[ti as usize]);
    }
    let idx = nodes.len() as u32;
    nodes.push(Node {
        aabb,
        left: start as u32,
        right: end as u32,
        leaf: true,
    });
    if end - start <= LEAF_SIZE {
        return idx;
    }

    let diag = aabb.diagonal();
    let axis = if diag.x >= diag.y && diag.x >= diag.z {
        0
    } else if diag.y >= diag.z {
        1
    } else {
        2
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        centers[a as usize][axis]
            .partial_cmp(&centers[b as usize][axis])
            .unwrap()
    });

    let left = build_node(nodes, order, start, mid, boxes, centers);
    let right = build_node(nodes, order, mid, end, boxes, centers);
    nodes[idx as usize].left = left;
    nodes[idx as usize].right = right;
    nodes[idx as usize].leaf = false;
    idx
}

fn ray_box(origin: &Point3<f64>, dir: &Vector3<f64>, bb: &Aabb) -> bool {
    let mut t0: f64 = 0.0;
    let mut t1 = f64::INFINITY;
    for k in 0..3 {
        if dir[k].abs() < 1e-300 {
            if origin[k] < bb.min[k] || origin[k] > bb.max[k] {
                return false;
            }
        } else {
            let inv = 1.0 / dir[k];
            let (mut a, mut b) = ((bb.min[k] - origin[k]) * inv, (bb.max[k] - origin[k]) * inv);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
