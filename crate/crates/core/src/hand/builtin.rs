//! Procedural test hand: capsule-swept fingers and a rounded-box palm,
//! extracted as one watertight surface from the implicit union, with smooth
//! distance-based skinning weights and a populated contact-site table.
//!
//! Dimensions approximate an adult hand (~0.19 m wrist to middle fingertip).
//! The rest pose splays the fingers so that non-exempt surface-point pairs
//! clear the default self-penetration threshold.

use nalgebra::{Point3, Vector3};
use std::collections::BTreeMap;

use super::{HandRig, Joint, VertexWeights, FINGERS, JOINT_COUNT};
use crate::geom::{marching_tets, TriMesh};

struct FingerSpec {
    mcp: Point3<f64>,
    dir: Vector3<f64>,
    lengths: [f64; 3],
    radius_base: f64,
    radius_tip: f64,
}

fn finger_specs() -> [FingerSpec; 5] {
    let fan = |deg: f64| {
        let a = deg.to_radians();
        Vector3::new(a.sin(), a.cos(), 0.0)
    };
    [
        // Thumb: strongly abducted, slightly raised toward the palmar side.
        FingerSpec {
            mcp: Point3::new(0.034, 0.030, 0.004),
            dir: fan(55.0),
            lengths: [0.038, 0.030, 0.026],
            radius_base: 0.0105,
            radius_tip: 0.0085,
        },
        FingerSpec {
            mcp: Point3::new(0.036, 0.088, 0.0),
            dir: fan(18.0),
            lengths: [0.034, 0.026, 0.021],
            radius_base: 0.0082,
            radius_tip: 0.0068,
        },
        FingerSpec {
            mcp: Point3::new(0.012, 0.094, 0.0),
            dir: fan(5.0),
            lengths: [0.037, 0.028, 0.022],
            radius_base: 0.0085,
            radius_tip: 0.0070,
        },
        FingerSpec {
            mcp: Point3::new(-0.012, 0.091, 0.0),
            dir: fan(-8.0),
            lengths: [0.033, 0.026, 0.021],
            radius_base: 0.0080,
            radius_tip: 0.0066,
        },
        FingerSpec {
            mcp: Point3::new(-0.036, 0.084, 0.0),
            dir: fan(-22.0),
            lengths: [0.026, 0.020, 0.017],
            radius_base: 0.0070,
            radius_tip: 0.0058,
        },
    ]
}

const PALM_CENTER: Point3<f64> = Point3::new(0.0, 0.046, 0.0);
const PALM_HALF: Vector3<f64> = Vector3::new(0.042, 0.047, 0.0085);
const PALM_ROUND: f64 = 0.005;

/// One skinning bone: a segment with a gaussian falloff width.
struct Bone {
    joint: usize,
    a: Point3<f64>,
    b: Point3<f64>,
    sigma: f64,
}

fn segment_distance(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> (f64, f64) {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    let closest = a + ab * t;
    ((p - closest).norm(), t)
}

fn capsule_sdf(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, r0: f64, r1: f64) -> f64 {
    let (d, t) = segment_distance(p, a, b);
    d - (r0 + (r1 - r0) * t)
}

fn round_box_sdf(p: &Point3<f64>, c: &Point3<f64>, half: &Vector3<f64>, round: f64) -> f64 {
    let q = Vector3::new(
        (p.x - c.x).abs() - half.x,
        (p.y - c.y).abs() - half.y,
        (p.z - c.z).abs() - half.z,
    );
    let outside = Vector3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
    let inside = q.x.max(q.y).max(q.z).min(0.0);
    outside + inside - round
}

fn hand_sdf(p: &Point3<f64>, specs: &[FingerSpec; 5]) -> f64 {
    let mut d = round_box_sdf(p, &PALM_CENTER, &PALM_HALF, PALM_ROUND);
    for spec in specs {
        let mut start = spec.mcp;
        let total: f64 = spec.lengths.iter().sum();
        let mut acc = 0.0;
        for &len in &spec.lengths {
            let end = start + spec.dir * len;
            let r0 = spec.radius_base + (spec.radius_tip - spec.radius_base) * (acc / total);
            let r1 = spec.radius_base
                + (spec.radius_tip - spec.radius_base) * ((acc + len) / total);
            d = d.min(capsule_sdf(p, &start, &end, r0, r1));
            start = end;
            acc += len;
        }
    }
    d
}

/// Procedurally generated watertight hand rig. Deterministic.
pub fn builtin_capsule_hand() -> HandRig {
    let specs = finger_specs();

    // Skeleton: wrist + (MCP, PIP, DIP) per finger.
    let mut joints = vec![Joint {
        name: "wrist".into(),
        parent: None,
        rest_position: Point3::new(0.0, 0.0, 0.0),
    }];
    for (f, spec) in specs.iter().enumerate() {
        let names = ["mcp", "pip", "dip"];
        let mut pos = spec.mcp;
        let mut parent = 0u8;
        for (s, seg_name) in names.iter().enumerate() {
            joints.push(Joint {
                name: format!("{}_{}", FINGERS[f], seg_name),
                parent: Some(parent),
                rest_position: pos,
            });
            parent = joints.len() as u8 - 1;
            pos += spec.dir * spec.lengths[s];
        }
    }
    debug_assert_eq!(joints.len(), JOINT_COUNT);

    // Surface extraction.
    let h = 0.0028;
    let lo: Point3<f64> = Point3::new(-0.075, -0.030, -0.035);
    let hi: Point3<f64> = Point3::new(0.135, 0.210, 0.040);
    let dims = [
        ((hi.x - lo.x) / h).ceil() as usize + 1,
        ((hi.y - lo.y) / h).ceil() as usize + 1,
        ((hi.z - lo.z) / h).ceil() as usize + 1,
    ];
    let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = Point3::new(
                    lo.x + i as f64 * h,
                    lo.y + j as f64 * h,
                    lo.z + k as f64 * h,
                );
                values.push(hand_sdf(&p, &specs));
            }
        }
    }
    let rest_mesh = marching_tets(lo, h, dims, &values).expect("hand surface extraction");

    // Skinning bones: palm axis for the wrist, one segment per finger joint.
    let mut bones = vec![Bone {
        joint: 0,
        a: Point3::new(0.0, 0.004, 0.0),
        b: Point3::new(0.0, 0.088, 0.0),
        sigma: 0.030,
    }];
    for (f, spec) in specs.iter().enumerate() {
        let mut start = spec.mcp;
        for s in 0..3 {
            let end = start + spec.dir * spec.lengths[s];
            bones.push(Bone {
                joint: 1 + 3 * f + s,
                a: start,
                b: end,
                sigma: 0.0075,
            });
            start = end;
        }
    }

    let weights: Vec<VertexWeights> = rest_mesh
        .vertices
        .iter()
        .map(|v| {
            let mut scored: Vec<(usize, f64)> = bones
                .iter()
                .map(|bone| {
                    let (d, _) = segment_distance(v, &bone.a, &bone.b);
                    (bone.joint, (-(d / bone.sigma).powi(2)).exp())
                })
                .collect();
            scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
            scored.truncate(4);
            let max = scored[0].1;
            scored.retain(|&(_, w)| w > 1e-3 * max);
            let total: f64 = scored.iter().map(|&(_, w)| w).sum();
            let mut out = VertexWeights::default();
            for (slot, &(j, w)) in scored.iter().enumerate() {
                out.joints[slot] = j as u8;
                out.weights[slot] = w / total;
            }
            out
        })
        .collect();

    // Contact sites: fingertip caps, palmar half of the middle phalanges,
    // and the palmar face of the palm.
    let mut contact_sites: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (f, spec) in specs.iter().enumerate() {
        let total: f64 = spec.lengths.iter().sum();
        let tip_surface = spec.mcp + spec.dir * (total + spec.radius_tip);
        let tip_ids: Vec<u32> = rest_mesh
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| (*v - tip_surface).norm() <= 1.35 * spec.radius_tip)
            .map(|(i, _)| i as u32)
            .collect();
        contact_sites.insert(format!("{}_tip", FINGERS[f]), tip_ids);

        let pip = spec.mcp + spec.dir * spec.lengths[0];
        let dip = pip + spec.dir * spec.lengths[1];
        let mid_r = spec.radius_base + (spec.radius_tip - spec.radius_base) * 0.5;
        let mid_ids: Vec<u32> = rest_mesh
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| {
                let (d, t) = segment_distance(v, &pip, &dip);
                let palmar = v.z - (pip.z + (dip.z - pip.z) * t);
                d <= mid_r + 0.003 && palmar > 0.25 * mid_r
            })
            .map(|(i, _)| i as u32)
            .collect();
        contact_sites.insert(format!("{}_mid", FINGERS[f]), mid_ids);
    }
    let palm_ids: Vec<u32> = rest_mesh
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            v.z >= PALM_HALF.z + PALM_ROUND - 0.0022
                && (v.x - PALM_CENTER.x).abs() <= PALM_HALF.x
                && (v.y - PALM_CENTER.y).abs() <= PALM_HALF.y
        })
        .map(|(i, _)| i as u32)
        .collect();
    contact_sites.insert("palm".to_string(), palm_ids);

    let rig = HandRig {
        rest_mesh,
        joints,
        weights,
        blendshapes: Vec::new(),
        contact_sites,
    };
    debug_assert!(rig.validate().is_ok());
    rig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::mesh::Aabb;

    #[test]
    fn rig_passes_invariants() {
        let rig = builtin_capsule_hand();
        rig.validate().unwrap();
        assert_eq!(rig.joints.len(), JOINT_COUNT);
        for name in super::super::contact_region_names() {
            let ids = &rig.contact_sites[&name];
            assert!(!ids.is_empty(), "region {name} is empty");
        }
    }

    #[test]
    fn rest_mesh_is_watertight_and_hand_sized() {
        let rig = builtin_capsule_hand();
        assert!(rig.rest_mesh.is_watertight());
        let bb: Aabb = rig.rest_mesh.aabb();
        let longest = bb
            .diagonal()
            .iter()
            .fold(0.0f64, |acc, &d| acc.max(d));
        assert!(
            (0.15..=0.22).contains(&longest),
            "longest axis {longest} out of anthropometric range"
        );
    }

    #[test]
    fn rest_mesh_is_self_intersection_free() {
        let rig = builtin_capsule_hand();
        let mesh = &rig.rest_mesh;
        let bvh = crate::geom::Bvh::build(mesh).unwrap();
        // Sweep every triangle against candidates from the BVH, skipping
        // pairs that share a vertex.
        let mut tested = 0usize;
        for i in 0..mesh.triangles.len() {
            let ti = mesh.triangles[i];
            let [a, b, c] = mesh.triangle(i);
            let mut bb = Aabb::empty();
            bb.grow(&a);
            bb.grow(&b);
            bb.grow(&c);
            for j in bvh.triangles_in_aabb(&bb) {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                let tj = mesh.triangles[j];
                if ti.iter().any(|v| tj.contains(v)) {
                    continue;
                }
                let [d, e, f] = mesh.triangle(j);
                assert!(
                    !triangles_intersect(&[a, b, c], &[d, e, f]),
                    "triangles {i} and {j} intersect"
                );
                tested += 1;
            }
        }
        assert!(tested > 0);
    }

    /// Conservative triangle-triangle overlap test via segment/triangle
    /// intersection both ways.
    fn triangles_intersect(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> bool {
        use crate::geom::tri::ray_intersect;
        let edges = |t: &[Point3<f64>; 3]| {
            [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
        };
        for (s, e) in edges(t1) {
            let dir = e - s;
            if let Some(hit) = ray_intersect(&s, &dir, &t2[0], &t2[1], &t2[2]) {
                if hit > 1e-9 && hit < 1.0 - 1e-9 {
                    return true;
                }
            }
        }
        for (s, e) in edges(t2) {
            let dir = e - s;
            if let Some(hit) = ray_intersect(&s, &dir, &t1[0], &t1[1], &t1[2]) {
                if hit > 1e-9 && hit < 1.0 - 1e-9 {
                    return true;
                }
            }
        }
        false
    }
}
