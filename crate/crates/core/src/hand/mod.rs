//! Skinned parametric hand with MANO-compatible parameter shapes.
//!
//! The skeleton has 16 joints: the wrist root plus three articulated joints
//! per finger. Articulation lives in a 45-vector of per-joint axis-angles;
//! the global 6D pose (axis-angle + translation) is applied after skinning.

mod builtin;
mod jacobian;
mod skin;

pub use builtin::builtin_capsule_hand;
pub use jacobian::{vertex_jacobian, PoseJacobian};
pub use skin::{contact_points, pose_hand, pose_vertices, FkState};

use nalgebra::{Point3, Vector3};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::TriMesh;

pub const JOINT_COUNT: usize = 16;
pub const ARTICULATED_JOINTS: usize = 15;
pub const JOINT_POSE_DIM: usize = 45;
pub const SHAPE_DIM: usize = 10;
/// 6 global + 45 articulation parameters.
pub const POSE_PARAM_DIM: usize = 51;

pub const FINGERS: [&str; 5] = ["thumb", "index", "middle", "ring", "pinky"];

/// The 11 named contact regions: five tips, five middle phalanges, palm.
pub fn contact_region_names() -> Vec<String> {
    let mut names: Vec<String> = FINGERS.iter().map(|f| format!("{f}_tip")).collect();
    names.extend(FINGERS.iter().map(|f| format!("{f}_mid")));
    names.push("palm".to_string());
    names
}

/// Pose parameters: global 6D pose, 45 joint axis-angles, 10 shape coefficients.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HandParams {
    /// Axis-angle rotation (3) + translation in meters (3).
    pub global_pose: [f64; 6],
    /// Axis-angle per articulated joint, 15 × 3.
    pub joint_pose: Vec<f64>,
    /// Blendshape coefficients; zero for rigs without shape spaces.
    pub shape: Vec<f64>,
}

impl Default for HandParams {
    fn default() -> Self {
        HandParams {
            global_pose: [0.0; 6],
            joint_pose: vec![0.0; JOINT_POSE_DIM],
            shape: vec![0.0; SHAPE_DIM],
        }
    }
}

impl HandParams {
    pub fn validate(&self) -> Result<()> {
        if self.joint_pose.len() != JOINT_POSE_DIM {
            return Err(Error::InvalidParams(format!(
                "joint_pose must have {JOINT_POSE_DIM} entries, got {}",
                self.joint_pose.len()
            )));
        }
        let all = self
            .global_pose
            .iter()
            .chain(self.joint_pose.iter())
            .chain(self.shape.iter());
        for v in all {
            if !v.is_finite() {
                return Err(Error::InvalidParams("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    pub fn global_rotation_vec(&self) -> Vector3<f64> {
        Vector3::new(self.global_pose[0], self.global_pose[1], self.global_pose[2])
    }

    pub fn global_translation(&self) -> Vector3<f64> {
        Vector3::new(self.global_pose[3], self.global_pose[4], self.global_pose[5])
    }

    pub fn joint_rotation_vec(&self, joint: usize) -> Vector3<f64> {
        debug_assert!((1..JOINT_COUNT).contains(&joint));
        let base = 3 * (joint - 1);
        Vector3::new(
            self.joint_pose[base],
            self.joint_pose[base + 1],
            self.joint_pose[base + 2],
        )
    }
}

/// One skeleton joint: rest-pose location and parent link.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Joint {
    pub name: String,
    pub parent: Option<u8>,
    pub rest_position: Point3<f64>,
}

/// Per-vertex skinning influences, at most four joints.
#[derive(Debug, Clone, Copy, Default)]
pub struct VertexWeights {
    pub joints: [u8; 4],
    pub weights: [f64; 4],
}

impl VertexWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.joints
            .iter()
            .zip(self.weights.iter())
            .filter(|(_, &w)| w > 0.0)
            .map(|(&j, &w)| (j as usize, w))
    }

    /// Joint with the largest influence (segment assignment).
    pub fn dominant_joint(&self) -> usize {
        let mut best = 0usize;
        let mut best_w = -1.0;
        for (j, w) in self.iter() {
            if w > best_w {
                best_w = w;
                best = j;
            }
        }
        best
    }
}

/// Kinematic skeleton, rest mesh, skinning weights, blendshapes, and the
/// named contact-site table.
#[derive(Debug, Clone)]
pub struct HandRig {
    pub rest_mesh: TriMesh,
    pub joints: Vec<Joint>,
    pub weights: Vec<VertexWeights>,
    /// blendshapes[s][v] is the offset of vertex v for unit shape coefficient s.
    pub blendshapes: Vec<Vec<Vector3<f64>>>,
    pub contact_sites: BTreeMap<String, Vec<u32>>,
}

impl HandRig {
    pub fn validate(&self) -> Result<()> {
        if self.joints.len() != JOINT_COUNT {
            return Err(Error::InvalidParams(format!(
                "rig must have {JOINT_COUNT} joints, got {}",
                self.joints.len()
            )));
        }
        if self.joints[0].parent.is_some() {
            return Err(Error::InvalidParams("joint 0 must be the root".into()));
        }
        for (j, joint) in self.joints.iter().enumerate().skip(1) {
            match joint.parent {
                // Parents must precede children so FK can run in index order.
                Some(p) if (p as usize) < j => {}
                _ => {
                    return Err(Error::InvalidParams(format!(
                        "joint {j} must have a parent with a smaller index"
                    )))
                }
            }
        }
        if self.weights.len() != self.rest_mesh.vertices.len() {
            return Err(Error::InvalidParams(
                "one weight entry per vertex required".into(),
            ));
        }
        for (v, w) in self.weights.iter().enumerate() {
            let sum: f64 = w.weights.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParams(format!(
                    "weights of vertex {v} sum to {sum}"
                )));
            }
            if w.weights.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidParams(format!(
                    "vertex {v} has a negative weight"
                )));
            }
            if w.joints.iter().any(|&j| j as usize >= JOINT_COUNT) {
                return Err(Error::InvalidParams(format!(
                    "vertex {v} references an invalid joint"
                )));
            }
        }
        for shape in &self.blendshapes {
            if shape.len() != self.rest_mesh.vertices.len() {
                return Err(Error::InvalidParams(
                    "blendshape length must match vertex count".into(),
                ));
            }
        }
        let nverts = self.rest_mesh.vertices.len() as u32;
        for (name, ids) in &self.contact_sites {
            if ids.iter().any(|&id| id >= nverts) {
                return Err(Error::InvalidParams(format!(
                    "contact region `{name}` references an invalid vertex"
                )));
            }
        }
        Ok(())
    }

    /// Children of each joint, in index order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.joints.len()];
        for (j, joint) in self.joints.iter().enumerate() {
            if let Some(p) = joint.parent {
                out[p as usize].push(j);
            }
        }
        out
    }

    /// Whether `ancestor` is on the parent chain of `joint` (or equal to it).
    pub fn is_ancestor_or_self(&self, ancestor: usize, joint: usize) -> bool {
        let mut cur = Some(joint);
        while let Some(j) = cur {
            if j == ancestor {
                return true;
            }
            cur = self.joints[j].parent.map(|p| p as usize);
        }
        false
    }
}

/// Set of active contact regions plus the derived vertex set.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ContactDesignation {
    pub regions: Vec<String>,
}

impl ContactDesignation {
    pub fn new(regions: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let mut regions: Vec<String> = regions.into_iter().map(Into::into).collect();
        regions.sort();
        regions.dedup();
        ContactDesignation { regions }
    }

    pub fn all_tips() -> Self {
        Self::new(FINGERS.iter().map(|f| format!("{f}_tip")))
    }

    pub fn whole_hand() -> Self {
        Self::new(contact_region_names())
    }

    /// Union of the active regions' vertex sets, sorted and deduplicated.
    pub fn resolve(&self, rig: &HandRig) -> Result<Vec<u32>> {
        if self.regions.is_empty() {
            return Err(Error::EmptyContactSet);
        }
        let mut ids = Vec::new();
        for name in &self.regions {
            let site = rig
                .contact_sites
                .get(name)
                .ok_or_else(|| Error::UnknownContactRegion(name.clone()))?;
            ids.extend_from_slice(site);
        }
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Err(Error::EmptyContactSet);
        }
        Ok(ids)
    }
}
