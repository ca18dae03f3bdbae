//! Forward kinematics and linear blend skinning.

use nalgebra::{Matrix3, Point3, Vector3};

use super::{ContactDesignation, HandParams, HandRig, JOINT_COUNT};
use crate::error::Result;
use crate::geom::{PointSample, SampleSource, TriMesh};
use crate::rotation::rodrigues;

/// Forward-kinematics state: accumulated joint rotations and posed joint
/// locations, plus the global rigid transform.
#[derive(Debug, Clone)]
pub struct FkState {
    /// World rotation of each joint's frame (before the global transform).
    pub joint_rot: [Matrix3<f64>; JOINT_COUNT],
    /// Posed position of each joint (before the global transform).
    pub joint_pos: [Point3<f64>; JOINT_COUNT],
    pub global_rot: Matrix3<f64>,
    pub global_trans: Vector3<f64>,
    /// Rest vertices with shape blendshapes applied.
    pub shaped: Vec<Point3<f64>>,
}

impl FkState {
    pub fn compute(rig: &HandRig, params: &HandParams) -> Result<FkState> {
        params.validate()?;
        let mut joint_rot = [Matrix3::identity(); JOINT_COUNT];
        let mut joint_pos = [Point3::origin(); JOINT_COUNT];
        joint_pos[0] = rig.joints[0].rest_position;
        // Parent-to-child composition of axis-angle rotations about the rest
        // joint locations. The root carries no articulation.
        for j in 1..JOINT_COUNT {
            let p = rig.joints[j].parent.unwrap() as usize;
            let local = rodrigues(&params.joint_rotation_vec(j));
            joint_rot[j] = joint_rot[p] * local;
            let offset = rig.joints[j].rest_position - rig.joints[p].rest_position;
            joint_pos[j] = joint_pos[p] + joint_rot[p] * offset;
        }

        let mut shaped: Vec<Point3<f64>> = rig.rest_mesh.vertices.clone();
        for (s, &coeff) in params.shape.iter().enumerate() {
            if coeff == 0.0 || s >= rig.blendshapes.len() {
                continue;
            }
            for (v, offset) in rig.blendshapes[s].iter().enumerate() {
                shaped[v] += coeff * offset;
            }
        }

        Ok(FkState {
            joint_rot,
            joint_pos,
            global_rot: rodrigues(&params.global_rotation_vec()),
            global_trans: params.global_translation(),
            shaped,
        })
    }

    /// Skinned vertex position before the global transform.
    pub fn skinned_vertex(&self, rig: &HandRig, vid: usize) -> Point3<f64> {
        let v = self.shaped[vid];
        let mut acc = Vector3::zeros();
        for (j, w) in rig.weights[vid].iter() {
            let rest_j = rig.joints[j].rest_position;
            acc += w * (self.joint_rot[j] * (v - rest_j) + self.joint_pos[j].coords);
        }
        Point3::from(acc)
    }

    /// Final posed vertex position.
    pub fn posed_vertex(&self, rig: &HandRig, vid: usize) -> Point3<f64> {
        let s = self.skinned_vertex(rig, vid);
        Point3::from(self.global_rot * s.coords + self.global_trans)
    }
}

/// Pose the full rest mesh: blendshapes, FK, LBS, then the global transform.
pub fn pose_hand(rig: &HandRig, params: &HandParams) -> Result<TriMesh> {
    let fk = FkState::compute(rig, params)?;
    let vertices: Vec<Point3<f64>> = (0..rig.rest_mesh.vertices.len())
        .map(|v| fk.posed_vertex(rig, v))
        .collect();
    Ok(rig.rest_mesh.with_vertices(vertices))
}

/// Posed positions for a subset of vertices.
pub fn pose_vertices(rig: &HandRig, fk: &FkState, ids: &[u32]) -> Vec<Point3<f64>> {
    ids.iter().map(|&v| fk.posed_vertex(rig, v as usize)).collect()
}

/// Posed positions of the designated contact vertices, tagged `HandContact`
/// and carrying their vertex ids.
pub fn contact_points(
    rig: &HandRig,
    params: &HandParams,
    designation: &ContactDesignation,
) -> Result<Vec<PointSample>> {
    let ids = designation.resolve(rig)?;
    let fk = FkState::compute(rig, params)?;
    Ok(ids
        .iter()
        .map(|&v| PointSample {
            position: fk.posed_vertex(rig, v as usize),
            source: SampleSource::HandContact,
            tri: None,
            bary: None,
            vertex: Some(v),
        })
        .collect())
}
