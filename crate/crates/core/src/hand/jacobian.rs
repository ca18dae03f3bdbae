//! Analytic derivatives of posed vertex positions with respect to the 51
//! pose parameters (global axis-angle, global translation, 45 joint
//! axis-angles), chained through FK and linear blend skinning. Shape
//! coefficients are held fixed.

use nalgebra::{DMatrix, Matrix3, Point3, Vector3};

use super::skin::FkState;
use super::{HandParams, HandRig, JOINT_COUNT, POSE_PARAM_DIM};
use crate::error::Result;
use crate::rotation::rodrigues_jacobian;

/// Column layout of the 51-dim parameter vector.
pub const GLOBAL_ROT: std::ops::Range<usize> = 0..3;
pub const GLOBAL_TRANS: std::ops::Range<usize> = 3..6;
pub const JOINTS_BASE: usize = 6;

/// Derivative of one joint's accumulated frame w.r.t. one parameter.
struct FrameDerivative {
    param: usize,
    d_rot: Matrix3<f64>,
    d_pos: Vector3<f64>,
}

/// Precomputed derivative state for one (rig, params) configuration.
pub struct PoseJacobian<'a> {
    rig: &'a HandRig,
    pub fk: FkState,
    d_global_rot: [Matrix3<f64>; 3],
    /// Per joint: derivatives of (joint_rot, joint_pos) w.r.t. every
    /// parameter on the joint's ancestor chain.
    per_joint: Vec<Vec<FrameDerivative>>,
}

impl<'a> PoseJacobian<'a> {
    pub fn new(rig: &'a HandRig, params: &HandParams) -> Result<Self> {
        let fk = FkState::compute(rig, params)?;
        let d_global_rot = rodrigues_jacobian(&params.global_rotation_vec());

        // dW, dq of every joint w.r.t. parameter (k, i), propagated down the
        // subtree of k:
        //   at k itself: dW_k = W_parent · dR_k,i ; dq_k = 0
        //   below: dW_j = dW_parent · R_local_j ; dq_j = dq_parent + dW_parent · o_j
        let mut per_joint: Vec<Vec<FrameDerivative>> = (0..JOINT_COUNT).map(|_| Vec::new()).collect();
        let mut local_rot = [Matrix3::identity(); JOINT_COUNT];
        for j in 1..JOINT_COUNT {
            local_rot[j] = crate::rotation::rodrigues(&params.joint_rotation_vec(j));
        }
        for k in 1..JOINT_COUNT {
            let parent_k = rig.joints[k].parent.unwrap() as usize;
            let d_local = rodrigues_jacobian(&params.joint_rotation_vec(k));
            for i in 0..3 {
                let param = JOINTS_BASE + 3 * (k - 1) + i;
                // Seed at joint k.
                let seed_rot = fk.joint_rot[parent_k] * d_local[i];
                per_joint[k].push(FrameDerivative {
                    param,
                    d_rot: seed_rot,
                    d_pos: Vector3::zeros(),
                });
                // Propagate to descendants (joint indices are topologically
                // sorted, so a single forward sweep suffices).
                for j in (k + 1)..JOINT_COUNT {
                    let p = rig.joints[j].parent.unwrap() as usize;
                    if !rig.is_ancestor_or_self(k, p) {
                        continue;
                    }
                    let parent_deriv = per_joint[p]
                        .iter()
                        .find(|d| d.param == param)
                        .expect("parent derivative present");
                    let offset = rig.joints[j].rest_position - rig.joints[p].rest_position;
                    let d_rot = parent_deriv.d_rot * local_rot[j];
                    let d_pos = parent_deriv.d_pos + parent_deriv.d_rot * offset;
                    per_joint[j].push(FrameDerivative { param, d_rot, d_pos });
                }
            }
        }

        Ok(PoseJacobian {
            rig,
            fk,
            d_global_rot,
            per_joint,
        })
    }

    /// Accumulate cotangentᵀ · ∂x_v/∂params into `out` (length 51).
    pub fn accumulate_vjp(&self, vid: usize, cotangent: &Vector3<f64>, out: &mut [f64]) {
        debug_assert_eq!(out.len(), POSE_PARAM_DIM);
        let skinned = self.fk.skinned_vertex(self.rig, vid);

        // Global translation: ∂x/∂t = I.
        out[3] += cotangent.x;
        out[4] += cotangent.y;
        out[5] += cotangent.z;
        // Global rotation: ∂x/∂ω_i = dR_i · s.
        for i in 0..3 {
            out[i] += cotangent.dot(&(self.d_global_rot[i] * skinned.coords));
        }

        // Joint parameters, pulled back through the global rotation.
        let local_cot = self.fk.global_rot.transpose() * cotangent;
        let v = self.fk.shaped[vid];
        for (j, w) in self.rig.weights[vid].iter() {
            if j == 0 {
                continue; // root has no articulation parameters
            }
            let rest_j = self.rig.joints[j].rest_position;
            let arm = v - rest_j;
            for d in &self.per_joint[j] {
                let delta = d.d_rot * arm + d.d_pos;
                out[d.param] += w * local_cot.dot(&delta);
            }
        }
    }

    /// VJP for a barycentric point on a triangle of the rest mesh.
    pub fn accumulate_vjp_bary(
        &self,
        tri: u32,
        bary: &[f64; 3],
        cotangent: &Vector3<f64>,
        out: &mut [f64],
    ) {
        let t = self.rig.rest_mesh.triangles[tri as usize];
        for (corner, &b) in t.iter().zip(bary.iter()) {
            if b != 0.0 {
                let scaled = cotangent * b;
                self.accumulate_vjp(*corner as usize, &scaled, out);
            }
        }
    }

    /// Posed position of a barycentric point.
    pub fn posed_bary(&self, tri: u32, bary: &[f64; 3]) -> Point3<f64> {
        let t = self.rig.rest_mesh.triangles[tri as usize];
        let mut acc = Vector3::zeros();
        for (corner, &b) in t.iter().zip(bary.iter()) {
            acc += b * self.fk.posed_vertex(self.rig, *corner as usize).coords;
        }
        Point3::from(acc)
    }
}

/// Full Jacobian matrix (3·|ids| × 51) of posed vertex positions.
pub fn vertex_jacobian(rig: &HandRig, params: &HandParams, ids: &[u32]) -> Result<DMatrix<f64>> {
    let engine = PoseJacobian::new(rig, params)?;
    let mut jac = DMatrix::zeros(3 * ids.len(), POSE_PARAM_DIM);
    let mut row_buf = vec![0.0; POSE_PARAM_DIM];
    for (n, &vid) in ids.iter().enumerate() {
        for axis in 0..3 {
            row_buf.iter_mut().for_each(|x| *x = 0.0);
            let mut cot = Vector3::zeros();
            cot[axis] = 1.0;
            engine.accumulate_vjp(vid as usize, &cot, &mut row_buf);
            for (c, &val) in row_buf.iter().enumerate() {
                jac[(3 * n + axis, c)] = val;
            }
        }
    }
    Ok(jac)
}
