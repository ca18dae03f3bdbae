//! Rigid transforms parameterized for first-order optimization.
//!
//! The rotation is stored as an orthonormal base matrix plus an incremental
//! axis-angle 3-vector. Optimizers update the increment as an unconstrained
//! parameter and fold it into the base after every step, which keeps the
//! parametrization away from the axis-angle singularities.

use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::rotation::{geodesic_angle, orthonormalize, rodrigues};

/// Rotation + translation mapping object coordinates into the camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    base_rotation: Matrix3<f64>,
    /// Incremental axis-angle composed onto the base rotation.
    pub increment: Vector3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            base_rotation: Matrix3::identity(),
            increment: Vector3::zeros(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_parts(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        RigidTransform {
            base_rotation: orthonormalize(&rotation),
            increment: Vector3::zeros(),
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self::from_parts(Matrix3::identity(), translation)
    }

    /// Effective rotation including the pending increment.
    pub fn rotation(&self) -> Matrix3<f64> {
        rodrigues(&self.increment) * self.base_rotation
    }

    pub fn base_rotation(&self) -> &Matrix3<f64> {
        &self.base_rotation
    }

    /// Fold the pending increment into the base and re-orthonormalize.
    pub fn fold_increment(&mut self) {
        if self.increment != Vector3::zeros() {
            self.base_rotation = orthonormalize(&(rodrigues(&self.increment) * self.base_rotation));
            self.increment = Vector3::zeros();
        }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation() * p.coords + self.translation)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation() * v
    }

    /// Geodesic rotation distance to another transform, radians.
    pub fn rotation_angle_to(&self, other: &RigidTransform) -> f64 {
        geodesic_angle(&self.rotation(), &other.rotation())
    }

    /// Orthonormality defect of the stored base: |det − 1|.
    pub fn determinant_error(&self) -> f64 {
        (self.base_rotation.determinant() - 1.0).abs()
    }
}

/// Serialized form: row-major rotation (increment folded in) + translation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidTransformRepr {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl From<&RigidTransform> for RigidTransformRepr {
    fn from(t: &RigidTransform) -> Self {
        let r = t.rotation();
        RigidTransformRepr {
            rotation: [
                r[(0, 0)],
                r[(0, 1)],
                r[(0, 2)],
                r[(1, 0)],
                r[(1, 1)],
                r[(1, 2)],
                r[(2, 0)],
                r[(2, 1)],
                r[(2, 2)],
            ],
            translation: [t.translation.x, t.translation.y, t.translation.z],
        }
    }
}

impl From<&RigidTransformRepr> for RigidTransform {
    fn from(r: &RigidTransformRepr) -> Self {
        let m = Matrix3::new(
            r.rotation[0],
            r.rotation[1],
            r.rotation[2],
            r.rotation[3],
            r.rotation[4],
            r.rotation[5],
            r.rotation[6],
            r.rotation[7],
            r.rotation[8],
        );
        RigidTransform::from_parts(m, Vector3::new(r.translation[0], r.translation[1], r.translation[2]))
    }
}
