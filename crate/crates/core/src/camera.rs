//! Pinhole camera projection. The camera sits at the origin with identity
//! view; poses map object coordinates into the camera frame.

use nalgebra::{Point2, Point3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::RigidTransform;

/// Points closer than this to the image plane are flagged invisible to avoid
/// projective blow-up during optimization.
pub const Z_NEAR: f64 = 1e-4;

/// Pinhole intrinsics K (pixels).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(Error::InvalidParams("focal lengths must be positive".into()));
        }
        if !(0.0..self.width as f64).contains(&self.cx)
            || !(0.0..self.height as f64).contains(&self.cy)
        {
            return Err(Error::InvalidParams(
                "principal point must lie inside the image".into(),
            ));
        }
        Ok(())
    }

    fn contains(&self, uv: &Point2<f64>) -> bool {
        uv.x >= 0.0 && uv.x < self.width as f64 && uv.y >= 0.0 && uv.y < self.height as f64
    }
}

/// One projected point with its visibility flag.
#[derive(Debug, Clone, Copy)]
pub struct ProjectedPoint {
    pub uv: Point2<f64>,
    /// In front of the camera and inside the frame.
    pub visible: bool,
}

/// Projection of a 3D point set.
#[derive(Debug, Clone)]
pub struct ProjectedSet {
    pub points: Vec<ProjectedPoint>,
}

impl ProjectedSet {
    pub fn visible(&self) -> Vec<Point2<f64>> {
        self.points.iter().filter(|p| p.visible).map(|p| p.uv).collect()
    }

    pub fn visible_count(&self) -> usize {
        self.points.iter().filter(|p| p.visible).count()
    }
}

/// Project `points` through `pose` and K: u = fx·x/z + cx, v = fy·y/z + cy.
pub fn project_points(
    points: &[Point3<f64>],
    pose: &RigidTransform,
    k: &CameraIntrinsics,
) -> ProjectedSet {
    let rot = pose.rotation();
    let points = points
        .iter()
        .map(|p| {
            let c = rot * p.coords + pose.translation;
            if c.z <= Z_NEAR {
                return ProjectedPoint {
                    uv: Point2::origin(),
                    visible: false,
                };
            }
            let uv = Point2::new(k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy);
            ProjectedPoint {
                uv,
                visible: k.contains(&uv),
            }
        })
        .collect();
    ProjectedSet { points }
}
