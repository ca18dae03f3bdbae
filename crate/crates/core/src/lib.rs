//! Grasp-pose refinement on file-based hand/object scenes.
//!
//! Takes independently produced 3D hand and object models plus 2D evidence
//! (object mask, camera intrinsics) and optimizes object pose/scale and hand
//! articulation into a physically plausible grasp, with an evaluation suite
//! for reconstruction and interaction quality.

pub mod camera;
pub mod chamfer;
pub mod error;
pub mod geom;
pub mod hand;
pub mod energy;
pub mod mask;
pub mod optim;
pub mod rotation;
pub mod transform;

pub use error::{Error, Result};
