//! Mesh representation and the geometric kernels the rest of the crate
//! consumes: BVH queries, signed distances, surface sampling, convex hulls,
//! voxel occupancy, and isosurface extraction.
//!
//! All kernels are read-only after construction and safe for concurrent
//! queries.

pub mod bvh;
pub mod hull;
pub mod marching;
pub mod mesh;
pub mod primitives;
pub mod sample;
pub mod sdf;
pub mod tri;
pub mod voxel;
pub mod winding;

pub use bvh::{Bvh, NearestHit};
pub use hull::convex_hull_volume;
pub use marching::marching_tets;
pub use mesh::{Aabb, TriMesh};
pub use sample::{farthest_point_sample, sample_surface, PointSample, SampleSource};
pub use sdf::{build_bvh, signed_distance, SdfIndex, SdfResult};
pub use voxel::{voxelize_occupancy, voxelize_occupancy_with_budget, OccupancyGrid};
pub use winding::WindingIndex;
