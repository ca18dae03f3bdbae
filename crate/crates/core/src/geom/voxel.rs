//! Occupancy voxelization of watertight meshes.

use nalgebra::Point3;

use super::mesh::TriMesh;
use super::winding::WindingIndex;
use crate::error::{Error, Result};

/// Default grid cell budget (2²⁴ cells ≈ 16.7M).
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 24;

/// Dense boolean occupancy grid over a padded mesh AABB.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    pub origin: Point3<f64>,
    pub voxel_size: f64,
    pub dims: [usize; 3],
    pub occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    /// Occupied volume in m³.
    pub fn volume(&self) -> f64 {
        self.occupied_count() as f64 * self.voxel_size.powi(3)
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> Point3<f64> {
        Point3::new(
            self.origin.x + (i as f64 + 0.5) * self.voxel_size,
            self.origin.y + (j as f64 + 0.5) * self.voxel_size,
            self.origin.z + (k as f64 + 0.5) * self.voxel_size,
        )
    }
}

/// Voxelize with the default cell budget.
pub fn voxelize_occupancy(mesh: &TriMesh, voxel_size: f64) -> Result<OccupancyGrid> {
    voxelize_occupancy_with_budget(mesh, voxel_size, DEFAULT_CELL_BUDGET)
}

/// Occupancy grid covering the mesh AABB padded by one voxel; a voxel is
/// occupied iff its center is inside by the winding-number test.
pub fn voxelize_occupancy_with_budget(
    mesh: &TriMesh,
    voxel_size: f64,
    budget: u64,
) -> Result<OccupancyGrid> {
    if voxel_size <= 0.0 {
        return Err(Error::InvalidParams("voxel_size must be positive".into()));
    }
    if !mesh.is_watertight() {
        return Err(Error::SignRequiresWatertight);
    }
    let bb = mesh.aabb();
    let diag = bb.diagonal();
    let mut dims = [0usize; 3];
    for k in 0..3 {
        dims[k] = (diag[k] / voxel_size).ceil() as usize + 2;
    }
    let cells = dims[0] as u64 * dims[1] as u64 * dims[2] as u64;
    if cells > budget {
        return Err(Error::GridTooLarge { cells, budget });
    }
    let origin = Point3::new(
        bb.min.x - voxel_size,
        bb.min.y - voxel_size,
        bb.min.z - voxel_size,
    );

    let winding = WindingIndex::build(mesh);
    let mut grid = OccupancyGrid {
        origin,
        voxel_size,
        dims,
        occupied: vec![false; cells as usize],
    };
    let mut idx = 0;
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                grid.occupied[idx] = winding.is_inside(&grid.center(i, j, k));
                idx += 1;
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::primitives::{box_mesh, icosphere};

    #[test]
    fn unit_cube_volume_within_five_percent() {
        let mesh = box_mesh(1.0, 1.0, 1.0);
        let grid = voxelize_occupancy(&mesh, 0.05).unwrap();
        let v = grid.volume();
        assert!((v - 1.0).abs() / 1.0 <= 0.05, "volume {v}");
    }

    #[test]
    fn sphere_volume_within_three_percent() {
        let mesh = icosphere(0.1, 4);
        let grid = voxelize_occupancy(&mesh, 0.005).unwrap();
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 0.1_f64.powi(3);
        let v = grid.volume();
        assert!((v - exact).abs() / exact <= 0.03, "volume {v} vs {exact}");
    }

    #[test]
    fn tiny_mesh_occupies_at_most_one_voxel() {
        let mesh = icosphere(0.001, 1);
        let grid = voxelize_occupancy(&mesh, 0.01).unwrap();
        assert!(grid.occupied_count() <= 1);
    }

    #[test]
    fn budget_is_enforced() {
        let mesh = box_mesh(1.0, 1.0, 1.0);
        assert!(matches!(
            voxelize_occupancy_with_budget(&mesh, 0.001, 1000),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn halving_voxel_size_converges_monotonically_toward_exact() {
        let mesh = box_mesh(0.8, 0.8, 0.8);
        let exact = 0.8_f64.powi(3);
        let sizes = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&s| (voxelize_occupancy(&mesh, s).unwrap().volume() - exact).abs())
            .collect();
        assert!(errs[1] <= errs[0] && errs[2] <= errs[1], "errors {errs:?}");
    }
}
