//! Bidirectional 2D Chamfer loss between point sets, grid-accelerated.
//!
//! Each directed sum of squared nearest distances is normalized by its set
//! cardinality so the loss is invariant to the sampling budget; the stage
//! weight is applied by the caller. The grid search is exact: it expands
//! rings until no unscanned cell can beat the best distance.

use nalgebra::Point2;

use crate::error::{Error, Result};

/// Uniform grid over a 2D point set answering exact nearest-neighbor queries.
pub struct PointGrid2 {
    points: Vec<Point2<f64>>,
    cell_size: f64,
    origin: Point2<f64>,
    dims: (i32, i32),
    cells: Vec<Vec<u32>>,
}

impl PointGrid2 {
    pub fn build(points: &[Point2<f64>]) -> Self {
        assert!(!points.is_empty());
        let mut min = points[0];
        let mut max = points[0];
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let extent = ((max.x - min.x).max(max.y - min.y)).max(1e-9);
        // Aim for a few points per cell.
        let target = (points.len() as f64).sqrt().ceil();
        let cell_size = (extent / target).max(1e-9);
        let nx = ((max.x - min.x) / cell_size).floor() as i32 + 1;
        let ny = ((max.y - min.y) / cell_size).floor() as i32 + 1;
        let mut cells = vec![Vec::new(); (nx * ny) as usize];
        for (i, p) in points.iter().enumerate() {
            let cx = ((p.x - min.x) / cell_size).floor() as i32;
            let cy = ((p.y - min.y) / cell_size).floor() as i32;
            cells[(cy * nx + cx) as usize].push(i as u32);
        }
        PointGrid2 {
            points: points.to_vec(),
            cell_size,
            origin: min,
            dims: (nx, ny),
            cells,
        }
    }

    /// Squared distance to the nearest stored point.
    pub fn nearest_dist2(&self, q: &Point2<f64>) -> f64 {
        let (nx, ny) = self.dims;
        let cx = (((q.x - self.origin.x) / self.cell_size).floor() as i32).clamp(0, nx - 1);
        let cy = (((q.y - self.origin.y) / self.cell_size).floor() as i32).clamp(0, ny - 1);
        let max_ring = nx.max(ny);
        let mut best = f64::INFINITY;

        for ring in 0..=max_ring {
            // Rings 0..ring-1 are fully scanned, so every unscanned cell is at
            // Chebyshev distance ≥ ring and holds no point closer than
            // (ring-1)·cell.
            let reachable = ((ring as f64 - 1.0) * self.cell_size).max(0.0);
            if best.sqrt() <= reachable {
                break;
            }
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    let (ix, iy) = (cx + dx, cy + dy);
                    if ix < 0 || iy < 0 || ix >= nx || iy >= ny {
                        continue;
                    }
                    for &pi in &self.cells[(iy * nx + ix) as usize] {
                        let d2 = (q - self.points[pi as usize]).norm_squared();
                        if d2 < best {
                            best = d2;
                        }
                    }
                }
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2<f64>] {
        &self.points
    }
}

/// Normalized bidirectional squared-distance Chamfer loss (pixels²).
pub fn chamfer_2d(a: &[Point2<f64>], b: &[Point2<f64>]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::NoVisiblePoints);
    }
    if b.is_empty() {
        return Err(Error::EmptyMask);
    }
    let grid_b = PointGrid2::build(b);
    let grid_a = PointGrid2::build(a);
    Ok(directed_mean_sq(a, &grid_b) + directed_mean_sq(b, &grid_a))
}

/// One-time grid over the static set, for repeated loss evaluations against
/// varying point sets.
pub struct ChamferAgainst {
    grid: PointGrid2,
}

impl ChamferAgainst {
    pub fn new(static_side: &[Point2<f64>]) -> Result<Self> {
        if static_side.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(ChamferAgainst {
            grid: PointGrid2::build(static_side),
        })
    }

    /// chamfer_2d(moving, static) with the static grid reused.
    pub fn loss(&self, moving: &[Point2<f64>]) -> Result<f64> {
        if moving.is_empty() {
            return Err(Error::NoVisiblePoints);
        }
        let grid_m = PointGrid2::build(moving);
        Ok(directed_mean_sq(moving, &self.grid) + directed_mean_sq(self.grid.points(), &grid_m))
    }

    /// Mean unsquared nearest distance from `moving` to the static set.
    pub fn mean_nearest(&self, moving: &[Point2<f64>]) -> Result<f64> {
        if moving.is_empty() {
            return Err(Error::NoVisiblePoints);
        }
        let sum: f64 = moving.iter().map(|p| self.grid.nearest_dist2(p).sqrt()).sum();
        Ok(sum / moving.len() as f64)
    }
}

fn directed_mean_sq(from: &[Point2<f64>], to: &PointGrid2) -> f64 {
    let sum: f64 = from.iter().map(|p| to.nearest_dist2(p)).sum();
    sum / from.len() as f64
}
