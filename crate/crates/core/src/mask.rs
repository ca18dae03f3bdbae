//! Binary object masks: foreground point extraction and coverage
//! rasterization of meshes (used to manufacture synthetic ground truth).

use nalgebra::{Point2, Point3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::camera::{CameraIntrinsics, Z_NEAR};
use crate::error::{Error, Result};
use crate::geom::TriMesh;
use crate::transform::RigidTransform;

/// Binary foreground bitmap with cached sub-pixel-center foreground points.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskImage {
    pub width: u32,
    pub height: u32,
    data: Vec<bool>,
    points: Vec<Point2<f64>>,
}

impl MaskImage {
    pub fn from_bitmap(width: u32, height: u32, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), (width * height) as usize);
        let points = data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| {
                let x = (i as u32 % width) as f64 + 0.5;
                let y = (i as u32 / width) as f64 + 0.5;
                Point2::new(x, y)
            })
            .collect();
        MaskImage {
            width,
            height,
            data,
            points,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[(y * self.width + x) as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.points.len()
    }

    /// All foreground pixel centers.
    pub fn points(&self) -> &[Point2<f64>] {
        &self.points
    }

    pub fn bitmap(&self) -> &[bool] {
        &self.data
    }
}

/// Foreground pixel centers, subsampled to `budget` with a seeded draw when
/// the mask is larger. Deterministic per seed.
pub fn mask_foreground_points(
    mask: &MaskImage,
    budget: usize,
    seed: u64,
) -> Result<Vec<Point2<f64>>> {
    let n = mask.foreground_count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    if n <= budget {
        return Ok(mask.points().to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, budget).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| mask.points()[i]).collect())
}

/// Binary coverage mask of the projected mesh: a pixel is foreground iff its
/// center lies inside some projected triangle whose corners are all in front
/// of the camera.
pub fn rasterize_mask(
    mesh: &TriMesh,
    pose: &RigidTransform,
    k: &CameraIntrinsics,
) -> Result<MaskImage> {
    if mesh.triangles.is_empty() {
        return Err(Error::InvalidMesh("cannot rasterize an empty mesh".into()));
    }
    let rot = pose.rotation();
    let cam: Vec<Point3<f64>> = mesh
        .vertices
        .iter()
        .map(|v| Point3::from(rot * v.coords + pose.translation))
        .collect();
    let uv: Vec<Option<Point2<f64>>> = cam
        .iter()
        .map(|c| {
            (c.z > Z_NEAR).then(|| Point2::new(k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy))
        })
        .collect();

    let (w, h) = (k.width as usize, k.height as usize);
    let mut data = vec![false; w * h];
    for t in &mesh.triangles {
        let (a, b, c) = match (uv[t[0] as usize], uv[t[1] as usize], uv[t[2] as usize]) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => continue, // triangle crosses the near plane
        };
        let min_x = a.x.min(b.x).min(c.x).floor().max(0.0) as usize;
        let max_x = (a.x.max(b.x).max(c.x).ceil() as isize).clamp(0, w as isize) as usize;
        let min_y = a.y.min(b.y).min(c.y).floor().max(0.0) as usize;
        let max_y = (a.y.max(b.y).max(c.y).ceil() as isize).clamp(0, h as isize) as usize;
        for py in min_y..max_y {
            for px in min_x..max_x {
                let p = Point2::new(px as f64 + 0.5, py as f64 + 0.5);
                if point_in_triangle(&p, &a, &b, &c) {
                    data[py * w + px] = true;
                }
            }
        }
    }

    let mask = MaskImage::from_bitmap(k.width, k.height, data);
    if mask.foreground_count() == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(mask)
}

fn point_in_triangle(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> bool {
    let sign = |p1: &Point2<f64>, p2: &Point2<f64>, p3: &Point2<f64>| {
        (p1.x - p3.x) * (p2.y - p3.y) - (p2.x - p3.x) * (p1.y - p3.y)
    };
    let d1 = sign(p, a, b);
    let d2 = sign(p, b, c);
    let d3 = sign(p, c, a);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}
