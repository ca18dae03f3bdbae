//! Convex hull volume by incremental face insertion.

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

#[derive(Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: Vector3<f64>, // unit, outward
    offset: f64,          // normal · point_on_face
}

impl Face {
    fn new(points: &[Point3<f64>], v: [usize; 3]) -> Self {
        let (a, b, c) = (points[v[0]], points[v[1]], points[v[2]]);
        let n = (b - a).cross(&(c - a));
        let normal = n / n.norm();
        Face {
            v,
            normal,
            offset: normal.dot(&a.coords),
        }
    }

    fn sees(&self, p: &Point3<f64>, eps: f64) -> bool {
        self.normal.dot(&p.coords) - self.offset > eps
    }
}

/// Volume of the convex hull of `points` in m³.
///
/// Fails with `DegenerateHull` when the input spans fewer than 3 dimensions.
pub fn convex_hull_volume(points: &[Point3<f64>]) -> Result<f64> {
    let faces = convex_hull_faces(points)?;
    // Signed tetra fan from any interior point; use the hull vertex mean.
    let o = interior_reference(points, &faces);
    let mut volume = 0.0;
    for f in &faces {
        let a = points[f.v[0]] - o;
        let b = points[f.v[1]] - o;
        let c = points[f.v[2]] - o;
        volume += a.dot(&b.cross(&c)) / 6.0;
    }
    Ok(volume)
}

fn interior_reference(points: &[Point3<f64>], faces: &[Face]) -> Point3<f64> {
    let mut acc = Vector3::zeros();
    let mut count = 0.0;
    for f in faces {
        for &vi in &f.v {
            acc += points[vi].coords;
            count += 1.0;
        }
    }
    Point3::from(acc / count)
}

/// Outward-oriented triangular faces of the convex hull.
pub fn convex_hull_faces(points: &[Point3<f64>]) -> Result<Vec<Face>> {
    if points.len() < 4 {
        return Err(Error::DegenerateHull(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }

    let mut bb_min = points[0];
    let mut bb_max = points[0];
    for p in points {
        for k in 0..3 {
            bb_min[k] = bb_min[k].min(p[k]);
            bb_max[k] = bb_max[k].max(p[k]);
        }
    }
    let scale = (bb_max - bb_min).norm();
    if scale < 1e-12 {
        return Err(Error::DegenerateHull("all points coincide".into()));
    }
    let eps = 1e-10 * scale;

    let seed = initial_tetrahedron(points, scale)?;
    let centroid = Point3::from(
        (points[seed[0]].coords + points[seed[1]].coords + points[seed[2]].coords
            + points[seed[3]].coords)
            / 4.0,
    );

    let mut faces: Vec<Face> = Vec::new();
    for f in [
        [seed[0], seed[1], seed[2]],
        [seed[0], seed[1], seed[3]],
        [seed[0], seed[2], seed[3]],
        [seed[1], seed[2], seed[3]],
    ] {
        let mut face = Face::new(points, f);
        if face.sees(&centroid, 0.0) {
            face = Face::new(points, [f[0], f[2], f[1]]);
        }
        faces.push(face);
    }

    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&fi| faces[fi].sees(p, eps))
            .collect();
        if visible.is_empty() {
            continue;
        }
        // Horizon: directed edges of visible faces whose reverse is not also
        // on a visible face.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                edges.push((v[k], v[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| !edges.contains(&(b, a)))
            .copied()
            .collect();

        let mut keep: Vec<Face> = faces
            .iter()
            .enumerate()
            .filter(|(fi, _)| !visible.contains(fi))
            .map(|(_, f)| *f)
            .collect();
        for (a, b) in horizon {
            keep.push(Face::new(points, [a, b, pi]));
        }
        faces = keep;
    }

    Ok(faces)
}

/// Four points spanning a solid tetrahedron, or `DegenerateHull`.
fn initial_tetrahedron(points: &[Point3<f64>], scale: f64) -> Result<[usize; 4]> {
    // Most separated pair among axis extremes.
    let mut extremes = Vec::new();
    for axis in 0..3 {
        let lo = (0..points.len())
            .min_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap())
            .unwrap();
        let hi = (0..points.len())
            .max_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap())
            .unwrap();
        extremes.push(lo);
        extremes.push(hi);
    }
    let (mut p0, mut p1, mut best) = (extremes[0], extremes[1], -1.0);
    for &a in &extremes {
        for &b in &extremes {
            let d = (points[a] - points[b]).norm_squared();
            if d > best {
                best = d;
                p0 = a;
                p1 = b;
            }
        }
    }
    if best.sqrt() < 1e-12 * scale {
        return Err(Error::DegenerateHull("all points coincide".into()));
    }

    let dir = points[p1] - points[p0];
    let p2 = (0..points.len())
        .max_by(|&a, &b| {
            let da = dir.cross(&(points[a] - points[p0])).norm_squared();
            let db = dir.cross(&(points[b] - points[p0])).norm_squared();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let area2 = dir.cross(&(points[p2] - points[p0])).norm();
    if area2 < 1e-20 * scale * scale {
        return Err(Error::DegenerateHull("points are collinear".into()));
    }

    let n = dir.cross(&(points[p2] - points[p0]));
    let p3 = (0..points.len())
        .max_by(|&a, &b| {
            let da = n.dot(&(points[a] - points[p0])).abs();
            let db = n.dot(&(points[b] - points[p0])).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let height = n.dot(&(points[p3] - points[p0])).abs() / n.norm();
    if height < 1e-10 * scale {
        return Err(Error::DegenerateHull("points are coplanar".into()));
    }
    Ok([p0, p1, p2, p3])
}
