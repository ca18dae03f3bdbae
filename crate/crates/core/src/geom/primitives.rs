//! Procedural watertight primitives used by the synthetic-scene generator
//! and the test fixtures.

use nalgebra::Point3;
use std::collections::HashMap;

use super::mesh::TriMesh;

/// Icosphere of the given radius, `subdivisions` ≥ 0 (level 3 ≈ 1280 triangles).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z))
    .collect();

    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<Point3<f64>>| -> u32 {
            let key = if a < b { (a, b) } else { (b, a) };
            *midpoint.entry(key).or_insert_with(|| {
                let m = nalgebra::center(&vertices[a as usize], &vertices[b as usize]);
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        for t in &triangles {
            let ab = mid(t[0], t[1], &mut vertices);
            let bc = mid(t[1], t[2], &mut vertices);
            let ca = mid(t[2], t[0], &mut vertices);
            next.push([t[0], ab, ca]);
            next.push([t[1], bc, ab]);
            next.push([t[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    for v in &mut vertices {
        let n = v.coords.norm();
        *v = Point3::from(v.coords * (radius / n));
    }
    TriMesh::new(vertices, triangles).expect("icosphere is valid")
}

/// Axis-aligned box centered at the origin with full extents (ex, ey, ez).
pub fn box_mesh(ex: f64, ey: f64, ez: f64) -> TriMesh {
    let (hx, hy, hz) = (ex / 2.0, ey / 2.0, ez / 2.0);
    let vertices = vec![
        Point3::new(-hx, -hy, -hz),
        Point3::new(hx, -hy, -hz),
        Point3::new(hx, hy, -hz),
        Point3::new(-hx, hy, -hz),
        Point3::new(-hx, -hy, hz),
        Point3::new(hx, -hy, hz),
        Point3::new(hx, hy, hz),
        Point3::new(-hx, hy, hz),
    ];
    let triangles = vec![
        // -z
        [0, 2, 1],
        [0, 3, 2],
        // +z
        [4, 5, 6],
        [4, 6, 7],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [3, 7, 6],
        [3, 6, 2],
        // -x
        [0, 4, 7],
        [0, 7, 3],
        // +x
        [1, 2, 6],
        [1, 6, 5],
    ];
    TriMesh::new(vertices, triangles).expect("box is valid")
}

/// Closed cylinder along +y, centered at the origin.
pub fn cylinder(radius: f64, height: f64, segments: u32) -> TriMesh {
    let profile = vec![(0.0, -height / 2.0), (radius, -height / 2.0), (radius, height / 2.0), (0.0, height / 2.0)];
    lathe(&profile, segments)
}

/// Hollow mug-shaped vessel (surface of revolution), outer radius `r`, height `h`.
pub fn lathe_mug(r: f64, h: f64, segments: u32) -> TriMesh {
    let wall = 0.15 * r;
    let floor = 0.2 * h;
    let profile = vec![
        (0.0, 0.0),
        (r - wall, 0.0),
        (r, 0.08 * h),
        (r, h),
        (r - wall, h),
        (r - wall, floor),
        (0.0, floor - 0.02 * h),
    ];
    // Center the vessel vertically.
    let shifted: Vec<(f64, f64)> = profile.iter().map(|&(pr, py)| (pr, py - h / 2.0)).collect();
    lathe(&shifted, segments)
}

/// Revolve an (r, y) profile around the y axis. The profile must start and
/// end on the axis (r = 0); interior points must have r > 0.
pub fn lathe(profile: &[(f64, f64)], segments: u32) -> TriMesh {
    assert!(profile.len() >= 3, "profile too short");
    assert!(profile[0].0 == 0.0 && profile[profile.len() - 1].0 == 0.0);
    let seg = segments.max(3);

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    // ring_base[i] = Some(start index of ring i), None for on-axis points.
    let mut ring_base: Vec<Option<u32>> = Vec::new();
    let mut apex: Vec<Option<u32>> = Vec::new();
    for &(r, y) in profile {
        if r == 0.0 {
            vertices.push(Point3::new(0.0, y, 0.0));
            ring_base.push(None);
            apex.push(Some((vertices.len() - 1) as u32));
        } else {
            let base = vertices.len() as u32;
            for s in 0..seg {
                let a = 2.0 * std::f64::consts::PI * s as f64 / seg as f64;
                vertices.push(Point3::new(r * a.cos(), y, r * a.sin()));
            }
            ring_base.push(Some(base));
            apex.push(None);
        }
    }

    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for i in 0..profile.len() - 1 {
        match (ring_base[i], ring_base[i + 1]) {
            (Some(a), Some(b)) => {
                for s in 0..seg {
                    let sn = (s + 1) % seg;
                    // Quad (a+s, a+sn, b+sn, b+s) split into two triangles,
                    // wound so normals face outward (+r direction).
                    triangles.push([a + s, b + s, b + sn]);
                    triangles.push([a + s, b + sn, a + sn]);
                }
            }
            (None, Some(b)) => {
                let apex_idx = apex[i].unwrap();
                for s in 0..seg {
                    let sn = (s + 1) % seg;
                    triangles.push([apex_idx, b + s, b + sn]);
                }
            }
            (Some(a), None) => {
                let apex_idx = apex[i + 1].unwrap();
                for s in 0..seg {
                    let sn = (s + 1) % seg;
                    triangles.push([a + s, apex_idx, a + sn]);
                }
            }
            (None, None) => panic!("profile has consecutive on-axis points"),
        }
    }
    let mut mesh = TriMesh::new(vertices, triangles).expect("lathe produced valid mesh");
    // The winding above faces outward when the profile runs bottom-to-top on
    // the outside; flip if the enclosed volume came out negative.
    if mesh.signed_volume() < 0.0 {
        for t in &mut mesh.triangles {
            t.swap(1, 2);
        }
    }
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_is_watertight_and_round() {
        let s = icosphere(0.5, 3);
        assert!(s.is_watertight());
        for v in &s.vertices {
            assert!((v.coords.norm() - 0.5).abs() < 1e-12);
        }
        // Enclosed volume approaches 4/3 π r³ from below.
        let v = s.signed_volume();
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 0.125;
        assert!(v > 0.95 * exact && v < exact);
    }

    #[test]
    fn box_volume_is_exact() {
        let b = box_mesh(1.0, 2.0, 3.0);
        assert!(b.is_watertight());
        assert!((b.signed_volume() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_and_mug_are_watertight() {
        let c = cylinder(0.05, 0.12, 32);
        assert!(c.is_watertight());
        let exact = std::f64::consts::PI * 0.05 * 0.05 * 0.12;
        assert!((c.signed_volume() - exact).abs() / exact < 0.02);

        let m = lathe_mug(0.045, 0.1, 40);
        assert!(m.is_watertight());
        assert!(m.signed_volume() > 0.0);
    }
}
