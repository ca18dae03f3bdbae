//! Marching tetrahedra over a sampled scalar field.
//!
//! Each grid cube is split into the six Freudenthal tetrahedra around its main
//! diagonal, which tile space consistently, so the extracted isosurface is a
//! closed manifold whenever the field is negative strictly inside the grid.
//! Triangles are wound with normals pointing toward positive field values.

use nalgebra::Point3;
use std::collections::HashMap;

use super::mesh::TriMesh;
use crate::error::Result;

/// Corner offsets, bit order x=1, y=2, z=4.
const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Six tetrahedra around the v0→v6 diagonal.
const TETS: [[usize; 4]; 6] = [
    [0, 1, 2, 6],
    [0, 2, 3, 6],
    [0, 3, 7, 6],
    [0, 7, 4, 6],
    [0, 4, 5, 6],
    [0, 5, 1, 6],
];

/// Extract the zero isosurface of `values` sampled on a lattice of
/// `dims` points with spacing `h` starting at `origin`. `values` is indexed
/// x-fastest: `values[i + j*nx + k*nx*ny]`.
pub fn marching_tets(
    origin: Point3<f64>,
    h: f64,
    dims: [usize; 3],
    values: &[f64],
) -> Result<TriMesh> {
    let [nx, ny, nz] = dims;
    assert_eq!(values.len(), nx * ny * nz);
    let nudge = 1e-9 * h;
    let value = |i: usize, j: usize, k: usize| -> f64 {
        let f = values[i + j * nx + k * nx * ny];
        if f == 0.0 {
            nudge
        } else {
            f
        }
    };
    let lattice_id = |i: usize, j: usize, k: usize| -> u64 { (i + j * nx + k * nx * ny) as u64 };
    let point = |i: usize, j: usize, k: usize| -> Point3<f64> {
        Point3::new(
            origin.x + i as f64 * h,
            origin.y + j as f64 * h,
            origin.z + k as f64 * h,
        )
    };

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut edge_vertex: HashMap<(u64, u64), u32> = HashMap::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    let mut corner_ids = [0u64; 8];
    let mut corner_pts = [Point3::origin(); 8];
    let mut corner_vals = [0.0f64; 8];

    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let mut any_neg = false;
                let mut any_pos = false;
                for (c, off) in CORNERS.iter().enumerate() {
                    let (ci, cj, ck) = (i + off[0], j + off[1], k + off[2]);
                    corner_ids[c] = lattice_id(ci, cj, ck);
                    corner_pts[c] = point(ci, cj, ck);
                    let f = value(ci, cj, ck);
                    corner_vals[c] = f;
                    any_neg |= f < 0.0;
                    any_pos |= f > 0.0;
                }
                if !(any_neg && any_pos) {
                    continue;
                }
                for tet in &TETS {
                    emit_tet(
                        [
                            (corner_ids[tet[0]], corner_pts[tet[0]], corner_vals[tet[0]]),
                            (corner_ids[tet[1]], corner_pts[tet[1]], corner_vals[tet[1]]),
                            (corner_ids[tet[2]], corner_pts[tet[2]], corner_vals[tet[2]]),
                            (corner_ids[tet[3]], corner_pts[tet[3]], corner_vals[tet[3]]),
                        ],
                        &mut vertices,
                        &mut edge_vertex,
                        &mut triangles,
                    );
                }
            }
        }
    }

    TriMesh::new(vertices, triangles)
}

type TetCorner = (u64, Point3<f64>, f64);

fn emit_tet(
    mut c: [TetCorner; 4],
    vertices: &mut Vec<Point3<f64>>,
    edge_vertex: &mut HashMap<(u64, u64), u32>,
    triangles: &mut Vec<[u32; 3]>,
) {
    let inside: Vec<usize> = (0..4).filter(|&i| c[i].2 < 0.0).collect();
    if inside.is_empty() || inside.len() == 4 {
        return;
    }

    // Normalize corner order so the tet (c0, c1, c2, c3) is positively
    // oriented and the sign pattern is one of: c0 negative, c0 positive, or
    // {c0, c1} negative. Single swaps flip orientation, so fix it afterwards
    // by swapping a same-sign pair.
    match inside.len() {
        1 => c.swap(0, inside[0]),
        3 => {
            let outside = (0..4).find(|i| !inside.contains(i)).unwrap();
            c.swap(0, outside);
        }
        2 => {
            let (a, b) = (inside[0], inside[1]);
            c.swap(0, a);
            let b = if b == 0 { a } else { b };
            c.swap(1, b);
        }
        _ => unreachable!(),
    }
    if !positively_oriented(&c) {
        c.swap(2, 3);
    }

    let mut iso = |p: &TetCorner, q: &TetCorner| -> u32 {
        let key = if p.0 < q.0 { (p.0, q.0) } else { (q.0, p.0) };
        *edge_vertex.entry(key).or_insert_with(|| {
            let t = p.2 / (p.2 - q.2);
            let pos = p.1 + (q.1 - p.1) * t;
            vertices.push(pos);
            (vertices.len() - 1) as u32
        })
    };

    match inside.len() {
        1 => {
            // c0 inside: one triangle facing away from c0.
            let e1 = iso(&c[0], &c[1]);
            let e2 = iso(&c[0], &c[2]);
            let e3 = iso(&c[0], &c[3]);
            triangles.push([e1, e2, e3]);
        }
        3 => {
            // c0 outside: same triangle, reversed toward c0.
            let e1 = iso(&c[0], &c[1]);
            let e2 = iso(&c[0], &c[2]);
            let e3 = iso(&c[0], &c[3]);
            triangles.push([e1, e3, e2]);
        }
        2 => {
            // {c0, c1} inside, {c2, c3} outside.
            let e02 = iso(&c[0], &c[2]);
            let e03 = iso(&c[0], &c[3]);
            let e13 = iso(&c[1], &c[3]);
            let e12 = iso(&c[1], &c[2]);
            triangles.push([e02, e03, e13]);
            triangles.push([e02, e13, e12]);
        }
        _ => unreachable!(),
    }
}

fn positively_oriented(c: &[TetCorner; 4]) -> bool {
    let u = c[1].1 - c[0].1;
    let v = c[2].1 - c[0].1;
    let w = c[3].1 - c[0].1;
    u.dot(&v.cross(&w)) > 0.0
}
