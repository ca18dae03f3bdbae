//! Triangle primitives: closest point and ray intersection.

use nalgebra::{Point3, Vector3};

/// Which feature of the triangle carries the closest point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriFeature {
    /// Interior of the face.
    Face,
    /// Edge k runs from corner k to corner (k+1)%3.
    Edge(u8),
    /// Corner k.
    Vertex(u8),
}

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision Detection).
pub fn closest_point(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> (Point3<f64>, TriFeature) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, TriFeature::Vertex(0));
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, TriFeature::Vertex(1));
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, TriFeature::Edge(0));
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, TriFeature::Vertex(2));
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, TriFeature::Edge(2));
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, TriFeature::Edge(1));
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, TriFeature::Face)
}

/// Möller–Trumbore ray/triangle test; returns the ray parameter t ≥ 0 on hit.
pub fn ray_intersect(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - a;
    let u = tvec.dot(&pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&qvec) * inv_det;
    (t >= 0.0).then_some(t)
}

/// Barycentric coordinates of `p` with respect to triangle `abc` (projected onto its plane).
pub fn barycentric(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> [f64; 3] {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let denom = d00 * d11 - d01 * d01;
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    [1.0 - v - w, v, w]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_regions() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);

        let (cp, f) = closest_point(&Point3::new(0.25, 0.25, 1.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Face);
        assert!((cp - Point3::new(0.25, 0.25, 0.0)).norm() < 1e-12);

        let (cp, f) = closest_point(&Point3::new(-1.0, -1.0, 0.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Vertex(0));
        assert_eq!(cp, a);

        let (cp, f) = closest_point(&Point3::new(0.5, -2.0, 0.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Edge(0));
        assert!((cp - Point3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closest_point_matches_dense_scan() {
        // Brute-force oracle: sample the triangle densely and compare distances.
        let a = Point3::new(0.1, -0.3, 0.2);
        let b = Point3::new(1.2, 0.4, -0.1);
        let c = Point3::new(-0.2, 1.1, 0.5);
        let queries = [
            Point3::new(2.0, 2.0, 2.0),
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(0.3, 0.3, 0.3),
            Point3::new(0.0, 0.0, -5.0),
        ];
        for q in &queries {
            let (cp, _) = closest_point(q, &a, &b, &c);
            let fast = (q - cp).norm();
            let mut brute = f64::INFINITY;
            let n = 400;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let u = i as f64 / n as f64;
                    let v = j as f64 / n as f64;
                    let p = a + (b - a) * u + (c - a) * v;
                    brute = brute.min((q - p).norm());
                }
            }
            assert!(fast <= brute + 1e-9, "fast {fast} brute {brute}");
        }
    }

    #[test]
    fn ray_hits_triangle() {
        let a = Point3::new(0.0, 0.0, 1.0);
        let b = Point3::new(1.0, 0.0, 1.0);
        let c = Point3::new(0.0, 1.0, 1.0);
        let t = ray_intersect(
            &Point3::origin(),
            &Vector3::new(0.1, 0.1, 1.0),
            &a,
            &b,
            &c,
        );
        assert!(t.is_some());
        assert!(ray_intersect(&Point3::origin(), &Vector3::new(0.0, 0.0, -1.0), &a, &b, &c).is_none());
    }
}
