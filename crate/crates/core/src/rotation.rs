//! Axis-angle rotation helpers: exponential map, its analytic Jacobian, and
//! geodesic distance. Series expansions keep everything smooth through θ = 0,
//! which the finite-difference gradient checks rely on.

use nalgebra::{Matrix3, Vector3};

/// Skew-symmetric cross-product matrix [v]×.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// sin(θ)/θ and (1−cos θ)/θ², stable near zero.
fn ab_coeffs(theta: f64) -> (f64, f64) {
    if theta < 1e-4 {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    }
}

/// (da/dθ)/θ and (db/dθ)/θ, stable near zero.
fn ab_slopes(theta: f64) -> (f64, f64) {
    if theta < 1e-4 {
        let t2 = theta * theta;
        (
            -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0,
            -1.0 / 12.0 + t2 / 180.0 - t2 * t2 / 6720.0,
        )
    } else {
        let t2 = theta * theta;
        (
            (theta * theta.cos() - theta.sin()) / (t2 * theta),
            (theta * theta.sin() - 2.0 * (1.0 - theta.cos())) / (t2 * t2),
        )
    }
}

/// Rodrigues exponential map: R = I + a·K + b·K².
pub fn rodrigues(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let (a, b) = ab_coeffs(theta);
    let k = skew(omega);
    Matrix3::identity() + a * k + b * (k * k)
}

/// Partial derivatives dR/dωᵢ of the exponential map.
pub fn rodrigues_jacobian(omega: &Vector3<f64>) -> [Matrix3<f64>; 3] {
    let theta = omega.norm();
    let (a, b) = ab_coeffs(theta);
    let (sa, sb) = ab_slopes(theta);
    let k = skew(omega);
    let k2 = k * k;
    std::array::from_fn(|i| {
        let mut e = Vector3::zeros();
        e[i] = 1.0;
        let ki = skew(&e);
        sa * omega[i] * k + a * ki + sb * omega[i] * k2 + b * (ki * k + k * ki)
    })
}

/// Geodesic angle between two rotations, in radians.
pub fn geodesic_angle(ra: &Matrix3<f64>, rb: &Matrix3<f64>) -> f64 {
    let rel = ra.transpose() * rb;
    let c = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    c.acos()
}

/// Project a near-rotation matrix back onto SO(3) (Gram–Schmidt on columns).
pub fn orthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c0 = m.column(0).normalize();
    let c1r = m.column(1) - m.column(1).dot(&c0) * c0;
    let c1 = c1r.normalize();
    let c2 = c0.cross(&c1);
    Matrix3::from_columns(&[c0, c1, c2])
}
