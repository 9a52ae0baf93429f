use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{eig_sym2, eig_sym3, CameraIntrinsics, GeometryError, Result};
use crate::{Mat3, Vec2, Vec3};

/// A conic `(x, y, 1) m (x, y, 1)ᵀ = 0`, stored as a symmetric 3×3 matrix.
///
/// The matrix is only defined up to a nonzero scale; see [`sign_normalize`]
/// for the canonical representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub m: Mat3,
}

impl Conic {
    /// Wraps `m`, replacing it with its symmetric part.
    pub fn new(m: Mat3) -> Self {
        Self {
            m: (m + m.transpose()) * 0.5,
        }
    }

    /// `a x² + b xy + c y² + d x + e y + f = 0`.
    pub fn from_coeffs(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self {
            m: Mat3::new(
                a,
                0.5 * b,
                0.5 * d,
                0.5 * b,
                c,
                0.5 * e,
                0.5 * d,
                0.5 * e,
                f,
            ),
        }
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        let h = Vec3::new(p.x, p.y, 1.0);
        h.dot(&(self.m * h))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: self.m * s }
    }
}

/// Centre/axes form of an ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricEllipse {
    pub center: [f64; 2],
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Major-axis direction from +x, in `[0, π)`.
    pub angle: f64,
}

impl GeometricEllipse {
    /// Builds an ellipse, swapping the axes if `semi_major < semi_minor` and
    /// wrapping the angle into `[0, π)`.
    pub fn new(center: Vec2, semi_major: f64, semi_minor: f64, angle: f64) -> Result<Self> {
        let vals = [center.x, center.y, semi_major, semi_minor, angle];
        if vals.iter().any(|v| !v.is_finite()) || semi_major <= 0.0 || semi_minor <= 0.0 {
            return Err(GeometryError::NotAnEllipse);
        }
        let (a, b, theta) = if semi_major >= semi_minor {
            (semi_major, semi_minor, angle)
        } else {
            (semi_minor, semi_major, angle + 0.5 * PI)
        };
        Ok(Self {
            center: [center.x, center.y],
            semi_major: a,
            semi_minor: b,
            angle: wrap_pi(theta),
        })
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(self.center[0], self.center[1])
    }

    /// Minor over major semi-axis, in `(0, 1]`.
    pub fn axis_ratio(&self) -> f64 {
        self.semi_minor / self.semi_major
    }

    pub fn eccentricity(&self) -> f64 {
        let r = self.axis_ratio();
        (1.0 - r * r).max(0.0).sqrt()
    }

    pub fn major_axis(&self) -> Vec2 {
        Vec2::new(self.angle.cos(), self.angle.sin())
    }

    pub fn point_at(&self, t: f64) -> Vec2 {
        let (s, c) = self.angle.sin_cos();
        let (px, py) = (self.semi_major * t.cos(), self.semi_minor * t.sin());
        self.center() + Vec2::new(c * px - s * py, s * px + c * py)
    }

    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        (0..n)
            .map(|i| self.point_at(2.0 * PI * i as f64 / n as f64))
            .collect()
    }
}

fn wrap_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Scales to unit Frobenius norm and picks the sign with at most one
/// negative eigenvalue.
pub fn sign_normalize(c: &Conic) -> Result<Conic> {
    let n = c.m.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(GeometryError::ZeroMatrix);
    }
    let m = c.m / n;
    let eig = eig_sym3(&m)?;
    let tol = 1e-14;
    let neg = eig.values.iter().filter(|&&v| v < -tol).count();
    let pos = eig.values.iter().filter(|&&v| v > tol).count();
    Ok(Conic::new(if neg > pos { -m } else { m }))
}

/// Converts a real-ellipse conic into centre/axes form.
pub fn conic_to_geometric(c: &Conic) -> Result<GeometricEllipse> {
    let m = sign_normalize(c)?.m;
    let (a, b, cc) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let det2 = a * cc - b * b;
    if a <= 0.0 || det2 <= 0.0 {
        return Err(GeometryError::NotAnEllipse);
    }
    // Pole of the line at infinity.
    let (d, e) = (m[(0, 2)], m[(1, 2)]);
    let cx = (b * e - cc * d) / det2;
    let cy = (b * d - a * e) / det2;
    let f_center = m[(2, 2)] + d * cx + e * cy;
    if !(f_center < 0.0) {
        return Err(GeometryError::NotAnEllipse);
    }
    let (vals, vecs) = eig_sym2(a, b, cc);
    let semi_major = (-f_center / vals[0]).sqrt();
    let semi_minor = (-f_center / vals[1]).sqrt();
    let angle = if vals[0] == vals[1] {
        0.0
    } else {
        vecs[0].y.atan2(vecs[0].x)
    };
    GeometricEllipse::new(Vec2::new(cx, cy), semi_major, semi_minor, angle)
}

pub fn geometric_to_conic(e: &GeometricEllipse) -> Conic {
    let (s, c) = e.angle.sin_cos();
    let ia2 = 1.0 / (e.semi_major * e.semi_major);
    let ib2 = 1.0 / (e.semi_minor * e.semi_minor);
    let qa = c * c * ia2 + s * s * ib2;
    let qb = c * s * (ia2 - ib2);
    let qc = s * s * ia2 + c * c * ib2;
    let [x0, y0] = e.center;
    let d = -(qa * x0 + qb * y0);
    let f = -(qb * x0 + qc * y0);
    let g = qa * x0 * x0 + 2.0 * qb * x0 * y0 + qc * y0 * y0 - 1.0;
    let m = Mat3::new(qa, qb, d, qb, qc, f, d, f, g);
    // Positive-definite quadratic block with a negative centre value is
    // already the (2, 1) signature; only the scale needs fixing.
    Conic::new(m / m.norm())
}

/// `Kᵀ C K`: the same conic expressed on the normalized image plane.
pub fn transfer_to_normalized(c: &Conic, k: &CameraIntrinsics) -> Result<Conic> {
    let km = k.matrix();
    sign_normalize(&Conic::new(km.transpose() * c.m * km))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(m: Mat3) -> Mat3 {
        m / m.norm()
    }

    fn assert_same_conic(a: &Conic, b: &Conic, tol: f64) {
        let (ma, mb) = (unit(a.m), unit(b.m));
        let d = (ma - mb).amax().min((ma + mb).amax());
        assert!(d <= tol, "conics differ by {d}:\n{ma}\n{mb}");
    }

    #[test]
    fn canonical_form_to_geometric() {
        let e = conic_to_geometric(&Conic::new(Mat3::from_diagonal(&Vec3::new(
            0.25, 1.0, -1.0,
        ))))
        .unwrap();
        assert_abs_diff_eq!(e.center[0], 0.0);
        assert_abs_diff_eq!(e.center[1], 0.0);
        assert_abs_diff_eq!(e.semi_major, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.semi_minor, 1.0, epsilon = 1e-14);
        assert_eq!(e.angle, 0.0);
    }

    #[test]
    fn unit_circle_has_unit_ratio() {
        let e = conic_to_geometric(&Conic::new(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))))
            .unwrap();
        assert_abs_diff_eq!(e.axis_ratio(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.semi_major, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rotated_ellipse_angle() {
        // Rotate diag(1/4, 1, -1) by 45° with a hand-written rotation.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = Mat3::new(h, -h, 0.0, h, h, 0.0, 0.0, 0.0, 1.0);
        let canon = Mat3::from_diagonal(&Vec3::new(0.25, 1.0, -1.0));
        // Points map as p' = R p, so the conic maps as R⁻ᵀ C R⁻¹ = R C Rᵀ.
        let c = Conic::new(r * canon * r.transpose());
        let e = conic_to_geometric(&c).unwrap();
        assert_abs_diff_eq!(e.angle, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(e.semi_major, 2.0, epsilon = 1e-12);
        assert_same_conic(&geometric_to_conic(&e), &c, 1e-12);
    }

    #[test]
    fn geometric_to_conic_examples() {
        let circle = GeometricEllipse::new(Vec2::zeros(), 1.0, 1.0, 0.0).unwrap();
        assert_same_conic(
            &geometric_to_conic(&circle),
            &Conic::new(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))),
            1e-15,
        );
        let ell = GeometricEllipse::new(Vec2::zeros(), 2.0, 1.0, 0.0).unwrap();
        assert_same_conic(
            &geometric_to_conic(&ell),
            &Conic::new(Mat3::from_diagonal(&Vec3::new(0.25, 1.0, -1.0))),
            1e-15,
        );
        // (x - 3)² + y² - 1 expanded by hand.
        let shifted = GeometricEllipse::new(Vec2::new(3.0, 0.0), 1.0, 1.0, 0.0).unwrap();
        let expect = Mat3::new(1.0, 0.0, -3.0, 0.0, 1.0, 0.0, -3.0, 0.0, 8.0);
        assert_same_conic(&geometric_to_conic(&shifted), &Conic::new(expect), 1e-15);
    }

    #[test]
    fn boundary_points_satisfy_conic() {
        let e = GeometricEllipse::new(Vec2::new(-4.0, 11.5), 7.0, 2.5, 2.3).unwrap();
        let c = geometric_to_conic(&e);
        for p in e.sample(50) {
            assert!(c.eval(p).abs() < 1e-12, "{}", c.eval(p));
        }
    }

    #[test]
    fn sign_normalize_examples() {
        let m = Mat3::from_diagonal(&Vec3::new(1.0, 2.0, -1.0));
        let out = sign_normalize(&Conic::new(m)).unwrap();
        assert!((out.m - m / m.norm()).amax() < 1e-16);
        let flipped = sign_normalize(&Conic::new(-m)).unwrap();
        assert!((flipped.m - m / m.norm()).amax() < 1e-16);
        assert_eq!(
            sign_normalize(&Conic::new(Mat3::zeros())),
            Err(GeometryError::ZeroMatrix)
        );
    }

    #[test]
    fn imaginary_conic_is_not_an_ellipse() {
        let c = Conic::new(Mat3::identity());
        assert!(sign_normalize(&c).is_ok());
        assert_eq!(conic_to_geometric(&c), Err(GeometryError::NotAnEllipse));
    }

    #[test]
    fn hyperbola_is_not_an_ellipse() {
        let c = Conic::new(Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)));
        assert_eq!(conic_to_geometric(&c), Err(GeometryError::NotAnEllipse));
    }

    #[test]
    fn transfer_identity_intrinsics() {
        let c = Conic::new(Mat3::new(2.0, 0.3, -1.0, 0.3, 5.0, 0.2, -1.0, 0.2, -3.0));
        let t = transfer_to_normalized(&c, &CameraIntrinsics::identity()).unwrap();
        assert_eq!(t, sign_normalize(&c).unwrap());
    }

    #[test]
    fn transfer_scaling_intrinsics() {
        let k = CameraIntrinsics::new(2.0, 2.0, 0.0, 0.0).unwrap();
        let t = transfer_to_normalized(
            &Conic::new(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))),
            &k,
        )
        .unwrap();
        assert_same_conic(
            &t,
            &Conic::new(Mat3::from_diagonal(&Vec3::new(4.0, 4.0, -1.0))),
            1e-15,
        );
    }

    #[test]
    fn transfer_pixel_circle_at_principal_point() {
        let k = CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0).unwrap();
        let px = GeometricEllipse::new(Vec2::new(320.0, 240.0), 1.0, 1.0, 0.0).unwrap();
        let t = transfer_to_normalized(&geometric_to_conic(&px), &k).unwrap();
        // Independent route: map sampled boundary pixels through K⁻¹.
        for p in px.sample(24) {
            let n = k.inverse_matrix() * Vec3::new(p.x, p.y, 1.0);
            let v = t.eval(Vec2::new(n.x, n.y));
            assert!(v.abs() <= 1e-9, "{v}");
        }
        let g = conic_to_geometric(&t).unwrap();
        // Large pixel offsets cost some precision in the conic entries.
        assert_abs_diff_eq!(g.semi_major, 1.0 / 500.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.center[0], 0.0, epsilon = 1e-12);
    }
}
