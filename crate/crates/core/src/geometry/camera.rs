use serde::{Deserialize, Serialize};

use super::{GeometryError, Result};
use crate::{Mat3, Vec2, Vec3};

/// Pinhole calibration, no distortion.
///
/// `skew` is dimensionless: the matrix entry `K[0][1]` equals `skew * fx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub skew: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        Self::with_skew(fx, fy, cx, cy, 0.0)
    }

    pub fn with_skew(fx: f64, fy: f64, cx: f64, cy: f64, skew: f64) -> Result<Self> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            skew,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn identity() -> Self {
        Self {
            fx: 1.0,
            fy: 1.0,
            cx: 0.0,
            cy: 0.0,
            skew: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.fx, self.fy, self.cx, self.cy, self.skew];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidIntrinsics(
                "non-finite parameter".into(),
            ));
        }
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "focal lengths must be positive (fx = {}, fy = {})",
                self.fx, self.fy
            )));
        }
        Ok(())
    }

    /// The upper-triangular calibration matrix K.
    pub fn matrix(&self) -> Mat3 {
        Mat3::new(
            self.fx,
            self.skew * self.fx,
            self.cx,
            0.0,
            self.fy,
            self.cy,
            0.0,
            0.0,
            1.0,
        )
    }

    pub fn inverse_matrix(&self) -> Mat3 {
        let s = self.skew * self.fx;
        let (fx, fy, cx, cy) = (self.fx, self.fy, self.cx, self.cy);
        Mat3::new(
            1.0 / fx,
            -s / (fx * fy),
            (s * cy - cx * fy) / (fx * fy),
            0.0,
            1.0 / fy,
            -cy / fy,
            0.0,
            0.0,
            1.0,
        )
    }

    /// Pixel to normalized image plane coordinates.
    pub fn normalize(&self, pixel: Vec2) -> Vec2 {
        let yn = (pixel.y - self.cy) / self.fy;
        let xn = (pixel.x - self.cx - self.skew * self.fx * yn) / self.fx;
        Vec2::new(xn, yn)
    }

    /// Normalized image plane coordinates to pixel.
    pub fn denormalize(&self, n: Vec2) -> Vec2 {
        Vec2::new(
            self.fx * n.x + self.skew * self.fx * n.y + self.cx,
            self.fy * n.y + self.cy,
        )
    }

    /// Unnormalized ray direction `K⁻¹ (x, y, 1)ᵀ` through a pixel.
    pub fn backproject(&self, pixel: Vec2) -> Vec3 {
        let n = self.normalize(pixel);
        Vec3::new(n.x, n.y, 1.0)
    }

    pub fn project(&self, point: &Vec3) -> Result<Vec2> {
        if point.z <= 0.0 {
            return Err(GeometryError::BehindCamera { z: point.z });
        }
        Ok(self.denormalize(Vec2::new(point.x / point.z, point.y / point.z)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn vga() -> CameraIntrinsics {
        CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0).unwrap()
    }

    #[test]
    fn rejects_nonpositive_focal() {
        assert!(CameraIntrinsics::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(CameraIntrinsics::new(1.0, -2.0, 0.0, 0.0).is_err());
        assert!(CameraIntrinsics::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn backproject_identity_origin() {
        let r = CameraIntrinsics::identity().backproject(Vec2::new(0.0, 0.0));
        assert_eq!(r, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn project_examples() {
        let p = CameraIntrinsics::identity()
            .project(&Vec3::new(1.0, 1.0, 2.0))
            .unwrap();
        assert_eq!(p, Vec2::new(0.5, 0.5));
        let p = vga().project(&Vec3::new(0.0, 0.0, 10.0)).unwrap();
        assert_eq!(p, Vec2::new(320.0, 240.0));
    }

    #[test]
    fn project_behind_camera() {
        let err = vga().project(&Vec3::new(0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, GeometryError::BehindCamera { .. }));
        assert!(vga().project(&Vec3::new(1.0, 0.0, -1.0)).is_err());
    }

    #[test]
    fn project_backproject_round_trip_with_skew() {
        let k = CameraIntrinsics::with_skew(610.0, 590.0, 300.5, 251.25, 0.01).unwrap();
        for &(x, y) in &[(0.0, 0.0), (12.5, 400.0), (639.0, 3.0)] {
            let px = Vec2::new(x, y);
            for &s in &[0.01, 1.0, 37.5] {
                let back = k.project(&(k.backproject(px) * s)).unwrap();
                assert_abs_diff_eq!(back.x, x, epsilon = 1e-9);
                assert_abs_diff_eq!(back.y, y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn inverse_matrix_inverts() {
        let k = CameraIntrinsics::with_skew(610.0, 590.0, 300.5, 251.25, 0.02).unwrap();
        let prod = k.matrix() * k.inverse_matrix();
        assert!((prod - Mat3::identity()).norm() < 1e-12);
    }
}
