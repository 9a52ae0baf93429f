//! Per-highlight surface reconstruction from an isophote conic.
//!
//! With the light at the optical centre the normal at the brightest point is
//! parallel to its sightline, and the brightest point is taken as the centre
//! of the isophote ellipse. Transferred to the normalized image plane, the
//! conic is the cone of sightlines through the isophote; its eigenframe holds
//! the principal directions (positive eigenvalues) and a direction close to
//! the normal (negative eigenvalue).

use super::{
    conic_to_geometric, eig_sym3, transfer_to_normalized, CameraIntrinsics, Conic,
    GeometricEllipse, GeometryError, Result,
};
use crate::{Vec2, Vec3};

/// Below this eccentricity the principal directions are reported as unreliable.
pub const CIRCLE_ECCENTRICITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePatchEstimate {
    /// Brightest point in pixels (the isophote centre).
    pub bp: Vec2,
    /// Unit normal along the sightline through `bp`, third component positive.
    pub normal: Vec3,
    /// Minimal-curvature principal direction (major axis of the isophote).
    pub u1: Vec3,
    /// Maximal-curvature principal direction; `(u1, u2, normal)` is right-handed.
    pub u2: Vec3,
    /// Negative-eigenvalue eigenvector of the normalized conic, third component positive.
    pub cone_axis: Vec3,
    /// Angle between `normal` and `cone_axis`, radians.
    pub normal_axis_angle: f64,
    /// Minor over major axis of the normalized isophote, in `(0, 1]`.
    pub axis_ratio: f64,
    pub eccentricity: f64,
    /// Set by the caller that fitted the conic; zero when unknown.
    pub fit_residual: f64,
    /// Isophote in pixel coordinates.
    pub ellipse: GeometricEllipse,
}

impl SurfacePatchEstimate {
    /// Nearly circular isophotes leave `u1`/`u2` undetermined.
    pub fn directions_unreliable(&self) -> bool {
        self.eccentricity < CIRCLE_ECCENTRICITY
    }
}

/// Unit vector along `K⁻¹ (x₀, y₀, 1)ᵀ`.
pub fn normal_from_center(k: &CameraIntrinsics, bp: Vec2) -> Vec3 {
    k.backproject(bp).normalize()
}

pub fn reconstruct_patch(c: &Conic, k: &CameraIntrinsics) -> Result<SurfacePatchEstimate> {
    let ellipse = conic_to_geometric(c)?;
    let bp = ellipse.center();
    let normal = normal_from_center(k, bp);

    let normalized = transfer_to_normalized(c, k)?;
    let eig = eig_sym3(&normalized.m)?;
    let [l_neg, mu1, mu2] = eig.values;
    if !(l_neg < 0.0 && mu1 > 0.0 && mu2 > 0.0) {
        return Err(GeometryError::NotAnEllipse);
    }
    let [axis, u1, mut u2] = eig.vectors;
    if u1.cross(&u2).dot(&normal) < 0.0 {
        u2 = -u2;
    }
    let cone_axis = if axis.z < 0.0 { -axis } else { axis };
    let axis_ratio = (mu1 / mu2).sqrt();
    let eccentricity = (1.0 - axis_ratio * axis_ratio).max(0.0).sqrt();
    Ok(SurfacePatchEstimate {
        bp,
        normal,
        u1,
        u2,
        cone_axis,
        normal_axis_angle: angle_between(&normal, &cone_axis),
        axis_ratio,
        eccentricity,
        fit_residual: 0.0,
        ellipse,
    })
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}
