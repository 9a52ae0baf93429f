//! Exact brightest point of a quadric patch under a collocated light.
//!
//! The specular point is where the surface normal is parallel to the
//! sightline. Equivalently it is a critical point of the squared distance
//! `F(p, q) = ½‖S(p, q) − c‖²` to the camera centre `c` (patch frame), whose
//! gradient is `(S_p · w, S_q · w)` with `w = S − c`.

use super::{local_frame, ray_quadric_intersect, QuadricPatch, Ray, RenderError};
use crate::{CameraIntrinsics, Vec2, Vec3};

const GRID: usize = 5;
const MAX_ITERS: usize = 100;
const CONVERGED: f64 = 1e-12;
const MAX_RESIDUAL: f64 = 1e-10;

/// Ground truth at a specular point, camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub bp_pixel: Vec2,
    pub surface_point: Vec3,
    /// Unit normal facing the camera.
    pub normal: Vec3,
    /// Direction of the curvature with the smaller magnitude.
    pub dir1: Vec3,
    pub dir2: Vec3,
    /// Principal curvatures ordered by magnitude, signed with respect to the
    /// patch `+z` side.
    pub kappa1: f64,
    pub kappa2: f64,
    /// Patch parameters of the point.
    pub param: [f64; 2],
    /// `‖n̂ × ŝ‖` at the solution.
    pub residual: f64,
}

impl GroundTruth {
    /// `|κ₁/κ₂|`, the target of the isophote axis ratio.
    pub fn curvature_ratio(&self) -> f64 {
        (self.kappa1 / self.kappa2).abs()
    }
}

/// `‖n̂ × ŝ‖` with `ŝ` the unit sightline from the camera to `S(p, q)`.
pub fn specular_residual(patch: &QuadricPatch, c: &Vec3, p: f64, q: f64) -> f64 {
    let n = Vec3::new(-patch.kappa1 * p, -patch.kappa2 * q, 1.0).normalize();
    let s = (patch.surface(p, q) - c).normalize();
    n.cross(&s).norm()
}

fn gradient(patch: &QuadricPatch, c: &Vec3, p: f64, q: f64) -> Vec2 {
    let w = patch.surface(p, q) - c;
    let (fp, fq) = (patch.kappa1 * p, patch.kappa2 * q);
    Vec2::new(w.x + fp * w.z, w.y + fq * w.z)
}

fn newton(patch: &QuadricPatch, c: &Vec3, start: Vec2) -> Option<Vec2> {
    let (k1, k2) = (patch.kappa1, patch.kappa2);
    let mut x = start;
    let mut g = gradient(patch, c, x.x, x.y);
    for _ in 0..MAX_ITERS {
        if specular_residual(patch, c, x.x, x.y) < CONVERGED {
            return Some(x);
        }
        let w = patch.surface(x.x, x.y) - c;
        let (fp, fq) = (k1 * x.x, k2 * x.y);
        let h = crate::Mat2::new(
            1.0 + fp * fp + k1 * w.z,
            fp * fq,
            fp * fq,
            1.0 + fq * fq + k2 * w.z,
        );
        let mut step = -(h.try_inverse()? * g);
        let gnorm = g.norm();
        let mut next = x + step;
        let mut gnext = gradient(patch, c, next.x, next.y);
        let mut halvings = 0;
        while gnext.norm() > gnorm && halvings < 40 {
            step *= 0.5;
            next = x + step;
            gnext = gradient(patch, c, next.x, next.y);
            halvings += 1;
        }
        x = next;
        g = gnext;
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
        if step.norm() < CONVERGED {
            return Some(x);
        }
    }
    None
}

/// All specular points of the patch inside its domain, in multi-start grid
/// order, deduplicated.
pub fn specular_roots(patch: &QuadricPatch) -> Vec<Vec2> {
    let c = patch.camera_center();
    let e = patch.extent;
    let mut roots: Vec<(Vec2, f64)> = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let start = Vec2::new(
                -e + 2.0 * e * j as f64 / (GRID - 1) as f64,
                -e + 2.0 * e * i as f64 / (GRID - 1) as f64,
            );
            let Some(x) = newton(patch, &c, start) else {
                continue;
            };
            if !patch.in_domain(x.x, x.y) || specular_residual(patch, &c, x.x, x.y) > MAX_RESIDUAL {
                continue;
            }
            let res = specular_residual(patch, &c, x.x, x.y);
            match roots.iter_mut().find(|(r, _)| (*r - x).norm() <= 1e-8 * e) {
                // Keep the most accurate representative of each root.
                Some(best) if res < best.1 => *best = (x, res),
                Some(_) => {}
                None => roots.push((x, res)),
            }
        }
    }
    roots.into_iter().map(|(x, _)| x).collect()
}

fn ground_truth_at(
    patch: &QuadricPatch,
    k: &CameraIntrinsics,
    root: Vec2,
) -> Result<GroundTruth, RenderError> {
    let f = local_frame(patch, root.x, root.y)?;
    let bp_pixel = k
        .project(&f.point)
        .map_err(|_| RenderError::NoSpecularity)?;
    let flip = if f.normal.dot(&f.point) > 0.0 {
        -1.0
    } else {
        1.0
    };
    let (dir1, dir2, kappa1, kappa2) = if f.kappa1.abs() <= f.kappa2.abs() {
        (f.dir1, f.dir2, f.kappa1, f.kappa2)
    } else {
        (f.dir2, f.dir1, f.kappa2, f.kappa1)
    };
    Ok(GroundTruth {
        bp_pixel,
        surface_point: f.point,
        normal: f.normal * flip,
        dir1,
        dir2,
        kappa1,
        kappa2,
        param: [root.x, root.y],
        residual: specular_residual(patch, &patch.camera_center(), root.x, root.y),
    })
}

/// Whether the camera sees `point` on `patch` unobstructed by it or by any of
/// the `others`.
pub(crate) fn visible(point: &Vec3, patch: &QuadricPatch, others: &[QuadricPatch]) -> bool {
    if point.z <= 0.0 {
        return false;
    }
    let dist = point.norm();
    let ray = Ray::from_camera(*point);
    let tol = 1e-9 * dist;
    let own = ray_quadric_intersect(&ray, patch).is_some_and(|h| (h.t - dist).abs() <= tol);
    own && others
        .iter()
        .all(|o| ray_quadric_intersect(&ray, o).is_none_or(|h| h.t >= dist - tol))
}

/// Visible specular point of a single patch.
pub fn analytic_bp(patch: &QuadricPatch, k: &CameraIntrinsics) -> Result<GroundTruth, RenderError> {
    analytic_bp_among(patch, k, &[])
}

/// As [`analytic_bp`], treating `others` as occluders.
pub fn analytic_bp_among(
    patch: &QuadricPatch,
    k: &CameraIntrinsics,
    others: &[QuadricPatch],
) -> Result<GroundTruth, RenderError> {
    patch.validate()?;
    let mut found = Vec::new();
    for root in specular_roots(patch) {
        let point = patch.to_camera(&patch.surface(root.x, root.y));
        if visible(&point, patch, others) {
            found.push(ground_truth_at(patch, k, root)?);
        }
    }
    match found.len() {
        0 => Err(RenderError::NoSpecularity),
        1 => Ok(found[0]),
        count => Err(RenderError::AmbiguousSpecularity {
            count,
            first: Box::new(found[0]),
        }),
    }
}
