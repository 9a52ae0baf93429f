//! Ellipse-specific direct least-squares fitting.
//!
//! The algebraic fit minimises `Σ (pᵀ C p)²` subject to `4ac − b² = 1`, in the
//! numerically stable block form of Halíř and Flusser, on mean-centred and
//! isotropically scaled coordinates. The returned residual is geometric: the
//! RMS orthogonal distance from the input points to the fitted ellipse,
//! divided by its semi-major axis.

use nalgebra::{Matrix3, Vector3};

use super::{conic_to_geometric, sign_normalize, Conic, GeometricEllipse, GeometryError, Result};
use crate::{Mat3, Vec2};

pub const MIN_FIT_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFit {
    pub conic: Conic,
    pub ellipse: GeometricEllipse,
    /// RMS geometric distance over semi-major axis.
    pub residual: f64,
}

pub fn fit_ellipse(points: &[Vec2]) -> Result<EllipseFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(GeometryError::TooFewPoints {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::zeros(), |acc, p| acc + p) / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let rms = ((sxx + syy) / n).sqrt();
    if rms == 0.0 {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let (spread, _) = super::eig_sym2(sxx, sxy, syy);
    if spread[0] <= 1e-10 * spread[1] {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let scale = std::f64::consts::SQRT_2 / rms;

    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for p in points {
        let q = (p - mean) * scale;
        let quad = Vector3::new(q.x * q.x, q.x * q.y, q.y * q.y);
        let lin = Vector3::new(q.x, q.y, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }
    let s3_inv = s3
        .try_inverse()
        .ok_or(GeometryError::DegenerateConfiguration)?;
    let t = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * t;
    // Premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]].
    let m = Matrix3::from_rows(&[reduced.row(2) * 0.5, -reduced.row(1), reduced.row(0) * 0.5]);

    let quad = ellipse_eigenvector(&m).ok_or(GeometryError::NotAnEllipse)?;
    let lin = t * quad;
    let local = Conic::from_coeffs(quad[0], quad[1], quad[2], lin[0], lin[1], lin[2]);

    // Undo the conditioning: q = T p with T = [[s, 0, -s mx], [0, s, -s my], [0, 0, 1]].
    let tm = Mat3::new(
        scale,
        0.0,
        -scale * mean.x,
        0.0,
        scale,
        -scale * mean.y,
        0.0,
        0.0,
        1.0,
    );
    let conic = sign_normalize(&Conic::new(tm.transpose() * local.m * tm))?;
    let ellipse = conic_to_geometric(&conic)?;

    let sum_sq: f64 = points
        .iter()
        .map(|p| point_ellipse_distance(&ellipse, *p).powi(2))
        .sum();
    let residual = (sum_sq / n).sqrt() / ellipse.semi_major;
    Ok(EllipseFit {
        conic,
        ellipse,
        residual,
    })
}

/// Eigenvector of the reduced scatter matrix that satisfies `4ac − b² > 0`.
fn ellipse_eigenvector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let eigs = m.complex_eigenvalues();
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for ev in eigs.iter() {
        if ev.im.abs() > 1e-9 * (1.0 + ev.re.abs()) {
            continue;
        }
        let Some(v) = null_vector(&(m - Matrix3::identity() * ev.re)) else {
            continue;
        };
        let constraint = 4.0 * v[0] * v[2] - v[1] * v[1];
        if constraint > 0.0 && best.is_none_or(|(c, _)| constraint > c) {
            best = Some((constraint, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Unit vector spanning the (numerical) null space of a rank-2 matrix.
fn null_vector(a: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let rows = [
        a.row(0).transpose(),
        a.row(1).transpose(),
        a.row(2).transpose(),
    ];
    let mut best = Vector3::zeros();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = rows[i].cross(&rows[j]);
        if c.norm_squared() > best.norm_squared() {
            best = c;
        }
    }
    let n = best.norm();
    (n > 0.0 && n.is_finite()).then(|| best / n)
}

/// Orthogonal distance from `p` to the ellipse boundary.
pub fn point_ellipse_distance(e: &GeometricEllipse, p: Vec2) -> f64 {
    let d = p - e.center();
    let (s, c) = e.angle.sin_cos();
    let y0 = (c * d.x + s * d.y).abs();
    let y1 = (-s * d.x + c * d.y).abs();
    distance_canonical(e.semi_major, e.semi_minor, y0, y1)
}

/// Eberly's bisection for the first-quadrant point `(y0, y1)` against the
/// axis-aligned ellipse with semi-axes `e0 ≥ e1`.
fn distance_canonical(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g == 0.0 {
                return 0.0;
            }
            let r0 = (e0 / e1) * (e0 / e1);
            let sbar = bisect_root(r0, z0, z1, g);
            let x0 = r0 * y0 / (sbar + r0);
            let x1 = y1 / (sbar + 1.0);
            (x0 - y0).hypot(x1 - y1)
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

fn bisect_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if gs > 0.0 {
            s0 = s;
        } else if gs < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn exact_axis_aligned_ellipse() {
        let pts: Vec<Vec2> = (0..32)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 32.0;
                Vec2::new(2.0 * t.cos(), t.sin())
            })
            .collect();
        let fit = fit_ellipse(&pts).unwrap();
        let e = fit.ellipse;
        assert_abs_diff_eq!(e.center[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.center[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.semi_major, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.semi_minor, 1.0, epsilon = 1e-9);
        assert!(e.angle.min(PI - e.angle) < 1e-9);
        assert!(fit.residual <= 1e-9, "{}", fit.residual);
    }

    #[test]
    fn exact_offset_circle() {
        let pts: Vec<Vec2> = (0..16)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 16.0;
                Vec2::new(5.0 + t.cos(), 7.0 + t.sin())
            })
            .collect();
        let fit = fit_ellipse(&pts).unwrap();
        assert_abs_diff_eq!(fit.ellipse.center[0], 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.ellipse.center[1], 7.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.ellipse.semi_major, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.ellipse.semi_minor, 1.0, epsilon = 1e-9);
        assert!(fit.residual <= 1e-9);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts: Vec<Vec2> = (0..10).map(|i| Vec2::new(i as f64, i as f64)).collect();
        assert_eq!(
            fit_ellipse(&pts),
            Err(GeometryError::DegenerateConfiguration)
        );
    }

    #[test]
    fn too_few_points() {
        let pts = vec![Vec2::new(0.0, 0.0); 5];
        assert_eq!(
            fit_ellipse(&pts),
            Err(GeometryError::TooFewPoints { needed: 6, got: 5 })
        );
    }

    #[test]
    fn residual_grows_with_shape_error() {
        // A square's corners are poorly described by an ellipse.
        let mut pts = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            pts.push(Vec2::new(t, 0.0));
            pts.push(Vec2::new(1.0, t));
            pts.push(Vec2::new(1.0 - t, 1.0));
            pts.push(Vec2::new(0.0, 1.0 - t));
        }
        let fit = fit_ellipse(&pts).unwrap();
        assert!(fit.residual > 0.02, "{}", fit.residual);
    }

    #[test]
    fn large_offset_and_rotation_is_well_conditioned() {
        let truth = GeometricEllipse::new(Vec2::new(812.25, 431.5), 30.0, 11.0, 0.7).unwrap();
        let fit = fit_ellipse(&truth.sample(40)).unwrap();
        assert_abs_diff_eq!(fit.ellipse.center[0], 812.25, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.ellipse.semi_minor, 11.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.ellipse.angle, 0.7, epsilon = 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn point_distance_brute_force() {
        let e = GeometricEllipse::new(Vec2::new(1.0, -2.0), 3.0, 1.2, 0.4).unwrap();
        let dense = e.sample(200_000);
        for p in [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, -2.0),
            Vec2::new(5.0, 3.0),
            Vec2::new(1.5, -1.9),
        ] {
            let brute = dense
                .iter()
                .map(|q| (q - p).norm())
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(point_ellipse_distance(&e, p), brute, epsilon = 1e-6);
        }
    }
}
