//! Least-squares periodic cubic B-spline smoothing of closed contours.

use nalgebra::{DMatrix, DVector};

use super::IsophoteError;
use crate::Vec2;

pub const MIN_CONTOUR_POINTS: usize = 8;

/// `max(8, n/10)` rounded up to a multiple of four, so the fit commutes with
/// quarter-turn symmetries of the contour.
pub fn default_control_points(n: usize) -> usize {
    (n / 10).max(8).div_ceil(4) * 4
}

/// Uniform cubic B-spline basis weights at local parameter `s ∈ [0, 1)`.
fn basis(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    let t = 1.0 - s;
    [
        t * t * t / 6.0,
        (3.0 * s3 - 6.0 * s2 + 4.0) / 6.0,
        (-3.0 * s3 + 3.0 * s2 + 3.0 * s + 1.0) / 6.0,
        s3 / 6.0,
    ]
}

/// Span index and weights; control point `(span + k) mod m` takes weight `k`.
fn locate(t: f64, m: usize) -> (usize, [f64; 4]) {
    let t = t.rem_euclid(m as f64);
    let span = (t.floor() as usize).min(m - 1);
    (span, basis(t - span as f64))
}

/// Fits a periodic cubic B-spline with `control_points` control points to the
/// closed polyline `poly` (closure implied) under chord-length
/// parameterisation, then samples it at `poly.len()` uniform parameters.
pub fn smooth_closed_curve(
    poly: &[Vec2],
    control_points: usize,
) -> Result<Vec<Vec2>, IsophoteError> {
    let n = poly.len();
    if n < MIN_CONTOUR_POINTS {
        return Err(IsophoteError::TooFewPoints {
            needed: MIN_CONTOUR_POINTS,
            got: n,
        });
    }
    let m = control_points.clamp(4, n);

    let mut cum = Vec::with_capacity(n);
    let mut len = 0.0;
    for i in 0..n {
        cum.push(len);
        len += (poly[(i + 1) % n] - poly[i]).norm();
    }
    if len == 0.0 {
        return Err(IsophoteError::DegenerateContour);
    }

    let mut ata = DMatrix::<f64>::zeros(m, m);
    let mut atx = DVector::<f64>::zeros(m);
    let mut aty = DVector::<f64>::zeros(m);
    for (p, &c) in poly.iter().zip(&cum) {
        let (span, w) = locate(m as f64 * c / len, m);
        for a in 0..4 {
            let ia = (span + a) % m;
            atx[ia] += w[a] * p.x;
            aty[ia] += w[a] * p.y;
            for b in 0..4 {
                ata[(ia, (span + b) % m)] += w[a] * w[b];
            }
        }
    }
    let chol = match ata.clone().cholesky() {
        Some(c) => c,
        None => {
            let ridge = 1e-9 * ata.trace() / m as f64;
            (ata + DMatrix::identity(m, m) * ridge)
                .cholesky()
                .ok_or(IsophoteError::DegenerateContour)?
        }
    };
    let cx = chol.solve(&atx);
    let cy = chol.solve(&aty);

    Ok((0..n)
        .map(|k| {
            let (span, w) = locate(m as f64 * k as f64 / n as f64, m);
            let mut p = Vec2::zeros();
            for a in 0..4 {
                let j = (span + a) % m;
                p += Vec2::new(cx[j], cy[j]) * w[a];
            }
            p
        })
        .collect())
}
