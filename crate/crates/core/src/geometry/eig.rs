//! Symmetric eigensolvers: cyclic Jacobi for 3×3, closed form for 2×2.

use super::{GeometryError, Result};
use crate::{Mat3, Vec2, Vec3};

const MAX_SWEEPS: usize = 50;

/// Eigendecomposition of a real symmetric 3×3 matrix.
///
/// `values` ascend. `vectors[i]` belongs to `values[i]`; the triplet is
/// orthonormal and right-handed with `vectors[2] = vectors[0] × vectors[1]`.
/// The first two vectors are signed so that their largest-magnitude
/// component is positive (ties go to the lowest index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEig3 {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

impl SymEig3 {
    /// Rotation with the eigenvectors as rows, so that `M = Rᵀ diag(λ) R`.
    pub fn rotation(&self) -> Mat3 {
        Mat3::from_rows(&[
            self.vectors[0].transpose(),
            self.vectors[1].transpose(),
            self.vectors[2].transpose(),
        ])
    }

    pub fn reconstruct(&self) -> Mat3 {
        let r = self.rotation();
        r.transpose() * Mat3::from_diagonal(&Vec3::from(self.values)) * r
    }
}

pub fn eig_sym3(m: &Mat3) -> Result<SymEig3> {
    let scale = m.norm();
    if !scale.is_finite() {
        return Err(GeometryError::NotSymmetric);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
            return Err(GeometryError::NotSymmetric);
        }
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = Mat3::identity();

    for _ in 0..MAX_SWEEPS {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off == 0.0 || off.sqrt() <= 1e-18 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if theta.abs() > 1e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = Mat3::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            a = rot.transpose() * a * rot;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= rot;
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.map(|i| a[(i, i)]);
    let v1 = canonical_sign(v.column(order[0]).normalize());
    let mut v2 = v.column(order[1]).into_owned();
    v2 = canonical_sign((v2 - v1 * v1.dot(&v2)).normalize());
    let v3 = v1.cross(&v2);
    Ok(SymEig3 {
        values,
        vectors: [v1, v2, v3],
    })
}

/// Flip `v` so its largest-magnitude component is positive.
fn canonical_sign(v: Vec3) -> Vec3 {
    let max = v.amax();
    let tie = 1e-12 * max;
    let lead = (0..3).find(|&i| v[i].abs() >= max - tie).unwrap_or(0);
    if v[lead] < 0.0 {
        -v
    } else {
        v
    }
}

/// Eigen pairs of the symmetric matrix `[[a, b], [b, c]]`, values ascending.
pub fn eig_sym2(a: f64, b: f64, c: f64) -> ([f64; 2], [Vec2; 2]) {
    if b == 0.0 {
        return if a <= c {
            ([a, c], [Vec2::x(), Vec2::y()])
        } else {
            ([c, a], [Vec2::y(), Vec2::x()])
        };
    }
    let half_tr = 0.5 * (a + c);
    let d = (0.5 * (a - c)).hypot(b);
    let (lo, hi) = if half_tr >= 0.0 {
        let hi = half_tr + d;
        (
            if hi != 0.0 {
                (a * c - b * b) / hi
            } else {
                half_tr - d
            },
            hi,
        )
    } else {
        let lo = half_tr - d;
        (
            lo,
            if lo != 0.0 {
                (a * c - b * b) / lo
            } else {
                half_tr + d
            },
        )
    };
    let phi = 0.5 * (2.0 * b).atan2(a - c);
    let vhi = Vec2::new(phi.cos(), phi.sin());
    let vlo = Vec2::new(-phi.sin(), phi.cos());
    ([lo, hi], [vlo, vhi])
}
