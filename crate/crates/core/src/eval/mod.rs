//! Error metrics, histograms, CSV tables and annotated overlays.

mod histogram;
mod overlay;

use thiserror::Error;

pub use histogram::{histogram, Histogram, ANGLE_BINS, RATIO_BINS};
pub use overlay::{overlay, OverlayStyle};

use crate::render::GroundTruth;
use crate::{SurfacePatchEstimate, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("input vector is not unit length (norm {0})")]
    NonUnitInput(f64),
    #[error("direction pair is not orthonormal")]
    NonOrthonormalPair,
    #[error("largest curvature is zero")]
    ZeroMaxCurvature,
    #[error("no samples")]
    EmptyInput,
    #[error("invalid histogram range [{lo}, {hi}] with {bins} bins")]
    InvalidRange { lo: f64, hi: f64, bins: usize },
}

const UNIT_TOL: f64 = 1e-6;

fn check_unit(v: &Vec3) -> Result<(), EvalError> {
    let n = v.norm();
    if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
        return Err(EvalError::NonUnitInput(n));
    }
    Ok(())
}

/// Angle between two lines, in degrees within `[0, 90]`.
pub fn angular_error_unsigned(a: &Vec3, b: &Vec3) -> Result<f64, EvalError> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(line_angle_deg(a, b))
}

fn line_angle_deg(a: &Vec3, b: &Vec3) -> f64 {
    // atan2 keeps precision near 0 and 90 degrees.
    let t = a.cross(b).norm().atan2(a.dot(b).abs());
    t.to_degrees().clamp(0.0, 90.0)
}

fn check_pair(u: &Vec3, v: &Vec3) -> Result<(), EvalError> {
    let ok = |x: f64| (x.abs() <= UNIT_TOL) && x.is_finite();
    if !ok(u.norm() - 1.0) || !ok(v.norm() - 1.0) || !ok(u.dot(v)) {
        return Err(EvalError::NonOrthonormalPair);
    }
    Ok(())
}

/// Unsigned angle between `u1 × u2` and `v1 × v2`, in degrees.
pub fn theta_e(u1: &Vec3, u2: &Vec3, v1: &Vec3, v2: &Vec3) -> Result<f64, EvalError> {
    check_pair(u1, u2)?;
    check_pair(v1, v2)?;
    Ok(line_angle_deg(&u1.cross(u2), &v1.cross(v2)))
}

/// `|ρ − |κ₁/κ₂||` with the curvatures ordered by magnitude.
pub fn ratio_diff(rho_est: f64, kappa1: f64, kappa2: f64) -> Result<f64, EvalError> {
    let (lo, hi) = if kappa1.abs() <= kappa2.abs() {
        (kappa1, kappa2)
    } else {
        (kappa2, kappa1)
    };
    if hi == 0.0 {
        return Err(EvalError::ZeroMaxCurvature);
    }
    Ok((rho_est - (lo / hi).abs()).abs())
}

/// `v` rounded to nine significant digits.
pub fn round_sig9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

/// Shortest decimal form of `v` after rounding to nine significant digits.
pub fn format_sig9(v: f64) -> String {
    format!("{}", round_sig9(v))
}

/// One estimate matched to one ground-truth specularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchComparison {
    pub estimate_id: usize,
    pub truth_id: usize,
    pub normal_error_deg: f64,
    pub theta_e_deg: f64,
    pub ratio_diff: f64,
    /// Angle between `u1` and the true minimal-curvature direction.
    pub direction_error_deg: f64,
    /// Whether the estimate flags its directions as unreliable.
    pub directions_unreliable: bool,
    pub bp_error_px: f64,
}

pub fn compare(
    estimate_id: usize,
    est: &SurfacePatchEstimate,
    truth_id: usize,
    gt: &GroundTruth,
) -> Result<PatchComparison, EvalError> {
    Ok(PatchComparison {
        estimate_id,
        truth_id,
        normal_error_deg: angular_error_unsigned(&est.normal, &gt.normal)?,
        theta_e_deg: theta_e(&est.u1, &est.u2, &gt.dir1, &gt.dir2)?,
        ratio_diff: ratio_diff(est.axis_ratio, gt.kappa1, gt.kappa2)?,
        direction_error_deg: angular_error_unsigned(&est.u1, &gt.dir1)?,
        directions_unreliable: est.directions_unreliable(),
        bp_error_px: (est.bp - gt.bp_pixel).norm(),
    })
}

/// Greedy nearest-brightest-point matching within `max_px`, closest pairs
/// first; ties resolve by estimate then truth index.
pub fn match_estimates(
    estimates: &[SurfacePatchEstimate],
    truths: &[GroundTruth],
    max_px: f64,
) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, e) in estimates.iter().enumerate() {
        for (j, t) in truths.iter().enumerate() {
            let d = (e.bp - t.bp_pixel).norm();
            if d <= max_px {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut used_e, mut used_t) = (vec![false; estimates.len()], vec![false; truths.len()]);
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_e[i] && !used_t[j] {
            used_e[i] = true;
            used_t[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

pub const COMPARISON_CSV_HEADER: &str = "estimate_id,truth_id,normal_error_deg,theta_e_deg,ratio_diff,direction_error_deg,directions_unreliable,bp_error_px";

/// Comparison table, one row per entry in input order.
pub fn comparisons_csv(rows: &[PatchComparison]) -> String {
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.estimate_id,
            r.truth_id,
            format_sig9(r.normal_error_deg),
            format_sig9(r.theta_e_deg),
            format_sig9(r.ratio_diff),
            format_sig9(r.direction_error_deg),
            r.directions_unreliable,
            format_sig9(r.bp_error_px),
        ));
    }
    out
}

/// Median and `p`-quantile (nearest rank) helpers for summaries.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Some(v[rank - 1])
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
