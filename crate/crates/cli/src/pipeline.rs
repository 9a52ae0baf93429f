//! Image in, per-specularity surface estimates out.

use std::time::Instant;

use rayon::prelude::*;
use specshape_core::eval::{compare, match_estimates, PatchComparison};
use specshape_core::geometry::{fit_ellipse, reconstruct_patch};
use specshape_core::isophote::{extract_isophotes, Isophote, IsophoteError};
use specshape_core::{CameraIntrinsics, Image};

use crate::config::PipelineConfig;
use crate::report::{ImageInfo, ReconstructionReport, RejectReason, SpecularityRecord, TruthFile};
use crate::CliError;

fn process(id: usize, iso: &Isophote, k: &CameraIntrinsics, t: f64) -> SpecularityRecord {
    let mut rec = SpecularityRecord::empty(id, iso.source_component_id, iso.component_area);
    let fit = match fit_ellipse(&iso.points) {
        Ok(f) => f,
        Err(_) => {
            rec.reason = Some(RejectReason::Fit);
            return rec;
        }
    };
    rec.residual = Some(specshape_core::eval::round_sig9(fit.residual));
    match reconstruct_patch(&fit.conic, k) {
        Ok(mut est) => {
            est.fit_residual = fit.residual;
            rec.fill_estimate(&est);
            if fit.residual <= t {
                rec.accepted = true;
            } else {
                rec.reason = Some(RejectReason::Ellipticity);
            }
        }
        Err(_) => {
            rec.reason = Some(if fit.residual > t {
                RejectReason::Ellipticity
            } else {
                RejectReason::Reconstruction
            })
        }
    }
    rec
}

/// Detection, contour smoothing, ellipse fit, ellipticity test and
/// reconstruction for every specular blob, in component order.
pub fn run_pipeline(img: &Image, cfg: &PipelineConfig) -> Result<ReconstructionReport, CliError> {
    cfg.validate().map_err(|e| CliError::Config(e.0))?;
    let start = Instant::now();
    let isophotes = extract_isophotes(img, &cfg.detector).map_err(|e| match e {
        IsophoteError::InvalidParams(m) => CliError::Config(m),
        other => CliError::Input(other.to_string()),
    })?;
    let records: Vec<SpecularityRecord> = isophotes
        .par_iter()
        .enumerate()
        .map(|(i, iso)| process(i, iso, &cfg.intrinsics, cfg.ellipticity_threshold))
        .collect();
    let info = ImageInfo {
        width: img.width,
        height: img.height,
        channels: img.channels,
    };
    let mut report = ReconstructionReport::new(
        info,
        &cfg.intrinsics,
        cfg.ellipticity_threshold,
        cfg.detector,
        records,
    );
    if !cfg.deterministic {
        report.timing_ms = specshape_core::eval::round_sig9(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Accepted records matched to unambiguous ground truth by brightest-point
/// distance. Record ids and patch ids label each row.
pub fn evaluate(
    report: &ReconstructionReport,
    truth: &TruthFile,
    max_px: f64,
) -> Result<Vec<PatchComparison>, CliError> {
    let accepted: Vec<_> = report.records.iter().filter(|r| r.accepted).collect();
    let estimates: Vec<_> = accepted
        .iter()
        .map(|r| {
            r.to_estimate()
                .ok_or_else(|| CliError::Input(format!("record {} lacks estimate fields", r.id)))
        })
        .collect::<Result<_, _>>()?;
    let truths = truth.ground_truths();
    let gts: Vec<_> = truths.iter().map(|(_, g)| *g).collect();
    match_estimates(&estimates, &gts, max_px)
        .into_iter()
        .map(|(i, j)| {
            compare(accepted[i].id, &estimates[i], truths[j].0, &gts[j])
                .map_err(|e| CliError::Input(e.to_string()))
        })
        .collect()
}
