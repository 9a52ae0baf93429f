//! JSON documents written and read by the command-line tools.
//!
//! Every key is always present; unavailable values are `null`. Floating
//! point values are rounded to nine significant digits before serialization.

use serde::{Deserialize, Serialize};
use specshape_core::eval::round_sig9;
use specshape_core::geometry::GeometricEllipse;
use specshape_core::render::{GroundTruth, RenderError, RenderParams};
use specshape_core::{CameraIntrinsics, DetectorParams, SurfacePatchEstimate, Vec2, Vec3};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

fn r9(v: f64) -> f64 {
    round_sig9(v)
}

fn r9v<const N: usize>(v: impl IntoIterator<Item = f64>) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, x) in out.iter_mut().zip(v) {
        *o = r9(x);
    }
    out
}

fn rounded_intrinsics(k: &CameraIntrinsics) -> CameraIntrinsics {
    CameraIntrinsics {
        fx: r9(k.fx),
        fy: r9(k.fy),
        cx: r9(k.cx),
        cy: r9(k.cy),
        skew: r9(k.skew),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseRecord {
    pub center: [f64; 2],
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Major-axis angle from the image x axis, radians.
    pub angle: f64,
}

impl From<&GeometricEllipse> for EllipseRecord {
    fn from(e: &GeometricEllipse) -> Self {
        Self {
            center: r9v(e.center),
            semi_major: r9(e.semi_major),
            semi_minor: r9(e.semi_minor),
            angle: r9(e.angle),
        }
    }
}

/// Why an isophote was not accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// No ellipse could be fitted to the contour.
    Fit,
    /// Fit residual above the ellipticity threshold.
    Ellipticity,
    /// The fitted conic does not describe a viewing cone.
    Reconstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecularityRecord {
    pub id: usize,
    pub component_id: usize,
    pub component_area: usize,
    pub accepted: bool,
    pub reason: Option<RejectReason>,
    /// RMS contour-to-ellipse distance over the semi-major axis.
    pub residual: Option<f64>,
    pub ellipse: Option<EllipseRecord>,
    pub bp: Option<[f64; 2]>,
    pub normal: Option<[f64; 3]>,
    pub u1: Option<[f64; 3]>,
    pub u2: Option<[f64; 3]>,
    pub cone_axis: Option<[f64; 3]>,
    pub rho: Option<f64>,
    pub eccentricity: Option<f64>,
    /// Nearly circular: `u1`/`u2` are not meaningful.
    pub circle: bool,
}

impl SpecularityRecord {
    pub fn empty(id: usize, component_id: usize, component_area: usize) -> Self {
        Self {
            id,
            component_id,
            component_area,
            accepted: false,
            reason: None,
            residual: None,
            ellipse: None,
            bp: None,
            normal: None,
            u1: None,
            u2: None,
            cone_axis: None,
            rho: None,
            eccentricity: None,
            circle: false,
        }
    }

    pub fn fill_estimate(&mut self, est: &SurfacePatchEstimate) {
        self.ellipse = Some(EllipseRecord::from(&est.ellipse));
        self.bp = Some(r9v(est.bp.iter().copied()));
        self.normal = Some(r9v(est.normal.iter().copied()));
        self.u1 = Some(r9v(est.u1.iter().copied()));
        self.u2 = Some(r9v(est.u2.iter().copied()));
        self.cone_axis = Some(r9v(est.cone_axis.iter().copied()));
        self.rho = Some(r9(est.axis_ratio));
        self.eccentricity = Some(r9(est.eccentricity));
        self.circle = est.directions_unreliable();
    }

    /// The estimate as stored (rounded), when the record carries one.
    pub fn to_estimate(&self) -> Option<SurfacePatchEstimate> {
        let e = self.ellipse?;
        let ellipse =
            GeometricEllipse::new(Vec2::from(e.center), e.semi_major, e.semi_minor, e.angle)
                .ok()?;
        let normal = Vec3::from(self.normal?);
        let cone_axis = Vec3::from(self.cone_axis?);
        Some(SurfacePatchEstimate {
            bp: Vec2::from(self.bp?),
            normal,
            u1: Vec3::from(self.u1?),
            u2: Vec3::from(self.u2?),
            cone_axis,
            normal_axis_angle: normal
                .cross(&cone_axis)
                .norm()
                .atan2(normal.dot(&cone_axis)),
            axis_ratio: self.rho?,
            eccentricity: self.eccentricity?,
            fit_residual: self.residual.unwrap_or(0.0),
            ellipse,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub detected: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub format_version: u32,
    pub image: ImageInfo,
    pub intrinsics: CameraIntrinsics,
    pub ellipticity_threshold: f64,
    pub detector: DetectorParams,
    pub counts: Counts,
    pub records: Vec<SpecularityRecord>,
    /// Wall-clock processing time; zero in deterministic mode.
    pub timing_ms: f64,
}

impl ReconstructionReport {
    pub fn new(
        image: ImageInfo,
        intrinsics: &CameraIntrinsics,
        ellipticity_threshold: f64,
        detector: DetectorParams,
        records: Vec<SpecularityRecord>,
    ) -> Self {
        let accepted = records.iter().filter(|r| r.accepted).count();
        let mut detector = detector;
        detector.intensity_threshold = r9(detector.intensity_threshold);
        Self {
            format_version: FORMAT_VERSION,
            image,
            intrinsics: rounded_intrinsics(intrinsics),
            ellipticity_threshold: r9(ellipticity_threshold),
            detector,
            counts: Counts {
                detected: records.len(),
                accepted,
                rejected: records.len() - accepted,
            },
            records,
            timing_ms: 0.0,
        }
    }

    pub fn accepted_estimates(&self) -> Vec<SurfacePatchEstimate> {
        self.records
            .iter()
            .filter(|r| r.accepted)
            .filter_map(SpecularityRecord::to_estimate)
            .collect()
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        from_json(text, "report")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthStatus {
    Ok,
    /// Several specular points; the first found is reported.
    Ambiguous,
    NoSpecularity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub id: usize,
    pub status: TruthStatus,
    pub specular_points: usize,
    pub bp: Option<[f64; 2]>,
    pub surface_point: Option<[f64; 3]>,
    /// Unit normal facing the camera.
    pub normal: Option<[f64; 3]>,
    /// Principal directions ordered by curvature magnitude, smallest first.
    pub dir1: Option<[f64; 3]>,
    pub dir2: Option<[f64; 3]>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    /// `|κ₁/κ₂|`.
    pub ratio: Option<f64>,
}

impl TruthRecord {
    pub fn from_result(id: usize, r: &Result<GroundTruth, RenderError>) -> Self {
        let (status, count, gt) = match r {
            Ok(gt) => (TruthStatus::Ok, 1, Some(gt)),
            Err(RenderError::AmbiguousSpecularity { count, first }) => {
                (TruthStatus::Ambiguous, *count, Some(&**first))
            }
            Err(_) => (TruthStatus::NoSpecularity, 0, None),
        };
        Self {
            id,
            status,
            specular_points: count,
            bp: gt.map(|g| r9v(g.bp_pixel.iter().copied())),
            surface_point: gt.map(|g| r9v(g.surface_point.iter().copied())),
            normal: gt.map(|g| r9v(g.normal.iter().copied())),
            dir1: gt.map(|g| r9v(g.dir1.iter().copied())),
            dir2: gt.map(|g| r9v(g.dir2.iter().copied())),
            kappa1: gt.map(|g| r9(g.kappa1)),
            kappa2: gt.map(|g| r9(g.kappa2)),
            ratio: gt.map(|g| r9(g.curvature_ratio())),
        }
    }

    /// Ground truth for an unambiguous specular point.
    pub fn to_ground_truth(&self) -> Option<GroundTruth> {
        if self.status != TruthStatus::Ok {
            return None;
        }
        Some(GroundTruth {
            bp_pixel: Vec2::from(self.bp?),
            surface_point: Vec3::from(self.surface_point?),
            normal: Vec3::from(self.normal?),
            dir1: Vec3::from(self.dir1?),
            dir2: Vec3::from(self.dir2?),
            kappa1: self.kappa1?,
            kappa2: self.kappa2?,
            param: [0.0, 0.0],
            residual: 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub format_version: u32,
    pub intrinsics: CameraIntrinsics,
    pub render: RenderParams,
    pub patches: Vec<TruthRecord>,
}

impl TruthFile {
    pub fn new(
        intrinsics: &CameraIntrinsics,
        render: RenderParams,
        patches: Vec<TruthRecord>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            intrinsics: rounded_intrinsics(intrinsics),
            render,
            patches,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        from_json(text, "ground truth")
    }

    pub fn ground_truths(&self) -> Vec<(usize, GroundTruth)> {
        self.patches
            .iter()
            .filter_map(|p| Some((p.id, p.to_ground_truth()?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use specshape_core::geometry::{geometric_to_conic, reconstruct_patch};

    fn estimate() -> SurfacePatchEstimate {
        let k = CameraIntrinsics::new(500.0, 500.0, 50.0, 40.0).unwrap();
        let e = GeometricEllipse::new(Vec2::new(53.123456789123, 41.0), 15.0, 9.0, 0.4).unwrap();
        reconstruct_patch(&geometric_to_conic(&e), &k).unwrap()
    }

    #[test]
    fn empty_record_has_every_key() {
        let r = SpecularityRecord::empty(0, 3, 40);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys = [
            "id",
            "component_id",
            "component_area",
            "accepted",
            "reason",
            "residual",
            "ellipse",
            "bp",
            "normal",
            "u1",
            "u2",
            "cone_axis",
            "rho",
            "eccentricity",
            "circle",
        ];
        assert_eq!(v.as_object().unwrap().len(), keys.len());
        for k in keys {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(v["normal"].is_null());
    }

    #[test]
    fn values_are_rounded_to_nine_digits() {
        let mut r = SpecularityRecord::empty(0, 0, 10);
        r.fill_estimate(&estimate());
        assert_eq!(r.bp.unwrap()[0], 53.1234568);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("53.1234568"));
        assert!(!json.contains("53.12345678"));
    }

    #[test]
    fn record_round_trips_to_estimate() {
        let est = estimate();
        let mut r = SpecularityRecord::empty(0, 0, 10);
        r.fill_estimate(&est);
        let back = r.to_estimate().unwrap();
        assert!((back.normal - est.normal).norm() < 1e-8);
        assert!((back.u1 - est.u1).norm() < 1e-8);
        assert!((back.ellipse.semi_major - est.ellipse.semi_major).abs() < 1e-7);
        assert!(SpecularityRecord::empty(0, 0, 0).to_estimate().is_none());
    }

    #[test]
    fn report_json_round_trip() {
        let mut r = SpecularityRecord::empty(0, 0, 10);
        r.fill_estimate(&estimate());
        r.accepted = true;
        r.residual = Some(0.01);
        let mut rej = SpecularityRecord::empty(1, 1, 12);
        rej.reason = Some(RejectReason::Ellipticity);
        let k = CameraIntrinsics::new(500.0, 500.0, 50.0, 40.0).unwrap();
        let info = ImageInfo {
            width: 100,
            height: 80,
            channels: 1,
        };
        let rep =
            ReconstructionReport::new(info, &k, 0.05, DetectorParams::default(), vec![r, rej]);
        assert_eq!(
            rep.counts,
            Counts {
                detected: 2,
                accepted: 1,
                rejected: 1
            }
        );
        let text = rep.to_json();
        assert!(text.contains("\"reason\": \"ellipticity\""));
        assert_eq!(ReconstructionReport::from_json(&text).unwrap(), rep);
        assert_eq!(rep.accepted_estimates().len(), 1);
        assert!(matches!(
            ReconstructionReport::from_json("{"),
            Err(CliError::Input(_))
        ));
    }
}
