//! Pipeline configuration: a TOML file overlaid by command-line flags.
//!
//! ```toml
//! ellipticity_threshold = 0.05
//! deterministic = false
//!
//! [intrinsics]
//! fx = 800.0
//! fy = 800.0
//! cx = 320.0
//! cy = 240.0
//! skew = 0.0
//!
//! [detector]
//! intensity_threshold = 0.92
//! min_area = 20
//! max_area = 5000
//! border_margin = 2
//! control_points = 16      # omit to derive from the contour length
//!
//! [output]
//! report = "report.json"
//! overlay = "overlay.ppm"
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use specshape_core::{CameraIntrinsics, DetectorParams};
use thiserror::Error;

/// Largest accepted ellipse-fit residual, relative to the semi-major axis.
pub const DEFAULT_ELLIPTICITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub intrinsics: CameraIntrinsics,
    pub detector: DetectorParams,
    /// `t`: isophotes whose fit residual exceeds it are rejected.
    pub ellipticity_threshold: f64,
    pub report_path: Option<PathBuf>,
    pub overlay_path: Option<PathBuf>,
    /// Zero the timing field so reports are byte-reproducible.
    pub deterministic: bool,
}

impl PipelineConfig {
    pub fn new(intrinsics: CameraIntrinsics) -> Self {
        Self {
            intrinsics,
            detector: DetectorParams::default(),
            ellipticity_threshold: DEFAULT_ELLIPTICITY_THRESHOLD,
            report_path: None,
            overlay_path: None,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.intrinsics
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        self.detector
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        let t = self.ellipticity_threshold;
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError(format!(
                "ellipticity threshold must be positive, got {t}"
            )));
        }
        Ok(())
    }

    /// File values first, then flags; intrinsics must come from one of them.
    pub fn resolve(file: Option<&ConfigFile>, flags: &Overrides) -> Result<Self, ConfigError> {
        let empty = ConfigFile::default();
        let file = file.unwrap_or(&empty);
        let intrinsics = flags.intrinsics.or(file.intrinsics).ok_or_else(|| {
            ConfigError("camera intrinsics are required (--intrinsics or [intrinsics])".into())
        })?;
        let mut cfg = Self::new(intrinsics);

        let d = &file.detector;
        let det = &mut cfg.detector;
        det.intensity_threshold = flags
            .detector_threshold
            .or(d.intensity_threshold)
            .unwrap_or(det.intensity_threshold);
        det.min_area = flags.min_area.or(d.min_area).unwrap_or(det.min_area);
        det.max_area = flags.max_area.or(d.max_area).unwrap_or(det.max_area);
        det.border_margin = flags
            .border_margin
            .or(d.border_margin)
            .unwrap_or(det.border_margin);
        det.control_points = flags.control_points.or(d.control_points);

        cfg.ellipticity_threshold = flags
            .threshold
            .or(file.ellipticity_threshold)
            .unwrap_or(cfg.ellipticity_threshold);
        cfg.report_path = flags.out.clone().or_else(|| file.output.report.clone());
        cfg.overlay_path = flags
            .overlay
            .clone()
            .or_else(|| file.output.overlay.clone());
        cfg.deterministic = flags.deterministic || file.deterministic.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub intrinsics: Option<CameraIntrinsics>,
    pub ellipticity_threshold: Option<f64>,
    pub deterministic: Option<bool>,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub intensity_threshold: Option<f64>,
    pub min_area: Option<usize>,
    pub max_area: Option<usize>,
    pub border_margin: Option<usize>,
    pub control_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub overlay: Option<PathBuf>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config file: {e}")))
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub intrinsics: Option<CameraIntrinsics>,
    pub threshold: Option<f64>,
    pub detector_threshold: Option<f64>,
    pub min_area: Option<usize>,
    pub max_area: Option<usize>,
    pub border_margin: Option<usize>,
    pub control_points: Option<usize>,
    pub out: Option<PathBuf>,
    pub overlay: Option<PathBuf>,
    pub deterministic: bool,
}

/// `fx,fy,cx,cy` or `fx,fy,cx,cy,skew`.
pub fn parse_intrinsics(text: &str) -> Result<CameraIntrinsics, ConfigError> {
    let vals = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("bad intrinsics value '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let k = match vals[..] {
        [fx, fy, cx, cy] => CameraIntrinsics {
            fx,
            fy,
            cx,
            cy,
            skew: 0.0,
        },
        [fx, fy, cx, cy, skew] => CameraIntrinsics {
            fx,
            fy,
            cx,
            cy,
            skew,
        },
        _ => {
            return Err(ConfigError(format!(
                "intrinsics need 4 or 5 values, got {}",
                vals.len()
            )))
        }
    };
    k.validate().map_err(|e| ConfigError(e.to_string()))?;
    Ok(k)
}
