//! Analytic renderer for quadric patches lit by a point light at the camera
//! centre, with Blinn-Phong specular shading and exact ground truth.

mod bp;
mod quadric;
mod scene;
mod shade;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bp::{analytic_bp, analytic_bp_among, specular_residual, specular_roots, GroundTruth};
pub use quadric::{local_frame, ray_quadric_intersect, Hit, LocalFrame, QuadricPatch, Ray};
pub use scene::Scene;
pub use shade::{quantize, radiance, render, render_patches};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("no visible specular point inside the patch")]
    NoSpecularity,
    #[error("{count} distinct specular points; the first in search order is reported")]
    AmbiguousSpecularity {
        count: usize,
        first: Box<GroundTruth>,
    },
    #[error("patch parameters ({p}, {q}) outside the extent square")]
    OutOfDomain { p: f64, q: f64 },
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("invalid render parameters: {0}")]
    InvalidParams(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

/// Shading and raster settings.
///
/// `I = k_d·|n·v|·(falloff_distance/dist)² + k_s·|n·v|^s`, clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderParams {
    pub width: usize,
    pub height: usize,
    pub specular_strength: f64,
    pub shininess: f64,
    pub diffuse_strength: f64,
    /// Distance at which the diffuse term equals `diffuse_strength·|n·v|`.
    pub falloff_distance: f64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            specular_strength: 2.0,
            shininess: 2000.0,
            diffuse_strength: 0.3,
            falloff_distance: 0.1,
        }
    }
}

impl RenderParams {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.shininess > 0.0 && self.shininess.is_finite()) {
            return Err(RenderError::InvalidParams(format!(
                "shininess {} must be positive",
                self.shininess
            )));
        }
        if !(self.specular_strength >= 0.0 && self.diffuse_strength >= 0.0) {
            return Err(RenderError::InvalidParams(
                "strengths must be non-negative".into(),
            ));
        }
        if !(self.falloff_distance > 0.0 && self.falloff_distance.is_finite()) {
            return Err(RenderError::InvalidParams(
                "falloff distance must be positive".into(),
            ));
        }
        Ok(())
    }
}
