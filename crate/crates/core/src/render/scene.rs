//! Scene files: a camera, render settings and any number of patches.
//!
//! ```toml
//! [camera]
//! fx = 800.0
//! fy = 800.0
//! cx = 320.0
//! cy = 240.0
//!
//! [render]
//! width = 640
//! height = 480
//!
//! [[patch]]
//! kappa1 = 2.5
//! kappa2 = 5.0
//! rotation = [0.0, 0.0, 0.0]   # axis-angle vector, radians
//! translation = [0.0, 0.0, 0.1]
//! extent = 0.05
//! ```

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};

use super::bp::analytic_bp_among;
use super::{render_patches, GroundTruth, QuadricPatch, RenderError, RenderParams};
use crate::isophote::Image;
use crate::{CameraIntrinsics, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub camera: CameraIntrinsics,
    pub render: RenderParams,
    pub patches: Vec<QuadricPatch>,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    camera: CameraIntrinsics,
    #[serde(default)]
    render: RenderParams,
    #[serde(default, rename = "patch")]
    patches: Vec<PatchEntry>,
}

#[derive(Serialize, Deserialize)]
struct PatchEntry {
    kappa1: f64,
    kappa2: f64,
    #[serde(default)]
    rotation: [f64; 3],
    translation: [f64; 3],
    #[serde(default = "default_extent")]
    extent: f64,
}

fn default_extent() -> f64 {
    QuadricPatch::DEFAULT_EXTENT
}

impl Scene {
    pub fn new(camera: CameraIntrinsics, render: RenderParams, patches: Vec<QuadricPatch>) -> Self {
        Self {
            camera,
            render,
            patches,
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        self.camera
            .validate()
            .map_err(|e| RenderError::InvalidScene(e.to_string()))?;
        self.render.validate()?;
        self.patches.iter().try_for_each(QuadricPatch::validate)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RenderError> {
        let file: SceneFile =
            toml::from_str(text).map_err(|e| RenderError::InvalidScene(e.to_string()))?;
        let patches = file
            .patches
            .into_iter()
            .map(|p| QuadricPatch {
                kappa1: p.kappa1,
                kappa2: p.kappa2,
                rotation: Rotation3::from_scaled_axis(Vec3::from(p.rotation)),
                translation: Vec3::from(p.translation),
                extent: p.extent,
            })
            .collect();
        let scene = Self {
            camera: file.camera,
            render: file.render,
            patches,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_toml_string(&self) -> String {
        let file = SceneFile {
            camera: self.camera,
            render: self.render,
            patches: self
                .patches
                .iter()
                .map(|p| PatchEntry {
                    kappa1: p.kappa1,
                    kappa2: p.kappa2,
                    rotation: p.rotation.scaled_axis().into(),
                    translation: p.translation.into(),
                    extent: p.extent,
                })
                .collect(),
        };
        toml::to_string(&file).expect("scene serializes")
    }

    pub fn render(&self) -> Image {
        render_patches(&self.patches, &self.camera, &self.render)
    }

    /// Specular point of every patch, other patches acting as occluders.
    pub fn ground_truth(&self) -> Vec<Result<GroundTruth, RenderError>> {
        (0..self.patches.len())
            .map(|i| {
                let others: Vec<QuadricPatch> = self
                    .patches
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, p)| *p)
                    .collect();
                analytic_bp_among(&self.patches[i], &self.camera, &others)
            })
            .collect()
    }
}
