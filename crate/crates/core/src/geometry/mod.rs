//! Conic algebra, pinhole camera mapping and per-highlight reconstruction.

mod camera;
mod conic;
mod eig;
mod fit;
mod patch;

pub use camera::CameraIntrinsics;
pub use conic::{
    conic_to_geometric, geometric_to_conic, sign_normalize, transfer_to_normalized, Conic,
    GeometricEllipse,
};
pub use eig::{eig_sym2, eig_sym3, SymEig3};
pub use fit::{fit_ellipse, point_ellipse_distance, EllipseFit};
pub use patch::{normal_from_center, reconstruct_patch, SurfacePatchEstimate, CIRCLE_ECCENTRICITY};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate point configuration")]
    DegenerateConfiguration,
    #[error("conic is not a real ellipse")]
    NotAnEllipse,
    #[error("zero matrix")]
    ZeroMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("point is behind the camera (z = {z})")]
    BehindCamera { z: f64 },
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
