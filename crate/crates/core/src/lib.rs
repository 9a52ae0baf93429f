//! Single-image specular geometry.
//!
//! Specular highlights seen by a camera whose light source sits at the optical
//! centre carry local surface shape: the highlight's brightest point lies on
//! the sightline that is parallel to the surface normal, and the elliptic
//! outline of the saturated blob encodes the principal directions and the
//! ratio of principal curvatures.
//!
//! The crate is split into:
//!
//! - [`geometry`]: camera model, conic algebra, 3×3 symmetric eigensolver,
//!   ellipse fitting and the per-highlight surface reconstruction.
//! - [`isophote`]: images, the saturation detector, connected components,
//!   boundary tracing and periodic B-spline smoothing.
//! - [`render`]: an analytic quadric-patch renderer with a camera-collocated
//!   point light, plus exact ground truth at each highlight.
//! - [`mesh`]: OBJ loading, vertex normals and per-vertex principal
//!   curvatures on triangle meshes.
//! - [`eval`]: error metrics, histograms, CSV output and annotated overlays.

pub mod eval;
pub mod geometry;
pub mod isophote;
pub mod mesh;
pub mod render;

pub type Vec2 = nalgebra::Vector2<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

pub use geometry::{
    CameraIntrinsics, Conic, GeometricEllipse, GeometryError, SurfacePatchEstimate, SymEig3,
};

pub use isophote::{DetectorParams, Image, Isophote};
