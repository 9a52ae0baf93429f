//! Specular isophote extraction: saturation mask, 8-connected components,
//! Moore boundary tracing and periodic B-spline smoothing.

mod detect;
mod image;
mod spline;
mod trace;

use rayon::prelude::*;
use thiserror::Error;

pub use detect::{connected_components, specular_mask, Component, DetectorParams};
pub use image::{Image, Mask};
pub use spline::{default_control_points, smooth_closed_curve, MIN_CONTOUR_POINTS};
pub use trace::trace_outer_boundary;

use crate::Vec2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsophoteError {
    #[error("image has no pixels")]
    EmptyImage,
    #[error("contour has {got} points, at least {needed} required")]
    TooFewPoints { needed: usize, got: usize },
    #[error("contour has zero length or an unsolvable fit")]
    DegenerateContour,
    #[error("invalid detector parameters: {0}")]
    InvalidParams(String),
}

/// Smoothed outer boundary of one specular blob.
#[derive(Debug, Clone, PartialEq)]
pub struct Isophote {
    /// Closed polyline in pixel coordinates; the closing edge is implied.
    pub points: Vec<Vec2>,
    /// Index into the filtered component list of the source image.
    pub source_component_id: usize,
    /// Pixel count of the source component.
    pub component_area: usize,
}

impl Isophote {
    pub fn centroid(&self) -> Vec2 {
        self.points.iter().fold(Vec2::zeros(), |a, p| a + p) / self.points.len() as f64
    }

    /// Signed enclosed area; positive for the traced orientation.
    pub fn signed_area(&self) -> f64 {
        let xy: Vec<(f64, f64)> = self.points.iter().map(|p| (p.x, p.y)).collect();
        0.5 * trace::shoelace2(&xy)
    }
}

/// Traces and smooths one component. `None` when its boundary is too short
/// to carry a closed contour.
pub fn component_isophote(comp: &Component, p: &DetectorParams) -> Option<Isophote> {
    let raw: Vec<Vec2> = trace_outer_boundary(comp)
        .into_iter()
        .map(|(x, y)| Vec2::new(x as f64, y as f64))
        .collect();
    if raw.len() < MIN_CONTOUR_POINTS {
        return None;
    }
    let m = p
        .control_points
        .unwrap_or_else(|| default_control_points(raw.len()));
    let points = smooth_closed_curve(&raw, m).ok()?;
    Some(Isophote {
        points,
        source_component_id: comp.id,
        component_area: comp.area(),
    })
}

/// Mask, components, then one isophote per component in component order.
/// Components whose boundary has fewer than eight pixels are skipped.
pub fn extract_isophotes(img: &Image, p: &DetectorParams) -> Result<Vec<Isophote>, IsophoteError> {
    p.validate()?;
    let mask = specular_mask(img, p)?;
    let comps = connected_components(&mask, p);
    Ok(comps
        .par_iter()
        .filter_map(|c| component_isophote(c, p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc_image(w: usize, h: usize, discs: &[(f64, f64, f64)]) -> Image {
        let mut img = Image::filled(w, h, 1, 20);
        for y in 0..h {
            for x in 0..w {
                if discs
                    .iter()
                    .any(|&(cx, cy, r)| (x as f64 - cx).hypot(y as f64 - cy) <= r)
                {
                    img.pixel_mut(x, y)[0] = 255;
                }
            }
        }
        img
    }

    #[test]
    fn black_image_yields_nothing() {
        let img = Image::filled(64, 48, 3, 0);
        assert!(extract_isophotes(&img, &DetectorParams::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn disc_gives_one_round_isophote() {
        let img = disc_image(100, 80, &[(47.3, 38.6, 12.0)]);
        let isos = extract_isophotes(&img, &DetectorParams::default()).unwrap();
        assert_eq!(isos.len(), 1);
        let iso = &isos[0];
        assert!(iso.points.len() >= 8);
        let c = iso.centroid();
        assert!((c - Vec2::new(47.3, 38.6)).norm() < 1.0, "{c}");
        let radii: Vec<f64> = iso.points.iter().map(|p| (p - c).norm()).collect();
        let (lo, hi) = radii
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi - lo < 1.5, "{lo} {hi}");
    }

    #[test]
    fn smoothing_preserves_centroid_and_area() {
        let img = disc_image(160, 120, &[(40.0, 50.0, 9.0), (110.5, 60.2, 25.0)]);
        let p = DetectorParams::default();
        let mask = specular_mask(&img, &p).unwrap();
        let comps = connected_components(&mask, &p);
        assert_eq!(comps.len(), 2);
        for comp in &comps {
            let iso = component_isophote(comp, &p).unwrap();
            let raw: Vec<Vec2> = trace_outer_boundary(comp)
                .iter()
                .map(|&(x, y)| Vec2::new(x as f64, y as f64))
                .collect();
            let raw_c = raw.iter().fold(Vec2::zeros(), |a, p| a + p) / raw.len() as f64;
            assert!((iso.centroid() - raw_c).norm() <= 1.0);
            let rel = (iso.signed_area() - comp.area() as f64).abs() / comp.area() as f64;
            assert!(rel <= 0.15, "area off by {rel}");
        }
    }

    #[test]
    fn two_blobs_in_raster_order() {
        let img = disc_image(160, 120, &[(120.0, 30.0, 8.0), (40.0, 80.0, 8.0)]);
        let isos = extract_isophotes(&img, &DetectorParams::default()).unwrap();
        assert_eq!(isos.len(), 2);
        assert!(isos[0].centroid().y < isos[1].centroid().y);
        assert_eq!(isos[1].source_component_id, 1);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let img = Image::filled(8, 8, 1, 0);
        let p = DetectorParams {
            min_area: 0,
            ..Default::default()
        };
        assert!(matches!(
            extract_isophotes(&img, &p),
            Err(IsophoteError::InvalidParams(_))
        ));
    }
}
