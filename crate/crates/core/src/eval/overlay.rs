use crate::isophote::Image;
use crate::{SurfacePatchEstimate, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlayStyle {
    pub ellipse: [u8; 3],
    pub axes: [u8; 3],
    pub normal: [u8; 3],
    /// Half-size of the cross marking the brightest point, pixels.
    pub marker: i64,
}

impl Default for OverlayStyle {
    fn default() -> Self {
        Self {
            ellipse: [0, 255, 255],
            axes: [255, 0, 0],
            normal: [0, 0, 255],
            marker: 3,
        }
    }
}

/// RGB copy of `img` with each estimate's isophote ellipse, principal axes
/// and normal drawn on top. The normal is drawn as its image-plane
/// projection from the brightest point, scaled by twice the semi-major axis,
/// plus a cross at the brightest point.
pub fn overlay(img: &Image, patches: &[SurfacePatchEstimate], style: &OverlayStyle) -> Image {
    let mut out = img.to_rgb();
    if patches.is_empty() {
        return out;
    }
    for est in patches {
        let e = &est.ellipse;
        let n = ((2.0 * std::f64::consts::PI * e.semi_major).ceil() as usize).clamp(32, 4096);
        let pts = e.sample(n);
        for i in 0..n {
            line(&mut out, pts[i], pts[(i + 1) % n], style.ellipse);
        }
        let c = e.center();
        let (s, co) = e.angle.sin_cos();
        let major = Vec2::new(co, s) * e.semi_major;
        let minor = Vec2::new(-s, co) * e.semi_minor;
        line(&mut out, c - major, c + major, style.axes);
        line(&mut out, c - minor, c + minor, style.axes);

        let tip = est.bp + Vec2::new(est.normal.x, est.normal.y) * (2.0 * e.semi_major);
        line(&mut out, est.bp, tip, style.normal);
        let m = style.marker as f64;
        line(
            &mut out,
            est.bp - Vec2::new(m, 0.0),
            est.bp + Vec2::new(m, 0.0),
            style.normal,
        );
        line(
            &mut out,
            est.bp - Vec2::new(0.0, m),
            est.bp + Vec2::new(0.0, m),
            style.normal,
        );
    }
    out
}

fn put(img: &mut Image, x: i64, y: i64, color: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as usize) < img.width && (y as usize) < img.height {
        img.pixel_mut(x as usize, y as usize)
            .copy_from_slice(&color);
    }
}

/// Bresenham between rounded endpoints.
fn line(img: &mut Image, a: Vec2, b: Vec2, color: [u8; 3]) {
    if !(a
        .iter()
        .chain(b.iter())
        .all(|v| v.is_finite() && v.abs() < 1e7))
    {
        return;
    }
    let (mut x0, mut y0) = (a.x.round() as i64, a.y.round() as i64);
    let (x1, y1) = (b.x.round() as i64, b.y.round() as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}
