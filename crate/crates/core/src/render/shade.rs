use rayon::prelude::*;

use super::{ray_quadric_intersect, QuadricPatch, Ray, RenderParams};
use crate::isophote::Image;
use crate::{CameraIntrinsics, Vec2, Vec3};

/// Intensity along a camera ray before clipping; 0 when nothing is hit.
pub fn radiance(patches: &[QuadricPatch], dir: &Vec3, rp: &RenderParams) -> f64 {
    let ray = Ray::from_camera(*dir);
    let nearest = patches
        .iter()
        .filter_map(|patch| ray_quadric_intersect(&ray, patch).map(|h| (h, patch)))
        .min_by(|a, b| a.0.t.total_cmp(&b.0.t));
    let Some((hit, patch)) = nearest else {
        return 0.0;
    };
    let n_patch = Vec3::new(-patch.kappa1 * hit.p, -patch.kappa2 * hit.q, 1.0).normalize();
    let n = patch.rotation * n_patch;
    // Light and view share the camera centre, so the half vector is the view vector.
    let cos = n.dot(&ray.dir).abs();
    let falloff = rp.falloff_distance / hit.t;
    rp.diffuse_strength * cos * falloff * falloff + rp.specular_strength * cos.powf(rp.shininess)
}

/// Clip to `[0, 1]`, then round half up to 8 bits.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Grayscale render of one or more patches, nearest surface wins.
pub fn render_patches(patches: &[QuadricPatch], k: &CameraIntrinsics, rp: &RenderParams) -> Image {
    let (w, h) = (rp.width, rp.height);
    let mut data = vec![0u8; w * h];
    if w > 0 {
        data.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, px) in row.iter_mut().enumerate() {
                let dir = k.backproject(Vec2::new(x as f64, y as f64));
                *px = quantize(radiance(patches, &dir, rp));
            }
        });
    }
    Image {
        width: w,
        height: h,
        channels: 1,
        data,
    }
}

pub fn render(patch: &QuadricPatch, k: &CameraIntrinsics, rp: &RenderParams) -> Image {
    render_patches(std::slice::from_ref(patch), k, rp)
}
