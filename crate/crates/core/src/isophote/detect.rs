use serde::{Deserialize, Serialize};

use super::{Image, IsophoteError, Mask};

/// Saturation detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorParams {
    /// A pixel is specular when its smallest channel reaches this value.
    pub intensity_threshold: f64,
    pub min_area: usize,
    pub max_area: usize,
    /// Components with a pixel closer than this to the image border are dropped.
    pub border_margin: usize,
    /// Spline control points for contour smoothing; `None` picks them from the contour length.
    pub control_points: Option<usize>,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            intensity_threshold: 0.92,
            min_area: 20,
            max_area: 5000,
            border_margin: 2,
            control_points: None,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<(), IsophoteError> {
        if !(self.intensity_threshold > 0.0 && self.intensity_threshold <= 1.0) {
            return Err(IsophoteError::InvalidParams(format!(
                "intensity threshold {} outside (0, 1]",
                self.intensity_threshold
            )));
        }
        if self.min_area == 0 || self.min_area >= self.max_area {
            return Err(IsophoteError::InvalidParams(format!(
                "area bounds must satisfy 0 < min ({}) < max ({})",
                self.min_area, self.max_area
            )));
        }
        if let Some(m) = self.control_points {
            if m < 4 {
                return Err(IsophoteError::InvalidParams(format!(
                    "{m} control points is below 4"
                )));
            }
        }
        Ok(())
    }
}

pub fn specular_mask(img: &Image, p: &DetectorParams) -> Result<Mask, IsophoteError> {
    if img.is_empty() {
        return Err(IsophoteError::EmptyImage);
    }
    let mut mask = Mask::new(img.width, img.height);
    for (i, px) in img.data.chunks_exact(img.channels).enumerate() {
        let lo = px.iter().copied().min().unwrap_or(0) as f64 / 255.0;
        mask.data[i] = lo >= p.intensity_threshold;
    }
    Ok(mask)
}

/// One 8-connected blob of the mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    /// Pixels in raster order, as `(x, y)`.
    pub pixels: Vec<(usize, usize)>,
    /// Bounding box `(x0, y0, x1, y1)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
    local: Vec<bool>,
}

impl Component {
    pub fn from_pixels(id: usize, mut pixels: Vec<(usize, usize)>) -> Self {
        assert!(!pixels.is_empty(), "component without pixels");
        pixels.sort_by_key(|&(x, y)| (y, x));
        let x0 = pixels.iter().map(|p| p.0).min().unwrap();
        let x1 = pixels.iter().map(|p| p.0).max().unwrap();
        let y0 = pixels[0].1;
        let y1 = pixels[pixels.len() - 1].1;
        let w = x1 - x0 + 1;
        let mut local = vec![false; w * (y1 - y0 + 1)];
        for &(x, y) in &pixels {
            local[(y - y0) * w + (x - x0)] = true;
        }
        Self {
            id,
            pixels,
            bbox: (x0, y0, x1, y1),
            local,
        }
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        let (x0, y0, x1, y1) = self.bbox;
        if x < x0 as i64 || y < y0 as i64 || x > x1 as i64 || y > y1 as i64 {
            return false;
        }
        let w = x1 - x0 + 1;
        self.local[(y as usize - y0) * w + (x as usize - x0)]
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let (sx, sy) = self
            .pixels
            .iter()
            .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x as f64, b + y as f64));
        (sx / n, sy / n)
    }
}

const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// 8-connected components passing the area and border filters, ordered by
/// their first pixel in raster order. Ids are positions in the output.
pub fn connected_components(mask: &Mask, p: &DetectorParams) -> Vec<Component> {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.data[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        let mut touches_border = false;
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            let m = p.border_margin;
            if x < m || y < m || x + m >= w || y + m >= h {
                touches_border = true;
            }
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if mask.get(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if touches_border || pixels.len() < p.min_area || pixels.len() > p.max_area {
            continue;
        }
        out.push(Component::from_pixels(out.len(), pixels));
    }
    out
}
