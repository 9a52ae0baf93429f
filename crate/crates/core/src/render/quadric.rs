use nalgebra::Rotation3;

use super::RenderError;
use crate::Vec3;

/// Second-order patch `z = (κ₁p² + κ₂q²)/2` over `|p|, |q| ≤ extent`, placed
/// in the camera frame by `x_cam = rotation · x_patch + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricPatch {
    pub kappa1: f64,
    pub kappa2: f64,
    pub rotation: Rotation3<f64>,
    pub translation: Vec3,
    pub extent: f64,
}

impl QuadricPatch {
    pub const DEFAULT_EXTENT: f64 = 0.05;

    /// Patch facing the camera along the optical axis at distance `d`.
    pub fn frontoparallel(kappa1: f64, kappa2: f64, d: f64) -> Self {
        Self {
            kappa1,
            kappa2,
            rotation: Rotation3::identity(),
            translation: Vec3::new(0.0, 0.0, d),
            extent: Self::DEFAULT_EXTENT,
        }
    }

    pub fn with_rotation(mut self, rotation: Rotation3<f64>) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.extent = extent;
        self
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let finite = [self.kappa1, self.kappa2, self.extent]
            .iter()
            .chain(self.translation.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(RenderError::InvalidPatch("non-finite parameter".into()));
        }
        if self.extent <= 0.0 {
            return Err(RenderError::InvalidPatch(format!(
                "extent {} is not positive",
                self.extent
            )));
        }
        let r = self.rotation.matrix();
        if (r.transpose() * r - crate::Mat3::identity()).amax() > 1e-12 {
            return Err(RenderError::InvalidPatch(
                "rotation is not orthonormal".into(),
            ));
        }
        Ok(())
    }

    pub fn height(&self, p: f64, q: f64) -> f64 {
        0.5 * (self.kappa1 * p * p + self.kappa2 * q * q)
    }

    /// Surface point in the patch frame.
    pub fn surface(&self, p: f64, q: f64) -> Vec3 {
        Vec3::new(p, q, self.height(p, q))
    }

    pub fn in_domain(&self, p: f64, q: f64) -> bool {
        p.abs() <= self.extent && q.abs() <= self.extent
    }

    pub fn to_camera(&self, x: &Vec3) -> Vec3 {
        self.rotation * x + self.translation
    }

    /// Camera-frame point expressed in the patch frame.
    pub fn to_patch(&self, x: &Vec3) -> Vec3 {
        self.rotation.inverse() * (x - self.translation)
    }

    /// Camera centre in the patch frame.
    pub fn camera_center(&self) -> Vec3 {
        self.to_patch(&Vec3::zeros())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit direction.
    pub dir: Vec3,
}

impl Ray {
    pub fn from_camera(dir: Vec3) -> Self {
        Self {
            origin: Vec3::zeros(),
            dir: dir.normalize(),
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Ray parameter.
    pub t: f64,
    /// Patch parameters of the hit.
    pub p: f64,
    pub q: f64,
    /// Camera-frame point.
    pub point: Vec3,
}

/// Nearest positive intersection inside the extent square. A root outside
/// the square does not hide the other one.
pub fn ray_quadric_intersect(ray: &Ray, patch: &QuadricPatch) -> Option<Hit> {
    let rinv = patch.rotation.inverse();
    let o = rinv * (ray.origin - patch.translation);
    let d = rinv * ray.dir;
    let (k1, k2) = (patch.kappa1, patch.kappa2);
    let a = 0.5 * (k1 * d.x * d.x + k2 * d.y * d.y);
    let b = k1 * o.x * d.x + k2 * o.y * d.y - d.z;
    let c = 0.5 * (k1 * o.x * o.x + k2 * o.y * o.y) - o.z;

    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let h = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = [f64::NAN, f64::NAN];
    if h != 0.0 {
        roots = [h / a, c / h];
    } else if a != 0.0 {
        // b = 0 and disc = 0: double root at the vertex of the parabola.
        roots[0] = 0.0;
    }
    if roots[0] > roots[1] {
        roots.swap(0, 1);
    }
    roots
        .into_iter()
        .filter(|t| t.is_finite() && *t > 0.0)
        .map(|t| (t, o + d * t))
        .find(|(_, x)| patch.in_domain(x.x, x.y))
        .map(|(t, x)| Hit {
            t,
            p: x.x,
            q: x.y,
            point: ray.at(t),
        })
}

/// Differential geometry of the patch at `(p, q)`, in the camera frame.
///
/// `normal` is the image of the patch `+z` side; curvatures are positive when
/// the surface bends toward it. `kappa1 ≤ kappa2`, `dir2 = normal × dir1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub point: Vec3,
    pub normal: Vec3,
    pub dir1: Vec3,
    pub dir2: Vec3,
    pub kappa1: f64,
    pub kappa2: f64,
}

pub fn local_frame(patch: &QuadricPatch, p: f64, q: f64) -> Result<LocalFrame, RenderError> {
    if !patch.in_domain(p, q) {
        return Err(RenderError::OutOfDomain { p, q });
    }
    let (k1, k2) = (patch.kappa1, patch.kappa2);
    let (fp, fq) = (k1 * p, k2 * q);
    let w = (1.0 + fp * fp + fq * fq).sqrt();
    let xp = Vec3::new(1.0, 0.0, fp);
    let xq = Vec3::new(0.0, 1.0, fq);
    let n = Vec3::new(-fp, -fq, 1.0) / w;

    // First and second fundamental forms; the mixed second-order term vanishes.
    let (e, f, g) = (1.0 + fp * fp, fp * fq, 1.0 + fq * fq);
    let (l, m) = (k1 / w, k2 / w);

    let (ka, kb, ta) = if f == 0.0 {
        let (ka, kb) = (l / e, m / g);
        if ka <= kb {
            (ka, kb, xp)
        } else {
            (kb, ka, xq)
        }
    } else {
        let det = e * g - f * f;
        let sum = l * g + m * e;
        let root = ((l * g - m * e).powi(2) + 4.0 * f * f * l * m)
            .max(0.0)
            .sqrt();
        let ka = (sum - root) / (2.0 * det);
        let kb = (sum + root) / (2.0 * det);
        // Null vector of (II − κ I) in parameter space.
        let r1 = (ka * f, l - ka * e);
        let r2 = (m - ka * g, ka * f);
        let (a, b) = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) {
            r1
        } else {
            r2
        };
        let t = if a == 0.0 && b == 0.0 {
            xp
        } else {
            xp * a + xq * b
        };
        (ka, kb, t)
    };
    let t1 = (ta - n * ta.dot(&n)).normalize();
    let t2 = n.cross(&t1);
    let r = &patch.rotation;
    Ok(LocalFrame {
        point: patch.to_camera(&patch.surface(p, q)),
        normal: r * n,
        dir1: r * t1,
        dir2: r * t2,
        kappa1: ka,
        kappa2: kb,
    })
}
