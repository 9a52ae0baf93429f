//! Triangle meshes as a curvature oracle: OBJ loading, angle-weighted vertex
//! normals, per-vertex second fundamental form estimation and analytic test
//! tessellations.

mod curvature;
mod obj;
mod shapes;

use std::collections::HashMap;

use thiserror::Error;

use crate::eval::format_sig9;
use crate::Vec3;

pub use curvature::{principal_curvatures, PerVertexShape};
pub use obj::{load_obj, ObjMesh};
pub use shapes::{ellipsoid_curvatures, make_test_mesh, TestMesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh has no vertices or no usable faces")]
    EmptyMesh,
    #[error("face {face} references vertex {index}, which does not exist")]
    IndexOutOfRange { face: usize, index: usize },
    #[error("face {0} is degenerate")]
    DegenerateFace(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

/// Repeated indices or an area negligible against the longest edge.
fn is_degenerate(v: &[Vec3], f: &[usize; 3]) -> bool {
    if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
        return true;
    }
    let (a, b, c) = (v[f[0]], v[f[1]], v[f[2]]);
    let longest = (b - a)
        .norm_squared()
        .max((c - b).norm_squared())
        .max((a - c).norm_squared());
    let cross = (b - a).cross(&(c - a)).norm();
    !(cross > 1e-14 * longest) || !cross.is_finite()
}

impl TriangleMesh {
    /// Strict constructor: every index in range, no degenerate face.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let (mesh, dropped) = Self::new_filtered(vertices, faces)?;
        match dropped.first() {
            Some(&i) => Err(MeshError::DegenerateFace(i)),
            None => Ok(mesh),
        }
    }

    /// Checks indices and drops degenerate faces, returning the original
    /// indices of the dropped ones.
    pub fn new_filtered(
        vertices: Vec<Vec3>,
        faces: Vec<[usize; 3]>,
    ) -> Result<(Self, Vec<usize>), MeshError> {
        for (i, f) in faces.iter().enumerate() {
            if let Some(&index) = f.iter().find(|&&k| k >= vertices.len()) {
                return Err(MeshError::IndexOutOfRange { face: i, index });
            }
        }
        let mut kept = Vec::with_capacity(faces.len());
        let mut dropped = Vec::new();
        for (i, f) in faces.into_iter().enumerate() {
            if is_degenerate(&vertices, &f) {
                dropped.push(i);
            } else {
                kept.push(f);
            }
        }
        if vertices.is_empty() || kept.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        Ok((
            Self {
                vertices,
                faces: kept,
            },
            dropped,
        ))
    }

    /// Same connectivity with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Unit normal of face `i` following its winding.
    pub fn face_normal(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.faces[i].map(|k| self.vertices[k]);
        (b - a).cross(&(c - a)).normalize()
    }

    /// Vertices on an edge used by exactly one face.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut uses: HashMap<(usize, usize), u32> = HashMap::new();
        for f in &self.faces {
            for j in 0..3 {
                let (a, b) = (f[j], f[(j + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut out = vec![false; self.vertices.len()];
        for ((a, b), n) in uses {
            if n == 1 {
                out[a] = true;
                out[b] = true;
            }
        }
        out
    }

    /// Signed enclosed volume; positive for a closed mesh wound outward.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|k| self.vertices[k]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

/// Interior angle at `p` of the triangle `p, q, r`.
pub(crate) fn corner_angle(p: &Vec3, q: &Vec3, r: &Vec3) -> f64 {
    let (a, b) = (q - p, r - p);
    a.cross(&b).norm().atan2(a.dot(&b))
}

/// Angle-weighted average of incident face normals. `None` marks an isolated
/// vertex (no incident face) or one whose incident normals cancel.
pub fn vertex_normals(mesh: &TriangleMesh) -> Vec<Option<Vec3>> {
    accumulate_normals(mesh, |p, q, r| {
        let (a, b) = (q - p, r - p);
        a.cross(&b).normalize() * corner_angle(p, q, r)
    })
}

/// Normals weighted by `sin α / (|e₁||e₂|)` per corner, exact for vertices
/// on a sphere. The curvature estimator differentiates these.
pub(crate) fn sphere_exact_normals(mesh: &TriangleMesh) -> Vec<Option<Vec3>> {
    accumulate_normals(mesh, |p, q, r| {
        let (a, b) = (q - p, r - p);
        a.cross(&b) / (a.norm_squared() * b.norm_squared())
    })
}

fn accumulate_normals(
    mesh: &TriangleMesh,
    corner: impl Fn(&Vec3, &Vec3, &Vec3) -> Vec3,
) -> Vec<Option<Vec3>> {
    let mut acc = vec![Vec3::zeros(); mesh.vertices.len()];
    let mut touched = vec![false; mesh.vertices.len()];
    for f in &mesh.faces {
        for j in 0..3 {
            let p = &mesh.vertices[f[j]];
            let q = &mesh.vertices[f[(j + 1) % 3]];
            let r = &mesh.vertices[f[(j + 2) % 3]];
            acc[f[j]] += corner(p, q, r);
            touched[f[j]] = true;
        }
    }
    acc.into_iter()
        .zip(touched)
        .map(|(n, t)| {
            let len = n.norm();
            (t && len > 1e-300).then(|| n / len)
        })
        .collect()
}

pub const SHAPE_CSV_HEADER: &str =
    "vertex_index,nx,ny,nz,kmin,kmax,dminx,dminy,dminz,dmaxx,dmaxy,dmaxz";

/// One row per vertex that has a shape estimate.
pub fn shapes_csv(shapes: &[Option<PerVertexShape>]) -> String {
    let mut out = String::from(SHAPE_CSV_HEADER);
    out.push('\n');
    for (i, s) in shapes.iter().enumerate() {
        let Some(s) = s else { continue };
        let cols = [
            s.normal.x,
            s.normal.y,
            s.normal.z,
            s.kappa_min,
            s.kappa_max,
            s.dir_min.x,
            s.dir_min.y,
            s.dir_min.z,
            s.dir_max.x,
            s.dir_max.y,
            s.dir_max.z,
        ];
        out.push_str(&i.to_string());
        for c in cols {
            out.push(',');
            out.push_str(&format_sig9(c));
        }
        out.push('\n');
    }
    out
}
