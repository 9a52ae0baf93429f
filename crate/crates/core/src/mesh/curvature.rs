//! Per-vertex principal curvatures from a per-face least-squares fit of the
//! second fundamental form to normal differences along edges.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::{sphere_exact_normals, TriangleMesh};
use crate::geometry::eig_sym2;
use crate::Vec3;

/// Shape operator summary at one vertex. Curvatures are positive where the
/// surface curves away from the normal side, so a sphere with outward
/// normals has `κ = 1/r`.
///
/// `normal` is the vertex normal the estimator differentiates; it uses
/// `sin α / (|e₁||e₂|)` corner weights rather than the angle weights of
/// [`vertex_normals`](super::vertex_normals), which leave an O(1) curvature
/// error on irregular tessellations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerVertexShape {
    pub normal: Vec3,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub dir_min: Vec3,
    pub dir_max: Vec3,
    /// `|κ_max − κ_min| ≤ 1e-9·max|κ|`: the directions are arbitrary.
    pub umbilic: bool,
}

impl PerVertexShape {
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.kappa_min + self.kappa_max)
    }

    pub fn gaussian_curvature(&self) -> f64 {
        self.kappa_min * self.kappa_max
    }
}

const UMBILIC_REL: f64 = 1e-9;

/// Orthonormal tangent frame `(n, u, w)` with `w = n × u`.
#[derive(Clone, Copy)]
struct Frame {
    n: Vec3,
    u: Vec3,
    w: Vec3,
}

fn any_perpendicular(n: &Vec3) -> Vec3 {
    let a = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    (a - n * n.dot(&a)).normalize()
}

/// Frames from the first incident edge (in face order) projected onto the
/// tangent plane.
fn vertex_frames(mesh: &TriangleMesh, normals: &[Option<Vec3>]) -> Vec<Option<Frame>> {
    let mut edge: Vec<Option<Vec3>> = vec![None; mesh.vertices.len()];
    for f in &mesh.faces {
        for j in 0..3 {
            let v = f[j];
            if edge[v].is_none() {
                edge[v] = Some(mesh.vertices[f[(j + 1) % 3]] - mesh.vertices[v]);
            }
        }
    }
    normals
        .iter()
        .zip(edge)
        .map(|(n, e)| {
            let n = (*n)?;
            let e = e?;
            let t = e - n * n.dot(&e);
            let u = if t.norm() > 1e-12 * e.norm() {
                t.normalize()
            } else {
                any_perpendicular(&n)
            };
            Some(Frame {
                n,
                u,
                w: n.cross(&u),
            })
        })
        .collect()
}

/// Share of each corner in its face's area: Voronoi areas for non-obtuse
/// triangles, an even three-way split otherwise.
fn corner_areas(p: [Vec3; 3]) -> [f64; 3] {
    let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    let cot = |j: usize| {
        let (a, b) = (p[(j + 1) % 3] - p[j], p[(j + 2) % 3] - p[j]);
        a.dot(&b) / a.cross(&b).norm()
    };
    let c = [cot(0), cot(1), cot(2)];
    if c.iter().any(|&x| x < 0.0) {
        return [area / 3.0; 3];
    }
    std::array::from_fn(|j| {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        ((p[j] - p[k]).norm_squared() * c[l] + (p[j] - p[l]).norm_squared() * c[k]) / 8.0
    })
}

/// Rotates `(u, w)` about their common axis so their normal becomes `n`.
fn rotate_frame(u: Vec3, w: Vec3, n: &Vec3) -> (Vec3, Vec3) {
    let old_n = u.cross(&w);
    let d = old_n.dot(n);
    if d <= -1.0 {
        return (-u, -w);
    }
    let perp = n - old_n * d;
    let dperp = (old_n + n) / (1.0 + d);
    (u - dperp * u.dot(&perp), w - dperp * w.dot(&perp))
}

/// Re-expresses the tensor `(ku, kuv, kv)` given in `(old_u, old_w)` in the
/// frame `to`.
fn project_tensor(old_u: &Vec3, old_w: &Vec3, k: [f64; 3], to: &Frame) -> [f64; 3] {
    let (ru, rw) = rotate_frame(to.u, to.w, &old_u.cross(old_w));
    let (u1, v1) = (ru.dot(old_u), ru.dot(old_w));
    let (u2, v2) = (rw.dot(old_u), rw.dot(old_w));
    [
        k[0] * u1 * u1 + k[1] * 2.0 * u1 * v1 + k[2] * v1 * v1,
        k[0] * u1 * u2 + k[1] * (u1 * v2 + u2 * v1) + k[2] * v1 * v2,
        k[0] * u2 * u2 + k[1] * 2.0 * u2 * v2 + k[2] * v2 * v2,
    ]
}

/// Least-squares second fundamental form of one face in the frame
/// `(t, b)`, `t` along the edge opposite corner 0.
fn face_tensor(p: [Vec3; 3], n: [Vec3; 3]) -> Option<(Vec3, Vec3, [f64; 3])> {
    let e = [p[2] - p[1], p[0] - p[2], p[1] - p[0]];
    let t = e[0].normalize();
    let nf = e[0].cross(&e[1]).normalize();
    let b = nf.cross(&t);
    let mut w = Matrix3::<f64>::zeros();
    let mut m = Vector3::<f64>::zeros();
    for j in 0..3 {
        let (u, v) = (e[j].dot(&t), e[j].dot(&b));
        w[(0, 0)] += u * u;
        w[(0, 1)] += u * v;
        w[(2, 2)] += v * v;
        let dn = n[(j + 2) % 3] - n[(j + 1) % 3];
        let (dnu, dnv) = (dn.dot(&t), dn.dot(&b));
        m[0] += dnu * u;
        m[1] += dnu * v + dnv * u;
        m[2] += dnv * v;
    }
    w[(1, 1)] = w[(0, 0)] + w[(2, 2)];
    w[(1, 2)] = w[(0, 1)];
    w[(1, 0)] = w[(0, 1)];
    w[(2, 1)] = w[(1, 2)];
    let k = w.cholesky()?.solve(&m);
    Some((t, b, [k[0], k[1], k[2]]))
}

/// Principal curvatures and directions at every vertex; `None` for vertices
/// without a normal (isolated ones). The per-face pass runs in parallel and
/// accumulation follows face order, so results do not depend on scheduling.
pub fn principal_curvatures(mesh: &TriangleMesh) -> Vec<Option<PerVertexShape>> {
    let normals = sphere_exact_normals(mesh);
    let frames = vertex_frames(mesh, &normals);

    let per_face: Vec<Option<([f64; 3], Vec3, Vec3, [f64; 3])>> = mesh
        .faces
        .par_iter()
        .map(|f| {
            let p = f.map(|k| mesh.vertices[k]);
            let n = [normals[f[0]]?, normals[f[1]]?, normals[f[2]]?];
            let (t, b, k) = face_tensor(p, n)?;
            Some((corner_areas(p), t, b, k))
        })
        .collect();

    let mut point_area = vec![0.0; mesh.vertices.len()];
    for (f, data) in mesh.faces.iter().zip(&per_face) {
        if let Some((a, ..)) = data {
            for j in 0..3 {
                point_area[f[j]] += a[j];
            }
        }
    }

    let mut tensor = vec![[0.0; 3]; mesh.vertices.len()];
    for (f, data) in mesh.faces.iter().zip(&per_face) {
        let Some((a, t, b, k)) = data else { continue };
        for j in 0..3 {
            let v = f[j];
            let Some(frame) = &frames[v] else { continue };
            let wt = a[j] / point_area[v];
            let kv = project_tensor(t, b, *k, frame);
            for i in 0..3 {
                tensor[v][i] += wt * kv[i];
            }
        }
    }

    frames
        .iter()
        .zip(&tensor)
        .zip(&point_area)
        .map(|((frame, k), &area)| {
            let frame = frame.as_ref()?;
            if !(area > 0.0) {
                return None;
            }
            let ([kmin, kmax], [vmin, _]) = eig_sym2(k[0], k[1], k[2]);
            let dir_min = (frame.u * vmin.x + frame.w * vmin.y).normalize();
            let dir_max = frame.n.cross(&dir_min);
            Some(PerVertexShape {
                normal: frame.n,
                kappa_min: kmin,
                kappa_max: kmax,
                dir_min,
                dir_max,
                umbilic: (kmax - kmin) <= UMBILIC_REL * kmin.abs().max(kmax.abs()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_test_mesh, TestMesh};
    use approx::assert_abs_diff_eq;

    #[test]
    fn voronoi_areas_sum_to_face_area() {
        let p = [
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.4, 0.8, 0.0),
        ];
        let a = corner_areas(p);
        assert_abs_diff_eq!(a.iter().sum::<f64>(), 0.4, epsilon = 1e-15);
        // Right isosceles: the right-angle corner gets half.
        let q = [Vec3::zeros(), Vec3::x(), Vec3::y()];
        let a = corner_areas(q);
        assert_abs_diff_eq!(a[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], 0.125, epsilon = 1e-15);
        let obtuse = [
            Vec3::zeros(),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(1.0, 0.2, 0.0),
        ];
        assert_eq!(corner_areas(obtuse), [0.2 / 3.0; 3]);
    }

    #[test]
    fn projection_is_identity_for_same_frame_and_rotates_otherwise() {
        let f = Frame {
            n: Vec3::z(),
            u: Vec3::x(),
            w: Vec3::y(),
        };
        let k = [1.0, 0.3, -2.0];
        let out = project_tensor(&Vec3::x(), &Vec3::y(), k, &f);
        for i in 0..3 {
            assert_abs_diff_eq!(out[i], k[i], epsilon = 1e-15);
        }
        // Quarter turn swaps the diagonal and flips the off-diagonal.
        let g = Frame {
            n: Vec3::z(),
            u: Vec3::y(),
            w: -Vec3::x(),
        };
        let out = project_tensor(&Vec3::x(), &Vec3::y(), k, &g);
        assert_abs_diff_eq!(out[0], -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], -0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(out[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn face_tensor_on_exact_sphere_normals() {
        let r = 2.0;
        let p = [
            Vec3::new(0.1, 0.0, 1.0),
            Vec3::new(0.0, 0.1, 1.0),
            Vec3::new(-0.1, -0.05, 1.0),
        ]
        .map(|v| v.normalize() * r);
        let n = p.map(|v| v / r);
        let (_, _, k) = face_tensor(p, n).unwrap();
        assert_abs_diff_eq!(k[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(k[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn flat_grid_has_zero_curvature() {
        let m = make_test_mesh(&TestMesh::Plane {
            cells: 10,
            size: 1.0,
        })
        .unwrap();
        let s = principal_curvatures(&m);
        for v in s.iter().map(|v| v.unwrap()) {
            assert!(v.kappa_min.abs() <= 1e-9 && v.kappa_max.abs() <= 1e-9);
            assert_eq!(v.normal, Vec3::z());
        }
    }

    #[test]
    fn sphere_within_two_percent() {
        let m = make_test_mesh(&TestMesh::Sphere {
            radius: 2.0,
            subdivisions: 4,
        })
        .unwrap();
        for v in principal_curvatures(&m).into_iter().map(Option::unwrap) {
            assert!((v.kappa_min - 0.5).abs() <= 0.01, "{}", v.kappa_min);
            assert!((v.kappa_max - 0.5).abs() <= 0.01, "{}", v.kappa_max);
        }
    }

    #[test]
    fn cylinder_curvatures_and_axis() {
        let m = make_test_mesh(&TestMesh::Cylinder {
            radius: 1.0,
            length: 3.0,
            around: 64,
            rows: 32,
        })
        .unwrap();
        let boundary = m.boundary_vertices();
        let shapes = principal_curvatures(&m);
        let mut interior = 0;
        for (v, b) in shapes.iter().zip(&boundary) {
            if *b {
                continue;
            }
            interior += 1;
            let v = v.unwrap();
            assert!(v.kappa_min.abs() <= 0.02, "{}", v.kappa_min);
            assert!((v.kappa_max - 1.0).abs() <= 0.02, "{}", v.kappa_max);
            let ang = v.dir_min.dot(&Vec3::z()).abs().min(1.0).acos().to_degrees();
            assert!(ang <= 3.0, "{ang}");
        }
        assert_eq!(interior, 64 * 30);
    }

    #[test]
    fn frames_are_orthonormal() {
        let m = make_test_mesh(&TestMesh::Ellipsoid {
            radii: [1.5, 1.0, 0.7],
            subdivisions: 3,
        })
        .unwrap();
        for v in principal_curvatures(&m).into_iter().map(Option::unwrap) {
            assert!(v.kappa_min <= v.kappa_max);
            assert!(
                (v.dir_min.norm() - 1.0).abs() <= 1e-9 && (v.dir_max.norm() - 1.0).abs() <= 1e-9
            );
            assert!(v.dir_min.dot(&v.dir_max).abs() <= 1e-9);
            assert!(v.dir_min.dot(&v.normal).abs() <= 1e-9);
            assert!(v.dir_max.dot(&v.normal).abs() <= 1e-9);
        }
    }

    #[test]
    fn isolated_vertex_has_no_shape() {
        let mut m = make_test_mesh(&TestMesh::Plane {
            cells: 2,
            size: 1.0,
        })
        .unwrap();
        m.vertices.push(Vec3::new(3.0, 3.0, 3.0));
        let s = principal_curvatures(&m);
        assert!(s[..9].iter().all(Option::is_some));
        assert!(s[9].is_none());
    }
}
