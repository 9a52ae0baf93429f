//! Analytic tessellations used as curvature references.

use std::collections::HashMap;

use super::{MeshError, TriangleMesh};
use crate::Vec3;

/// Parameters of a generated mesh. Vertex and face counts:
///
/// | kind | vertices | faces |
/// |---|---|---|
/// | `Plane { cells: n }` | `(n+1)²` | `2n²` |
/// | `Sphere { subdivisions: s }` | `10·4^s + 2` | `20·4^s` |
/// | `Cylinder { around: a, rows: r }` | `a·r` | `2a(r−1)` |
/// | `Ellipsoid { subdivisions: s }` | as `Sphere` | as `Sphere` |
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestMesh {
    /// Square grid in `z = 0` centred on the origin with side `size`,
    /// normals `+z`.
    Plane { cells: usize, size: f64 },
    /// Icosphere about the origin.
    Sphere { radius: f64, subdivisions: u32 },
    /// Open tube along `z`, closed around, `rows` vertex rings over
    /// `[-length/2, length/2]`.
    Cylinder {
        radius: f64,
        length: f64,
        around: usize,
        rows: usize,
    },
    /// Icosphere stretched to semi-axes `radii` along `x, y, z`.
    Ellipsoid { radii: [f64; 3], subdivisions: u32 },
}

const MAX_SUBDIVISIONS: u32 = 8;

fn positive(name: &str, v: f64) -> Result<(), MeshError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(MeshError::InvalidParams(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn check_subdivisions(s: u32) -> Result<(), MeshError> {
    if s > MAX_SUBDIVISIONS {
        return Err(MeshError::InvalidParams(format!(
            "at most {MAX_SUBDIVISIONS} subdivisions, got {s}"
        )));
    }
    Ok(())
}

pub fn make_test_mesh(kind: &TestMesh) -> Result<TriangleMesh, MeshError> {
    match *kind {
        TestMesh::Plane { cells, size } => {
            positive("size", size)?;
            if cells == 0 {
                return Err(MeshError::InvalidParams(
                    "plane needs at least one cell".into(),
                ));
            }
            Ok(plane(cells, size))
        }
        TestMesh::Sphere {
            radius,
            subdivisions,
        } => {
            positive("radius", radius)?;
            check_subdivisions(subdivisions)?;
            Ok(unit_icosphere(subdivisions).map_vertices(|v| v * radius))
        }
        TestMesh::Cylinder {
            radius,
            length,
            around,
            rows,
        } => {
            positive("radius", radius)?;
            positive("length", length)?;
            if around < 3 || rows < 2 {
                return Err(MeshError::InvalidParams(format!(
                    "cylinder needs around ≥ 3 and rows ≥ 2, got {around}×{rows}"
                )));
            }
            Ok(cylinder(radius, length, around, rows))
        }
        TestMesh::Ellipsoid {
            radii,
            subdivisions,
        } => {
            for r in radii {
                positive("semi-axis", r)?;
            }
            check_subdivisions(subdivisions)?;
            Ok(unit_icosphere(subdivisions)
                .map_vertices(|v| Vec3::new(v.x * radii[0], v.y * radii[1], v.z * radii[2])))
        }
    }
}

fn plane(n: usize, size: f64) -> TriangleMesh {
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let coord = |i: usize| -0.5 * size + size * i as f64 / n as f64;
    let vertices = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Vec3::new(coord(i), coord(j), 0.0)))
        .collect();
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh { vertices, faces }
}

fn cylinder(r: f64, length: f64, around: usize, rows: usize) -> TriangleMesh {
    let idx = |i: usize, j: usize| j * around + (i % around);
    let mut vertices = Vec::with_capacity(around * rows);
    for j in 0..rows {
        let z = -0.5 * length + length * j as f64 / (rows - 1) as f64;
        for i in 0..around {
            let th = std::f64::consts::TAU * i as f64 / around as f64;
            vertices.push(Vec3::new(r * th.cos(), r * th.sin(), z));
        }
    }
    let mut faces = Vec::with_capacity(2 * around * (rows - 1));
    for j in 0..rows - 1 {
        for i in 0..around {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriangleMesh { vertices, faces }
}

fn unit_icosphere(subdivisions: u32) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|c| Vec3::from(*c).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<Vec3>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                v.push(((v[a] + v[b]) * 0.5).normalize());
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh { vertices, faces }
}

/// Closed-form `(κ_min, κ_max)` of the ellipsoid `x²/a² + y²/b² + z²/c² = 1`
/// at a point on it, positive for outward normals.
pub fn ellipsoid_curvatures(radii: [f64; 3], p: &Vec3) -> (f64, f64) {
    let [a, b, c] = radii;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let h2 = p.x * p.x / (a2 * a2) + p.y * p.y / (b2 * b2) + p.z * p.z / (c2 * c2);
    let abc2 = a2 * b2 * c2;
    let gauss = 1.0 / (abc2 * h2 * h2);
    let mean = (a2 + b2 + c2 - p.norm_squared()) / (2.0 * abc2 * h2.powf(1.5));
    let d = (mean * mean - gauss).max(0.0).sqrt();
    (mean - d, mean + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::vertex_normals;
    use approx::assert_relative_eq;

    #[test]
    fn documented_counts() {
        let s = make_test_mesh(&TestMesh::Sphere {
            radius: 1.0,
            subdivisions: 3,
        })
        .unwrap();
        assert_eq!((s.vertices.len(), s.faces.len()), (642, 1280));
        let p = make_test_mesh(&TestMesh::Plane {
            cells: 10,
            size: 1.0,
        })
        .unwrap();
        assert_eq!((p.vertices.len(), p.faces.len()), (121, 200));
        let c = make_test_mesh(&TestMesh::Cylinder {
            radius: 1.0,
            length: 3.0,
            around: 64,
            rows: 32,
        })
        .unwrap();
        assert_eq!((c.vertices.len(), c.faces.len()), (64 * 32, 2 * 64 * 31));
        for s in 0..5 {
            let m = make_test_mesh(&TestMesh::Sphere {
                radius: 1.0,
                subdivisions: s,
            })
            .unwrap();
            assert_eq!(m.vertices.len(), 10 * 4usize.pow(s) + 2);
        }
    }

    #[test]
    fn closed_meshes_are_watertight_and_outward() {
        for s in 0..4 {
            let m = make_test_mesh(&TestMesh::Sphere {
                radius: 1.0,
                subdivisions: s,
            })
            .unwrap();
            assert!(m.boundary_vertices().iter().all(|&b| !b));
            assert!(m.signed_volume() > 0.0);
            for v in &m.vertices {
                assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-15);
            }
        }
        let c = make_test_mesh(&TestMesh::Cylinder {
            radius: 1.0,
            length: 2.0,
            around: 16,
            rows: 4,
        })
        .unwrap();
        let b = c.boundary_vertices();
        assert_eq!(b.iter().filter(|&&x| x).count(), 32);
        for (i, v) in c.vertices.iter().enumerate() {
            let n = c
                .faces
                .iter()
                .position(|f| f.contains(&i))
                .map(|f| c.face_normal(f))
                .unwrap();
            assert!(n.dot(&Vec3::new(v.x, v.y, 0.0)) > 0.0);
        }
    }

    #[test]
    fn icosphere_normals_are_radial() {
        let m = make_test_mesh(&TestMesh::Sphere {
            radius: 1.0,
            subdivisions: 3,
        })
        .unwrap();
        for (n, v) in vertex_normals(&m).iter().zip(&m.vertices) {
            let ang = n.unwrap().dot(v).min(1.0).acos().to_degrees();
            assert!(ang < 0.5, "{ang}");
        }
    }

    #[test]
    fn invalid_params() {
        for k in [
            TestMesh::Plane {
                cells: 0,
                size: 1.0,
            },
            TestMesh::Plane {
                cells: 3,
                size: -1.0,
            },
            TestMesh::Sphere {
                radius: 0.0,
                subdivisions: 1,
            },
            TestMesh::Sphere {
                radius: 1.0,
                subdivisions: 9,
            },
            TestMesh::Cylinder {
                radius: 1.0,
                length: 1.0,
                around: 2,
                rows: 4,
            },
            TestMesh::Ellipsoid {
                radii: [1.0, f64::NAN, 1.0],
                subdivisions: 1,
            },
        ] {
            assert!(
                matches!(make_test_mesh(&k), Err(MeshError::InvalidParams(_))),
                "{k:?}"
            );
        }
    }

    #[test]
    fn ellipsoid_closed_form() {
        // Sphere limit.
        let (k1, k2) = ellipsoid_curvatures([2.0; 3], &Vec3::new(0.0, 0.0, 2.0));
        assert_relative_eq!(k1, 0.5, epsilon = 1e-15);
        assert_relative_eq!(k2, 0.5, epsilon = 1e-15);
        // At the tip of the a-axis the curvatures are a/b² and a/c².
        let (k1, k2) = ellipsoid_curvatures([3.0, 2.0, 1.0], &Vec3::new(3.0, 0.0, 0.0));
        assert_relative_eq!(k1, 0.75, epsilon = 1e-14);
        assert_relative_eq!(k2, 3.0, epsilon = 1e-14);
    }
}
