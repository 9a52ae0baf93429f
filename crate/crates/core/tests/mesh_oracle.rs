use nalgebra::{Rotation3, Vector3};
use specshape_core::mesh::*;

fn sphere(s: u32) -> TriangleMesh {
    make_test_mesh(&TestMesh::Sphere {
        radius: 2.0,
        subdivisions: s,
    })
    .unwrap()
}

fn shapes(m: &TriangleMesh) -> Vec<PerVertexShape> {
    principal_curvatures(m)
        .into_iter()
        .map(Option::unwrap)
        .collect()
}

#[test]
fn icosphere_within_two_percent_at_every_vertex() {
    for v in shapes(&sphere(4)) {
        assert!((v.kappa_min / 0.5 - 1.0).abs() <= 0.02);
        assert!((v.kappa_max / 0.5 - 1.0).abs() <= 0.02);
    }
}

#[test]
fn sphere_is_resolved_to_roundoff_at_every_level() {
    for s in 2..=5 {
        let err = shapes(&sphere(s))
            .iter()
            .map(|v| (v.kappa_min - 0.5).abs().max((v.kappa_max - 0.5).abs()))
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "level {s}: {err}");
    }
}

#[test]
fn ellipsoid_error_decreases_with_subdivision() {
    let radii = [1.5, 1.0, 0.7];
    let mut last = f64::INFINITY;
    for s in 2..=5 {
        let m = make_test_mesh(&TestMesh::Ellipsoid {
            radii,
            subdivisions: s,
        })
        .unwrap();
        let sh = shapes(&m);
        let mean = sh
            .iter()
            .zip(&m.vertices)
            .map(|(v, p)| {
                let (a, b) = ellipsoid_curvatures(radii, p);
                ((v.kappa_min - a) / a)
                    .abs()
                    .max(((v.kappa_max - b) / b).abs())
            })
            .sum::<f64>()
            / sh.len() as f64;
        assert!(mean < last, "level {s}: {mean} !< {last}");
        last = mean;
    }
    assert!(last < 0.005);
}

#[test]
fn rigid_motion_moves_frames_and_keeps_curvatures() {
    let radii = [1.5, 1.0, 0.7];
    let m = make_test_mesh(&TestMesh::Ellipsoid {
        radii,
        subdivisions: 3,
    })
    .unwrap();
    let r = Rotation3::from_scaled_axis(Vector3::new(0.3, -1.1, 0.7));
    let t = Vector3::new(4.0, -2.0, 0.5);
    let moved = m.map_vertices(|p| r * p + t);
    for (a, b) in shapes(&m).iter().zip(shapes(&moved)) {
        assert!((a.kappa_min - b.kappa_min).abs() <= 1e-9);
        assert!((a.kappa_max - b.kappa_max).abs() <= 1e-9);
        assert!((r * a.normal - b.normal).norm() <= 1e-9);
        if !a.umbilic && (a.kappa_max - a.kappa_min) > 1e-3 {
            assert!((r * a.dir_min).dot(&b.dir_min).abs() >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn scaling_divides_curvatures() {
    let m = make_test_mesh(&TestMesh::Ellipsoid {
        radii: [1.5, 1.0, 0.7],
        subdivisions: 3,
    })
    .unwrap();
    for s in [0.01, 3.0, 250.0] {
        let big = m.map_vertices(|p| p * s);
        for (a, b) in shapes(&m).iter().zip(shapes(&big)) {
            assert!((b.kappa_min * s - a.kappa_min).abs() <= 1e-9 * a.kappa_min.abs());
            assert!((b.kappa_max * s - a.kappa_max).abs() <= 1e-9 * a.kappa_max.abs());
        }
    }
}

#[test]
fn obj_round_trip_matches_generator() {
    let m = sphere(2);
    let mut text = String::new();
    for v in &m.vertices {
        text.push_str(&format!("v {:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    for f in &m.faces {
        text.push_str(&format!(
            "f {}/1/1 {}/1/1 {}/1/1\n",
            f[0] + 1,
            f[1] + 1,
            f[2] + 1
        ));
    }
    let loaded = load_obj(text.as_bytes()).unwrap();
    assert_eq!(loaded.mesh, m);
    assert_eq!(loaded.dropped_faces, 0);
}

#[test]
fn csv_has_one_row_per_vertex() {
    let m = sphere(1);
    let csv = shapes_csv(&principal_curvatures(&m));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SHAPE_CSV_HEADER);
    assert_eq!(lines.len(), m.vertices.len() + 1);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 12));
}

#[test]
fn schedule_independent() {
    let m = make_test_mesh(&TestMesh::Ellipsoid {
        radii: [1.5, 1.0, 0.7],
        subdivisions: 4,
    })
    .unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    assert_eq!(
        one.install(|| principal_curvatures(&m)),
        four.install(|| principal_curvatures(&m))
    );
}
