use super::{MeshError, TriangleMesh};
use crate::Vec3;

/// A loaded mesh and how many faces were dropped as degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub mesh: TriangleMesh,
    pub dropped_faces: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the `v` and `f` records of an ASCII OBJ file. Texture and normal
/// references on faces are ignored, polygons are fan-triangulated and every
/// other record is skipped. Line numbers in errors are 1-based.
pub fn load_obj(bytes: &[u8]) -> Result<ObjMesh, MeshError> {
    let text = String::from_utf8_lossy(bytes);
    let mut vertices: Vec<Vec3> = Vec::new();
    // (line, face) pairs; indices are checked once all vertices are known.
    let mut faces: Vec<(usize, [usize; 3])> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut tok = body.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in &mut c {
                    let t = tok
                        .next()
                        .ok_or_else(|| parse_err(line, "vertex needs 3 coordinates"))?;
                    *slot = t
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(line, format!("bad coordinate '{t}'")))?;
                }
                vertices.push(Vec3::from(c));
            }
            Some("f") => {
                let refs = tok
                    .map(|t| {
                        resolve(t, vertices.len())
                            .ok_or_else(|| parse_err(line, format!("bad vertex reference '{t}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if refs.len() < 3 {
                    return Err(parse_err(
                        line,
                        format!("face needs at least 3 vertices, got {}", refs.len()),
                    ));
                }
                for k in 1..refs.len() - 1 {
                    faces.push((line, [refs[0], refs[k], refs[k + 1]]));
                }
            }
            _ => {}
        }
    }

    if let Some((line, _)) = faces
        .iter()
        .find(|(_, f)| f.iter().any(|&k| k >= vertices.len()))
    {
        return Err(parse_err(*line, "vertex index out of range"));
    }
    let (mesh, dropped) =
        TriangleMesh::new_filtered(vertices, faces.into_iter().map(|(_, f)| f).collect())?;
    Ok(ObjMesh {
        mesh,
        dropped_faces: dropped.len(),
    })
}

/// 0-based index of one face reference; negative values count back from the
/// latest vertex.
fn resolve(token: &str, seen: usize) -> Option<usize> {
    let idx: i64 = token.split('/').next()?.parse().ok()?;
    match idx {
        0 => None,
        i if i > 0 => Some(i as usize - 1),
        i => seen.checked_sub(i.unsigned_abs() as usize),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "# unit square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3\nf 1 3 4\n";

    #[test]
    fn two_triangle_square() {
        let m = load_obj(SQUARE.as_bytes()).unwrap();
        assert_eq!(m.mesh.vertices.len(), 4);
        assert_eq!(m.mesh.faces, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.dropped_faces, 0);
    }

    #[test]
    fn quad_is_fanned() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert_eq!(
            load_obj(text.as_bytes()).unwrap().mesh.faces,
            vec![[0, 1, 2], [0, 2, 3]]
        );
    }

    #[test]
    fn suffixes_negative_indices_and_other_records() {
        let text =
            "o thing\nv 0 0 0\nv 1 0 0 1.0\nvt 0 0\nvn 0 0 1\nv 0 1 0\ns off\nf 1/1/1 2//1 -1/3\n";
        let m = load_obj(text.as_bytes()).unwrap();
        assert_eq!(m.mesh.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn malformed_face_reports_line() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n";
        match load_obj(text.as_bytes()) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_obj(b"v 0 x 0\n"),
            Err(MeshError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_obj(b"v 0 0 0\nf 1 2 0\n"),
            Err(MeshError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_obj(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n"),
            Err(MeshError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn empty_and_degenerate() {
        assert_eq!(load_obj(b""), Err(MeshError::EmptyMesh));
        assert_eq!(load_obj(b"v 0 0 0\n"), Err(MeshError::EmptyMesh));
        let text = format!("{SQUARE}f 1 1 2\nv 2 0 0\nf 1 2 5\n");
        let m = load_obj(text.as_bytes()).unwrap();
        assert_eq!(m.mesh.faces.len(), 2);
        assert_eq!(m.dropped_faces, 2);
    }
}
