use super::Component;

/// Moore neighbourhood, clockwise on screen (y down), starting west.
const DIRS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// Moore-neighbour trace of the outer boundary, starting at the component's
/// first raster pixel. The loop has positive shoelace area in image
/// coordinates (y down) and is not closed explicitly. Pixels on one-pixel-wide
/// spurs are listed once per visit.
pub fn trace_outer_boundary(comp: &Component) -> Vec<(usize, usize)> {
    let start = comp.pixels[0];
    let start_i = (start.0 as i64, start.1 as i64);
    // The raster-first pixel has background to its west.
    let Some(first_dir) = next_dir(comp, start_i, 0) else {
        return vec![start];
    };
    let mut out = vec![start];
    let mut cur = start_i;
    let mut dir = first_dir;
    loop {
        cur = (cur.0 + DIRS[dir].0, cur.1 + DIRS[dir].1);
        let back = if dir % 2 == 0 {
            (dir + 6) % 8
        } else {
            (dir + 5) % 8
        };
        let nd = next_dir(comp, cur, back).expect("boundary pixel lost its neighbours");
        if cur == start_i && nd == first_dir {
            break;
        }
        out.push((cur.0 as usize, cur.1 as usize));
        dir = nd;
    }
    out
}

/// First foreground neighbour clockwise after the backtrack direction `back`.
fn next_dir(comp: &Component, p: (i64, i64), back: usize) -> Option<usize> {
    (1..=8)
        .map(|k| (back + k) % 8)
        .find(|&d| comp.contains(p.0 + DIRS[d].0, p.1 + DIRS[d].1))
}

/// Twice the signed area of a closed polygon.
pub(crate) fn shoelace2(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum()
}
