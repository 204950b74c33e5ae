//! Embedded instance families: replicated cycles and triangulations, and plane
//! drawings of the catalog graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::catalog::CatalogLabel;
use crate::error::{invalid, Result};
use crate::multigraph::Multigraph;
use crate::planar::{EdgeRef, RotationSystem};

fn simple(rot: &[&[usize]]) -> RotationSystem {
    let refs = rot
        .iter()
        .map(|l| l.iter().map(|&neighbor| EdgeRef { neighbor, copy: 0 }).collect())
        .collect();
    RotationSystem::from_refs(refs).expect("hand-written rotation is valid")
}

/// The cycle `0 1 … n−1`; for `n = 2` a single edge.
pub fn cycle(n: usize) -> Result<RotationSystem> {
    match n {
        0 | 1 => invalid("a cycle needs at least two vertices"),
        2 => Ok(simple(&[&[1], &[0]])),
        _ => {
            let rot: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
            let refs: Vec<&[usize]> = rot.iter().map(|v| v.as_slice()).collect();
            Ok(simple(&refs))
        }
    }
}

/// `kC_n`: every edge of `C_n` replaced by `k` parallel copies. For `n = 2`
/// this is `2k` copies, matching [`Multigraph::kcycle`].
pub fn kcycle(k: usize, n: usize) -> Result<RotationSystem> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let base = cycle(n)?;
    let copies = if n == 2 { 2 * k } else { k };
    Ok(RotationSystem::expand(&base, &|_, _| copies))
}

/// Every edge copy replaced by `k` consecutive copies.
pub fn replicate(rs: &RotationSystem, k: usize) -> Result<RotationSystem> {
    if k == 0 {
        return invalid("k must be positive");
    }
    Ok(RotationSystem::expand(rs, &|_, _| k))
}

/// `K_4` drawn with vertex 3 inside the triangle `0 1 2`.
pub fn k4() -> RotationSystem {
    simple(&[&[1, 3, 2], &[2, 3, 0], &[0, 3, 1], &[0, 1, 2]])
}

/// The octahedron: poles 0 and 5, equator `1 2 3 4`.
pub fn octahedron() -> RotationSystem {
    simple(&[
        &[1, 2, 3, 4],
        &[0, 4, 5, 2],
        &[0, 1, 5, 3],
        &[0, 2, 5, 4],
        &[0, 3, 5, 1],
        &[4, 3, 2, 1],
    ])
}

/// The wheel with rim `0 1 2 3` and hub 4.
fn wheel4() -> RotationSystem {
    simple(&[&[1, 4, 3], &[2, 4, 0], &[3, 4, 1], &[0, 4, 2], &[0, 1, 2, 3]])
}

fn with_mult(base: RotationSystem, g: &Multigraph) -> RotationSystem {
    RotationSystem::expand(&base, &|u, v| g.mult(u, v))
}

fn subdivide(rs: RotationSystem, u: usize, v: usize) -> RotationSystem {
    let e = rs.outer_copy(u, v).expect("class present");
    rs.subdivide_edge(e)
}

/// Plane drawing of a catalog graph with the vertex numbering of
/// [`CatalogLabel::build`].
pub fn catalog_embedding(label: CatalogLabel) -> Result<RotationSystem> {
    use CatalogLabel::*;
    let g = label.build()?;
    let rs = match label {
        Fold(_) => with_mult(cycle(2)?, &g),
        Triangle(..) => with_mult(cycle(3)?, &g),
        TwoK4 | ThreeK4 | ThreeK4Plus => with_mult(k4(), &g),
        Quad(m) => {
            let mut simple_g = Multigraph::new(4);
            for (i, &(u, v)) in crate::catalog::QUAD_PAIRS.iter().enumerate() {
                if m[i] > 0 {
                    simple_g.add_edges(u, v, 1)?;
                }
            }
            with_mult(planar_subgraph_of_k4(&simple_g), &g)
        }
        ThreeC4 | FiveC4Eq | FiveC4Minus | T115Bullet => with_mult(cycle(4)?, &g),
        ThreeC4Sub => subdivide(with_mult(cycle(4)?, &ThreeC4.build()?), 0, 1),
        T233SubSub => {
            let base = with_mult(cycle(3)?, &CatalogLabel::Triangle(2, 3, 3).build()?);
            subdivide(subdivide(base, 0, 2), 1, 2)
        }
        T115Sub => {
            let t = Multigraph::from_classes(3, [(0, 1, 5), (0, 2, 1), (1, 2, 1)])?;
            subdivide(with_mult(cycle(3)?, &t), 0, 1)
        }
        FiveC4EqSubSub => {
            let base = with_mult(cycle(4)?, &FiveC4Eq.build()?);
            subdivide(subdivide(base, 0, 1), 2, 3)
        }
        FiveC4EqSubSubMerged => with_mult(wheel4(), &g),
        T444SubSubSub => {
            let base = with_mult(cycle(3)?, &CatalogLabel::Triangle(4, 4, 4).build()?);
            subdivide(subdivide(subdivide(base, 0, 1), 0, 2), 1, 2)
        }
    };
    debug_assert!(rs.matches(&g));
    Ok(rs)
}

/// Restriction of the drawing of `K_4` to the classes present in `h`.
fn planar_subgraph_of_k4(h: &Multigraph) -> RotationSystem {
    let full = k4();
    let rot: Vec<Vec<usize>> = (0..4)
        .map(|u| {
            full.rotation(u)
                .iter()
                .map(|&e| full.other(e, u))
                .filter(|&w| h.mult(u, w) > 0)
                .collect()
        })
        .collect();
    let refs: Vec<&[usize]> = rot.iter().map(|v| v.as_slice()).collect();
    simple(&refs)
}

/// A simple triangulation on `n >= 4` vertices: `K_4`, then repeated vertex
/// insertions into random faces, then `flips` random edge flips that keep
/// the graph simple.
pub fn random_triangulation<R: Rng + ?Sized>(n: usize, flips: usize, rng: &mut R) -> Result<RotationSystem> {
    if n < 4 {
        return invalid("a triangulation needs at least four vertices");
    }
    let mut rot: Vec<Vec<usize>> = (0..4)
        .map(|u| k4().rotation(u).iter().map(|&e| k4().other(e, u)).collect())
        .collect();
    while rot.len() < n {
        let faces = triangle_faces(&rot);
        let &(a, b, c) = faces.choose(rng).expect("triangulation has faces");
        let x = rot.len();
        // The face a → b → c lies to the right of each dart; the new vertex
        // goes into each corner just after the incoming edge.
        insert_after(&mut rot[b], a, x);
        insert_after(&mut rot[c], b, x);
        insert_after(&mut rot[a], c, x);
        rot.push(vec![a, c, b]);
    }
    for _ in 0..flips {
        let faces = triangle_faces(&rot);
        let &(a, b, c) = faces.choose(rng).expect("triangulation has faces");
        // Flip edge ab; the other face on it is b → a → d.
        let d = next_after(&rot[a], b);
        if d == c || rot[c].contains(&d) || rot[a].len() <= 3 || rot[b].len() <= 3 {
            continue;
        }
        rot[a].retain(|&w| w != b);
        rot[b].retain(|&w| w != a);
        // Corners: at c between b and a, at d between a and b.
        insert_after(&mut rot[c], b, d);
        insert_after(&mut rot[d], a, c);
    }
    let refs: Vec<&[usize]> = rot.iter().map(|v| v.as_slice()).collect();
    let rs = simple(&refs);
    rs.faces()?;
    Ok(rs)
}

fn insert_after(list: &mut Vec<usize>, after: usize, x: usize) {
    let i = list.iter().position(|&w| w == after).expect("neighbour present");
    list.insert(i + 1, x);
}

fn next_after(list: &[usize], after: usize) -> usize {
    let i = list.iter().position(|&w| w == after).expect("neighbour present");
    list[(i + 1) % list.len()]
}

/// Faces of a simple triangulation as triples `(a, b, c)` with darts
/// `a → b → c → a`, each listed once.
fn triangle_faces(rot: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..rot.len() {
        for &b in &rot[a] {
            let c = next_after(&rot[b], a);
            if a < b && a < c {
                out.push((a, b, c));
            }
        }
    }
    out
}
