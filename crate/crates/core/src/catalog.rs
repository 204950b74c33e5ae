//! Named small multigraphs and recognition up to isomorphism.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::multigraph::{isomorphism, Multigraph, Subdivision};

/// Pair order used by [`CatalogLabel::Quad`]: 01, 02, 03, 12, 13, 23.
pub const QUAD_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CatalogLabel {
    /// `aK₂`: two vertices joined by `a` parallel edges.
    Fold(usize),
    /// `T_{a,b,c}` with `1 <= a <= b <= c`.
    Triangle(usize, usize, usize),
    /// `2K₄`.
    TwoK4,
    /// `3C₄`.
    ThreeC4,
    /// `3K₄`.
    ThreeK4,
    /// `3K₄⁺`: `3K₄` with one class raised to 4.
    ThreeK4Plus,
    /// `5C₄⁼`: cyclic multiplicities 5, 4, 5, 4.
    FiveC4Eq,
    /// `5C₄⁻`: cyclic multiplicities 4, 5, 5, 5.
    FiveC4Minus,
    /// `3C₄°`.
    ThreeC4Sub,
    /// `T_{2,3,3}°°`: both 3-classes lose a copy to a subdivision vertex.
    T233SubSub,
    /// `T_{1,1,5}°`.
    T115Sub,
    /// `T•_{1,1,5}`: a 1-class of `T_{1,1,5}` subdivided.
    T115Bullet,
    /// `(5C₄⁼)°°`: each 5-class loses a copy to its own subdivision vertex.
    FiveC4EqSubSub,
    /// `(5C₄⁼)°°` with the two subdivision vertices identified.
    FiveC4EqSubSubMerged,
    /// `T_{4,4,4}°°°`: `T_{4,4,4}` with one edge of each class subdivided.
    T444SubSubSub,
    /// A 4-vertex graph given by its six class multiplicities in
    /// [`QUAD_PAIRS`] order, stored in lexicographically greatest form.
    Quad([usize; 6]),
}

impl CatalogLabel {
    /// Builds the graph with canonical vertex numbering.
    pub fn build(&self) -> Result<Multigraph> {
        use CatalogLabel::*;
        let g = match *self {
            Fold(a) => {
                if a == 0 {
                    return invalid("aK2 needs a >= 1");
                }
                Multigraph::from_classes(2, [(0, 1, a)])?
            }
            Triangle(a, b, c) => {
                if a == 0 || b == 0 || c == 0 {
                    return invalid("triangle multiplicities must be positive");
                }
                // v0v1 carries a, v0v2 carries b, v1v2 carries c, so sorted
                // parameters give d(v0) <= d(v1) <= d(v2).
                triangle(a, b, c)?
            }
            TwoK4 => complete4(2)?,
            ThreeK4 => complete4(3)?,
            ThreeK4Plus => {
                let mut g = complete4(3)?;
                g.add_edges(0, 1, 1)?;
                g
            }
            ThreeC4 => cycle4([3, 3, 3, 3])?,
            FiveC4Eq => cycle4([5, 4, 5, 4])?,
            FiveC4Minus => cycle4([4, 5, 5, 5])?,
            ThreeC4Sub => cycle4([3, 3, 3, 3])?.subdivide(Subdivision::MaxMultiplicity)?,
            T233SubSub => {
                let g = triangle(2, 3, 3)?;
                // The two 3-classes of `triangle(2,3,3)` are v0v2 and v1v2.
                g.subdivide(Subdivision::Class(0, 2))?
                    .subdivide(Subdivision::Class(1, 2))?
            }
            T115Sub => Multigraph::from_classes(3, [(0, 1, 5), (0, 2, 1), (1, 2, 1)])?
                .subdivide(Subdivision::Class(0, 1))?,
            T115Bullet => cycle4([1, 1, 1, 5])?,
            FiveC4EqSubSub => cycle4([5, 4, 5, 4])?
                .subdivide(Subdivision::Class(0, 1))?
                .subdivide(Subdivision::Class(2, 3))?,
            FiveC4EqSubSubMerged => {
                let mut g = cycle4([4, 4, 4, 4])?;
                let w = g.add_vertex();
                for v in 0..4 {
                    g.add_edges(v, w, 1)?;
                }
                g
            }
            T444SubSubSub => triangle(4, 4, 4)?
                .subdivide(Subdivision::Class(0, 1))?
                .subdivide(Subdivision::Class(0, 2))?
                .subdivide(Subdivision::Class(1, 2))?,
            Quad(m) => {
                let mut g = Multigraph::new(4);
                for (i, &(u, v)) in QUAD_PAIRS.iter().enumerate() {
                    g.add_edges(u, v, m[i])?;
                }
                g
            }
        };
        Ok(g)
    }

    /// Canonical label for a 4-vertex multiplicity vector.
    pub fn quad(m: [usize; 6]) -> CatalogLabel {
        CatalogLabel::Quad(quad_canonical(m))
    }

    /// `T_{a,b,c}` with sorted parameters.
    pub fn triangle(a: usize, b: usize, c: usize) -> CatalogLabel {
        let mut t = [a, b, c];
        t.sort_unstable();
        CatalogLabel::Triangle(t[0], t[1], t[2])
    }

    fn fixed() -> &'static [CatalogLabel] {
        use CatalogLabel::*;
        &[
            TwoK4,
            ThreeC4,
            ThreeK4,
            ThreeK4Plus,
            FiveC4Eq,
            FiveC4Minus,
            ThreeC4Sub,
            T233SubSub,
            T115Sub,
            T115Bullet,
            FiveC4EqSubSub,
            FiveC4EqSubSubMerged,
            T444SubSubSub,
        ]
    }
}

fn triangle(a: usize, b: usize, c: usize) -> Result<Multigraph> {
    Multigraph::from_classes(3, [(0, 1, a), (0, 2, b), (1, 2, c)])
}

fn complete4(m: usize) -> Result<Multigraph> {
    Multigraph::from_classes(4, QUAD_PAIRS.iter().map(|&(u, v)| (u, v, m)))
}

/// 4-cycle `v0 v1 v2 v3` with the given multiplicities on 01, 12, 23, 30.
fn cycle4(m: [usize; 4]) -> Result<Multigraph> {
    Multigraph::from_classes(4, [(0, 1, m[0]), (1, 2, m[1]), (2, 3, m[2]), (0, 3, m[3])])
}

/// Vertex order `v1, v2, v3` of a triangle with `d(v1) <= d(v2) <= d(v3)`,
/// ties broken by index.
pub fn triangle_vertex_order(g: &Multigraph) -> [usize; 3] {
    let d = g.degrees();
    let mut order = [0, 1, 2];
    order.sort_by_key(|&v| (d[v], v));
    order
}

const PERMS4: [[usize; 4]; 24] = {
    let mut out = [[0; 4]; 24];
    let mut i = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    out[i] = [a, b, c, 6 - a - b - c];
                    i += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

fn quad_index(u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    QUAD_PAIRS.iter().position(|&p| p == (u, v)).unwrap()
}

fn quad_canonical(m: [usize; 6]) -> [usize; 6] {
    let mut best = m;
    for perm in PERMS4 {
        let mut img = [0; 6];
        for (i, &(u, v)) in QUAD_PAIRS.iter().enumerate() {
            img[quad_index(perm[u], perm[v])] = m[i];
        }
        if img > best {
            best = img;
        }
    }
    best
}

/// All 4-vertex multigraphs with 19 edges, maximum multiplicity at most 5 and
/// minimum degree at least 8, one per isomorphism class.
pub fn quad19_family() -> Vec<CatalogLabel> {
    let mut out = std::collections::BTreeSet::new();
    let mut m = [0usize; 6];
    fn rec(i: usize, left: usize, m: &mut [usize; 6], out: &mut std::collections::BTreeSet<[usize; 6]>) {
        if i == 6 {
            if left != 0 {
                return;
            }
            let mut deg = [0; 4];
            for (k, &(u, v)) in QUAD_PAIRS.iter().enumerate() {
                deg[u] += m[k];
                deg[v] += m[k];
            }
            if deg.iter().all(|&d| d >= 8) {
                out.insert(quad_canonical(*m));
            }
            return;
        }
        for x in 0..=left.min(5) {
            m[i] = x;
            rec(i + 1, left - x, m, out);
        }
    }
    rec(0, 19, &mut m, &mut out);
    out.into_iter().rev().map(CatalogLabel::Quad).collect()
}

/// Recognizes `g` as a catalog graph.
///
/// Two-vertex graphs match `aK₂`, triangles with all three classes present
/// match `T_{a,b,c}`, the named fixed graphs are tried next, and remaining
/// 4-vertex graphs with 19 edges, `μ <= 5` and `δ >= 8` get a `Quad` label.
pub fn catalog_match(g: &Multigraph) -> Option<CatalogLabel> {
    let n = g.vertex_count();
    if n == 2 {
        let m = g.mult(0, 1);
        return (m > 0).then_some(CatalogLabel::Fold(m));
    }
    if n == 3 {
        let (a, b, c) = (g.mult(0, 1), g.mult(0, 2), g.mult(1, 2));
        return (a > 0 && b > 0 && c > 0).then(|| CatalogLabel::triangle(a, b, c));
    }
    for label in CatalogLabel::fixed() {
        let h = label.build().expect("fixed catalog graphs build");
        if isomorphism(g, &h).is_some() {
            return Some(*label);
        }
    }
    if n == 4 && g.edge_count() == 19 && g.max_multiplicity() <= 5 && g.min_degree() >= 8 {
        let mut m = [0; 6];
        for (i, &(u, v)) in QUAD_PAIRS.iter().enumerate() {
            m[i] = g.mult(u, v);
        }
        return Some(CatalogLabel::quad(m));
    }
    None
}

impl fmt::Display for CatalogLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CatalogLabel::*;
        match self {
            Fold(a) => write!(f, "{a}K2"),
            Triangle(a, b, c) => write!(f, "T{a},{b},{c}"),
            TwoK4 => f.write_str("2K4"),
            ThreeC4 => f.write_str("3C4"),
            ThreeK4 => f.write_str("3K4"),
            ThreeK4Plus => f.write_str("3K4+"),
            FiveC4Eq => f.write_str("5C4="),
            FiveC4Minus => f.write_str("5C4-"),
            ThreeC4Sub => f.write_str("3C4o"),
            T233SubSub => f.write_str("T2,3,3oo"),
            T115Sub => f.write_str("T1,1,5o"),
            T115Bullet => f.write_str("T*1,1,5"),
            FiveC4EqSubSub => f.write_str("5C4=oo"),
            FiveC4EqSubSubMerged => f.write_str("5C4=oo-id"),
            T444SubSubSub => f.write_str("T4,4,4ooo"),
            Quad(m) => write!(f, "Q{},{},{},{},{},{}", m[0], m[1], m[2], m[3], m[4], m[5]),
        }
    }
}

impl FromStr for CatalogLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use CatalogLabel::*;
        let s = s.trim();
        for label in CatalogLabel::fixed() {
            if label.to_string() == s {
                return Ok(*label);
            }
        }
        let bad = || Error::InvalidArgument(format!("unknown catalog name `{s}`"));
        let nums = |body: &str| -> Result<Vec<usize>> {
            body.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect()
        };
        if let Some(a) = s.strip_suffix("K2") {
            let a: usize = a.parse().map_err(|_| bad())?;
            if a == 0 {
                return Err(bad());
            }
            return Ok(Fold(a));
        }
        if let Some(body) = s.strip_prefix('T') {
            let v = nums(body)?;
            if v.len() != 3 || v.contains(&0) {
                return Err(bad());
            }
            return Ok(CatalogLabel::triangle(v[0], v[1], v[2]));
        }
        if let Some(body) = s.strip_prefix('Q') {
            let v = nums(body)?;
            let m: [usize; 6] = v.try_into().map_err(|_| bad())?;
            return Ok(CatalogLabel::quad(m));
        }
        Err(bad())
    }
}
