//! Reducible configurations, lifting reductions and the recursive solver.
//!
//! A first-type reduction lifts some edge pairs so that a strongly connected
//! catalog graph appears, then contracts it. A second-type reduction orients
//! some edges at a vertex, lifts the rest in pairs and deletes the vertex.
//! Solutions of the reduced graph pull back to the original one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_match, quad19_family, CatalogLabel};
use crate::error::{invalid, Error, Result};
use crate::multigraph::{pair, Multigraph};
use crate::orient::{
    beta_orientation, extend_with, strongly_connected, verify_certificate, Boundary,
    OrientationCertificate, Search, SearchLimits, StrongLimits,
};
use crate::planar::{Mode, RotationSystem};

/// A catalog graph verified strongly `Z_k`-connected.
#[derive(Debug, Clone)]
pub struct StrongEntry {
    pub label: CatalogLabel,
    pub graph: Multigraph,
}

fn candidates(modulus: u32) -> Vec<CatalogLabel> {
    use CatalogLabel::*;
    match modulus {
        5 => vec![Fold(4), Triangle(2, 3, 3), ThreeC4, TwoK4],
        _ => {
            let mut out = vec![Fold(6)];
            for a in 1..=6 {
                for b in a..=6 {
                    let c = 12 - a - b;
                    if c >= b && c <= 6 && a + b >= 6 {
                        out.push(Triangle(a, b, c));
                    }
                }
            }
            out.push(FiveC4Eq);
            out.push(ThreeK4Plus);
            for q in quad19_family() {
                let g = q.build().expect("family member builds");
                out.push(catalog_match(&g).unwrap_or(q));
            }
            out
        }
    }
}

fn build_catalog(modulus: u32) -> Vec<StrongEntry> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<StrongEntry> = Vec::new();
    for label in candidates(modulus) {
        if !seen.insert(label.to_string()) {
            continue;
        }
        let graph = label.build().expect("catalog label builds");
        let strong = strongly_connected(&graph, modulus, StrongLimits::default());
        if matches!(strong, Ok(s) if s.is_yes()) {
            out.push(StrongEntry { label, graph });
        }
    }
    // Stable: fewer vertices first, then fewer edges.
    out.sort_by_key(|e| (e.graph.vertex_count(), e.graph.edge_count()));
    out
}

/// The strongly connected catalog for `Z_5` or `Z_7`, certified on first
/// use and cached. Ordered by vertex count, then edge count.
pub fn strong_catalog(modulus: u32) -> Result<&'static [StrongEntry]> {
    static Z5: OnceLock<Vec<StrongEntry>> = OnceLock::new();
    static Z7: OnceLock<Vec<StrongEntry>> = OnceLock::new();
    match modulus {
        5 => Ok(Z5.get_or_init(|| build_catalog(5))),
        7 => Ok(Z7.get_or_init(|| build_catalog(7))),
        _ => invalid(format!("the strong catalog exists for moduli 5 and 7, not {modulus}")),
    }
}

type CertKey = (u32, String, Vec<u32>);

fn cert_cache() -> &'static Mutex<HashMap<CertKey, OrientationCertificate>> {
    static CACHE: OnceLock<Mutex<HashMap<CertKey, OrientationCertificate>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Orientation of a strong catalog graph achieving `gamma`.
pub fn catalog_certificate(label: CatalogLabel, gamma: &Boundary) -> Result<OrientationCertificate> {
    let key = (gamma.modulus(), label.to_string(), gamma.values().to_vec());
    if let Some(c) = cert_cache().lock().expect("cache lock").get(&key) {
        return Ok(c.clone());
    }
    let g = label.build()?;
    match beta_orientation(&g, gamma, SearchLimits::default())? {
        Search::Found(c) => {
            cert_cache().lock().expect("cache lock").insert(key, c.clone());
            Ok(c)
        }
        _ => Err(Error::Internal(format!(
            "catalog graph {label} has no orientation for boundary {:?}",
            gamma.values()
        ))),
    }
}

/// Injective maps from the vertices of `pattern` into `host` under which
/// every class of `pattern` is dominated, in lexicographic order of the image
/// tuple; at most `limit` of them.
pub fn subgraph_maps(pattern: &Multigraph, host: &Multigraph, limit: usize) -> Vec<Vec<usize>> {
    let k = pattern.vertex_count();
    let n = host.vertex_count();
    let mut out = Vec::new();
    if k > n || limit == 0 {
        return out;
    }
    let pa = pattern.matrix();
    let ha = host.matrix();
    let pd = pattern.degrees();
    let hd = host.degrees();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        pa: &[Vec<usize>],
        ha: &[Vec<usize>],
        pd: &[usize],
        hd: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if i == map.len() {
            out.push(map.clone());
            return;
        }
        for c in 0..ha.len() {
            if used[c] || hd[c] < pd[i] || (0..i).any(|j| ha[map[j]][c] < pa[j][i]) {
                continue;
            }
            map[i] = c;
            used[c] = true;
            rec(i + 1, pa, ha, pd, hd, map, used, out, limit);
            used[c] = false;
            if out.len() >= limit {
                return;
            }
        }
    }
    rec(0, &pa, &ha, &pd, &hd, &mut map, &mut used, &mut out, limit);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongHit {
    pub label: CatalogLabel,
    /// `vertices[i]` is the host vertex playing vertex `i` of the catalog graph.
    pub vertices: Vec<usize>,
}

/// First catalog member, in catalog order, that `g` contains as a
/// subgraph, with the lexicographically least placement.
pub fn find_strong_subgraph(g: &Multigraph, modulus: u32) -> Result<Option<StrongHit>> {
    for entry in strong_catalog(modulus)? {
        if let Some(m) = subgraph_maps(&entry.graph, g, 1).pop() {
            return Ok(Some(StrongHit {
                label: entry.label,
                vertices: m,
            }));
        }
    }
    Ok(None)
}

/// Configurations excluded from a minimal counterexample, each with the
/// lifts and contraction that reduce it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Config {
    /// `T_{1,1,3}`: lift at the apex, contract `4K₂`.
    T113,
    /// `3C₄` with one edge subdivided.
    ThreeC4Sub,
    /// `T_{2,3,3}` with both 3-classes subdivided once.
    T233SubSub,
    /// `T_{1,1,5}`: lift at the apex, contract `6K₂`.
    T115,
    /// `T_{1,1,5}` with one copy of the 5-class subdivided.
    T115Sub,
    /// The 4-cycle with multiplicities 1, 1, 1, 5.
    T115Bullet,
    /// `T_{2,2,4}`: two lifts at the apex, contract `6K₂`.
    T224,
    /// `5C₄⁼` with one edge of each 5-class subdivided.
    FiveC4EqSubSub,
    /// The same with both subdividing vertices identified.
    FiveC4EqSubSubMerged,
    /// `T_{4,4,4}` with one edge of each class subdivided.
    T444SubSubSub,
}

impl Config {
    pub fn all(mode: Mode) -> &'static [Config] {
        use Config::*;
        match mode {
            Mode::Z5 => &[T113, ThreeC4Sub, T233SubSub],
            Mode::Z7 => &[
                T115,
                T115Sub,
                T115Bullet,
                T224,
                FiveC4EqSubSub,
                FiveC4EqSubSubMerged,
                T444SubSubSub,
            ],
        }
    }

    pub fn mode(self) -> Mode {
        use Config::*;
        match self {
            T113 | ThreeC4Sub | T233SubSub => Mode::Z5,
            _ => Mode::Z7,
        }
    }

    pub fn label(self) -> CatalogLabel {
        use CatalogLabel as L;
        match self {
            Config::T113 => L::Triangle(1, 1, 3),
            Config::ThreeC4Sub => L::ThreeC4Sub,
            Config::T233SubSub => L::T233SubSub,
            Config::T115 => L::Triangle(1, 1, 5),
            Config::T115Sub => L::T115Sub,
            Config::T115Bullet => L::T115Bullet,
            Config::T224 => L::Triangle(2, 2, 4),
            Config::FiveC4EqSubSub => L::FiveC4EqSubSub,
            Config::FiveC4EqSubSubMerged => L::FiveC4EqSubSubMerged,
            Config::T444SubSubSub => L::T444SubSubSub,
        }
    }

    pub fn id(self) -> &'static str {
        use Config::*;
        match self {
            T113 => "t113-lift-apex",
            ThreeC4Sub => "3c4-lift-subdivision",
            T233SubSub => "t233-lift-subdivisions",
            T115 => "t115-lift-apex",
            T115Sub => "t115-lift-apex-and-subdivision",
            T115Bullet => "t115-lift-path",
            T224 => "t224-lift-apex-twice",
            FiveC4EqSubSub => "5c4eq-lift-subdivisions",
            FiveC4EqSubSubMerged => "5c4eq-lift-hub-twice",
            T444SubSubSub => "t444-lift-subdivisions",
        }
    }

    /// Lifts `(v, w₁, w₂)` in the vertex numbering of [`label`](Self::label).
    pub fn lifts(self) -> &'static [(usize, usize, usize)] {
        use Config::*;
        match self {
            T113 | T115 => &[(0, 1, 2)],
            ThreeC4Sub => &[(4, 0, 1)],
            T233SubSub => &[(3, 0, 2), (4, 1, 2)],
            T115Sub => &[(2, 0, 1), (3, 0, 1)],
            T115Bullet => &[(1, 0, 2), (2, 0, 3)],
            T224 => &[(0, 1, 2), (0, 1, 2)],
            FiveC4EqSubSub => &[(4, 0, 1), (5, 2, 3)],
            FiveC4EqSubSubMerged => &[(4, 0, 1), (4, 2, 3)],
            T444SubSubSub => &[(3, 0, 1), (4, 0, 2), (5, 1, 2)],
        }
    }

    /// Vertices contracted after lifting.
    pub fn target(self) -> &'static [usize] {
        use Config::*;
        match self {
            T113 | T115 | T224 => &[1, 2],
            T115Sub => &[0, 1],
            T115Bullet => &[0, 3],
            ThreeC4Sub | FiveC4EqSubSub | FiveC4EqSubSubMerged => &[0, 1, 2, 3],
            T233SubSub | T444SubSubSub => &[0, 1, 2],
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Config> {
        [Mode::Z5, Mode::Z7]
            .iter()
            .flat_map(|&m| Config::all(m).iter().copied())
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown configuration '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub config: Config,
    pub label: CatalogLabel,
    /// `witness[i]` is the vertex of `G` playing vertex `i` of the configuration.
    pub witness: Vec<usize>,
    pub reduction: String,
}

impl ConfigReport {
    /// Lifts and contraction target in the vertex numbering of `G`.
    pub fn host_reduction(&self) -> (Vec<(usize, usize, usize)>, Vec<usize>) {
        let w = &self.witness;
        let lifts = self
            .config
            .lifts()
            .iter()
            .map(|&(v, a, b)| (w[v], w[a], w[b]))
            .collect();
        let target = self.config.target().iter().map(|&i| w[i]).collect();
        (lifts, target)
    }
}

/// Default cap on placements examined per configuration.
pub const SCAN_LIMIT: usize = 100_000;

fn footprint(pattern: &Multigraph, map: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut f: Vec<(usize, usize, usize)> = pattern
        .classes()
        .map(|(a, b, m)| {
            let (x, y) = pair(map[a], map[b]);
            (x, y, m)
        })
        .collect();
    f.sort_unstable();
    f
}

/// Every occurrence of a configuration of `mode` in `g`, one report per
/// distinct set of edges used.
pub fn forbidden_scan(g: &Multigraph, mode: Mode) -> Vec<ConfigReport> {
    scan_limited(g, mode, SCAN_LIMIT, usize::MAX)
}

fn scan_limited(g: &Multigraph, mode: Mode, per_config: usize, total: usize) -> Vec<ConfigReport> {
    let mut out = Vec::new();
    for &config in Config::all(mode) {
        let label = config.label();
        let pattern = label.build().expect("configuration builds");
        let mut seen = BTreeSet::new();
        for m in subgraph_maps(&pattern, g, per_config) {
            if seen.insert(footprint(&pattern, &m)) {
                out.push(ConfigReport {
                    config,
                    label,
                    witness: m,
                    reduction: config.id().to_string(),
                });
                if out.len() >= total {
                    return out;
                }
            }
        }
    }
    out
}

/// Checks the planarity guard for a sequence of lifts: each new edge
/// `w₁w₂` must be parallel to an existing edge, or be consumed by a later
/// lift of the sequence (a lifted path).
pub fn lift_guard(g: &Multigraph, lifts: &[(usize, usize, usize)]) -> Result<()> {
    let mut cur = g.clone();
    for (i, &(v, w1, w2)) in lifts.iter().enumerate() {
        let consumed = lifts[i + 1..].iter().any(|&(v2, a, b)| {
            (v2 == w1 && (a == w2 || b == w2)) || (v2 == w2 && (a == w1 || b == w1))
        });
        if w1 < cur.vertex_count() && w2 < cur.vertex_count() && cur.mult(w1, w2) == 0 && !consumed {
            return invalid(format!(
                "lift at {v} would create edge {w1}{w2}, which has no parallel edge"
            ));
        }
        cur = cur.lift(v, w1, w2)?;
    }
    Ok(())
}

fn apply_lifts(g: &Multigraph, lifts: &[(usize, usize, usize)]) -> Result<Vec<Multigraph>> {
    let mut chain = vec![g.clone()];
    for &(v, w1, w2) in lifts {
        let next = chain.last().expect("nonempty").lift(v, w1, w2)?;
        chain.push(next);
    }
    Ok(chain)
}

/// Result of a first-type reduction.
#[derive(Debug, Clone)]
pub struct FirstType {
    pub lifts: Vec<(usize, usize, usize)>,
    pub label: CatalogLabel,
    /// `vertices[i]` is the vertex playing vertex `i` of the catalog graph.
    pub vertices: Vec<usize>,
    /// `G` after the lifts.
    pub lifted: Multigraph,
    /// The lifted graph with `vertices` contracted.
    pub after: Multigraph,
    pub map: Vec<usize>,
}

/// Lifts `lifts` in order, then contracts `target`, which must carry a
/// strongly `Z_modulus`-connected catalog graph on exactly those vertices.
pub fn lift_first_type(
    g: &Multigraph,
    modulus: u32,
    lifts: &[(usize, usize, usize)],
    target: &[usize],
) -> Result<FirstType> {
    lift_guard(g, lifts)?;
    let lifted = apply_lifts(g, lifts)?.pop().expect("chain is nonempty");
    let (h, verts) = lifted.induced(target)?;
    if verts.len() != target.len() {
        return invalid("target vertices must be distinct");
    }
    let hit = strong_catalog(modulus)?
        .iter()
        .filter(|e| e.graph.vertex_count() == verts.len())
        .find_map(|e| {
            subgraph_maps(&e.graph, &h, 1)
                .pop()
                .map(|m| (e.label, m.iter().map(|&i| verts[i]).collect::<Vec<_>>()))
        });
    let Some((label, vertices)) = hit else {
        return invalid("after lifting, the target does not carry a strongly connected catalog graph");
    };
    finish_first_type(lifts, label, vertices, lifted)
}

fn finish_first_type(
    lifts: &[(usize, usize, usize)],
    label: CatalogLabel,
    vertices: Vec<usize>,
    lifted: Multigraph,
) -> Result<FirstType> {
    let (after, map) = lifted.contract(&vertices)?;
    Ok(FirstType {
        lifts: lifts.to_vec(),
        label,
        vertices,
        lifted,
        after,
        map,
    })
}

fn add_net(cert: &mut OrientationCertificate, a: usize, b: usize, d: i64) {
    let e = cert.nets.entry(pair(a, b)).or_insert(0);
    *e += if a < b { d } else { -d };
}

/// Undoes the lift `(v, w₁, w₂)`: `after` is the graph once lifted. One copy
/// of `w₁w₂` is rerouted through `v` keeping its direction.
fn unlift(after: &Multigraph, cert: &OrientationCertificate, v: usize, w1: usize, w2: usize) -> OrientationCertificate {
    let mut c = cert.clone();
    let m = after.mult(w1, w2) as i64;
    if c.net_from(w1, w2) > -m {
        add_net(&mut c, w1, w2, -1);
        add_net(&mut c, w1, v, 1);
        add_net(&mut c, v, w2, 1);
    } else {
        add_net(&mut c, w1, w2, 1);
        add_net(&mut c, w2, v, 1);
        add_net(&mut c, v, w1, 1);
    }
    if m == 1 {
        c.nets.remove(&pair(w1, w2));
    }
    c
}

/// Turns an orientation of `step.after` achieving the pushed-forward
/// boundary into an orientation of `g` achieving `beta`.
pub fn pull_back_first(
    g: &Multigraph,
    beta: &Boundary,
    step: &FirstType,
    after_cert: &OrientationCertificate,
) -> Result<OrientationCertificate> {
    let h = step.label.build()?;
    let label = step.label;
    let mut cert = extend_with(&step.lifted, beta, &step.vertices, &h, after_cert, |gamma| {
        catalog_certificate(label, gamma).map(Some)
    })?;
    let chain = apply_lifts(g, &step.lifts)?;
    for (i, &(v, w1, w2)) in step.lifts.iter().enumerate().rev() {
        cert = unlift(&chain[i + 1], &cert, v, w1, w2);
    }
    verify_certificate(g, beta, &cert)
        .map_err(|e| Error::Internal(format!("first-type pullback fails: {e}")))?;
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Away from the deleted vertex.
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondType {
    pub vertex: usize,
    pub oriented: Vec<(usize, Direction)>,
    pub lifts: Vec<(usize, usize)>,
    /// Change of `β(w)` per neighbour `w`, in the numbering of `G`.
    pub deltas: Vec<(usize, i64)>,
}

/// Orients `oriented` at `v`, lifts the pairs `lifts` at `v` and deletes
/// `v`. Returns the reduced graph and boundary (vertices above `v` shift down
/// by one) and the step.
pub fn lift_second_type(
    g: &Multigraph,
    beta: &Boundary,
    v: usize,
    oriented: &[(usize, Direction)],
    lifts: &[(usize, usize)],
) -> Result<(Multigraph, Boundary, SecondType)> {
    let n = g.vertex_count();
    if v >= n || beta.len() != n {
        return invalid("vertex or boundary does not match the graph");
    }
    let mut used = vec![0usize; n];
    for &(w, _) in oriented {
        if w >= n || w == v {
            return invalid(format!("oriented edge to invalid vertex {w}"));
        }
        used[w] += 1;
    }
    for &(w1, w2) in lifts {
        if w1 >= n || w2 >= n || w1 == v || w2 == v || w1 == w2 {
            return invalid(format!("invalid lifted pair {w1}, {w2}"));
        }
        used[w1] += 1;
        used[w2] += 1;
    }
    for (w, &u) in used.iter().enumerate() {
        if w != v && u != g.mult(v, w) {
            return invalid(format!(
                "edges between {v} and {w}: {} present, {u} oriented or lifted",
                g.mult(v, w)
            ));
        }
    }
    let k = beta.modulus() as i64;
    let net: i64 = oriented
        .iter()
        .map(|&(_, d)| if d == Direction::Out { 1 } else { -1 })
        .sum();
    if (net - beta.get(v) as i64).rem_euclid(k) != 0 {
        return invalid(format!(
            "oriented edges give {v} a net of {net}, boundary asks {} mod {k}",
            beta.get(v)
        ));
    }
    let mut delta = vec![0i64; n];
    for &(w, d) in oriented {
        delta[w] += if d == Direction::Out { 1 } else { -1 };
    }
    let mut cur = g.clone();
    for &(w1, w2) in lifts {
        cur = cur.lift(v, w1, w2)?;
    }
    let after = cur.delete_vertex(v)?;
    let values: Vec<i64> = (0..n)
        .filter(|&u| u != v)
        .map(|u| beta.get(u) as i64 + delta[u])
        .collect();
    let beta2 = Boundary::new(beta.modulus(), values)?;
    let deltas = (0..n).filter(|&w| delta[w] != 0).map(|w| (w, delta[w])).collect();
    Ok((
        after,
        beta2,
        SecondType {
            vertex: v,
            oriented: oriented.to_vec(),
            lifts: lifts.to_vec(),
            deltas,
        },
    ))
}

/// Turns an orientation of the reduced graph into one of `g` achieving `beta`.
pub fn pull_back_second(
    g: &Multigraph,
    beta: &Boundary,
    step: &SecondType,
    after_cert: &OrientationCertificate,
) -> Result<OrientationCertificate> {
    let v = step.vertex;
    let up = |x: usize| if x >= v { x + 1 } else { x };
    let mut cert = OrientationCertificate::new(after_cert.modulus);
    for (&(a, b), &o) in &after_cert.nets {
        cert.nets.insert((up(a), up(b)), o);
    }
    // The lift chain without the oriented copies.
    let mut base = g.clone();
    for &(w, _) in &step.oriented {
        base.remove_edges(v, w, 1)?;
    }
    let mut chain = vec![base];
    for &(w1, w2) in &step.lifts {
        let next = chain.last().expect("nonempty").lift(v, w1, w2)?;
        chain.push(next);
    }
    for (i, &(w1, w2)) in step.lifts.iter().enumerate().rev() {
        cert = unlift(&chain[i + 1], &cert, v, w1, w2);
    }
    for &(w, d) in &step.oriented {
        add_net(&mut cert, v, w, if d == Direction::Out { 1 } else { -1 });
    }
    verify_certificate(g, beta, &cert)
        .map_err(|e| Error::Internal(format!("second-type pullback fails: {e}")))?;
    Ok(cert)
}

/// One line of a solver trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionStep {
    ContractStrong {
        label: CatalogLabel,
        vertices: Vec<usize>,
        after: (usize, usize),
    },
    LiftFirst {
        config: Option<Config>,
        lifts: Vec<(usize, usize, usize)>,
        label: CatalogLabel,
        vertices: Vec<usize>,
        after: (usize, usize),
    },
    LiftSecond {
        step: SecondType,
        after: (usize, usize),
    },
    Exhaustive {
        n: usize,
        m: usize,
        nodes: u64,
    },
}

fn size(g: &Multigraph) -> (usize, usize) {
    (g.vertex_count(), g.edge_count())
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Graphs with at most this many vertices are searched directly.
    pub base_n: usize,
    pub search: SearchLimits,
    /// Largest graph the fallback direct search accepts.
    pub max_direct_vertices: usize,
    /// Try lift-and-contract reductions of the forbidden configurations.
    pub forbidden_lifts: bool,
    /// Try complete splitting at a vertex when a rotation system is known.
    pub splitting: bool,
    /// Odd edge-connectivity preserved by splitting, capped at this value;
    /// `None` means `6p − 1`.
    pub split_threshold: Option<usize>,
    /// Skip a lift-and-contract reduction when the lifted graph is less than
    /// `2p`-edge-connected.
    pub lift_connectivity_check: bool,
    /// Recursive calls before reductions other than contraction stop.
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            base_n: 6,
            search: SearchLimits::default(),
            max_direct_vertices: 16,
            forbidden_lifts: true,
            splitting: true,
            split_threshold: None,
            lift_connectivity_check: true,
            max_steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Found(OrientationCertificate),
    /// No orientation exists; every step on the path was exact.
    Refuted,
    /// Limits stopped the solver; nothing was proved.
    Refused(String),
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub trace: Vec<ReductionStep>,
    /// Splitting attempts where no consecutive pair kept the odd
    /// edge-connectivity.
    pub anomalies: Vec<String>,
}

struct Solver<'a> {
    cfg: &'a SolverConfig,
    p: u32,
    modulus: u32,
    steps: usize,
    anomalies: Vec<String>,
}

impl Solver<'_> {
    fn search(&self, g: &Multigraph, beta: &Boundary, trace: &mut Vec<ReductionStep>) -> Result<SolveOutcome> {
        let (n, m) = size(g);
        let out = beta_orientation(g, beta, self.cfg.search)?;
        let nodes = match &out {
            Search::Found(_) => 0,
            Search::Refuted { nodes, .. } | Search::Refused { nodes } => *nodes,
        };
        trace.push(ReductionStep::Exhaustive { n, m, nodes });
        Ok(match out {
            Search::Found(c) => SolveOutcome::Found(c),
            Search::Refuted { .. } => SolveOutcome::Refuted,
            Search::Refused { nodes } => {
                SolveOutcome::Refused(format!("search stopped after {nodes} nodes on n={n}, m={m}"))
            }
        })
    }

    fn solve(
        &mut self,
        g: &Multigraph,
        beta: &Boundary,
        rot: Option<RotationSystem>,
        trace: &mut Vec<ReductionStep>,
    ) -> Result<SolveOutcome> {
        self.steps += 1;
        let n = g.vertex_count();
        if n <= self.cfg.base_n {
            return self.search(g, beta, trace);
        }
        if let Some(hit) = find_strong_subgraph(g, self.modulus)? {
            let step = finish_first_type(&[], hit.label, hit.vertices.clone(), g.clone())?;
            let rot2 = rot.and_then(|r| r.contract_set(&hit.vertices).ok());
            let beta2 = beta.push_forward(&step.map, step.after.vertex_count());
            trace.push(ReductionStep::ContractStrong {
                label: hit.label,
                vertices: hit.vertices,
                after: size(&step.after),
            });
            return Ok(match self.solve(&step.after, &beta2, rot2, trace)? {
                SolveOutcome::Found(c) => SolveOutcome::Found(pull_back_first(g, beta, &step, &c)?),
                other => other,
            });
        }
        if self.steps <= self.cfg.max_steps {
            if self.cfg.forbidden_lifts {
                if let Some(out) = self.try_forbidden(g, beta, rot.as_ref(), trace)? {
                    return Ok(out);
                }
            }
            if self.cfg.splitting {
                if let Some(rs) = rot.as_ref() {
                    if let Some(out) = self.try_splitting(g, beta, rs, trace)? {
                        return Ok(out);
                    }
                }
            }
        }
        if n > self.cfg.max_direct_vertices {
            return Ok(SolveOutcome::Refused(format!(
                "no reduction applies and n={n} exceeds the direct-search limit {}",
                self.cfg.max_direct_vertices
            )));
        }
        self.search(g, beta, trace)
    }

    fn try_forbidden(
        &mut self,
        g: &Multigraph,
        beta: &Boundary,
        rot: Option<&RotationSystem>,
        trace: &mut Vec<ReductionStep>,
    ) -> Result<Option<SolveOutcome>> {
        let Some(mode) = Mode::from_modulus(self.modulus) else {
            return Ok(None);
        };
        let Some(report) = scan_limited(g, mode, 1, 1).pop() else {
            return Ok(None);
        };
        let (lifts, target) = report.host_reduction();
        let step = match lift_first_type(g, self.modulus, &lifts, &target) {
            Ok(s) => s,
            Err(Error::InvalidArgument(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if self.cfg.lift_connectivity_check && step.lifted.edge_connectivity() < 2 * self.p as usize {
            return Ok(None);
        }
        let rot2 = rot.and_then(|r| lift_embedding(r, &lifts)).and_then(|r| r.contract_set(&step.vertices).ok());
        let beta2 = beta.push_forward(&step.map, step.after.vertex_count());
        let mark = trace.len();
        trace.push(ReductionStep::LiftFirst {
            config: Some(report.config),
            lifts: lifts.clone(),
            label: step.label,
            vertices: step.vertices.clone(),
            after: size(&step.after),
        });
        match self.solve(&step.after, &beta2, rot2, trace)? {
            SolveOutcome::Found(c) => Ok(Some(SolveOutcome::Found(pull_back_first(g, beta, &step, &c)?))),
            _ => {
                trace.truncate(mark);
                Ok(None)
            }
        }
    }

    fn try_splitting(
        &mut self,
        g: &Multigraph,
        beta: &Boundary,
        rs: &RotationSystem,
        trace: &mut Vec<ReductionStep>,
    ) -> Result<Option<SolveOutcome>> {
        let cap = self.cfg.split_threshold.unwrap_or(6 * self.p as usize - 1);
        let odd = |h: &Multigraph| h.odd_edge_connectivity().unwrap_or(usize::MAX).min(cap);
        let Some(v) = (0..g.vertex_count())
            .find(|&v| beta.get(v) == 0 && g.degree(v) >= 2 && g.degree(v) % 2 == 0)
        else {
            return Ok(None);
        };
        let need = odd(g);
        let mut cur = g.clone();
        let mut cur_rs = rs.clone();
        let mut pairs = Vec::new();
        while cur.degree(v) > 0 {
            let list = cur_rs.rotation(v).to_vec();
            let d = list.len();
            let mut chosen = None;
            for i in 0..d {
                let (e1, e2) = (list[i], list[(i + 1) % d]);
                let (w1, w2) = (cur_rs.other(e1, v), cur_rs.other(e2, v));
                if w1 == w2 {
                    continue;
                }
                let next = cur.lift(v, w1, w2)?;
                if d == 2 || odd(&next) >= need {
                    chosen = Some((e1, e2, w1, w2, next));
                    break;
                }
            }
            let Some((e1, e2, w1, w2, next)) = chosen else {
                self.anomalies.push(format!(
                    "vertex {v} of degree {d} (n={}, m={}): no consecutive pair keeps odd edge-connectivity {need}",
                    cur.vertex_count(),
                    cur.edge_count()
                ));
                return Ok(None);
            };
            cur_rs = cur_rs.lift_consecutive(v, e1, e2)?;
            cur = next;
            pairs.push((w1, w2));
        }
        let (after, beta2, step) = lift_second_type(g, beta, v, &[], &pairs)?;
        let rs2 = cur_rs.delete_vertex(v);
        debug_assert!(rs2.matches(&after));
        let mark = trace.len();
        trace.push(ReductionStep::LiftSecond {
            step: step.clone(),
            after: size(&after),
        });
        match self.solve(&after, &beta2, Some(rs2), trace)? {
            SolveOutcome::Found(c) => Ok(Some(SolveOutcome::Found(pull_back_second(g, beta, &step, &c)?))),
            _ => {
                trace.truncate(mark);
                Ok(None)
            }
        }
    }
}

/// Performs the lifts on the embedding when each pair is consecutive at its
/// vertex.
fn lift_embedding(rs: &RotationSystem, lifts: &[(usize, usize, usize)]) -> Option<RotationSystem> {
    let mut cur = rs.clone();
    for &(v, w1, w2) in lifts {
        let list = cur.rotation(v).to_vec();
        let d = list.len();
        let found = (0..d).find_map(|i| {
            let (a, b) = (list[i], list[(i + 1) % d]);
            let (x, y) = (cur.other(a, v), cur.other(b, v));
            if (x, y) == (w1, w2) {
                Some((a, b))
            } else if (x, y) == (w2, w1) {
                Some((b, a))
            } else {
                None
            }
        })?;
        cur = cur.lift_consecutive(v, found.0, found.1).ok()?;
    }
    Some(cur)
}

/// Looks for an orientation of `g` achieving `beta`, reducing first.
pub fn solve_with_boundary(
    g: &Multigraph,
    beta: &Boundary,
    rot: Option<&RotationSystem>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let modulus = beta.modulus();
    if Mode::from_modulus(modulus).is_none() {
        return invalid(format!("solver supports moduli 5 and 7, got {modulus}"));
    }
    if beta.len() != g.vertex_count() {
        return invalid("boundary length differs from the vertex count");
    }
    if let Some(rs) = rot {
        if !rs.matches(g) {
            return invalid("rotation system does not match the graph");
        }
        rs.faces()?;
    }
    let mut solver = Solver {
        cfg,
        p: (modulus - 1) / 2,
        modulus,
        steps: 0,
        anomalies: Vec::new(),
    };
    let mut trace = Vec::new();
    let outcome = solver.solve(g, beta, rot.cloned(), &mut trace)?;
    if let SolveOutcome::Found(c) = &outcome {
        verify_certificate(g, beta, c)
            .map_err(|e| Error::Internal(format!("solver certificate rejected: {e}")))?;
    }
    replay_trace(g, beta, &trace)?;
    Ok(SolveReport {
        outcome,
        trace,
        anomalies: solver.anomalies,
    })
}

/// Modulo `(2p+1)`-orientation of `g` for `p ∈ {2, 3}`.
pub fn solve_planar(
    g: &Multigraph,
    p: u32,
    rot: Option<&RotationSystem>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    if !(p == 2 || p == 3) {
        return invalid(format!("p must be 2 or 3, got {p}"));
    }
    let beta = Boundary::zero(2 * p + 1, g.vertex_count())?;
    solve_with_boundary(g, &beta, rot, cfg)
}

/// Re-applies every step of `trace` to `g` and `beta`, checking the recorded
/// sizes, the planarity guard, the catalog membership of contracted graphs
/// and that the trace ends with a search. Returns the final graph and
/// boundary.
pub fn replay_trace(
    g: &Multigraph,
    beta: &Boundary,
    trace: &[ReductionStep],
) -> Result<(Multigraph, Boundary)> {
    let modulus = beta.modulus();
    let catalog = strong_catalog(modulus)?;
    let mut cur = g.clone();
    let mut b = beta.clone();
    let bad = |i: usize, msg: String| Error::Rejected(format!("trace step {}: {msg}", i + 1));
    for (i, step) in trace.iter().enumerate() {
        match step {
            ReductionStep::ContractStrong { label, vertices, after }
            | ReductionStep::LiftFirst { label, vertices, after, .. } => {
                let lifts: &[(usize, usize, usize)] = match step {
                    ReductionStep::LiftFirst { lifts, .. } => lifts,
                    _ => &[],
                };
                lift_guard(&cur, lifts).map_err(|e| bad(i, e.to_string()))?;
                let lifted = apply_lifts(&cur, lifts)
                    .map_err(|e| bad(i, e.to_string()))?
                    .pop()
                    .expect("nonempty");
                if !catalog.iter().any(|e| e.label == *label) {
                    return Err(bad(i, format!("{label} is not in the strong catalog")));
                }
                let h = label.build()?;
                if vertices.len() != h.vertex_count()
                    || vertices.iter().any(|&v| v >= lifted.vertex_count())
                    || vertices.iter().collect::<BTreeSet<_>>().len() != vertices.len()
                    || h.classes().any(|(a, c, m)| lifted.mult(vertices[a], vertices[c]) < m)
                {
                    return Err(bad(i, format!("{label} is not placed on vertices {vertices:?}")));
                }
                let (next, map) = lifted.contract(vertices)?;
                if size(&next) != *after {
                    return Err(bad(i, format!("size {:?}, trace says {after:?}", size(&next))));
                }
                b = b.push_forward(&map, next.vertex_count());
                cur = next;
            }
            ReductionStep::LiftSecond { step, after } => {
                let (next, b2, redo) = lift_second_type(&cur, &b, step.vertex, &step.oriented, &step.lifts)
                    .map_err(|e| bad(i, e.to_string()))?;
                if size(&next) != *after || redo.deltas != step.deltas {
                    return Err(bad(i, "second-type step does not reproduce".into()));
                }
                cur = next;
                b = b2;
            }
            ReductionStep::Exhaustive { n, m, .. } => {
                if (*n, *m) != size(&cur) {
                    return Err(bad(i, format!("search on n={n}, m={m} but graph has {:?}", size(&cur))));
                }
                if i + 1 != trace.len() {
                    return Err(bad(i, "search must be the last step".into()));
                }
            }
        }
    }
    if !matches!(trace.last(), Some(ReductionStep::Exhaustive { .. })) {
        return Err(Error::Rejected("trace does not end with a search".into()));
    }
    Ok((cur, b))
}
