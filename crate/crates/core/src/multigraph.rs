//! Loop-free multigraphs stored as parallel classes.
//!
//! Vertices are `0..n`. Parallel edges are never materialized individually;
//! a class `{u, v}` carries its multiplicity `μ(uv)`. Every operation returns
//! a fresh value.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Unordered vertex pair, always stored with `u < v`.
pub type Pair = (usize, usize);

pub(crate) fn pair(u: usize, v: usize) -> Pair {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Multigraph {
    n: usize,
    classes: BTreeMap<Pair, usize>,
}

/// How [`Multigraph::subdivide`] picks the class whose copy is subdivided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subdivision {
    /// The lexicographically least class of maximum multiplicity.
    MaxMultiplicity,
    /// An explicitly named class.
    Class(usize, usize),
}

impl Multigraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Multigraph {
            n,
            classes: BTreeMap::new(),
        }
    }

    /// Builds a graph from `(u, v, multiplicity)` triples. Repeated pairs add up.
    pub fn from_classes<I>(n: usize, classes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let mut g = Multigraph::new(n);
        for (u, v, m) in classes {
            g.add_edges(u, v, m)?;
        }
        Ok(g)
    }

    /// `k` parallel copies of the cycle `C_n` (`n >= 2`).
    pub fn kcycle(k: usize, n: usize) -> Result<Self> {
        if n < 2 || k == 0 {
            return invalid(format!("kcycle needs n >= 2 and k >= 1, got k={k}, n={n}"));
        }
        let mut g = Multigraph::new(n);
        if n == 2 {
            g.add_edges(0, 1, 2 * k)?;
        } else {
            for i in 0..n {
                g.add_edges(i, (i + 1) % n, k)?;
            }
        }
        Ok(g)
    }

    pub fn add_edges(&mut self, u: usize, v: usize, m: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return invalid(format!("loop at vertex {u}"));
        }
        if m == 0 {
            return Ok(());
        }
        *self.classes.entry(pair(u, v)).or_insert(0) += m;
        Ok(())
    }

    pub fn remove_edges(&mut self, u: usize, v: usize, m: usize) -> Result<()> {
        let key = pair(u, v);
        let have = self.classes.get(&key).copied().unwrap_or(0);
        if have < m {
            return invalid(format!("class {{{u},{v}}} has multiplicity {have}, cannot remove {m}"));
        }
        if have == m {
            self.classes.remove(&key);
        } else {
            self.classes.insert(key, have - m);
        }
        Ok(())
    }

    /// Appends an isolated vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return invalid(format!("vertex {v} out of range (n = {})", self.n));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// `‖G‖`, the number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.classes.values().sum()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn mult(&self, u: usize, v: usize) -> usize {
        if u == v {
            return 0;
        }
        self.classes.get(&pair(u, v)).copied().unwrap_or(0)
    }

    /// Classes in lexicographic order of `(u, v)` with `u < v`.
    pub fn classes(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.classes.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.classes
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for (&(u, v), &m) in &self.classes {
            d[u] += m;
            d[v] += m;
        }
        d
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// `μ(G)`, zero for edgeless graphs.
    pub fn max_multiplicity(&self) -> usize {
        self.classes.values().copied().max().unwrap_or(0)
    }

    /// Neighbours of `v` with multiplicities, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .classes
            .iter()
            .filter_map(|(&(a, b), &m)| {
                if a == v {
                    Some((b, m))
                } else if b == v {
                    Some((a, m))
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Dense symmetric multiplicity matrix.
    pub fn matrix(&self) -> Vec<Vec<usize>> {
        let mut a = vec![vec![0; self.n]; self.n];
        for (&(u, v), &m) in &self.classes {
            a[u][v] = m;
            a[v][u] = m;
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        self.components().iter().all(|&c| c == 0)
    }

    /// Component id per vertex, ids assigned in order of least vertex.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in self.classes.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut inside = vec![false; self.n];
        for &v in set {
            self.check_vertex(v)?;
            inside[v] = true;
        }
        Ok(inside)
    }

    /// `d(X) = |[X, Xᶜ]|`. Requires `∅ ≠ X ≠ V(G)`.
    pub fn cut_size(&self, set: &[usize]) -> Result<usize> {
        let inside = self.membership(set)?;
        let k = inside.iter().filter(|&&b| b).count();
        if k == 0 || k == self.n {
            return invalid("cut side must be a proper nonempty vertex subset");
        }
        Ok(self.cut_of_mask(&inside))
    }

    pub(crate) fn cut_of_mask(&self, inside: &[bool]) -> usize {
        self.classes
            .iter()
            .filter(|(&(u, v), _)| inside[u] != inside[v])
            .map(|(_, &m)| m)
            .sum()
    }

    /// Minimum cut over all proper nonempty vertex subsets; zero when the
    /// graph is disconnected or has fewer than two vertices.
    pub fn edge_connectivity(&self) -> usize {
        if self.n < 2 {
            return 0;
        }
        self.cut_tree()
            .iter()
            .map(|e| e.weight)
            .min()
            .unwrap_or(0)
    }

    /// Size of the smallest odd edge cut, or `None` when every cut is even.
    ///
    /// A cut `d(X)` is odd exactly when `X` holds an odd number of odd-degree
    /// vertices, and the smallest such cut is a fundamental cut of any
    /// Gomory–Hu tree.
    pub fn odd_edge_connectivity(&self) -> Option<usize> {
        if self.n < 2 {
            return None;
        }
        let deg = self.degrees();
        let tree = self.cut_tree();
        tree.iter()
            .filter(|e| {
                e.side
                    .iter()
                    .enumerate()
                    .filter(|&(v, &inside)| inside && deg[v] % 2 == 1)
                    .count()
                    % 2
                    == 1
            })
            .map(|e| e.weight)
            .min()
    }

    /// Gomory–Hu cut tree (Gusfield's construction). One entry per tree edge,
    /// each carrying its fundamental cut.
    pub(crate) fn cut_tree(&self) -> Vec<TreeCut> {
        let n = self.n;
        let cap = self.matrix();
        let mut parent = vec![0usize; n];
        let mut flow = vec![0usize; n];
        for s in 1..n {
            let t = parent[s];
            let (value, side) = max_flow_min_cut(&cap, s, t);
            flow[s] = value;
            for i in 0..n {
                if i != s && side[i] && parent[i] == t {
                    parent[i] = s;
                }
            }
            if side[parent[t]] {
                parent[s] = parent[t];
                parent[t] = s;
                flow[s] = flow[t];
                flow[t] = value;
            }
        }
        // Fundamental cut of edge (s, parent[s]) is the subtree below s.
        let mut children = vec![Vec::new(); n];
        let root = (0..n).find(|&v| parent[v] == v || (v == 0 && parent[0] == 0));
        let root = root.unwrap_or(0);
        for v in 0..n {
            if v != root {
                children[parent[v]].push(v);
            }
        }
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for s in 0..n {
            if s == root {
                continue;
            }
            let mut side = vec![false; n];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                side[x] = true;
                stack.extend(children[x].iter().copied());
            }
            out.push(TreeCut {
                weight: flow[s],
                side,
            });
        }
        out
    }

    /// Identifies all of `set` into one vertex and drops the resulting loops.
    ///
    /// Returns the contracted graph and the map old vertex → new vertex. The
    /// merged vertex takes the position of the least member of `set`; every
    /// other vertex keeps its relative order.
    pub fn contract(&self, set: &[usize]) -> Result<(Multigraph, Vec<usize>)> {
        let inside = self.membership(set)?;
        let Some(rep) = inside.iter().position(|&b| b) else {
            return invalid("cannot contract an empty vertex set");
        };
        let mut map = vec![0; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if inside[v] && v != rep {
                continue;
            }
            map[v] = next;
            next += 1;
        }
        for v in 0..self.n {
            if inside[v] {
                map[v] = map[rep];
            }
        }
        Ok((self.quotient(&map, next), map))
    }

    /// Image of the graph under a vertex map into `0..target_n`; classes whose
    /// ends collide vanish, classes landing on the same pair merge.
    pub fn quotient(&self, map: &[usize], target_n: usize) -> Multigraph {
        let mut g = Multigraph::new(target_n);
        for (&(u, v), &m) in &self.classes {
            let (a, b) = (map[u], map[v]);
            if a != b {
                *g.classes.entry(pair(a, b)).or_insert(0) += m;
            }
        }
        g
    }

    /// Replaces `w₁v, vw₂` by a new edge `w₁w₂`; `v` stays (maybe isolated).
    pub fn lift(&self, v: usize, w1: usize, w2: usize) -> Result<Multigraph> {
        self.check_vertex(v)?;
        self.check_vertex(w1)?;
        self.check_vertex(w2)?;
        if w1 == w2 {
            return invalid(format!("lifting {w1}{v}, {v}{w2} would create a loop"));
        }
        if self.mult(w1, v) == 0 || self.mult(v, w2) == 0 {
            return invalid(format!("lift at {v} needs edges {w1}{v} and {v}{w2}"));
        }
        let mut g = self.clone();
        g.remove_edges(w1, v, 1)?;
        g.remove_edges(v, w2, 1)?;
        g.add_edges(w1, w2, 1)?;
        Ok(g)
    }

    /// Replaces one copy of a class by a path of length two through a new
    /// vertex, which gets index `n`.
    pub fn subdivide(&self, how: Subdivision) -> Result<Multigraph> {
        let (u, v) = match how {
            Subdivision::MaxMultiplicity => {
                let top = self.max_multiplicity();
                match self.classes.iter().find(|(_, &m)| m == top && m > 0) {
                    Some((&p, _)) => p,
                    None => return invalid("cannot subdivide an edgeless graph"),
                }
            }
            Subdivision::Class(u, v) => (u, v),
        };
        if self.mult(u, v) == 0 {
            return invalid(format!("class {{{u},{v}}} is absent"));
        }
        let mut g = self.clone();
        g.remove_edges(u, v, 1)?;
        let z = g.add_vertex();
        g.add_edges(u, z, 1)?;
        g.add_edges(z, v, 1)?;
        Ok(g)
    }

    /// Induced subgraph on `set`, relabelled to `0..|set|` in ascending order.
    /// Returns the subgraph and the sorted list of original vertices.
    pub fn induced(&self, set: &[usize]) -> Result<(Multigraph, Vec<usize>)> {
        let inside = self.membership(set)?;
        let verts: Vec<usize> = (0..self.n).filter(|&v| inside[v]).collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let mut h = Multigraph::new(verts.len());
        for (&(u, v), &m) in &self.classes {
            if inside[u] && inside[v] {
                h.classes.insert((index[u], index[v]), m);
            }
        }
        Ok((h, verts))
    }

    /// Removes `v` and its edges; later vertices shift down by one.
    pub fn delete_vertex(&self, v: usize) -> Result<Multigraph> {
        self.check_vertex(v)?;
        let mut g = Multigraph::new(self.n - 1);
        let shift = |x: usize| if x > v { x - 1 } else { x };
        for (&(a, b), &m) in &self.classes {
            if a != v && b != v {
                g.classes.insert((shift(a), shift(b)), m);
            }
        }
        Ok(g)
    }

    /// Renames vertex `v` to `perm[v]`; `perm` must be a permutation.
    pub fn relabel(&self, perm: &[usize]) -> Result<Multigraph> {
        if perm.len() != self.n {
            return invalid("permutation length differs from vertex count");
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return invalid("not a permutation");
            }
            seen[p] = true;
        }
        let mut g = Multigraph::new(self.n);
        for (&(u, v), &m) in &self.classes {
            g.classes.insert(pair(perm[u], perm[v]), m);
        }
        Ok(g)
    }

    /// `true` when every class of `self` has at most the multiplicity of the
    /// same class in `other` (same vertex set).
    pub fn is_dominated_by(&self, other: &Multigraph) -> bool {
        self.n == other.n && self.classes().all(|(u, v, m)| other.mult(u, v) >= m)
    }
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multigraph(n={}, {{", self.n)?;
        for (i, (u, v, m)) in self.classes().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}{v}:{m}")?;
        }
        write!(f, "}})")
    }
}

pub(crate) struct TreeCut {
    pub weight: usize,
    pub side: Vec<bool>,
}

/// Edmonds–Karp on a dense symmetric capacity matrix. Returns the flow value
/// and the source side of a minimum cut.
fn max_flow_min_cut(cap: &[Vec<usize>], s: usize, t: usize) -> (usize, Vec<bool>) {
    let n = cap.len();
    let mut residual: Vec<Vec<i64>> = cap
        .iter()
        .map(|row| row.iter().map(|&c| c as i64).collect())
        .collect();
    let mut total = 0usize;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for y in 0..n {
                if prev[y] == usize::MAX && residual[x][y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[t] == usize::MAX {
            let side = prev.iter().map(|&p| p != usize::MAX).collect();
            return (total, side);
        }
        let mut bottleneck = i64::MAX;
        let mut y = t;
        while y != s {
            let x = prev[y];
            bottleneck = bottleneck.min(residual[x][y]);
            y = x;
        }
        let mut y = t;
        while y != s {
            let x = prev[y];
            residual[x][y] -= bottleneck;
            residual[y][x] += bottleneck;
            y = x;
        }
        total += bottleneck as usize;
    }
}

/// Exhaustive isomorphism test (multiplicity-preserving bijection). Intended
/// for the small named graphs only.
pub fn isomorphism(a: &Multigraph, b: &Multigraph) -> Option<Vec<usize>> {
    if a.n != b.n || a.edge_count() != b.edge_count() || a.class_count() != b.class_count() {
        return None;
    }
    let (da, db) = (a.degrees(), b.degrees());
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut map = vec![usize::MAX; a.n];
    let mut used = vec![false; b.n];
    fn extend(
        i: usize,
        ma: &[Vec<usize>],
        mb: &[Vec<usize>],
        da: &[usize],
        db: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == map.len() {
            return true;
        }
        for j in 0..used.len() {
            if used[j] || da[i] != db[j] {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[j][map[k]]) {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if extend(i + 1, ma, mb, da, db, map, used) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    if extend(0, &ma, &mb, &da, &db, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}
