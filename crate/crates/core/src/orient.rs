//! Boundaries, β-orientations, strong connectivity and flow conversion.
//!
//! An orientation is stored per parallel class as a net count
//! `o(u,v) = #(u→v) − #(v→u)` for `u < v`. Individual copies only matter when
//! converting to flows.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::multigraph::{pair, Multigraph, Pair};

fn check_modulus(k: u32) -> Result<()> {
    if k < 3 || k % 2 == 0 || k > 63 {
        return invalid(format!("modulus must be odd and in 3..=63, got {k}"));
    }
    Ok(())
}

fn residue(x: i64, k: u32) -> u32 {
    x.rem_euclid(k as i64) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Boundary {
    modulus: u32,
    values: Vec<u32>,
}

impl Boundary {
    /// Values are reduced mod `modulus`; their sum must vanish.
    pub fn new(modulus: u32, values: Vec<i64>) -> Result<Self> {
        check_modulus(modulus)?;
        let values: Vec<u32> = values.into_iter().map(|x| residue(x, modulus)).collect();
        let sum: u64 = values.iter().map(|&x| x as u64).sum();
        if sum % modulus as u64 != 0 {
            return invalid(format!("boundary values sum to {sum}, not 0 mod {modulus}"));
        }
        Ok(Boundary { modulus, values })
    }

    pub fn zero(modulus: u32, n: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Boundary {
            modulus,
            values: vec![0; n],
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.values[v]
    }

    pub fn negated(&self) -> Boundary {
        let k = self.modulus;
        Boundary {
            modulus: k,
            values: self.values.iter().map(|&x| (k - x) % k).collect(),
        }
    }

    /// Boundary on a quotient: each new vertex gets the sum over its preimage.
    pub fn push_forward(&self, map: &[usize], target_n: usize) -> Boundary {
        let k = self.modulus;
        let mut values = vec![0u32; target_n];
        for (v, &x) in self.values.iter().enumerate() {
            values[map[v]] = (values[map[v]] + x) % k;
        }
        Boundary { modulus: k, values }
    }

    fn check_len(&self, g: &Multigraph) -> Result<()> {
        if self.values.len() != g.vertex_count() {
            return invalid(format!(
                "boundary has {} values but the graph has {} vertices",
                self.values.len(),
                g.vertex_count()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationCertificate {
    pub modulus: u32,
    /// Net count per class, keyed by `(u, v)` with `u < v`.
    pub nets: BTreeMap<Pair, i64>,
}

impl OrientationCertificate {
    pub fn new(modulus: u32) -> Self {
        OrientationCertificate {
            modulus,
            nets: BTreeMap::new(),
        }
    }

    /// Net of the class `{u, v}` seen from `u`.
    pub fn net_from(&self, u: usize, v: usize) -> i64 {
        let o = self.nets.get(&pair(u, v)).copied().unwrap_or(0);
        if u < v {
            o
        } else {
            -o
        }
    }

    /// Number of copies of `{u, v}` oriented away from `u`.
    pub fn out_copies(&self, g: &Multigraph, u: usize, v: usize) -> usize {
        let m = g.mult(u, v) as i64;
        ((m + self.net_from(u, v)) / 2) as usize
    }

    /// `d⁺(v) − d⁻(v)` for every vertex, as plain integers.
    pub fn outflow(&self, n: usize) -> Vec<i64> {
        let mut out = vec![0i64; n];
        for (&(u, v), &o) in &self.nets {
            if u < n && v < n {
                out[u] += o;
                out[v] -= o;
            }
        }
        out
    }

    /// Reverses every edge.
    pub fn reversed(&self) -> OrientationCertificate {
        OrientationCertificate {
            modulus: self.modulus,
            nets: self.nets.iter().map(|(&p, &o)| (p, -o)).collect(),
        }
    }
}

/// Checks `cert` against `g` and `beta` from scratch.
pub fn verify_certificate(g: &Multigraph, beta: &Boundary, cert: &OrientationCertificate) -> Result<()> {
    beta.check_len(g)?;
    if cert.modulus != beta.modulus {
        return Err(Error::Rejected(format!(
            "certificate modulus {} differs from boundary modulus {}",
            cert.modulus, beta.modulus
        )));
    }
    for (&(u, v), &o) in &cert.nets {
        let m = g.mult(u, v) as i64;
        if m == 0 {
            return Err(Error::Rejected(format!("net given for absent class {{{u},{v}}}")));
        }
        if o.abs() > m || (o - m) % 2 != 0 {
            return Err(Error::Rejected(format!(
                "class {{{u},{v}}} has multiplicity {m}; net {o} is impossible"
            )));
        }
    }
    for (u, v, m) in g.classes() {
        if !cert.nets.contains_key(&(u, v)) && m % 2 == 1 {
            return Err(Error::Rejected(format!("class {{{u},{v}}} has no net")));
        }
    }
    let out = cert.outflow(g.vertex_count());
    for (v, &x) in out.iter().enumerate() {
        let r = residue(x, beta.modulus);
        if r != beta.get(v) {
            return Err(Error::Rejected(format!(
                "vertex {v}: d+ - d- = {x} = {r} mod {}, expected {}",
                beta.modulus,
                beta.get(v)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Search nodes visited before giving up.
    pub max_nodes: u64,
    /// Stored failing states in the memo table.
    pub max_memo: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 20_000_000,
            max_memo: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search {
    Found(OrientationCertificate),
    /// The search space was exhausted. `space` is `Π (μ+1)` over the classes
    /// (saturating), `nodes` the number of partial assignments visited.
    Refuted { space: u128, nodes: u64 },
    /// The node budget ran out first; nothing was proved.
    Refused { nodes: u64 },
}

impl Search {
    pub fn certificate(&self) -> Option<&OrientationCertificate> {
        match self {
            Search::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Search::Refuted { .. })
    }
}

/// Product of `μ+1` over all classes, saturating.
pub fn orientation_space(g: &Multigraph) -> u128 {
    g.classes()
        .fold(1u128, |acc, (_, _, m)| acc.saturating_mul(m as u128 + 1))
}

fn rotate(mask: u64, r: u32, k: u32) -> u64 {
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let r = r % k;
    if r == 0 {
        return mask;
    }
    ((mask << r) | (mask >> (k - r))) & full
}

/// Per-class candidate nets: one net per reachable residue.
fn candidate_nets(m: usize, k: u32) -> Vec<i64> {
    let count = (m + 1).min(k as usize);
    (0..count).map(|j| -(m as i64) + 2 * j as i64).collect()
}

/// Vertex order that keeps the set of half-processed vertices small.
fn frontier_order(g: &Multigraph) -> Vec<usize> {
    let n = g.vertex_count();
    let a = g.matrix();
    let deg = g.degrees();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut link = vec![0usize; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (link[v], deg[v], std::cmp::Reverse(v)))
            .unwrap();
        placed[next] = true;
        order.push(next);
        for (w, l) in link.iter_mut().enumerate() {
            *l += a[next][w];
        }
    }
    order
}

struct Kernel {
    k: u32,
    n: usize,
    /// (u, v, candidate nets) in processing order.
    classes: Vec<(usize, usize, Vec<i64>)>,
    /// reach[i * n + v]: residues vertex v can still collect from classes i..
    reach: Vec<u64>,
    /// Vertices touched by classes before i and after it.
    frontier: Vec<Vec<usize>>,
    target: Vec<u32>,
}

impl Kernel {
    fn new(g: &Multigraph, target: &[u32], k: u32) -> Kernel {
        let n = g.vertex_count();
        let order = frontier_order(g);
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut classes: Vec<(usize, usize, Vec<i64>)> = g
            .classes()
            .map(|(u, v, m)| (u, v, candidate_nets(m, k)))
            .collect();
        classes.sort_by_key(|&(u, v, _)| (pos[u].max(pos[v]), pos[u].min(pos[v])));
        let len = classes.len();
        let mut reach = vec![0u64; (len + 1) * n];
        for v in 0..n {
            reach[len * n + v] = 1;
        }
        for i in (0..len).rev() {
            let (lo, hi) = reach.split_at_mut((i + 1) * n);
            lo[i * n..].copy_from_slice(&hi[..n]);
            let (u, v, ref nets) = classes[i];
            let mut ru = 0;
            let mut rv = 0;
            for &o in nets {
                ru |= rotate(hi[u], residue(o, k), k);
                rv |= rotate(hi[v], residue(-o, k), k);
            }
            lo[i * n + u] = ru;
            lo[i * n + v] = rv;
        }
        let mut first = vec![usize::MAX; n];
        let mut last = vec![0; n];
        for (i, &(u, v, _)) in classes.iter().enumerate() {
            for x in [u, v] {
                first[x] = first[x].min(i);
                last[x] = i;
            }
        }
        let frontier = (0..=len)
            .map(|i| (0..n).filter(|&v| first[v] < i && last[v] >= i).collect())
            .collect();
        Kernel {
            k,
            n,
            classes,
            reach,
            frontier,
            target: target.to_vec(),
        }
    }

    fn feasible(&self, i: usize, v: usize, cur: u32) -> bool {
        let need = (self.target[v] + self.k - cur) % self.k;
        self.reach[i * self.n + v] >> need & 1 == 1
    }
}

struct Dfs<'a> {
    ker: &'a Kernel,
    cur: Vec<u32>,
    chosen: Vec<i64>,
    nodes: u64,
    limits: SearchLimits,
    dead: HashSet<Vec<u32>>,
    out_of_budget: bool,
}

impl Dfs<'_> {
    fn key(&self, i: usize) -> Vec<u32> {
        let mut key = Vec::with_capacity(self.ker.frontier[i].len() + 1);
        key.push(i as u32);
        key.extend(self.ker.frontier[i].iter().map(|&v| self.cur[v]));
        key
    }

    fn run(&mut self, i: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            self.out_of_budget = true;
            return false;
        }
        let ker = self.ker;
        if i == ker.classes.len() {
            return true;
        }
        let key = self.key(i);
        if self.dead.contains(&key) {
            return false;
        }
        let (u, v, ref nets) = ker.classes[i];
        let k = ker.k;
        for &o in nets {
            let (cu, cv) = (self.cur[u], self.cur[v]);
            self.cur[u] = (cu + residue(o, k)) % k;
            self.cur[v] = (cv + residue(-o, k)) % k;
            if ker.feasible(i + 1, u, self.cur[u]) && ker.feasible(i + 1, v, self.cur[v]) {
                self.chosen[i] = o;
                if self.run(i + 1) {
                    return true;
                }
            }
            self.cur[u] = cu;
            self.cur[v] = cv;
            if self.out_of_budget {
                return false;
            }
        }
        if self.dead.len() < self.limits.max_memo {
            self.dead.insert(key);
        }
        false
    }
}

/// Searches for an orientation of `g` with `d⁺(v) − d⁻(v) ≡ β(v)` everywhere.
pub fn beta_orientation(g: &Multigraph, beta: &Boundary, limits: SearchLimits) -> Result<Search> {
    beta.check_len(g)?;
    let k = beta.modulus;
    let ker = Kernel::new(g, &beta.values, k);
    let space = orientation_space(g);
    if (0..g.vertex_count()).any(|v| !ker.feasible(0, v, 0)) {
        return Ok(Search::Refuted { space, nodes: 0 });
    }
    let mut dfs = Dfs {
        ker: &ker,
        cur: vec![0; g.vertex_count()],
        chosen: vec![0; ker.classes.len()],
        nodes: 0,
        limits,
        dead: HashSet::new(),
        out_of_budget: false,
    };
    if dfs.run(0) {
        let mut cert = OrientationCertificate::new(k);
        for (i, &(u, v, _)) in ker.classes.iter().enumerate() {
            cert.nets.insert((u, v), dfs.chosen[i]);
        }
        debug_assert!(verify_certificate(g, beta, &cert).is_ok());
        return Ok(Search::Found(cert));
    }
    if dfs.out_of_budget {
        return Ok(Search::Refused { nodes: dfs.nodes });
    }
    Ok(Search::Refuted {
        space,
        nodes: dfs.nodes,
    })
}

/// Orientation with `d⁺ − d⁻ ≡ 0 (mod 2p+1)` at every vertex.
pub fn mod_orientation(g: &Multigraph, p: u32, limits: SearchLimits) -> Result<Search> {
    if p == 0 {
        return invalid("p must be at least 1");
    }
    let beta = Boundary::zero(2 * p + 1, g.vertex_count())?;
    beta_orientation(g, &beta, limits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrongLimits {
    pub max_vertices: usize,
    /// Above this many boundaries the set-based sweep is replaced by
    /// per-boundary searches.
    pub max_states: u64,
    pub search: SearchLimits,
}

impl Default for StrongLimits {
    fn default() -> Self {
        StrongLimits {
            max_vertices: 12,
            max_states: 1 << 26,
            search: SearchLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strong {
    Yes,
    /// `witness` is the lexicographically least unachievable boundary.
    No { witness: Boundary },
}

impl Strong {
    pub fn is_yes(&self) -> bool {
        matches!(self, Strong::Yes)
    }
}

/// Decides whether every `Z_k`-boundary of `g` is achievable.
pub fn strongly_connected(g: &Multigraph, modulus: u32, limits: StrongLimits) -> Result<Strong> {
    check_modulus(modulus)?;
    let n = g.vertex_count();
    if n == 0 {
        return invalid("graph has no vertices");
    }
    if n > limits.max_vertices {
        return Err(Error::Refused(format!(
            "strong connectivity check limited to {} vertices, graph has {n}",
            limits.max_vertices
        )));
    }
    let k = modulus as u64;
    let states = k.checked_pow(n as u32 - 1);
    match states {
        Some(s) if s <= limits.max_states => Ok(achievable_sweep(g, modulus)),
        _ => per_boundary(g, modulus, limits),
    }
}

/// Boundaries coded by their first `n−1` values, vertex 0 most significant.
fn decode(code: u64, n: usize, k: u32) -> Vec<i64> {
    let mut vals = vec![0i64; n];
    let mut c = code;
    for v in (0..n - 1).rev() {
        vals[v] = (c % k as u64) as i64;
        c /= k as u64;
    }
    let s: i64 = vals.iter().sum();
    vals[n - 1] = (-s).rem_euclid(k as i64);
    vals
}

fn achievable_sweep(g: &Multigraph, k: u32) -> Strong {
    let n = g.vertex_count();
    let kk = k as u64;
    let total = kk.pow(n as u32 - 1) as usize;
    // weight of vertex v's digit; the last vertex is implied.
    let pw: Vec<u64> = (0..n)
        .map(|v| if v + 1 < n { kk.pow((n - 2 - v) as u32) } else { 0 })
        .collect();
    let words = total.div_ceil(64);
    let mut set = vec![0u64; words];
    set[0] = 1;
    let mut next = vec![0u64; words];
    for (u, v, m) in g.classes() {
        let shifts: Vec<u32> = candidate_nets(m, k).iter().map(|&o| residue(o, k)).collect();
        next.iter_mut().for_each(|w| *w = 0);
        for (wi, &word) in set.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let code = (wi * 64 + b) as u64;
                let du = if pw[u] > 0 { code / pw[u] % kk } else { 0 };
                let dv = if pw[v] > 0 { code / pw[v] % kk } else { 0 };
                for &r in &shifts {
                    let r = r as u64;
                    let mut c = code;
                    if pw[u] > 0 {
                        c = c - du * pw[u] + (du + r) % kk * pw[u];
                    }
                    if pw[v] > 0 {
                        c = c - dv * pw[v] + (dv + kk - r) % kk * pw[v];
                    }
                    next[c as usize / 64] |= 1u64 << (c % 64);
                }
            }
        }
        std::mem::swap(&mut set, &mut next);
    }
    for code in 0..total {
        if set[code / 64] >> (code % 64) & 1 == 0 {
            let witness = Boundary::new(k, decode(code as u64, n, k)).expect("coded boundaries sum to zero");
            return Strong::No { witness };
        }
    }
    Strong::Yes
}

fn per_boundary(g: &Multigraph, k: u32, limits: StrongLimits) -> Result<Strong> {
    let n = g.vertex_count();
    let total = (k as u64).checked_pow(n as u32 - 1).ok_or_else(|| {
        Error::Refused("boundary count overflows".into())
    })?;
    for code in 0..total {
        let beta = Boundary::new(k, decode(code, n, k))?;
        match beta_orientation(g, &beta, limits.search)? {
            Search::Found(_) => {}
            Search::Refuted { .. } => return Ok(Strong::No { witness: beta }),
            Search::Refused { nodes } => {
                return Err(Error::Refused(format!(
                    "search budget exhausted after {nodes} nodes on boundary {:?}",
                    beta.values
                )))
            }
        }
    }
    Ok(Strong::Yes)
}

/// Copies `contracted` back onto `g` and solves the remaining boundary on the
/// subgraph `h`.
///
/// `h_vertices[i]` is the vertex of `g` playing the role of vertex `i` of `h`;
/// `h` must be dominated by the corresponding part of `g`. `contracted` is an
/// orientation of `g` with `h_vertices` identified (see
/// [`Multigraph::contract`]) achieving the pushed-forward boundary. Copies of
/// edges inside `h_vertices` that `h` does not use are oriented from the lower
/// to the higher index.
pub fn extend_orientation(
    g: &Multigraph,
    beta: &Boundary,
    h_vertices: &[usize],
    h: &Multigraph,
    contracted: &OrientationCertificate,
    limits: SearchLimits,
) -> Result<OrientationCertificate> {
    extend_with(g, beta, h_vertices, h, contracted, |gamma| {
        Ok(match beta_orientation(h, gamma, limits)? {
            Search::Found(c) => Some(c),
            Search::Refuted { .. } => None,
            Search::Refused { nodes } => {
                return Err(Error::Refused(format!(
                    "subgraph search stopped after {nodes} nodes"
                )))
            }
        })
    })
}

pub(crate) fn extend_with<F>(
    g: &Multigraph,
    beta: &Boundary,
    h_vertices: &[usize],
    h: &Multigraph,
    contracted: &OrientationCertificate,
    mut solve_h: F,
) -> Result<OrientationCertificate>
where
    F: FnMut(&Boundary) -> Result<Option<OrientationCertificate>>,
{
    beta.check_len(g)?;
    let k = beta.modulus;
    if h.vertex_count() != h_vertices.len() {
        return invalid("subgraph vertex list does not match its size");
    }
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in h_vertices {
        if v >= n || inside[v] {
            return invalid("subgraph vertices must be distinct vertices of the graph");
        }
        inside[v] = true;
    }
    for (a, b, m) in h.classes() {
        if g.mult(h_vertices[a], h_vertices[b]) < m {
            return invalid(format!(
                "subgraph class {{{a},{b}}} exceeds the graph's multiplicity"
            ));
        }
    }
    let (gc, map) = g.contract(h_vertices)?;
    let beta_c = beta.push_forward(&map, gc.vertex_count());
    verify_certificate(&gc, &beta_c, contracted).map_err(|e| {
        Error::InvalidArgument(format!("orientation of the contracted graph: {e}"))
    })?;

    let mut cert = OrientationCertificate::new(k);
    // Classes that survive contraction.
    let merged = map[h_vertices.iter().copied().min().unwrap()];
    // Copies leaving the merged vertex towards each outside vertex.
    let mut budget: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, b, m) in gc.classes() {
        let o = contracted.nets.get(&(a, b)).copied().unwrap_or(0);
        let outs = ((m as i64 + o) / 2) as usize;
        if a == merged {
            budget.insert(b, outs);
        } else if b == merged {
            budget.insert(a, m - outs);
        }
    }
    for (u, v, m) in g.classes() {
        match (inside[u], inside[v]) {
            (false, false) => {
                let o = contracted.net_from(map[u], map[v]);
                cert.nets.insert((u, v), o);
            }
            (true, true) => {}
            (iu, _) => {
                let (s, x) = if iu { (u, v) } else { (v, u) };
                let left = budget.get_mut(&map[x]).expect("cut class present after contraction");
                let out = (*left).min(m);
                *left -= out;
                let net_s = 2 * out as i64 - m as i64;
                cert.nets.insert(pair(s, x), if s < x { net_s } else { -net_s });
            }
        }
    }
    // Unused copies inside the subgraph.
    let mut h_mult = BTreeMap::new();
    for (a, b, m) in h.classes() {
        h_mult.insert(pair(h_vertices[a], h_vertices[b]), m);
    }
    for (u, v, m) in g.classes() {
        if inside[u] && inside[v] {
            let extra = m - h_mult.get(&(u, v)).copied().unwrap_or(0);
            if extra > 0 {
                cert.nets.insert((u, v), extra as i64);
            }
        }
    }
    let partial = cert.outflow(n);
    let gamma_vals: Vec<i64> = h_vertices
        .iter()
        .map(|&v| beta.get(v) as i64 - partial[v])
        .collect();
    let gamma = Boundary::new(k, gamma_vals).map_err(|_| {
        Error::Internal("residual boundary on the subgraph does not sum to zero".into())
    })?;
    let Some(hc) = solve_h(&gamma)? else {
        return Err(Error::NotStronglyConnected {
            gamma: gamma.values.clone(),
        });
    };
    for (&(a, b), &o) in &hc.nets {
        let (x, y) = (h_vertices[a], h_vertices[b]);
        let key = pair(x, y);
        let o = if x < y { o } else { -o };
        *cert.nets.entry(key).or_insert(0) += o;
    }
    verify_certificate(g, beta, &cert)
        .map_err(|e| Error::Internal(format!("extended orientation fails verification: {e}")))?;
    Ok(cert)
}

/// One value per edge copy, on the copy directed `from → to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowValue {
    pub from: usize,
    pub to: usize,
    pub copy: usize,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZFlow {
    pub modulus: u32,
    pub values: Vec<FlowValue>,
}

/// Puts value `p` on every copy in its certificate direction.
pub fn orientation_to_zflow(g: &Multigraph, cert: &OrientationCertificate, p: u32) -> Result<ZFlow> {
    let k = 2 * p + 1;
    if cert.modulus != k {
        return invalid(format!("certificate is mod {}, expected {k}", cert.modulus));
    }
    verify_certificate(g, &Boundary::zero(k, g.vertex_count())?, cert)
        .map_err(|e| Error::InvalidArgument(format!("not a modulo {k}-orientation: {e}")))?;
    let mut values = Vec::with_capacity(g.edge_count());
    for (u, v, m) in g.classes() {
        let out = cert.out_copies(g, u, v);
        for copy in 0..m {
            let (from, to) = if copy < out { (u, v) } else { (v, u) };
            values.push(FlowValue { from, to, copy, value: p });
        }
    }
    Ok(ZFlow { modulus: k, values })
}

/// Reads an orientation back from a flow whose values are all `p` or `p+1`.
pub fn zflow_to_orientation(g: &Multigraph, flow: &ZFlow) -> Result<OrientationCertificate> {
    check_zflow(g, flow)?;
    let k = flow.modulus;
    let p = (k - 1) / 2;
    let mut cert = OrientationCertificate::new(k);
    for fv in &flow.values {
        let forward = match fv.value {
            x if x == p => true,
            x if x == p + 1 => false,
            x => return invalid(format!("flow value {x} is neither {p} nor {}", p + 1)),
        };
        let (a, b) = if forward { (fv.from, fv.to) } else { (fv.to, fv.from) };
        *cert.nets.entry(pair(a, b)).or_insert(0) += if a < b { 1 } else { -1 };
    }
    Ok(cert)
}

/// Explains why `flow` is not a nowhere-zero `Z_k`-flow on `g`.
pub fn check_zflow(g: &Multigraph, flow: &ZFlow) -> Result<()> {
    let k = flow.modulus;
    if k < 2 {
        return invalid("flow modulus must be at least 2");
    }
    let mut seen: BTreeSet<(Pair, usize)> = BTreeSet::new();
    let mut net = vec![0i64; g.vertex_count()];
    for fv in &flow.values {
        let m = g.mult(fv.from, fv.to);
        if fv.copy >= m {
            return Err(Error::Rejected(format!(
                "edge {}-{} copy {} does not exist",
                fv.from, fv.to, fv.copy
            )));
        }
        if !seen.insert((pair(fv.from, fv.to), fv.copy)) {
            return Err(Error::Rejected(format!(
                "edge {}-{} copy {} has two values",
                fv.from, fv.to, fv.copy
            )));
        }
        if fv.value % k == 0 {
            return Err(Error::Rejected(format!(
                "edge {}-{} copy {} carries zero",
                fv.from, fv.to, fv.copy
            )));
        }
        net[fv.from] += fv.value as i64;
        net[fv.to] -= fv.value as i64;
    }
    if seen.len() != g.edge_count() {
        return Err(Error::Rejected(format!(
            "{} of {} edges carry a value",
            seen.len(),
            g.edge_count()
        )));
    }
    for (v, &x) in net.iter().enumerate() {
        if x.rem_euclid(k as i64) != 0 {
            return Err(Error::Rejected(format!("conservation fails at vertex {v}")));
        }
    }
    Ok(())
}

pub fn verify_zflow(g: &Multigraph, flow: &ZFlow) -> bool {
    check_zflow(g, flow).is_ok()
}

/// `true` when no two used values sum to zero modulo the flow's modulus.
pub fn is_antisymmetric(flow: &ZFlow) -> bool {
    let k = flow.modulus;
    let used: BTreeSet<u32> = flow.values.iter().map(|fv| fv.value % k).collect();
    used.iter().all(|&a| !used.contains(&((k - a) % k)))
}

/// Integer flow with every value in `±[b, a−b]`; signed values sit on the
/// copy directed from the smaller to the larger endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircularFlow {
    pub a: u32,
    pub b: u32,
    /// `(u, v, copy, value)` with `u < v`.
    pub values: Vec<(usize, usize, usize, i64)>,
}

pub fn verify_circular_flow(g: &Multigraph, flow: &CircularFlow) -> Result<()> {
    let (lo, hi) = (flow.b as i64, flow.a as i64 - flow.b as i64);
    let mut seen = BTreeSet::new();
    let mut net = vec![0i64; g.vertex_count()];
    for &(u, v, c, x) in &flow.values {
        if u >= v || c >= g.mult(u, v) || !seen.insert((u, v, c)) {
            return Err(Error::Rejected(format!("bad edge reference {u}-{v} copy {c}")));
        }
        if x.abs() < lo || x.abs() > hi {
            return Err(Error::Rejected(format!("value {x} outside ±[{lo},{hi}]")));
        }
        net[u] += x;
        net[v] -= x;
    }
    if seen.len() != g.edge_count() {
        return Err(Error::Rejected("not every edge carries a value".into()));
    }
    if let Some(v) = net.iter().position(|&x| x != 0) {
        return Err(Error::Rejected(format!("conservation fails at vertex {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowSearch {
    Found(CircularFlow),
    Refuted { nodes: u64 },
}

/// Exhaustive search for a circular `a/b`-flow on a small graph.
pub fn find_circular_flow(g: &Multigraph, a: u32, b: u32, max_edges: usize) -> Result<FlowSearch> {
    if b == 0 || a < 2 * b {
        return invalid(format!("circular flow needs a >= 2b > 0, got {a}/{b}"));
    }
    if g.edge_count() > max_edges {
        return Err(Error::Refused(format!(
            "circular flow search limited to {max_edges} edges, graph has {}",
            g.edge_count()
        )));
    }
    let (lo, hi) = (b as i64, a as i64 - b as i64);
    let single: BTreeSet<i64> = (lo..=hi).flat_map(|x| [x, -x]).collect();
    let top = g.max_multiplicity();
    let mut sums: Vec<BTreeSet<i64>> = vec![BTreeSet::from([0])];
    for m in 1..=top {
        let prev = &sums[m - 1];
        let next: BTreeSet<i64> = prev
            .iter()
            .flat_map(|&s| single.iter().map(move |&x| s + x))
            .collect();
        sums.push(next);
    }
    let n = g.vertex_count();
    let order = frontier_order(g);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut classes: Vec<(usize, usize, usize)> = g.classes().collect();
    classes.sort_by_key(|&(u, v, _)| (pos[u].max(pos[v]), pos[u].min(pos[v])));
    let len = classes.len();
    // Largest absolute amount vertex v can still absorb from classes i..
    let mut room = vec![0i64; (len + 1) * n];
    for i in (0..len).rev() {
        for v in 0..n {
            room[i * n + v] = room[(i + 1) * n + v];
        }
        let (u, v, m) = classes[i];
        room[i * n + u] += m as i64 * hi;
        room[i * n + v] += m as i64 * hi;
    }
    struct St<'a> {
        classes: &'a [(usize, usize, usize)],
        sums: &'a [BTreeSet<i64>],
        room: &'a [i64],
        n: usize,
        net: Vec<i64>,
        chosen: Vec<i64>,
        nodes: u64,
        dead: HashSet<(usize, Vec<i64>)>,
    }
    fn go(st: &mut St, i: usize) -> bool {
        st.nodes += 1;
        if i == st.classes.len() {
            return st.net.iter().all(|&x| x == 0);
        }
        let key = (i, st.net.clone());
        if st.dead.contains(&key) {
            return false;
        }
        let (u, v, m) = st.classes[i];
        let options: Vec<i64> = st.sums[m].iter().copied().collect();
        for x in options {
            st.net[u] += x;
            st.net[v] -= x;
            let ok = [u, v]
                .iter()
                .all(|&w| st.net[w].abs() <= st.room[(i + 1) * st.n + w]);
            if ok {
                st.chosen[i] = x;
                if go(st, i + 1) {
                    return true;
                }
            }
            st.net[u] -= x;
            st.net[v] += x;
        }
        st.dead.insert(key);
        false
    }
    let mut st = St {
        classes: &classes,
        sums: &sums,
        room: &room,
        n,
        net: vec![0; n],
        chosen: vec![0; len],
        nodes: 0,
        dead: HashSet::new(),
    };
    if !go(&mut st, 0) {
        return Ok(FlowSearch::Refuted { nodes: st.nodes });
    }
    let mut values = Vec::new();
    for (i, &(u, v, m)) in classes.iter().enumerate() {
        let mut total = st.chosen[i];
        for c in 0..m {
            let left = m - c - 1;
            let x = *single
                .iter()
                .find(|&&x| sums[left].contains(&(total - x)))
                .ok_or_else(|| Error::Internal("class total does not split".into()))?;
            values.push((u, v, c, x));
            total -= x;
        }
    }
    let flow = CircularFlow { a, b, values };
    verify_circular_flow(g, &flow)?;
    Ok(FlowSearch::Found(flow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogLabel;

    fn lim() -> SearchLimits {
        SearchLimits::default()
    }

    fn fold(a: usize) -> Multigraph {
        CatalogLabel::Fold(a).build().unwrap()
    }

    fn tri(a: usize, b: usize, c: usize) -> Multigraph {
        CatalogLabel::Triangle(a, b, c).build().unwrap()
    }

    /// Reference answer by enumerating every net vector.
    fn brute_achievable(g: &Multigraph, beta: &Boundary) -> bool {
        let classes: Vec<_> = g.classes().collect();
        let k = beta.modulus() as i64;
        fn rec(i: usize, classes: &[(usize, usize, usize)], out: &mut Vec<i64>, beta: &Boundary, k: i64) -> bool {
            if i == classes.len() {
                return out
                    .iter()
                    .enumerate()
                    .all(|(v, &x)| x.rem_euclid(k) as u32 == beta.get(v));
            }
            let (u, v, m) = classes[i];
            let m = m as i64;
            let mut o = -m;
            while o <= m {
                out[u] += o;
                out[v] -= o;
                let ok = rec(i + 1, classes, out, beta, k);
                out[u] -= o;
                out[v] += o;
                if ok {
                    return true;
                }
                o += 2;
            }
            false
        }
        rec(0, &classes, &mut vec![0; g.vertex_count()], beta, k)
    }

    #[test]
    fn boundary_rules() {
        assert!(Boundary::new(5, vec![1, 3]).is_err());
        assert!(Boundary::new(4, vec![0, 0]).is_err());
        assert_eq!(Boundary::new(5, vec![-1, 1]).unwrap().values(), &[4, 1]);
    }

    #[test]
    fn fold_examples() {
        let b = Boundary::new(5, vec![1, 4]).unwrap();
        assert!(beta_orientation(&fold(2), &b, lim()).unwrap().is_refuted());
        let b = Boundary::new(5, vec![3, 2]).unwrap();
        let Search::Found(c) = beta_orientation(&fold(4), &b, lim()).unwrap() else { panic!() };
        assert_eq!(c.out_copies(&fold(4), 0, 1), 1);
        let b = Boundary::new(7, vec![4, 3]).unwrap();
        let Search::Found(c) = beta_orientation(&fold(6), &b, lim()).unwrap() else { panic!() };
        assert_eq!(c.out_copies(&fold(6), 0, 1), 5);
        let b = Boundary::zero(5, 1).unwrap();
        let Search::Found(c) = beta_orientation(&Multigraph::new(1), &b, lim()).unwrap() else { panic!() };
        assert!(c.nets.is_empty());
    }

    #[test]
    fn fold_out_counts_match_listed_values() {
        // d+ − d− ≡ β(v1) with j copies out of v1 means 2j − a ≡ β(v1).
        for (a, k, listed) in [(4usize, 5u32, vec![2usize, 0, 3, 1, 4]), (6, 7, vec![3, 0, 4, 1, 5, 2, 6])] {
            let g = fold(a);
            for (b1, &j) in listed.iter().enumerate() {
                let beta = Boundary::new(k, vec![b1 as i64, -(b1 as i64)]).unwrap();
                assert_eq!((2 * j as i64 - a as i64).rem_euclid(k as i64) as usize, b1);
                let c = beta_orientation(&g, &beta, lim()).unwrap();
                let c = c.certificate().unwrap();
                assert_eq!(c.out_copies(&g, 0, 1) % k as usize, j % k as usize);
            }
        }
    }

    #[test]
    fn mod_orientation_examples() {
        let k4 = Multigraph::from_classes(4, crate::catalog::QUAD_PAIRS.iter().map(|&(u, v)| (u, v, 1))).unwrap();
        assert!(mod_orientation(&k4, 2, lim()).unwrap().is_refuted());
        let c = Multigraph::kcycle(5, 4).unwrap();
        assert!(mod_orientation(&c, 2, lim()).unwrap().is_found());
        let t = tri(2, 2, 3);
        let Search::Found(cert) = mod_orientation(&t, 2, lim()).unwrap() else { panic!() };
        let out = cert.outflow(3);
        assert_eq!(out[0] % 5, 0);
        assert_eq!(out[1].abs(), 5);
        assert_eq!(out[2].abs(), 5);
    }

    #[test]
    fn search_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let mut g = Multigraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.6) {
                        g.add_edges(u, v, rng.gen_range(1..=4)).unwrap();
                    }
                }
            }
            let k = [3u32, 5, 7][rng.gen_range(0..3)];
            let mut vals: Vec<i64> = (0..n).map(|_| rng.gen_range(0..k as i64)).collect();
            let s: i64 = vals.iter().sum();
            vals[0] -= s;
            let beta = Boundary::new(k, vals).unwrap();
            let res = beta_orientation(&g, &beta, lim()).unwrap();
            assert_eq!(res.is_found(), brute_achievable(&g, &beta), "{g:?} {beta:?}");
            if let Search::Found(c) = &res {
                verify_certificate(&g, &beta, c).unwrap();
            }
        }
    }

    #[test]
    fn verifier_rejects_tampering() {
        let g = Multigraph::kcycle(5, 4).unwrap();
        let beta = Boundary::zero(5, 4).unwrap();
        let c = mod_orientation(&g, 2, lim()).unwrap().certificate().unwrap().clone();
        verify_certificate(&g, &beta, &c).unwrap();
        let mut bad = c.clone();
        let key = *bad.nets.keys().next().unwrap();
        *bad.nets.get_mut(&key).unwrap() += 2;
        assert!(verify_certificate(&g, &beta, &bad).is_err());
        let mut parity = c;
        *parity.nets.get_mut(&key).unwrap() += 1;
        assert!(verify_certificate(&g, &beta, &parity).is_err());
    }

    #[test]
    fn strong_examples() {
        let sl = StrongLimits::default();
        assert!(strongly_connected(&fold(4), 5, sl).unwrap().is_yes());
        assert_eq!(
            strongly_connected(&fold(3), 5, sl).unwrap(),
            Strong::No { witness: Boundary::zero(5, 2).unwrap() }
        );
        let k4 = CatalogLabel::ThreeK4.build().unwrap();
        assert_eq!(
            strongly_connected(&k4, 7, sl).unwrap(),
            Strong::No { witness: Boundary::zero(7, 4).unwrap() }
        );
        assert!(strongly_connected(&CatalogLabel::FiveC4Eq.build().unwrap(), 7, sl).unwrap().is_yes());
    }

    #[test]
    fn sweep_agrees_with_per_boundary_search() {
        let sl = StrongLimits { max_states: 0, ..StrongLimits::default() };
        for g in [fold(2), fold(4), tri(2, 2, 3), tri(2, 3, 3), CatalogLabel::ThreeC4.build().unwrap()] {
            for k in [3, 5] {
                assert_eq!(
                    strongly_connected(&g, k, StrongLimits::default()).unwrap(),
                    strongly_connected(&g, k, sl).unwrap(),
                    "{g:?} mod {k}"
                );
            }
        }
    }

    #[test]
    fn disconnected_is_not_strong() {
        let g = Multigraph::from_classes(4, [(0, 1, 6), (2, 3, 6)]).unwrap();
        let Strong::No { witness } = strongly_connected(&g, 5, StrongLimits::default()).unwrap() else { panic!() };
        assert_ne!((witness.get(0) + witness.get(1)) % 5, 0);
    }

    #[test]
    fn extension_through_folded_pair() {
        let g = fold(5);
        let h = fold(4);
        let beta = Boundary::new(5, vec![2, 3]).unwrap();
        let gc = Multigraph::new(1);
        let dc = beta_orientation(&gc, &Boundary::zero(5, 1).unwrap(), lim()).unwrap();
        let cert = extend_orientation(&g, &beta, &[0, 1], &h, dc.certificate().unwrap(), lim()).unwrap();
        verify_certificate(&g, &beta, &cert).unwrap();
    }

    #[test]
    fn extension_on_triangle() {
        // T(1,4,4) with the 4-class on v1v2 (vertices 1, 2).
        let g = tri(1, 4, 4);
        assert_eq!(g.mult(1, 2), 4);
        let beta = Boundary::zero(5, 3).unwrap();
        let (gc, map) = g.contract(&[1, 2]).unwrap();
        let bc = beta.push_forward(&map, gc.vertex_count());
        let dc = beta_orientation(&gc, &bc, lim()).unwrap();
        let cert = extend_orientation(&g, &beta, &[1, 2], &fold(4), dc.certificate().unwrap(), lim()).unwrap();
        verify_certificate(&g, &beta, &cert).unwrap();
        assert!(mod_orientation(&g, 2, lim()).unwrap().is_found());
    }

    #[test]
    fn extension_reports_failing_gamma() {
        let g = fold(3);
        let beta = Boundary::zero(5, 2).unwrap();
        let dc = OrientationCertificate::new(5);
        let err = extend_orientation(&g, &beta, &[0, 1], &fold(3), &dc, lim()).unwrap_err();
        assert_eq!(err, Error::NotStronglyConnected { gamma: vec![0, 0] });
    }

    #[test]
    fn extension_rejects_wrong_contracted_orientation() {
        let g = tri(1, 4, 4);
        let beta = Boundary::new(5, vec![1, 0, 4]).unwrap();
        let mut dc = OrientationCertificate::new(5);
        dc.nets.insert((0, 1), 5);
        assert!(matches!(
            extend_orientation(&g, &beta, &[1, 2], &fold(4), &dc, lim()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn flows() {
        let g = Multigraph::kcycle(5, 4).unwrap();
        let c = mod_orientation(&g, 2, lim()).unwrap();
        let f = orientation_to_zflow(&g, c.certificate().unwrap(), 2).unwrap();
        assert!(f.values.iter().all(|x| x.value == 2));
        assert!(verify_zflow(&g, &f));
        assert!(is_antisymmetric(&f));
        let back = zflow_to_orientation(&g, &f).unwrap();
        verify_certificate(&g, &Boundary::zero(5, 4).unwrap(), &back).unwrap();

        let two = ZFlow {
            modulus: 5,
            values: vec![
                FlowValue { from: 0, to: 1, copy: 0, value: 1 },
                FlowValue { from: 0, to: 1, copy: 1, value: 4 },
            ],
        };
        assert!(!is_antisymmetric(&two));
        assert!(verify_zflow(&fold(2), &two));
        let empty = ZFlow { modulus: 5, values: vec![] };
        assert!(verify_zflow(&Multigraph::new(3), &empty));
        assert!(is_antisymmetric(&empty));
        let zero = ZFlow { modulus: 5, values: vec![FlowValue { from: 0, to: 1, copy: 0, value: 0 }] };
        assert!(!verify_zflow(&fold(1), &zero));
    }

    #[test]
    fn circular_flows() {
        let c3 = Multigraph::kcycle(1, 3).unwrap();
        let FlowSearch::Found(f) = find_circular_flow(&c3, 5, 2, 20).unwrap() else { panic!() };
        assert!(f.values.iter().all(|x| x.3.abs() == 2 || x.3.abs() == 3));
        let k4 = Multigraph::from_classes(4, crate::catalog::QUAD_PAIRS.iter().map(|&(u, v)| (u, v, 1))).unwrap();
        assert!(matches!(find_circular_flow(&k4, 5, 2, 20).unwrap(), FlowSearch::Refuted { .. }));
        assert!(matches!(find_circular_flow(&fold(2), 2, 1, 20).unwrap(), FlowSearch::Found(_)));
        assert!(find_circular_flow(&fold(2), 3, 2, 20).is_err());
        assert!(matches!(find_circular_flow(&fold(21), 5, 2, 20), Err(Error::Refused(_))));
    }
}
