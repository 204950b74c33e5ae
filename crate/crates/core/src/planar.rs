//! Plane embeddings as rotation systems, faces, strings and discharging.
//!
//! Every edge copy gets an id; a dart is `2e` (from the smaller endpoint of
//! edge `e` to the larger) or `2e + 1` (the reverse). Rotations list edge ids
//! around each vertex in clockwise order. Face tracing follows a dart `x → y`
//! with the edge after it in the rotation at `y`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::weights::{min_weight, WeightFn, DEFAULT_PARTITION_CAP};

/// Edge copy as it appears in a rotation file: neighbour and copy index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub neighbor: usize,
    pub copy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSystem {
    /// Endpoints of each edge copy, smaller endpoint first.
    edges: Vec<(usize, usize)>,
    /// Clockwise edge ids around each vertex.
    rot: Vec<Vec<usize>>,
}

fn embed_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidEmbedding(msg.into()))
}

impl RotationSystem {
    /// Builds a rotation system from per-vertex clockwise `(neighbour, copy)`
    /// lists and validates it: every copy must appear once at each end and
    /// copies of one class must be consecutive at both ends.
    pub fn from_refs(rot: Vec<Vec<EdgeRef>>) -> Result<RotationSystem> {
        let n = rot.len();
        let mut ids: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for (u, list) in rot.iter().enumerate() {
            for r in list {
                if r.neighbor >= n {
                    return embed_err(format!("vertex {u} lists unknown neighbour {}", r.neighbor));
                }
                if r.neighbor == u {
                    return embed_err(format!("loop at vertex {u}"));
                }
                let key = (u.min(r.neighbor), u.max(r.neighbor), r.copy);
                ids.entry(key).or_insert(0);
            }
        }
        let mut edges = Vec::with_capacity(ids.len());
        for (i, (key, id)) in ids.iter_mut().enumerate() {
            *id = i;
            edges.push((key.0, key.1));
        }
        let mut seen = vec![[false; 2]; edges.len()];
        let mut out = vec![Vec::new(); n];
        for (u, list) in rot.iter().enumerate() {
            for r in list {
                let key = (u.min(r.neighbor), u.max(r.neighbor), r.copy);
                let e = ids[&key];
                let side = usize::from(u != key.0);
                if seen[e][side] {
                    return embed_err(format!("vertex {u} lists {}:{} twice", r.neighbor, r.copy));
                }
                seen[e][side] = true;
                out[u].push(e);
            }
        }
        for (e, s) in seen.iter().enumerate() {
            if !(s[0] && s[1]) {
                let (a, b) = edges[e];
                return embed_err(format!("edge {a}-{b} appears at only one endpoint"));
            }
        }
        // Copies of a class must be numbered 0..μ.
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (key, _) in ids.iter() {
            let c = count.entry((key.0, key.1)).or_insert(0);
            if key.2 != *c {
                return embed_err(format!("class {}-{} skips copy {}", key.0, key.1, *c));
            }
            *c += 1;
        }
        let rs = RotationSystem { edges, rot: out };
        rs.check_consecutive()?;
        Ok(rs)
    }

    /// Inverse of [`from_refs`](Self::from_refs); copies are numbered by
    /// increasing edge id within each class.
    pub fn to_refs(&self) -> Vec<Vec<EdgeRef>> {
        let copy = self.copy_numbers();
        self.rot
            .iter()
            .enumerate()
            .map(|(u, list)| {
                list.iter()
                    .map(|&e| EdgeRef {
                        neighbor: self.other(e, u),
                        copy: copy[e],
                    })
                    .collect()
            })
            .collect()
    }

    fn copy_numbers(&self) -> Vec<usize> {
        let mut next: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        self.edges
            .iter()
            .map(|&p| {
                let c = next.entry(p).or_insert(0);
                *c += 1;
                *c - 1
            })
            .collect()
    }


    fn check_consecutive(&self) -> Result<()> {
        for (u, list) in self.rot.iter().enumerate() {
            let d = list.len();
            let nb: Vec<usize> = list.iter().map(|&e| self.other(e, u)).collect();
            // Number of maximal runs of equal neighbours, cyclically.
            let mut runs: BTreeMap<usize, usize> = BTreeMap::new();
            for i in 0..d {
                if d == 1 || nb[i] != nb[(i + d - 1) % d] {
                    *runs.entry(nb[i]).or_insert(0) += 1;
                }
            }
            if let Some((w, _)) = runs.iter().find(|(_, &r)| r > 1) {
                return embed_err(format!(
                    "copies of class {u}-{w} are not consecutive around {u}"
                ));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub(crate) fn other(&self, e: usize, u: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == u {
            b
        } else {
            a
        }
    }

    pub fn graph(&self) -> Multigraph {
        let mut g = Multigraph::new(self.rot.len());
        for &(u, v) in &self.edges {
            g.add_edges(u, v, 1).expect("embedding edges are valid");
        }
        g
    }

    /// Whether the underlying multigraph is exactly `g`.
    pub fn matches(&self, g: &Multigraph) -> bool {
        self.graph() == *g
    }


    fn dart_head(&self, d: usize) -> usize {
        let (a, b) = self.edges[d / 2];
        if d % 2 == 0 {
            b
        } else {
            a
        }
    }

    fn dart_from(&self, e: usize, u: usize) -> usize {
        if self.edges[e].0 == u {
            2 * e
        } else {
            2 * e + 1
        }
    }

    fn next_dart(&self, d: usize, pos: &[Vec<usize>]) -> usize {
        let y = self.dart_head(d);
        let e = d / 2;
        let list = &self.rot[y];
        let i = pos[e][usize::from(self.edges[e].0 != y)];
        let f = list[(i + 1) % list.len()];
        self.dart_from(f, y)
    }

    fn positions(&self) -> Vec<Vec<usize>> {
        let mut pos = vec![vec![usize::MAX; 2]; self.edges.len()];
        for (u, list) in self.rot.iter().enumerate() {
            for (i, &e) in list.iter().enumerate() {
                pos[e][usize::from(self.edges[e].0 != u)] = i;
            }
        }
        pos
    }

    /// Traces all faces and checks Euler's formula for a connected plane
    /// graph. A graph without edges has a single face of length 0.
    pub fn faces(&self) -> Result<Faces> {
        let n = self.rot.len();
        let m = self.edges.len();
        if n == 0 {
            return embed_err("empty graph");
        }
        if !self.graph().is_connected() {
            return embed_err("graph is not connected");
        }
        if m == 0 {
            return Ok(Faces {
                faces: vec![Face { darts: vec![] }],
                face_of: vec![],
            });
        }
        let pos = self.positions();
        let mut face_of = vec![usize::MAX; 2 * m];
        let mut faces = Vec::new();
        for start in 0..2 * m {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut darts = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = id;
                darts.push(d);
                d = self.next_dart(d, &pos);
                if d == start {
                    break;
                }
            }
            faces.push(Face { darts });
        }
        if n as i64 - m as i64 + faces.len() as i64 != 2 {
            return embed_err(format!(
                "Euler's formula fails: n={n}, m={m}, faces={}",
                faces.len()
            ));
        }
        Ok(Faces { faces, face_of })
    }

    /// Lifts the edges `e1 = w1v` and `e2 = vw2`, which must be consecutive
    /// in the rotation at `v`. The new edge takes the place of `e1` at `w1`
    /// and of `e2` at `w2`; it keeps id `e1` and edge `e2` disappears.
    pub fn lift_consecutive(&self, v: usize, e1: usize, e2: usize) -> Result<RotationSystem> {
        let list = &self.rot[v];
        let d = list.len();
        let i1 = list.iter().position(|&e| e == e1);
        let i2 = list.iter().position(|&e| e == e2);
        let (Some(i1), Some(i2)) = (i1, i2) else {
            return embed_err(format!("edges {e1}, {e2} are not both at vertex {v}"));
        };
        if e1 == e2 || !((i1 + 1) % d == i2 || (i2 + 1) % d == i1) {
            return embed_err(format!("edges {e1}, {e2} are not consecutive at {v}"));
        }
        let w1 = self.other(e1, v);
        let w2 = self.other(e2, v);
        if w1 == w2 {
            return embed_err("lifting two parallel edges would create a loop");
        }
        let mut edges = self.edges.clone();
        let mut rot = self.rot.clone();
        rot[v].retain(|&e| e != e1 && e != e2);
        for e in rot[w2].iter_mut() {
            if *e == e2 {
                *e = e1;
            }
        }
        edges[e1] = (w1.min(w2), w1.max(w2));
        let rs = RotationSystem { edges, rot }.remove_edges(&[e2]);
        Ok(rs.normalized())
    }

    /// Drops edges and renumbers the remaining ids in order.
    fn remove_edges(&self, gone: &[usize]) -> RotationSystem {
        let mut map = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (e, &p) in self.edges.iter().enumerate() {
            if !gone.contains(&e) {
                map[e] = edges.len();
                edges.push(p);
            }
        }
        let rot = self
            .rot
            .iter()
            .map(|l| l.iter().filter(|&&e| map[e] != usize::MAX).map(|&e| map[e]).collect())
            .collect();
        RotationSystem { edges, rot }
    }

    /// Rearranges every parallel class so its copies are consecutive at both
    /// ends, keeping the first copy in place and drawing the others beside
    /// it. The result is again a plane embedding.
    pub fn normalized(&self) -> RotationSystem {
        let mut first: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut others: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (e, &p) in self.edges.iter().enumerate() {
            match first.get(&p) {
                None => {
                    first.insert(p, e);
                }
                Some(&r) => others.entry(r).or_default().push(e),
            }
        }
        let extra: Vec<bool> = {
            let mut x = vec![false; self.edges.len()];
            for list in others.values() {
                for &e in list {
                    x[e] = true;
                }
            }
            x
        };
        let rot = self
            .rot
            .iter()
            .enumerate()
            .map(|(u, list)| {
                let mut out = Vec::with_capacity(list.len());
                for &e in list {
                    if extra[e] {
                        continue;
                    }
                    let copies = others.get(&e).map(|v| v.as_slice()).unwrap_or(&[]);
                    if self.edges[e].0 == u {
                        out.push(e);
                        out.extend(copies.iter().copied());
                    } else {
                        out.extend(copies.iter().rev().copied());
                        out.push(e);
                    }
                }
                out
            })
            .collect();
        RotationSystem {
            edges: self.edges.clone(),
            rot,
        }
    }

    /// Contracts edge `e`: the two rotations are spliced at `e`, copies of
    /// `e`'s class become loops and are dropped. The merged vertex takes the
    /// smaller index and later vertices shift down by one.
    pub fn contract_edge(&self, e: usize) -> Result<RotationSystem> {
        let (u, v) = self.edges[e];
        let cyc = |x: usize| -> Vec<usize> {
            let l = &self.rot[x];
            let i = l.iter().position(|&f| f == e).expect("edge at its endpoint");
            (1..l.len()).map(|k| l[(i + k) % l.len()]).collect()
        };
        let mut merged = cyc(u);
        merged.extend(cyc(v));
        let loops: Vec<usize> = (0..self.edges.len())
            .filter(|&f| self.edges[f] == (u, v))
            .collect();
        merged.retain(|f| !loops.contains(f));
        let shift = |x: usize| if x == v { u } else if x > v { x - 1 } else { x };
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (shift(a), shift(b));
                (a.min(b), a.max(b))
            })
            .collect();
        let mut rot: Vec<Vec<usize>> = Vec::with_capacity(self.rot.len() - 1);
        for (x, list) in self.rot.iter().enumerate() {
            if x == v {
                continue;
            }
            rot.push(if x == u { merged.clone() } else { list.clone() });
        }
        let rs = RotationSystem { edges, rot }.remove_edges(&loops);
        Ok(rs.normalized())
    }

    /// Contracts a vertex set that induces a connected subgraph, with the
    /// same vertex numbering as [`Multigraph::contract`].
    pub fn contract_set(&self, set: &[usize]) -> Result<RotationSystem> {
        let mut members: Vec<usize> = set.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut rs = self.clone();
        while members.len() > 1 {
            let e = (0..rs.edges.len()).find(|&e| {
                let (a, b) = rs.edges[e];
                members.binary_search(&a).is_ok() && members.binary_search(&b).is_ok()
            });
            let Some(e) = e else {
                return embed_err("contracted set does not induce a connected subgraph");
            };
            let (_, b) = rs.edges[e];
            rs = rs.contract_edge(e)?;
            members.retain(|&x| x != b);
            for x in members.iter_mut() {
                if *x > b {
                    *x -= 1;
                }
            }
        }
        Ok(rs)
    }

    /// Removes vertex `v` with its edges; later vertices shift down by one.
    pub fn delete_vertex(&self, v: usize) -> RotationSystem {
        let gone: Vec<usize> = self.rot[v].clone();
        let mut rs = self.remove_edges(&gone);
        rs.rot.remove(v);
        for p in rs.edges.iter_mut() {
            if p.0 > v {
                p.0 -= 1;
            }
            if p.1 > v {
                p.1 -= 1;
            }
        }
        rs
    }

    /// Replaces edge `e = uv` by the path `u z v` through a new vertex `z`.
    pub fn subdivide_edge(&self, e: usize) -> RotationSystem {
        let (u, v) = self.edges[e];
        let z = self.rot.len();
        let mut edges = self.edges.clone();
        let f = edges.len();
        edges[e] = (u, z);
        edges.push((v, z));
        let mut rot = self.rot.clone();
        for x in rot[v].iter_mut() {
            if *x == e {
                *x = f;
            }
        }
        rot.push(vec![e, f]);
        RotationSystem { edges, rot }
    }

    /// Each edge of a simple plane graph replaced by `mult(u, v)` consecutive
    /// copies, drawn side by side.
    pub fn expand(simple: &RotationSystem, mult: &dyn Fn(usize, usize) -> usize) -> RotationSystem {
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        for &(u, v) in &simple.edges {
            let k = mult(u, v);
            let start = edges.len();
            edges.extend(std::iter::repeat((u, v)).take(k));
            ids.push(start..start + k);
        }
        let rot = simple
            .rot
            .iter()
            .enumerate()
            .map(|(u, list)| {
                let mut out = Vec::new();
                for &e in list {
                    let r = ids[e].clone();
                    if simple.edges[e].0 == u {
                        out.extend(r);
                    } else {
                        out.extend(r.rev());
                    }
                }
                out
            })
            .collect();
        RotationSystem { edges, rot }
    }

    /// Edge id of the copy of `{u, v}` that is last in the run at the smaller
    /// endpoint, i.e. on the outside of the bundle.
    pub fn outer_copy(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (u.min(v), u.max(v));
        let list = &self.rot[a];
        let d = list.len();
        let idx: Vec<usize> = (0..d).filter(|&i| self.edges[list[i]] == (a, b)).collect();
        let last = *idx.iter().find(|&&i| !idx.contains(&((i + 1) % d)))?;
        Some(list[last])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Faces {
    pub faces: Vec<Face>,
    /// Face to the right of each dart.
    pub face_of: Vec<usize>,
}

/// Weak adjacency of a 3⁺-face `from` across one of its boundary edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    /// Boundary edge of `from`.
    pub edge: usize,
    pub to: usize,
    /// 2-faces passed on the way, nearest first.
    pub string: Vec<usize>,
    /// Multiplicity of the class of `edge`.
    pub multiplicity: usize,
}

impl Link {
    /// String length `t` of the edge: one more than the number of 2-faces.
    pub fn t(&self) -> usize {
        self.string.len() + 1
    }
}

#[derive(Debug, Clone)]
pub struct Strings {
    /// Every link out of every 3⁺-face, ordered by face then boundary position.
    pub links: Vec<Link>,
    /// Strings as lists of 2-faces; closed strings (no 3⁺-face at either end)
    /// are included.
    pub strings: Vec<Vec<usize>>,
    /// `profile[f]`: string length per boundary edge of a 3⁺-face.
    pub profile: Vec<Vec<usize>>,
}

/// Finds strings (maximal chains of 2-faces) and the weak adjacencies
/// between 3⁺-faces through them.
pub fn strings_and_weak_adjacency(rs: &RotationSystem, faces: &Faces) -> Strings {
    let g = rs.graph();
    let len = |f: usize| faces.faces[f].len();
    let across = |d: usize| faces.face_of[d ^ 1];
    let mut string_of = vec![usize::MAX; faces.faces.len()];
    let mut strings = Vec::new();
    let mut links = Vec::new();
    let mut profile = vec![Vec::new(); faces.faces.len()];
    for (f, face) in faces.faces.iter().enumerate() {
        if face.len() < 3 {
            continue;
        }
        for &d in &face.darts {
            let e = d / 2;
            let (a, b) = rs.edges[e];
            let mut chain = Vec::new();
            let mut cur_dart = d;
            let mut h = across(cur_dart);
            while len(h) == 2 && !chain.contains(&h) {
                chain.push(h);
                let hd = &faces.faces[h].darts;
                // Leave h through its dart that is not the reverse of cur_dart.
                let back = cur_dart ^ 1;
                let out = if hd[0] == back { hd[1] } else { hd[0] };
                cur_dart = out;
                h = across(cur_dart);
            }
            profile[f].push(chain.len() + 1);
            if !chain.is_empty() && string_of[chain[0]] == usize::MAX {
                let id = strings.len();
                for &c in &chain {
                    string_of[c] = id;
                }
                strings.push(chain.clone());
            }
            links.push(Link {
                from: f,
                edge: e,
                to: h,
                string: chain,
                multiplicity: g.mult(a, b),
            });
        }
    }
    // Closed strings.
    for (f, face) in faces.faces.iter().enumerate() {
        if face.len() != 2 || string_of[f] != usize::MAX {
            continue;
        }
        let id = strings.len();
        let mut chain = vec![f];
        string_of[f] = id;
        let mut frontier = vec![f];
        while let Some(h) = frontier.pop() {
            for &d in &faces.faces[h].darts {
                let x = across(d);
                if len(x) == 2 && string_of[x] == usize::MAX {
                    string_of[x] = id;
                    chain.push(x);
                    frontier.push(x);
                }
            }
        }
        strings.push(chain);
    }
    Strings {
        links,
        strings,
        profile,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Target 22/9.
    Z5,
    /// Target 34/15.
    Z7,
}

impl Mode {
    pub fn modulus(self) -> u32 {
        match self {
            Mode::Z5 => 5,
            Mode::Z7 => 7,
        }
    }

    /// `p` with `modulus = 2p + 1`.
    pub fn p(self) -> u32 {
        (self.modulus() - 1) / 2
    }

    pub fn from_modulus(k: u32) -> Option<Mode> {
        match k {
            5 => Some(Mode::Z5),
            7 => Some(Mode::Z7),
            _ => None,
        }
    }

    pub fn target(self) -> Rational64 {
        match self {
            Mode::Z5 => Rational64::new(22, 9),
            Mode::Z7 => Rational64::new(34, 15),
        }
    }

    fn weight(self) -> WeightFn {
        match self {
            Mode::Z5 => WeightFn::W,
            Mode::Z7 => WeightFn::Rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub rule: String,
    pub from: usize,
    pub to: usize,
    pub amount: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeLedger {
    pub mode: Mode,
    pub lengths: Vec<usize>,
    pub initial: Vec<Rational64>,
    pub transfers: Vec<Transfer>,
    pub final_charge: Vec<Rational64>,
}

impl ChargeLedger {
    pub fn total(&self) -> Rational64 {
        self.final_charge.iter().copied().fold(Rational64::zero(), |a, b| a + b)
    }

    pub fn min_charge(&self) -> Option<Rational64> {
        self.final_charge.iter().copied().min()
    }

    /// Faces ending strictly below the mode's target.
    pub fn below_target(&self) -> Vec<usize> {
        let t = self.mode.target();
        (0..self.final_charge.len())
            .filter(|&f| self.final_charge[f] < t)
            .collect()
    }

    /// Recomputes the final charges from the initial ones and the transfers.
    pub fn replay(&self) -> Vec<Rational64> {
        let mut c = self.initial.clone();
        for t in &self.transfers {
            c[t.from] -= t.amount;
            c[t.to] += t.amount;
        }
        c
    }
}

fn profile_is(p: &[usize], want: &[usize]) -> bool {
    let mut a = p.to_vec();
    let mut b = want.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Runs the discharging rules of `mode` on the embedding. Each rule is one
/// simultaneous pass computed from the charges left by the previous rule.
pub fn discharge(rs: &RotationSystem, mode: Mode) -> Result<ChargeLedger> {
    let faces = rs.faces()?;
    let st = strings_and_weak_adjacency(rs, &faces);
    let lengths: Vec<usize> = faces.faces.iter().map(|f| f.len()).collect();
    let initial: Vec<Rational64> = lengths.iter().map(|&l| Rational64::from_integer(l as i64)).collect();
    let mut charge = initial.clone();
    let mut transfers = Vec::new();
    let mut apply = |batch: Vec<Transfer>, charge: &mut Vec<Rational64>| {
        for t in &batch {
            charge[t.from] -= t.amount;
            charge[t.to] += t.amount;
        }
        transfers.extend(batch);
    };
    let r = |a, b| Rational64::new(a, b);
    let is3 = |f: usize| lengths[f] == 3;
    match mode {
        Mode::Z5 => {
            let r1 = st
                .links
                .iter()
                .flat_map(|l| {
                    l.string.iter().map(move |&h| Transfer {
                        rule: "R1".into(),
                        from: l.from,
                        to: h,
                        amount: r(2, 9),
                    })
                })
                .collect();
            apply(r1, &mut charge);
            let t222 = |f: usize| is3(f) && profile_is(&st.profile[f], &[2, 2, 2]);
            let t211 = |f: usize| is3(f) && profile_is(&st.profile[f], &[2, 1, 1]);
            let t221 = |f: usize| is3(f) && profile_is(&st.profile[f], &[2, 2, 1]);
            let r2 = st
                .links
                .iter()
                .filter(|l| t222(l.from) && (lengths[l.to] >= 4 || t211(l.to)))
                .map(|l| Transfer {
                    rule: "R2".into(),
                    from: l.to,
                    to: l.from,
                    amount: r(1, 9),
                })
                .collect();
            apply(r2, &mut charge);
            let r3 = st
                .links
                .iter()
                .filter(|l| t222(l.from) && t221(l.to))
                .map(|l| Transfer {
                    rule: "R3".into(),
                    from: l.to,
                    to: l.from,
                    amount: r(1, 18),
                })
                .collect();
            apply(r3, &mut charge);
        }
        Mode::Z7 => {
            let r1 = st
                .links
                .iter()
                .flat_map(|l| {
                    l.string.iter().map(move |&h| Transfer {
                        rule: "R1".into(),
                        from: l.from,
                        to: h,
                        amount: r(2, 15),
                    })
                })
                .collect();
            apply(r1, &mut charge);
            let r2 = st
                .links
                .iter()
                .filter(|l| is3(l.from) && lengths[l.to] >= 4 && l.multiplicity <= 4)
                .map(|l| Transfer {
                    rule: "R2".into(),
                    from: l.to,
                    to: l.from,
                    amount: if l.multiplicity <= 3 { r(2, 15) } else { r(1, 15) },
                })
                .collect();
            apply(r2, &mut charge);
            let target = Mode::Z7.target();
            let mut r3 = Vec::new();
            for f in 0..lengths.len() {
                if !is3(f) || charge[f] <= target {
                    continue;
                }
                let takers: Vec<&Link> = st
                    .links
                    .iter()
                    .filter(|l| l.from == f && is3(l.to) && charge[l.to] < target)
                    .collect();
                if takers.is_empty() {
                    continue;
                }
                let share = (charge[f] - target) / Rational64::from_integer(takers.len() as i64);
                r3.extend(takers.iter().map(|l| Transfer {
                    rule: "R3".into(),
                    from: f,
                    to: l.to,
                    amount: share,
                }));
            }
            apply(r3, &mut charge);
        }
    }
    Ok(ChargeLedger {
        mode,
        lengths,
        initial,
        transfers,
        final_charge: charge,
    })
}

/// `2‖G‖ <= (22/9)|F| − 2/3` for `Z5`, `2‖G‖ <= (34/15)|F| − 2/5` for `Z7`,
/// checked exactly. Requires `w(G) >= 0` (resp. `ρ(G) >= 0`).
pub fn charge_bound(g: &Multigraph, mode: Mode, rs: &RotationSystem) -> Result<bool> {
    if !rs.matches(g) {
        return Err(Error::InvalidArgument("rotation system does not match the graph".into()));
    }
    let (value, _) = min_weight(g, mode.weight(), DEFAULT_PARTITION_CAP)?;
    if value < 0 {
        return Err(Error::PreconditionFailed(format!(
            "minimum {:?} weight is {value}, the bound needs it nonnegative",
            mode.weight()
        )));
    }
    let f = rs.faces()?.faces.len() as i64;
    let lhs = Rational64::from_integer(2 * g.edge_count() as i64);
    let rhs = euler_bound(mode, f);
    Ok(lhs <= rhs)
}

/// Right-hand side of the face bound for `f` faces.
pub fn euler_bound(mode: Mode, f: i64) -> Rational64 {
    match mode {
        Mode::Z5 => Rational64::new(22, 9) * f - Rational64::new(2, 3),
        Mode::Z7 => Rational64::new(34, 15) * f - Rational64::new(2, 5),
    }
}
