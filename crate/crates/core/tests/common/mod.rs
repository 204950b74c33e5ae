//! Independent oracles for integration tests. Nothing here calls the
//! library's search, sweep, cut or partition code.
#![allow(dead_code)]

use std::collections::HashSet;

use circflow::orient::{Boundary, OrientationCertificate};
use circflow::Multigraph;
use rand::Rng;

/// Every copy listed once as `(u, v)` with `u < v`.
pub fn copies(g: &Multigraph) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            for _ in 0..g.mult(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Boundaries realized by some orientation, found by orienting copies one at
/// a time and keeping the set of residue vectors.
pub fn achievable(g: &Multigraph, k: u32) -> HashSet<Vec<u32>> {
    let n = g.vertex_count();
    let mut states: HashSet<Vec<u32>> = HashSet::from([vec![0; n]]);
    for (u, v) in copies(g) {
        let mut next = HashSet::with_capacity(states.len() * 2);
        for s in &states {
            for (a, b) in [(u, v), (v, u)] {
                let mut t = s.clone();
                t[a] = (t[a] + 1) % k;
                t[b] = (t[b] + k - 1) % k;
                next.insert(t);
            }
        }
        states = next;
    }
    states
}

pub fn strongly_connected(g: &Multigraph, k: u32) -> bool {
    let n = g.vertex_count() as u32;
    achievable(g, k).len() as u64 == (k as u64).pow(n - 1)
}

/// Every zero-sum residue vector, in lexicographic order.
pub fn all_boundaries(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (k as u64).pow(n as u32 - 1);
    for code in 0..total {
        let mut v = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n - 1 {
            v.push((c % k as u64) as u32);
            c /= k as u64;
        }
        v.reverse();
        let s: u32 = v.iter().sum::<u32>() % k;
        v.push((k - s) % k);
        out.push(v);
    }
    out
}

pub fn first_unachievable(g: &Multigraph, k: u32) -> Option<Vec<u32>> {
    let ach = achievable(g, k);
    all_boundaries(g.vertex_count(), k).into_iter().find(|b| !ach.contains(b))
}

/// Re-derives the outflow of a certificate from its nets.
pub fn certificate_realizes(g: &Multigraph, beta: &Boundary, cert: &OrientationCertificate) -> bool {
    let n = g.vertex_count();
    let k = beta.modulus() as i64;
    let mut out = vec![0i64; n];
    for u in 0..n {
        for v in u + 1..n {
            let m = g.mult(u, v) as i64;
            let o = cert.nets.get(&(u, v)).copied().unwrap_or(0);
            if o.abs() > m || (m - o).rem_euclid(2) != 0 {
                return false;
            }
            out[u] += o;
            out[v] -= o;
        }
    }
    if cert.nets.keys().any(|&(u, v)| u >= v || v >= n || g.mult(u, v) == 0) {
        return false;
    }
    (0..n).all(|v| out[v].rem_euclid(k) == beta.get(v) as i64)
}

/// Restricted growth strings of length `n`.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            rec(i + 1, max.max(b), cur, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}

/// `Σ d(P_i)` and the block count of a partition given by labels.
pub fn degree_sum(g: &Multigraph, labels: &[usize]) -> (usize, usize) {
    let mut d = 0;
    for (u, v) in copies(g) {
        if labels[u] != labels[v] {
            d += 2;
        }
    }
    let t = labels.iter().collect::<HashSet<_>>().len();
    (d, t)
}

pub fn w(g: &Multigraph, labels: &[usize]) -> i64 {
    let (d, t) = degree_sum(g, labels);
    d as i64 - 11 * t as i64 + 19
}

pub fn rho(g: &Multigraph, labels: &[usize]) -> i64 {
    let (d, t) = degree_sum(g, labels);
    d as i64 - 17 * t as i64 + 31
}

/// Minimum cut over all vertex subsets.
pub fn edge_connectivity(g: &Multigraph) -> usize {
    let n = g.vertex_count();
    if n < 2 {
        return 0;
    }
    let mut best = usize::MAX;
    for mask in 1u64..(1 << (n - 1)) {
        // Vertex n-1 always stays outside.
        let cut = copies(g)
            .iter()
            .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
            .count();
        best = best.min(cut);
    }
    best
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, max_mult: usize) -> Multigraph {
    let mut g = Multigraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let m = rng.gen_range(0..=max_mult);
            if m > 0 {
                g.add_edges(u, v, m).unwrap();
            }
        }
    }
    g
}

pub fn random_boundary<R: Rng>(rng: &mut R, k: u32, n: usize) -> Boundary {
    let mut vals: Vec<i64> = (0..n).map(|_| rng.gen_range(0..k as i64)).collect();
    let s: i64 = vals[..n - 1].iter().sum();
    vals[n - 1] = -s;
    Boundary::new(k, vals).unwrap()
}

/// Whether some assignment of values in `±[b, a−b]` to the copies (each read
/// from its smaller to its larger endpoint) is conserved at every vertex.
pub fn circular_flow_exists(g: &Multigraph, a: i64, b: i64) -> bool {
    let n = g.vertex_count();
    let values: Vec<i64> = (b..=a - b).flat_map(|x| [x, -x]).collect();
    let cs = copies(g);
    fn rec(i: usize, cs: &[(usize, usize)], values: &[i64], net: &mut Vec<i64>) -> bool {
        if i == cs.len() {
            return net.iter().all(|&x| x == 0);
        }
        let (u, v) = cs[i];
        for &x in values {
            net[u] += x;
            net[v] -= x;
            let ok = rec(i + 1, cs, values, net);
            net[u] -= x;
            net[v] += x;
            if ok {
                return true;
            }
        }
        false
    }
    rec(0, &cs, &values, &mut vec![0; n])
}
