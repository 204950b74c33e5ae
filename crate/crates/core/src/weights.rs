//! Vertex partitions and the weights `w` and `ρ`.
//!
//! For a partition `P = {P_1, …, P_t}` of `V(G)`,
//! `w_G(P) = Σ d(P_i) − 11t + 19` and `ρ_G(P) = Σ d(P_i) − 17t + 31`.
//! `Σ d(P_i)` counts every edge between two different parts twice.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_match, CatalogLabel};
use crate::error::{invalid, Error, Result};
use crate::multigraph::Multigraph;

/// Partition stored as a restricted growth string: `rgs[v]` is the block of
/// `v`, blocks numbered in order of their least vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    rgs: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    Trivial,
    /// `t = n − 1`: one pair, everything else singletons.
    AlmostTrivial,
    Normal,
    /// The single block `V(G)`.
    Whole,
}

impl Partition {
    /// Accepts any block labelling and renumbers it canonically.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut rename = std::collections::HashMap::new();
        let rgs = labels
            .iter()
            .map(|l| {
                let next = rename.len();
                *rename.entry(*l).or_insert(next)
            })
            .collect();
        Partition { rgs }
    }

    /// Requires an already canonical restricted growth string.
    pub fn from_rgs(rgs: Vec<usize>) -> Result<Partition> {
        let mut top = 0;
        for (i, &b) in rgs.iter().enumerate() {
            if b > top || (i == 0 && b != 0) {
                return invalid(format!("not a restricted growth string at position {i}"));
            }
            if b == top {
                top += 1;
            }
        }
        Ok(Partition { rgs })
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut label = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return invalid("empty block");
            }
            for &v in block {
                if v >= n || label[v] != usize::MAX {
                    return invalid(format!("vertex {v} missing from range or repeated"));
                }
                label[v] = i;
            }
        }
        if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
            return invalid(format!("vertex {v} is in no block"));
        }
        Ok(Partition::from_labels(&label))
    }

    pub fn trivial(n: usize) -> Partition {
        Partition { rgs: (0..n).collect() }
    }

    pub fn whole(n: usize) -> Partition {
        Partition { rgs: vec![0; n] }
    }

    /// Uniformly random block labels in `0..max_blocks`, canonicalized.
    pub fn random<R: Rng + ?Sized>(n: usize, max_blocks: usize, rng: &mut R) -> Partition {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..max_blocks.max(1))).collect();
        Partition::from_labels(&labels)
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    pub fn vertex_count(&self) -> usize {
        self.rgs.len()
    }

    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (v, &b) in self.rgs.iter().enumerate() {
            out[b].push(v);
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.block_count() == self.rgs.len()
    }

    pub fn is_whole(&self) -> bool {
        self.block_count() <= 1
    }

    pub fn is_almost_trivial(&self) -> bool {
        let n = self.rgs.len();
        n >= 2 && self.block_count() == n - 1
    }

    pub fn is_normal(&self) -> bool {
        !self.is_trivial() && !self.is_almost_trivial() && !self.is_whole()
    }

    /// The first matching kind in the order trivial, whole, almost trivial,
    /// normal. For `n = 2` the whole partition is also almost trivial.
    pub fn kind(&self) -> PartitionKind {
        if self.is_trivial() {
            PartitionKind::Trivial
        } else if self.is_whole() {
            PartitionKind::Whole
        } else if self.is_almost_trivial() {
            PartitionKind::AlmostTrivial
        } else {
            PartitionKind::Normal
        }
    }

    /// `G/P` together with nothing else; blocks become vertices in order.
    pub fn quotient(&self, g: &Multigraph) -> Multigraph {
        g.quotient(&self.rgs, self.block_count())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        f.write_str(&blocks.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightFn {
    /// `Σ d(P_i) − 11t + 19`.
    W,
    /// `Σ d(P_i) − 17t + 31`.
    Rho,
}

impl WeightFn {
    fn coefficients(self) -> (i64, i64) {
        match self {
            WeightFn::W => (11, 19),
            WeightFn::Rho => (17, 31),
        }
    }

    /// Weight from `Σ d(P_i)` and the block count.
    pub fn eval(self, degree_sum: usize, blocks: usize) -> i64 {
        let (a, c) = self.coefficients();
        degree_sum as i64 - a * blocks as i64 + c
    }

    /// Constant lost when a block is refined: `c − a`.
    pub fn refinement_offset(self) -> i64 {
        let (a, c) = self.coefficients();
        c - a
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightReport {
    pub partition: Partition,
    pub w: i64,
    pub rho: i64,
}

impl WeightReport {
    pub fn new(g: &Multigraph, p: Partition) -> Result<WeightReport> {
        let w = weight(g, &p, WeightFn::W)?;
        let rho = weight(g, &p, WeightFn::Rho)?;
        Ok(WeightReport { partition: p, w, rho })
    }
}

fn check_partition(g: &Multigraph, p: &Partition) -> Result<()> {
    if p.vertex_count() != g.vertex_count() {
        return invalid(format!(
            "partition covers {} vertices, graph has {}",
            p.vertex_count(),
            g.vertex_count()
        ));
    }
    Ok(())
}

/// `Σ d(P_i)`.
pub fn degree_sum(g: &Multigraph, p: &Partition) -> Result<usize> {
    check_partition(g, p)?;
    Ok(2 * g
        .classes()
        .filter(|&(u, v, _)| p.rgs[u] != p.rgs[v])
        .map(|(_, _, m)| m)
        .sum::<usize>())
}

pub fn weight(g: &Multigraph, p: &Partition, which: WeightFn) -> Result<i64> {
    Ok(which.eval(degree_sum(g, p)?, p.block_count()))
}

/// Default vertex limit for exhaustive partition enumeration.
pub const DEFAULT_PARTITION_CAP: usize = 12;

fn check_cap(g: &Multigraph, cap: usize) -> Result<()> {
    if g.vertex_count() > cap {
        return Err(Error::Refused(format!(
            "partition enumeration capped at {cap} vertices, graph has {}",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// Visits every partition with at most `max_blocks` blocks in lexicographic
/// order of restricted growth strings, passing the string and `Σ d(P_i)`.
/// The visitor returns `false` to stop early.
pub fn for_each_partition<F>(g: &Multigraph, max_blocks: usize, mut visit: F)
where
    F: FnMut(&[usize], usize) -> bool,
{
    let n = g.vertex_count();
    if n == 0 {
        visit(&[], 0);
        return;
    }
    let a = g.matrix();
    let mut rgs = vec![0usize; n];
    // cross[v]: edges from v to earlier vertices in other blocks.
    fn rec<F: FnMut(&[usize], usize) -> bool>(
        v: usize,
        blocks: usize,
        cut: usize,
        a: &[Vec<usize>],
        rgs: &mut Vec<usize>,
        max_blocks: usize,
        visit: &mut F,
    ) -> bool {
        let n = rgs.len();
        if v == n {
            return visit(rgs, 2 * cut);
        }
        let limit = if blocks < max_blocks { blocks + 1 } else { blocks };
        for b in 0..limit {
            rgs[v] = b;
            let add: usize = (0..v).filter(|&u| rgs[u] != b).map(|u| a[u][v]).sum();
            let nb = blocks.max(b + 1);
            if !rec(v + 1, nb, cut + add, a, rgs, max_blocks, visit) {
                return false;
            }
        }
        true
    }
    rgs[0] = 0;
    rec(1, 1, 0, &a, &mut rgs, max_blocks.max(1), &mut visit);
}

/// Minimum weight over all partitions and the lexicographically least
/// partition attaining it.
pub fn min_weight(g: &Multigraph, which: WeightFn, cap: usize) -> Result<(i64, Partition)> {
    check_cap(g, cap)?;
    let mut best: Option<(i64, Vec<usize>)> = None;
    for_each_partition(g, usize::MAX, |rgs, dsum| {
        let t = rgs.iter().max().map_or(0, |&m| m + 1);
        let w = which.eval(dsum, t);
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, rgs.to_vec()));
        }
        true
    });
    let (w, rgs) = best.expect("at least one partition");
    Ok((w, Partition { rgs }))
}

/// Weight of the partition obtained by splitting block `i` of `p` according
/// to `q`, a partition of `G[P_i]` whose vertex `j` is the `j`-th smallest
/// member of `P_i`. Confirms the refinement identity
/// `weight(refined) = weight_H(q) + weight_G(p) − (c − a)`.
pub fn refinement_weight(
    g: &Multigraph,
    p: &Partition,
    i: usize,
    q: &Partition,
    which: WeightFn,
) -> Result<i64> {
    check_partition(g, p)?;
    let blocks = p.blocks();
    let Some(block) = blocks.get(i) else {
        return invalid(format!("partition has no block {i}"));
    };
    if block.len() < 2 {
        return invalid("refined block must have at least two vertices");
    }
    let (h, verts) = g.induced(block)?;
    if q.vertex_count() != verts.len() {
        return invalid("inner partition does not match the block size");
    }
    let t = p.block_count();
    let mut labels = p.rgs.clone();
    for (j, &v) in verts.iter().enumerate() {
        labels[v] = if q.rgs[j] == 0 { i } else { t + q.rgs[j] - 1 };
    }
    let refined = Partition::from_labels(&labels);
    let direct = weight(g, &refined, which)?;
    let combined = weight(&h, q, which)? + weight(g, p, which)? - which.refinement_offset();
    if direct != combined {
        return Err(Error::Internal(format!(
            "refinement identity fails: {direct} != {combined}"
        )));
    }
    Ok(direct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialMode {
    /// Contractions into `{2K₂, 3K₂, T_{2,2,3}, T_{1,3,3}}`.
    Troublesome,
    /// Contractions into `aK₂` (`2 <= a <= 5`) or a 6-edge-connected
    /// `T_{a,b,c}` with `10 <= a+b+c <= 11`.
    Problematic,
}

/// Whether `label` (the catalog name of `h`) is a target of `mode`.
pub fn is_special(h: &Multigraph, label: CatalogLabel, mode: SpecialMode) -> bool {
    use CatalogLabel::*;
    match mode {
        SpecialMode::Troublesome => matches!(
            label,
            Fold(2) | Fold(3) | Triangle(2, 2, 3) | Triangle(1, 3, 3)
        ),
        SpecialMode::Problematic => match label {
            Fold(a) => (2..=5).contains(&a),
            Triangle(a, b, c) => (10..=11).contains(&(a + b + c)) && h.edge_connectivity() >= 6,
            _ => false,
        },
    }
}

/// All targets of `mode`.
pub fn special_targets(mode: SpecialMode) -> Vec<CatalogLabel> {
    match mode {
        SpecialMode::Troublesome => vec![
            CatalogLabel::Fold(2),
            CatalogLabel::Fold(3),
            CatalogLabel::Triangle(2, 2, 3),
            CatalogLabel::Triangle(1, 3, 3),
        ],
        SpecialMode::Problematic => {
            let mut out: Vec<CatalogLabel> = (2..=5).map(CatalogLabel::Fold).collect();
            for a in 1..=11 {
                for b in a..=11 {
                    for c in b..=11 {
                        let label = CatalogLabel::Triangle(a, b, c);
                        if (10..=11).contains(&(a + b + c))
                            && label.build().is_ok_and(|h| h.edge_connectivity() >= 6)
                        {
                            out.push(label);
                        }
                    }
                }
            }
            out
        }
    }
}

/// First partition into two or three blocks, in restricted-growth order,
/// whose contraction is a target of `mode`.
pub fn find_special_partition(
    g: &Multigraph,
    mode: SpecialMode,
    cap: usize,
) -> Result<Option<(Partition, CatalogLabel)>> {
    check_cap(g, cap)?;
    let mut hit = None;
    for_each_partition(g, 3, |rgs, _| {
        let p = Partition { rgs: rgs.to_vec() };
        let t = p.block_count();
        if !(2..=3).contains(&t) {
            return true;
        }
        let h = p.quotient(g);
        if let Some(label) = catalog_match(&h) {
            if is_special(&h, label, mode) {
                hit = Some((p, label));
                return false;
            }
        }
        true
    });
    Ok(hit)
}
