//! Line-oriented text formats. Blank lines and lines starting with `#` are
//! ignored everywhere; parse errors carry 1-based line numbers.
//!
//! ```text
//! mg 3                       orient 5            rot 0: 1:0 1:1 2:0
//! c 0 1 2                    net 0 1 2           rot 1: 0:1 0:0 2:0
//! c 1 2 1                    net 1 2 -1          rot 2: 1:0 0:0
//!
//! flow 5                     part 4: 0 0 1 2     beta 5: 1 4 0
//! val 0 1 0 2 uv
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::catalog::CatalogLabel;
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::orient::{Boundary, FlowValue, OrientationCertificate, ZFlow};
use crate::planar::{EdgeRef, RotationSystem};
use crate::reduce::{Config, Direction, ReductionStep, SecondType};
use crate::weights::Partition;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Meaningful lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .or_else(|_| perr(line, format!("expected {what}, found `{tok}`")))
}

fn expect_fields<'a>(line: usize, l: &'a str, count: usize, shape: &str) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = l.split_whitespace().collect();
    if f.len() != count {
        return perr(line, format!("expected `{shape}`"));
    }
    Ok(f)
}

/// Splits `key args: rest` into the header fields and the list after `:`.
fn header_list(line: usize, l: &str, shape: &str) -> Result<(Vec<String>, Vec<String>)> {
    let Some((head, rest)) = l.split_once(':') else {
        return perr(line, format!("expected `{shape}`"));
    };
    Ok((
        head.split_whitespace().map(str::to_string).collect(),
        rest.split_whitespace().map(str::to_string).collect(),
    ))
}

/// Largest total edge count a graph file may declare.
pub const MAX_EDGES: usize = u32::MAX as usize;

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let mut it = lines(text);
    let Some((ln, first)) = it.next() else {
        return perr(1, "empty graph file");
    };
    let f = expect_fields(ln, first, 2, "mg <n>")?;
    if f[0] != "mg" {
        return perr(ln, "expected `mg <n>`");
    }
    let n: usize = num(ln, f[1], "vertex count")?;
    let mut g = Multigraph::new(n);
    let mut seen = BTreeSet::new();
    let mut total = 0usize;
    for (ln, l) in it {
        let f = expect_fields(ln, l, 4, "c <u> <v> <mult>")?;
        if f[0] != "c" {
            return perr(ln, "expected `c <u> <v> <mult>`");
        }
        let u: usize = num(ln, f[1], "vertex")?;
        let v: usize = num(ln, f[2], "vertex")?;
        let m: usize = num(ln, f[3], "multiplicity")?;
        if !(u < v && v < n) {
            return perr(ln, format!("need 0 <= u < v < {n}, got {u} {v}"));
        }
        if m == 0 {
            return perr(ln, "multiplicity must be at least 1");
        }
        if !seen.insert((u, v)) {
            return perr(ln, format!("class {u} {v} listed twice"));
        }
        total = match total.checked_add(m) {
            Some(t) if t <= MAX_EDGES => t,
            _ => return perr(ln, format!("more than {MAX_EDGES} edges")),
        };
        g.add_edges(u, v, m).or_else(|e| perr(ln, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &Multigraph) -> String {
    let mut s = format!("mg {}\n", g.vertex_count());
    for (u, v, m) in g.classes() {
        let _ = writeln!(s, "c {u} {v} {m}");
    }
    s
}

pub fn parse_certificate(text: &str) -> Result<OrientationCertificate> {
    let mut it = lines(text);
    let Some((ln, first)) = it.next() else {
        return perr(1, "empty certificate file");
    };
    let f = expect_fields(ln, first, 2, "orient <modulus>")?;
    if f[0] != "orient" {
        return perr(ln, "expected `orient <modulus>`");
    }
    let mut cert = OrientationCertificate::new(num(ln, f[1], "modulus")?);
    for (ln, l) in it {
        let f = expect_fields(ln, l, 4, "net <u> <v> <o>")?;
        if f[0] != "net" {
            return perr(ln, "expected `net <u> <v> <o>`");
        }
        let u: usize = num(ln, f[1], "vertex")?;
        let v: usize = num(ln, f[2], "vertex")?;
        let o: i64 = num(ln, f[3], "net count")?;
        if u == v {
            return perr(ln, "a net needs two distinct vertices");
        }
        let key = (u.min(v), u.max(v));
        let Some(o) = (if u < v { Some(o) } else { o.checked_neg() }) else {
            return perr(ln, "net count out of range");
        };
        if cert.nets.insert(key, o).is_some() {
            return perr(ln, format!("class {} {} listed twice", key.0, key.1));
        }
    }
    Ok(cert)
}

pub fn write_certificate(c: &OrientationCertificate) -> String {
    let mut s = format!("orient {}\n", c.modulus);
    for (&(u, v), &o) in &c.nets {
        let _ = writeln!(s, "net {u} {v} {o}");
    }
    s
}

pub fn parse_flow(text: &str) -> Result<ZFlow> {
    let mut it = lines(text);
    let Some((ln, first)) = it.next() else {
        return perr(1, "empty flow file");
    };
    let f = expect_fields(ln, first, 2, "flow <modulus>")?;
    if f[0] != "flow" {
        return perr(ln, "expected `flow <modulus>`");
    }
    let modulus = num(ln, f[1], "modulus")?;
    let mut values = Vec::new();
    for (ln, l) in it {
        let f = expect_fields(ln, l, 6, "val <u> <v> <copy> <value> <uv|vu>")?;
        if f[0] != "val" {
            return perr(ln, "expected `val <u> <v> <copy> <value> <uv|vu>`");
        }
        let u: usize = num(ln, f[1], "vertex")?;
        let v: usize = num(ln, f[2], "vertex")?;
        let copy: usize = num(ln, f[3], "copy index")?;
        let value: u32 = num(ln, f[4], "flow value")?;
        let (from, to) = match f[5] {
            "uv" => (u, v),
            "vu" => (v, u),
            d => return perr(ln, format!("direction must be `uv` or `vu`, found `{d}`")),
        };
        values.push(FlowValue {
            from,
            to,
            copy,
            value,
        });
    }
    Ok(ZFlow { modulus, values })
}

pub fn write_flow(flow: &ZFlow) -> String {
    let mut s = format!("flow {}\n", flow.modulus);
    for x in &flow.values {
        let (u, v, d) = if x.from < x.to {
            (x.from, x.to, "uv")
        } else {
            (x.to, x.from, "vu")
        };
        let _ = writeln!(s, "val {u} {v} {} {} {d}", x.copy, x.value);
    }
    s
}

fn single_line<'a>(text: &'a str, what: &str) -> Result<(usize, &'a str)> {
    let mut it = lines(text);
    let Some(first) = it.next() else {
        return perr(1, format!("empty {what} file"));
    };
    if let Some((ln, _)) = it.next() {
        return perr(ln, format!("unexpected content after the {what} line"));
    }
    Ok(first)
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    let (ln, l) = single_line(text, "partition")?;
    let (head, list) = header_list(ln, l, "part <n>: <block> ...")?;
    if head.len() != 2 || head[0] != "part" {
        return perr(ln, "expected `part <n>: <block> ...`");
    }
    let n: usize = num(ln, &head[1], "vertex count")?;
    if list.len() != n {
        return perr(ln, format!("expected {n} block ids, found {}", list.len()));
    }
    let rgs = list
        .iter()
        .map(|t| num(ln, t, "block id"))
        .collect::<Result<Vec<usize>>>()?;
    Partition::from_rgs(rgs).or_else(|e| perr(ln, e.to_string()))
}

pub fn write_partition(p: &Partition) -> String {
    let ids: Vec<String> = p.rgs().iter().map(|b| b.to_string()).collect();
    format!("part {}: {}\n", p.vertex_count(), ids.join(" "))
}

pub fn parse_boundary(text: &str) -> Result<Boundary> {
    let (ln, l) = single_line(text, "boundary")?;
    let (head, list) = header_list(ln, l, "beta <modulus>: <value> ...")?;
    if head.len() != 2 || head[0] != "beta" {
        return perr(ln, "expected `beta <modulus>: <value> ...`");
    }
    let k: u32 = num(ln, &head[1], "modulus")?;
    let values = list
        .iter()
        .map(|t| num(ln, t, "boundary value"))
        .collect::<Result<Vec<i64>>>()?;
    Boundary::new(k, values).or_else(|e| perr(ln, e.to_string()))
}

pub fn write_boundary(b: &Boundary) -> String {
    let vals: Vec<String> = b.values().iter().map(|x| x.to_string()).collect();
    format!("beta {}: {}\n", b.modulus(), vals.join(" "))
}

/// One `rot <v>: <u:copy> ...` line per vertex, in any order.
pub fn parse_rotation(text: &str) -> Result<RotationSystem> {
    let mut rows: BTreeMap<usize, Vec<EdgeRef>> = BTreeMap::new();
    let mut last = 1;
    for (ln, l) in lines(text) {
        last = ln;
        let (head, list) = header_list(ln, l, "rot <v>: <u:copy> ...")?;
        if head.len() != 2 || head[0] != "rot" {
            return perr(ln, "expected `rot <v>: <u:copy> ...`");
        }
        let v: usize = num(ln, &head[1], "vertex")?;
        let refs = list
            .iter()
            .map(|t| {
                let Some((a, b)) = t.split_once(':') else {
                    return perr(ln, format!("expected `<neighbour>:<copy>`, found `{t}`"));
                };
                Ok(EdgeRef {
                    neighbor: num(ln, a, "neighbour")?,
                    copy: num(ln, b, "copy index")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.insert(v, refs).is_some() {
            return perr(ln, format!("vertex {v} listed twice"));
        }
    }
    let n = rows.len();
    if let Some((&v, _)) = rows.iter().find(|(&v, _)| v >= n) {
        return perr(last, format!("vertices must be 0..{n}, found {v}"));
    }
    RotationSystem::from_refs(rows.into_values().collect()).or_else(|e| perr(last, e.to_string()))
}

pub fn write_rotation(rs: &RotationSystem) -> String {
    let mut s = String::new();
    for (v, list) in rs.to_refs().iter().enumerate() {
        let items: Vec<String> = list.iter().map(|r| format!("{}:{}", r.neighbor, r.copy)).collect();
        let _ = writeln!(s, "rot {v}: {}", items.join(" "));
    }
    s
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(f).collect::<Vec<_>>().join(",")
    }
}

fn split_list(tok: &str) -> Vec<&str> {
    if tok == "-" {
        Vec::new()
    } else {
        tok.split(',').collect()
    }
}

fn usize_list(ln: usize, tok: &str) -> Result<Vec<usize>> {
    split_list(tok).into_iter().map(|t| num(ln, t, "vertex")).collect()
}

fn parts<const K: usize>(ln: usize, tok: &str) -> Result<[usize; K]> {
    let v = tok
        .split(':')
        .map(|t| num(ln, t, "vertex"))
        .collect::<Result<Vec<usize>>>()?;
    v.try_into()
        .or_else(|_| perr(ln, format!("expected {K} colon-separated vertices, found `{tok}`")))
}

fn after_field(ln: usize, n: &str, m: &str) -> Result<(usize, usize)> {
    let (Some(n), Some(m)) = (n.strip_prefix("n="), m.strip_prefix("m=")) else {
        return perr(ln, "expected `n=<vertices> m=<edges>`");
    };
    Ok((num(ln, n, "vertex count")?, num(ln, m, "edge count")?))
}

fn label(ln: usize, tok: &str) -> Result<CatalogLabel> {
    tok.parse().or_else(|e: Error| perr(ln, e.to_string()))
}

/// One line per step:
///
/// ```text
/// contract 4K2 on 0,1 -> n=11 m=50
/// lift-first t113-lift-apex lifts 2:0:1 contract 4K2 on 0,1 -> n=5 m=30
/// lift-second 3 oriented 1+,4- lifts 0:2 deltas 1:1,4:-1 -> n=7 m=40
/// search n=6 m=30 nodes=812
/// ```
pub fn write_trace(trace: &[ReductionStep]) -> String {
    let mut s = String::new();
    let vs = |v: &Vec<usize>| join(v, |x| x.to_string());
    for step in trace {
        let _ = match step {
            ReductionStep::ContractStrong { label, vertices, after } => {
                writeln!(s, "contract {label} on {} -> n={} m={}", vs(vertices), after.0, after.1)
            }
            ReductionStep::LiftFirst {
                config,
                lifts,
                label,
                vertices,
                after,
            } => writeln!(
                s,
                "lift-first {} lifts {} contract {label} on {} -> n={} m={}",
                config.map_or("-".to_string(), |c| c.id().to_string()),
                join(lifts, |&(v, a, b)| format!("{v}:{a}:{b}")),
                vs(vertices),
                after.0,
                after.1
            ),
            ReductionStep::LiftSecond { step, after } => writeln!(
                s,
                "lift-second {} oriented {} lifts {} deltas {} -> n={} m={}",
                step.vertex,
                join(&step.oriented, |&(w, d)| format!(
                    "{w}{}",
                    if d == Direction::Out { '+' } else { '-' }
                )),
                join(&step.lifts, |&(a, b)| format!("{a}:{b}")),
                join(&step.deltas, |&(w, d)| format!("{w}:{d}")),
                after.0,
                after.1
            ),
            ReductionStep::Exhaustive { n, m, nodes } => writeln!(s, "search n={n} m={m} nodes={nodes}"),
        };
    }
    s
}

pub fn parse_trace(text: &str) -> Result<Vec<ReductionStep>> {
    let mut out = Vec::new();
    for (ln, l) in lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        let step = match f.first().copied() {
            Some("contract") => {
                let f = expect_fields(ln, l, 7, "contract <label> on <vertices> -> n=<n> m=<m>")?;
                if f[2] != "on" || f[4] != "->" {
                    return perr(ln, "expected `contract <label> on <vertices> -> n=<n> m=<m>`");
                }
                ReductionStep::ContractStrong {
                    label: label(ln, f[1])?,
                    vertices: usize_list(ln, f[3])?,
                    after: after_field(ln, f[5], f[6])?,
                }
            }
            Some("lift-first") => {
                let shape = "lift-first <config> lifts <v:a:b,...> contract <label> on <vertices> -> n=<n> m=<m>";
                let f = expect_fields(ln, l, 11, shape)?;
                if f[2] != "lifts" || f[4] != "contract" || f[6] != "on" || f[8] != "->" {
                    return perr(ln, format!("expected `{shape}`"));
                }
                let config = match f[1] {
                    "-" => None,
                    id => Some(Config::from_str(id).or_else(|e| perr(ln, e.to_string()))?),
                };
                ReductionStep::LiftFirst {
                    config,
                    lifts: split_list(f[3])
                        .into_iter()
                        .map(|t| parts::<3>(ln, t).map(|[v, a, b]| (v, a, b)))
                        .collect::<Result<_>>()?,
                    label: label(ln, f[5])?,
                    vertices: usize_list(ln, f[7])?,
                    after: after_field(ln, f[9], f[10])?,
                }
            }
            Some("lift-second") => {
                let shape = "lift-second <v> oriented <w±,...> lifts <a:b,...> deltas <w:d,...> -> n=<n> m=<m>";
                let f = expect_fields(ln, l, 11, shape)?;
                if f[2] != "oriented" || f[4] != "lifts" || f[6] != "deltas" || f[8] != "->" {
                    return perr(ln, format!("expected `{shape}`"));
                }
                let oriented = split_list(f[3])
                    .into_iter()
                    .map(|t| {
                        let (w, d) = if let Some(w) = t.strip_suffix('+') {
                            (w, Direction::Out)
                        } else if let Some(w) = t.strip_suffix('-') {
                            (w, Direction::In)
                        } else {
                            return perr(ln, format!("oriented edge `{t}` needs a trailing + or -"));
                        };
                        Ok((num(ln, w, "vertex")?, d))
                    })
                    .collect::<Result<_>>()?;
                let deltas = split_list(f[7])
                    .into_iter()
                    .map(|t| {
                        let Some((w, d)) = t.split_once(':') else {
                            return perr(ln, format!("expected `<vertex>:<delta>`, found `{t}`"));
                        };
                        Ok((num(ln, w, "vertex")?, num(ln, d, "delta")?))
                    })
                    .collect::<Result<_>>()?;
                ReductionStep::LiftSecond {
                    step: SecondType {
                        vertex: num(ln, f[1], "vertex")?,
                        oriented,
                        lifts: split_list(f[5])
                            .into_iter()
                            .map(|t| parts::<2>(ln, t).map(|[a, b]| (a, b)))
                            .collect::<Result<_>>()?,
                        deltas,
                    },
                    after: after_field(ln, f[9], f[10])?,
                }
            }
            Some("search") => {
                let f = expect_fields(ln, l, 4, "search n=<n> m=<m> nodes=<count>")?;
                let (n, m) = after_field(ln, f[1], f[2])?;
                let Some(nodes) = f[3].strip_prefix("nodes=") else {
                    return perr(ln, "expected `nodes=<count>`");
                };
                ReductionStep::Exhaustive {
                    n,
                    m,
                    nodes: num(ln, nodes, "node count")?,
                }
            }
            Some(other) => return perr(ln, format!("unknown step `{other}`")),
            None => unreachable!("blank lines are skipped"),
        };
        out.push(step);
    }
    Ok(out)
}
