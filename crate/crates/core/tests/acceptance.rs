//! Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
//! below; every weight, boundary and charge comparison is exact.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use circflow::gen;
use circflow::orient::{
    beta_orientation, find_circular_flow, mod_orientation, strongly_connected, verify_circular_flow, Boundary,
    FlowSearch, Search, SearchLimits, Strong, StrongLimits,
};
use circflow::planar::{charge_bound, discharge, euler_bound, strings_and_weak_adjacency, Mode, RotationSystem};
use circflow::reduce::{
    find_strong_subgraph, forbidden_scan, lift_first_type, lift_second_type, pull_back_first, pull_back_second,
    solve_planar, strong_catalog, Direction, SolveOutcome, SolverConfig,
};
use circflow::weights::{min_weight, refinement_weight, special_targets, weight, Partition, SpecialMode, WeightFn};
use circflow::{catalog_match, CatalogLabel, Multigraph};

const Z5_YES_LIMIT: Duration = Duration::from_secs(1);
const Z7_LIMIT: Duration = Duration::from_secs(60);
const FAMILY_LIMIT: Duration = Duration::from_secs(600);
const SOLVE_LIMIT: Duration = Duration::from_secs(60);
const REFINEMENT_TRIPLES: usize = 1000;
const SAMPLED_PARTITIONS: usize = 10_000;
const PULLBACK_INSTANCES: usize = 1000;
const REVERSAL_SAMPLES: usize = 1000;
const RELABEL_SAMPLES: usize = 20;

type Check = std::result::Result<String, String>;

fn label(s: &str) -> CatalogLabel {
    s.parse().unwrap()
}

fn build(s: &str) -> Multigraph {
    label(s).build().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

/// `yes` graphs must certify within `limit`; `no` graphs must fail and the
/// given witness must be among the failing boundaries.
fn certify(k: u32, yes: &[&str], no: &[(&str, &[u32])], limit: Duration) -> Check {
    let mut slowest = Duration::ZERO;
    for name in yes {
        let g = build(name);
        let (r, dt) = timed(|| strongly_connected(&g, k, StrongLimits::default()).unwrap());
        slowest = slowest.max(dt);
        ensure(r.is_yes(), || format!("{name} not certified mod {k}"))?;
        ensure(common::strongly_connected(&g, k), || format!("oracle disagrees on {name}"))?;
        ensure(dt < limit, || format!("{name} took {dt:?}"))?;
    }
    for (name, witness) in no {
        let g = build(name);
        let (r, dt) = timed(|| strongly_connected(&g, k, StrongLimits::default()).unwrap());
        slowest = slowest.max(dt);
        ensure(dt < limit, || format!("{name} took {dt:?}"))?;
        let Strong::No { witness: found } = r else {
            return Err(format!("{name} certified mod {k}"));
        };
        let beta = Boundary::new(k, witness.iter().map(|&x| x as i64).collect()).unwrap();
        ensure(
            beta_orientation(&g, &beta, SearchLimits::default()).unwrap().is_refuted(),
            || format!("{name}: {witness:?} is achievable"),
        )?;
        ensure(!common::achievable(&g, k).contains(*witness), || format!("oracle achieves {witness:?} on {name}"))?;
        ensure(
            common::first_unachievable(&g, k).as_deref() == Some(found.values()),
            || format!("{name}: reported witness {:?} is not the least failing boundary", found.values()),
        )?;
    }
    Ok(format!(
        "{} certified, {} refuted with witnesses; slowest {slowest:.2?}",
        yes.len(),
        no.len()
    ))
}

fn criterion_1() -> Check {
    certify(
        5,
        &["4K2", "T2,3,3", "2K4", "3C4"],
        &[("2K2", &[1, 4]), ("3K2", &[0, 0]), ("T2,2,3", &[1, 2, 2]), ("T1,3,3", &[1, 1, 3])],
        Z5_YES_LIMIT,
    )
}

fn criterion_2() -> Check {
    certify(
        7,
        &["6K2", "3K4+", "T2,5,5", "T3,4,5", "T4,4,4", "5C4="],
        &[
            ("3K4", &[0, 0, 0, 0]),
            ("T1,5,5", &[1, 1, 5]),
            ("T2,4,5", &[1, 2, 4]),
            ("T3,3,5", &[1, 3, 3]),
            ("T3,4,4", &[2, 2, 3]),
        ],
        Z7_LIMIT,
    )
}

/// Canonical form of a 4-vertex multigraph: least multiplicity vector over
/// all relabellings.
fn quad_form(g: &Multigraph) -> Vec<usize> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut best: Option<Vec<usize>> = None;
    let mut perm = [0, 1, 2, 3];
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for p in perms {
        let v: Vec<usize> = pairs.iter().map(|&(a, b)| g.mult(p[a], p[b])).collect();
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.unwrap()
}

fn permutations(a: &mut [usize; 4], i: usize, out: &mut Vec<[usize; 4]>) {
    if i == 4 {
        out.push(*a);
        return;
    }
    for j in i..4 {
        a.swap(i, j);
        permutations(a, i + 1, out);
        a.swap(i, j);
    }
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut expected = BTreeSet::new();
    for code in 0..6usize.pow(6) {
        let m: Vec<usize> = (0..6).map(|i| code / 6usize.pow(i) % 6).collect();
        if m.iter().sum::<usize>() != 19 {
            continue;
        }
        let g = Multigraph::from_classes(4, pairs.iter().zip(&m).filter(|(_, &x)| x > 0).map(|(&(u, v), &x)| (u, v, x))).unwrap();
        if g.min_degree() >= 8 {
            expected.insert(quad_form(&g));
        }
    }
    let family = circflow::catalog::quad19_family();
    let listed: BTreeSet<Vec<usize>> = family.iter().map(|l| quad_form(&l.build().unwrap())).collect();
    ensure(listed == expected && family.len() == expected.len(), || {
        format!("library lists {} graphs, enumeration finds {}", family.len(), expected.len())
    })?;
    for l in &family {
        let g = l.build().unwrap();
        ensure(strongly_connected(&g, 7, StrongLimits::default()).unwrap().is_yes(), || format!("{l} not certified"))?;
        ensure(common::strongly_connected(&g, 7), || format!("oracle rejects {l}"))?;
    }
    let dt = start.elapsed();
    ensure(dt < FAMILY_LIMIT, || format!("took {dt:?}"))?;
    Ok(format!("{} graphs up to isomorphism, all strongly Z7-connected; {dt:.2?}", family.len()))
}

fn criterion_4() -> Check {
    let mut cases: Vec<(String, WeightFn, i64)> = vec![
        ("3K2".into(), WeightFn::W, 3),
        ("2K2".into(), WeightFn::W, 1),
        ("T2,2,3".into(), WeightFn::W, 0),
        ("T1,3,3".into(), WeightFn::W, 0),
        ("3K4".into(), WeightFn::Rho, -1),
    ];
    for a in 2..=5 {
        cases.push((format!("{a}K2"), WeightFn::Rho, 2 * a - 3));
    }
    // Multiplicities stay at most 5, as in the setting where the values are used.
    for a in 1..=5 {
        for b in a..=5 {
            for c in b..=5 {
                cases.push((format!("T{a},{b},{c}"), WeightFn::Rho, 2 * (a + b + c) - 20));
            }
        }
    }
    for (name, which, want) in &cases {
        let g = build(name);
        let (value, argmin) = min_weight(&g, *which, 12).unwrap();
        ensure(value == *want, || format!("{name}: {which:?} = {value}, expected {want}"))?;
        ensure(argmin.is_trivial(), || format!("{name}: argmin {argmin}"))?;
        let f = if *which == WeightFn::W { common::w } else { common::rho };
        let attaining: Vec<Vec<usize>> = common::partitions(g.vertex_count()).into_iter().filter(|p| f(&g, p) == *want).collect();
        ensure(attaining.len() == 1, || format!("{name}: minimum attained by {attaining:?}"))?;
        let oracle_min = common::partitions(g.vertex_count()).iter().map(|p| f(&g, p)).min().unwrap();
        ensure(oracle_min == *want, || format!("{name}: oracle minimum {oracle_min}"))?;
    }
    Ok(format!("{} weight values exact, each attained only by the trivial partition", cases.len()))
}

fn criterion_5() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let mut done = 0;
    while done < REFINEMENT_TRIPLES {
        let n = rng.gen_range(2..=7);
        let g = common::random_graph(&mut rng, n, 4);
        let p = Partition::random(n, n, &mut rng);
        let blocks = p.blocks();
        let Some(i) = blocks.iter().position(|b| b.len() >= 2) else { continue };
        let q = Partition::random(blocks[i].len(), blocks[i].len(), &mut rng);
        // Refined labels built here, weights from the oracle.
        let t = p.block_count();
        let mut labels = p.rgs().to_vec();
        for (j, &v) in blocks[i].iter().enumerate() {
            labels[v] = if q.rgs()[j] == 0 { i } else { t + q.rgs()[j] - 1 };
        }
        let (h, _) = g.induced(&blocks[i]).unwrap();
        for (which, f, offset) in [(WeightFn::W, common::w as fn(&Multigraph, &[usize]) -> i64, 8), (WeightFn::Rho, common::rho, 14)] {
            let lhs = f(&g, &labels);
            let rhs = f(&h, q.rgs()) + f(&g, p.rgs()) - offset;
            ensure(lhs == rhs, || format!("identity fails on {g:?}, {p}, block {i}, {q}"))?;
            let lib = refinement_weight(&g, &p, i, &q, which).map_err(|e| e.to_string())?;
            ensure(lib == lhs, || format!("library gives {lib}, oracle {lhs}"))?;
        }
        done += 1;
    }
    Ok(format!("{done} triples, both identities, zero violations"))
}

fn criterion_6() -> Check {
    let mut graphs = 0;
    let mut mismatches = Vec::new();
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut m = vec![0usize; pairs.len()];
        loop {
            if m.iter().sum::<usize>() <= 6 {
                let g = Multigraph::from_classes(n, pairs.iter().zip(&m).filter(|(_, &x)| x > 0).map(|(&(u, v), &x)| (u, v, x))).unwrap();
                if g.is_connected() {
                    graphs += 1;
                    for p in 1..=3u32 {
                        let a = 2 * p + 1;
                        let flow = match find_circular_flow(&g, a, p, 20).unwrap() {
                            FlowSearch::Found(f) => {
                                verify_circular_flow(&g, &f).map_err(|e| e.to_string())?;
                                true
                            }
                            FlowSearch::Refuted { .. } => false,
                        };
                        let orient = match mod_orientation(&g, p, SearchLimits::default()).unwrap() {
                            Search::Found(c) => {
                                let zero = Boundary::zero(a, n).unwrap();
                                ensure(common::certificate_realizes(&g, &zero, &c), || format!("bad certificate on {g:?}"))?;
                                true
                            }
                            Search::Refuted { .. } => false,
                            Search::Refused { .. } => return Err(format!("search refused on {g:?}")),
                        };
                        let oracle_flow = common::circular_flow_exists(&g, a as i64, p as i64);
                        let oracle_orient = common::achievable(&g, a).contains(&vec![0; n]);
                        if !(flow == orient && flow == oracle_flow && orient == oracle_orient) {
                            mismatches.push(format!("{g:?} p={p}"));
                        }
                    }
                }
            }
            // Next multiplicity vector with entries in 0..=6.
            let mut i = 0;
            while i < m.len() && m[i] == 6 {
                m[i] = 0;
                i += 1;
            }
            if i == m.len() {
                break;
            }
            m[i] += 1;
        }
    }
    ensure(mismatches.is_empty(), || format!("{} mismatches, first {}", mismatches.len(), mismatches[0]))?;
    Ok(format!("{graphs} connected graphs x 3 values of p, zero mismatches"))
}

fn solve_checked(name: &str, rs: &RotationSystem, p: u32, expect_found: bool) -> std::result::Result<Duration, String> {
    let g = rs.graph();
    let (report, dt) = timed(|| solve_planar(&g, p, Some(rs), &SolverConfig::default()));
    let report = report.map_err(|e| format!("{name}: {e}"))?;
    ensure(dt < SOLVE_LIMIT, || format!("{name} took {dt:?}"))?;
    match (&report.outcome, expect_found) {
        (SolveOutcome::Found(c), true) => {
            let zero = Boundary::zero(2 * p + 1, g.vertex_count()).unwrap();
            ensure(common::certificate_realizes(&g, &zero, c), || format!("{name}: certificate rejected"))?;
        }
        (SolveOutcome::Refuted, false) => {
            ensure(!common::achievable(&g, 2 * p + 1).contains(&vec![0; g.vertex_count()]), || {
                format!("{name}: refuted but the oracle finds an orientation")
            })?;
        }
        (other, _) => return Err(format!("{name}: unexpected outcome {other:?}")),
    }
    Ok(dt)
}

fn criterion_7() -> Check {
    let mut count = 0;
    let mut slowest = Duration::ZERO;
    let mut rng = StdRng::seed_from_u64(7);
    for n in 4..=12 {
        slowest = slowest.max(solve_checked(&format!("5C{n}"), &gen::kcycle(5, n).unwrap(), 2, true)?);
        count += 1;
    }
    for n in 3..=10 {
        slowest = slowest.max(solve_checked(&format!("8C{n}"), &gen::kcycle(8, n).unwrap(), 3, true)?);
        count += 1;
    }
    for (k, p, need) in [(5, 2, 10), (8, 3, 16)] {
        for n in 4..=8 {
            for _ in 0..2 {
                let base = gen::random_triangulation(n, 10, &mut rng).unwrap();
                let rs = gen::replicate(&base, k).unwrap();
                let lam = rs.graph().edge_connectivity();
                ensure(lam >= need, || format!("{k}-replicated triangulation on {n} vertices is only {lam}-edge-connected"))?;
                slowest = slowest.max(solve_checked(&format!("{k}-replicated triangulation n={n}"), &rs, p, true)?);
                count += 1;
            }
        }
    }
    slowest = slowest.max(solve_checked("K4", &gen::k4(), 2, false)?);
    count += 1;
    Ok(format!("{count} instances, K4 refuted, slowest {slowest:.2?}"))
}

fn corpus() -> Vec<(String, RotationSystem)> {
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(8);
    for (k, n) in [(5, 4), (5, 7), (8, 5), (3, 3), (2, 6)] {
        out.push((format!("{k}C{n}"), gen::kcycle(k, n).unwrap()));
    }
    for k in [1, 2, 3, 5, 8] {
        for n in [4, 6, 8] {
            let base = gen::random_triangulation(n, 10, &mut rng).unwrap();
            out.push((format!("{k}x triangulation n={n}"), gen::replicate(&base, k).unwrap()));
        }
        out.push((format!("{k}x octahedron"), gen::replicate(&gen::octahedron(), k).unwrap()));
    }
    for name in ["4K2", "T2,3,3", "2K4", "3C4", "3K4", "5C4=", "3C4o", "T4,4,4ooo", "5C4=oo-id"] {
        out.push((name.into(), gen::catalog_embedding(label(name)).unwrap()));
    }
    out
}

/// Faces whose three sides are strings of lengths `ts`, as a sorted multiset.
fn faces_of_type(rs: &RotationSystem, ts: &[usize]) -> Vec<usize> {
    let faces = rs.faces().unwrap();
    let strings = strings_and_weak_adjacency(rs, &faces);
    let mut want = ts.to_vec();
    want.sort();
    (0..faces.faces.len())
        .filter(|&f| {
            let mut t: Vec<usize> = strings.links.iter().filter(|l| l.from == f).map(|l| l.t()).collect();
            t.sort();
            faces.faces[f].len() == ts.len() && t == want
        })
        .collect()
}

fn criterion_8() -> Check {
    let mut ledgers = 0;
    let mut bounds = 0;
    for (name, rs) in corpus() {
        let g = rs.graph();
        let f = rs.faces().unwrap().faces.len() as i64;
        for mode in [Mode::Z5, Mode::Z7] {
            let ledger = discharge(&rs, mode).map_err(|e| format!("{name}: {e}"))?;
            ensure(ledger.total() == Rational64::from_integer(2 * g.edge_count() as i64), || format!("{name}: charge not conserved"))?;
            ensure(ledger.replay() == ledger.final_charge, || format!("{name}: ledger replay differs"))?;
            ledgers += 1;
            let f_w: fn(&Multigraph, &[usize]) -> i64 = if mode == Mode::Z5 { common::w } else { common::rho };
            let min = common::partitions(g.vertex_count()).iter().map(|p| f_w(&g, p)).min().unwrap();
            if min >= 0 {
                let lhs = Rational64::from_integer(2 * g.edge_count() as i64);
                let rhs = euler_bound(mode, f);
                ensure(lhs <= rhs, || format!("{name}: 2|E| = {lhs} exceeds {rhs} in {mode:?}"))?;
                ensure(charge_bound(&g, mode, &rs).unwrap(), || format!("{name}: library bound disagrees"))?;
                bounds += 1;
            }
        }
    }
    // Worked face values on embeddings free of the Z5 configurations.
    let k4 = gen::k4();
    let mut doubled_rot = k4.clone();
    doubled_rot = RotationSystem::expand(&doubled_rot, &|u, v| if (u, v) == (0, 1) || (u, v) == (1, 0) { 2 } else { 1 });
    let two_faces = gen::kcycle(2, 5).unwrap();
    let checks: [(&str, &RotationSystem, &[usize], Rational64, bool); 3] = [
        ("(1,1,1)-faces of K4", &k4, &[1, 1, 1], Rational64::from_integer(3), true),
        ("(2,1,1)-faces of K4 with a doubled edge", &doubled_rot, &[2, 1, 1], Rational64::new(24, 9), false),
        ("2-faces of 2C5", &two_faces, &[], Rational64::new(22, 9), true),
    ];
    let mut worked = 0;
    for (what, rs, ts, value, exact) in checks {
        ensure(forbidden_scan(&rs.graph(), Mode::Z5).is_empty(), || format!("{what}: contains a forbidden configuration"))?;
        let ledger = discharge(rs, Mode::Z5).unwrap();
        let faces = rs.faces().unwrap();
        let picked: Vec<usize> = if ts.is_empty() {
            (0..faces.faces.len()).filter(|&f| faces.faces[f].len() == 2).collect()
        } else {
            faces_of_type(rs, ts)
        };
        ensure(!picked.is_empty(), || format!("{what}: no such faces"))?;
        for f in picked {
            let c = ledger.final_charge[f];
            let ok = if exact { c == value } else { c >= value };
            ensure(ok, || format!("{what}: face {f} ends at {c}"))?;
            worked += 1;
        }
    }
    Ok(format!("{ledgers} ledgers conserved, {bounds} bounds exact, {worked} worked face values"))
}

fn criterion_9() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let mut instances: Vec<(String, Multigraph)> = Vec::new();
    for k in [6, 7] {
        for n in [3, 5, 8] {
            instances.push((format!("{k}C{n}"), gen::kcycle(k, n).unwrap().graph()));
        }
    }
    for k in [4, 5] {
        for n in [4, 6, 9, 12] {
            let base = gen::random_triangulation(n, 20, &mut rng).unwrap();
            instances.push((format!("{k}x triangulation n={n}"), gen::replicate(&base, k).unwrap().graph()));
        }
    }
    let mut sampled = 0;
    for (name, g) in &instances {
        let lam = g.edge_connectivity();
        ensure(lam >= 11, || format!("{name} is only {lam}-edge-connected"))?;
        let n = g.vertex_count();
        let mut drawn = 0;
        while drawn < SAMPLED_PARTITIONS {
            let p = Partition::random(n, n, &mut rng);
            // The whole vertex set has no boundary; the bound concerns t >= 2.
            if p.block_count() < 2 {
                continue;
            }
            let w = weight(g, &p, WeightFn::W).unwrap();
            ensure(w >= 19, || format!("{name}: w({p}) = {w}"))?;
            ensure(w == common::w(g, p.rgs()), || format!("{name}: oracle weight differs at {p}"))?;
            drawn += 1;
        }
        sampled += drawn;
    }
    // Problematic graphs: aK2 with 2 <= a <= 5 and 6-edge-connected T_{a,b,c}
    // with a+b+c in 10..=11.
    let mut members = Vec::new();
    for a in 2..=5 {
        members.push(format!("{a}K2"));
    }
    for a in 1..=11 {
        for b in a..=11 {
            for c in b..=11 {
                if (10..=11).contains(&(a + b + c)) && common::edge_connectivity(&build(&format!("T{a},{b},{c}"))) >= 6 {
                    members.push(format!("T{a},{b},{c}"));
                }
            }
        }
    }
    let listed: BTreeSet<String> = special_targets(SpecialMode::Problematic).iter().map(|l| l.to_string()).collect();
    ensure(listed == members.iter().cloned().collect(), || format!("library lists {listed:?}"))?;
    for m in &members {
        let lam = common::edge_connectivity(&build(m));
        ensure(lam < 8, || format!("{m} is {lam}-edge-connected"))?;
    }
    Ok(format!(
        "{} instances, {sampled} partitions with t >= 2 all w >= 19; {} problematic graphs, none 8-edge-connected",
        instances.len(),
        members.len()
    ))
}

fn criterion_10() -> Check {
    let mut rng = StdRng::seed_from_u64(10);
    // Reversal symmetry.
    for _ in 0..REVERSAL_SAMPLES {
        let n = rng.gen_range(2..=5);
        let g = common::random_graph(&mut rng, n, 3);
        let k = *[3u32, 5, 7].choose(&mut rng).unwrap();
        let beta = common::random_boundary(&mut rng, k, n);
        let a = beta_orientation(&g, &beta, SearchLimits::default()).unwrap();
        let b = beta_orientation(&g, &beta.negated(), SearchLimits::default()).unwrap();
        ensure(a.is_found() == b.is_found(), || format!("reversal: {g:?} {beta:?}"))?;
        if let Search::Found(c) = a {
            ensure(common::certificate_realizes(&g, &beta.negated(), &c.reversed()), || format!("reversed certificate fails on {g:?}"))?;
        }
    }
    // Monotonicity and the spanning-tree condition over both strong catalogs.
    let mut catalog_checks = 0;
    for (k, p) in [(5u32, 2usize), (7, 3)] {
        for e in strong_catalog(k).unwrap() {
            let n = e.graph.vertex_count();
            for u in 0..n {
                for v in u + 1..n {
                    let mut h = e.graph.clone();
                    h.add_edges(u, v, 1).unwrap();
                    ensure(strongly_connected(&h, k, StrongLimits::default()).unwrap().is_yes(), || {
                        format!("monotonicity: {} + {u}{v} mod {k}", e.label)
                    })?;
                    catalog_checks += 1;
                }
            }
            for rgs in common::partitions(n) {
                let (d, t) = common::degree_sum(&e.graph, &rgs);
                ensure(d >= 4 * p * (t - 1), || format!("spanning trees: {} at {rgs:?}", e.label))?;
            }
        }
    }
    // First-type lifting soundness.
    let mut first = 0;
    let mut tries = 0;
    while first < PULLBACK_INSTANCES {
        tries += 1;
        ensure(tries < 200 * PULLBACK_INSTANCES, || format!("only {first} first-type instances found"))?;
        let n = rng.gen_range(3..=5);
        let g = common::random_graph(&mut rng, n, 4);
        let v = rng.gen_range(0..n);
        let nb: Vec<usize> = g.neighbors(v).into_iter().map(|(w, _)| w).collect();
        let pairs: Vec<(usize, usize)> = nb.iter().flat_map(|&a| nb.iter().map(move |&b| (a, b))).filter(|&(a, b)| a < b && g.mult(a, b) > 0).collect();
        let Some(&(a, b)) = pairs.choose(&mut rng) else { continue };
        let lifted = g.lift(v, a, b).unwrap();
        let Some(hit) = find_strong_subgraph(&lifted, 5).unwrap() else { continue };
        let step = lift_first_type(&g, 5, &[(v, a, b)], &hit.vertices).unwrap();
        let beta = common::random_boundary(&mut rng, 5, n);
        let pushed = beta.push_forward(&step.map, step.after.vertex_count());
        let Search::Found(c) = beta_orientation(&step.after, &pushed, SearchLimits::default()).unwrap() else { continue };
        let cert = pull_back_first(&g, &beta, &step, &c).map_err(|e| e.to_string())?;
        ensure(common::certificate_realizes(&g, &beta, &cert), || format!("first-type pullback fails on {g:?}"))?;
        first += 1;
    }
    // Second-type lifting soundness.
    let mut second = 0;
    while second < PULLBACK_INSTANCES {
        let n = rng.gen_range(3..=6);
        let g = common::random_graph(&mut rng, n, 3);
        let v = rng.gen_range(0..n);
        let mut ends: Vec<usize> = g.neighbors(v).into_iter().flat_map(|(w, m)| std::iter::repeat(w).take(m)).collect();
        ends.shuffle(&mut rng);
        let mut lifts = Vec::new();
        let mut oriented = Vec::new();
        while let Some(w) = ends.pop() {
            match ends.iter().position(|&x| x != w).filter(|_| rng.gen_bool(0.5)) {
                Some(pos) => lifts.push((w, ends.remove(pos))),
                None => oriented.push((w, if rng.gen_bool(0.5) { Direction::Out } else { Direction::In })),
            }
        }
        let net: i64 = oriented.iter().map(|&(_, d)| if d == Direction::Out { 1 } else { -1 }).sum();
        let mut vals: Vec<i64> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        vals[v] = net;
        let other = (v + 1) % n;
        vals[other] = 0;
        vals[other] = -vals.iter().sum::<i64>();
        let beta = Boundary::new(5, vals).unwrap();
        let (after, beta2, step) = lift_second_type(&g, &beta, v, &oriented, &lifts).unwrap();
        let Search::Found(c) = beta_orientation(&after, &beta2, SearchLimits::default()).unwrap() else { continue };
        let cert = pull_back_second(&g, &beta, &step, &c).map_err(|e| e.to_string())?;
        ensure(common::certificate_realizes(&g, &beta, &cert), || format!("second-type pullback fails on {g:?}"))?;
        second += 1;
    }
    // Catalog recognition under relabelling.
    let mut labels: Vec<CatalogLabel> = ["2K2", "3K2", "4K2", "6K2", "T2,3,3", "T1,3,3", "T3,4,5", "2K4", "3C4", "3K4", "3K4+", "5C4=", "5C4-", "3C4o", "T2,3,3oo", "T1,1,5o", "T*1,1,5", "5C4=oo", "5C4=oo-id", "T4,4,4ooo"]
        .iter()
        .map(|s| label(s))
        .collect();
    labels.extend(circflow::catalog::quad19_family());
    let mut relabelled = 0;
    for l in &labels {
        let g = l.build().unwrap();
        // Family members that are also named graphs (5C4=, 5C4-) match by name.
        let m = catalog_match(&g);
        let named = m.is_some_and(|m| !matches!(m, CatalogLabel::Quad(_)));
        ensure(m == Some(*l) || (matches!(l, CatalogLabel::Quad(_)) && named), || format!("{l} recognized as {m:?}"))?;
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        for _ in 0..RELABEL_SAMPLES {
            perm.shuffle(&mut rng);
            ensure(catalog_match(&g.relabel(&perm).unwrap()) == m, || format!("{l} changes under {perm:?}"))?;
            relabelled += 1;
        }
    }
    Ok(format!(
        "{REVERSAL_SAMPLES} reversal samples, {catalog_checks} added-copy checks, {first} + {second} pullbacks, {relabelled} relabellings; zero violations"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("catalog certification mod 5", criterion_1),
        ("catalog certification mod 7", criterion_2),
        ("4-vertex 19-edge family mod 7", criterion_3),
        ("weight tables", criterion_4),
        ("refinement identities", criterion_5),
        ("flow and orientation equivalence", criterion_6),
        ("solver end to end", criterion_7),
        ("discharging", criterion_8),
        ("edge-connectivity bounds", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let dt = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{dt:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{dt:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
