mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use circflow::gen;
use circflow::orient::{
    check_zflow, strongly_connected, verify_certificate, Boundary, SearchLimits, Strong, StrongLimits,
};
use circflow::planar::{charge_bound, discharge, euler_bound, Mode, RotationSystem};
use circflow::reduce::{forbidden_scan, solve_planar, SolveOutcome, SolverConfig};
use circflow::text;
use circflow::weights::{find_special_partition, min_weight, SpecialMode, WeightFn, WeightReport};
use circflow::{CatalogLabel, Error, Multigraph};

use report::Report;

#[derive(Parser)]
#[command(name = "circflow", version, about = "Modulo orientations and circular flows of multigraphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for randomized generators.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Node budget for one orientation search.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// Largest vertex count for strong-connectivity certification.
    #[arg(long, global = true)]
    max_vertices: Option<usize>,
    /// Largest vertex count for exhaustive partition enumeration.
    #[arg(long, default_value_t = circflow::weights::DEFAULT_PARTITION_CAP, global = true)]
    partition_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Z5,
    Z7,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Z5 => Mode::Z5,
            ModeArg::Z7 => Mode::Z7,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    W,
    Rho,
}

#[derive(Subcommand)]
enum Command {
    /// Verify an orientation certificate or a Z_k-flow against a graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "flow", required_unless_present = "flow")]
        cert: Option<PathBuf>,
        #[arg(long)]
        flow: Option<PathBuf>,
        /// Boundary the certificate must realize; zero when omitted.
        #[arg(long, requires = "cert")]
        boundary: Option<PathBuf>,
    },
    /// Decide strong Z_k-connectivity.
    Strong {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        modulus: u32,
    },
    /// Weight of a partition, or the minimum weight over all partitions.
    Weight {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = WhichArg::W)]
        which: WhichArg,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Look for a partition contracting to a troublesome (z5) or problematic (z7) graph.
    Troublesome {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Z5)]
        mode: ModeArg,
    },
    /// List forbidden configurations present in a graph.
    Scan {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Find a modulo (2p+1)-orientation by reduction and search.
    Solve(SolveArgs),
    /// Run the discharging rules on a plane embedding.
    Discharge {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rotation: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Generate a graph and its rotation system.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Write `<out>.mg` and `<out>.rot` instead of embedding them in the report.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    rotation: Option<PathBuf>,
    #[arg(long)]
    base_n: Option<usize>,
    #[arg(long)]
    max_direct_vertices: Option<usize>,
    #[arg(long)]
    no_lifts: bool,
    #[arg(long)]
    no_split: bool,
    #[arg(long)]
    split_threshold: Option<usize>,
    #[arg(long)]
    no_lift_connectivity_check: bool,
    /// Write the certificate here as well.
    #[arg(long)]
    cert_out: Option<PathBuf>,
    /// Write the reduction trace here as well.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// k parallel copies of every edge of C_n.
    Kcycle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Every edge of a plane base multiplied by k.
    Replicate {
        /// Rotation file of the base.
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// A named catalog graph, e.g. `T2,3,3` or `5C4=`.
    Catalog {
        #[arg(long)]
        name: String,
    },
    /// A random simple triangulation, optionally replicated.
    Triangulation {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        flips: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

/// Failure before a verdict: exit 1 for refusals, 2 for bad input.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::Refused(_)) { 1 } else { 2 };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(Report, u8), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot write {}: {e}", path.display()),
    })
}

fn load<T>(path: &Path, parse: fn(&str) -> circflow::Result<T>) -> std::result::Result<T, Failure> {
    parse(&read(path)?).map_err(|e| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    })
}

fn search_limits(g: &Global) -> SearchLimits {
    let mut l = SearchLimits::default();
    if let Some(n) = g.max_nodes {
        l.max_nodes = n;
    }
    l
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok((mut report, code)) => {
            report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
            let out = match cli.global.format {
                Format::Text => report.to_text(),
                Format::Structured => report.to_json() + "\n",
            };
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            if f.code == 1 {
                println!("verdict: refused");
            }
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let gl = &cli.global;
    match &cli.command {
        Command::Check {
            graph,
            cert,
            flow,
            boundary,
        } => check(graph, cert.as_deref(), flow.as_deref(), boundary.as_deref()),
        Command::Strong { graph, modulus } => {
            let g = load(graph, text::parse_graph)?;
            let mut limits = StrongLimits {
                search: search_limits(gl),
                ..StrongLimits::default()
            };
            if let Some(v) = gl.max_vertices {
                limits.max_vertices = v;
            }
            let mut r = Report::new("strong");
            r.input("graph", graph.display()).input("modulus", modulus);
            match strongly_connected(&g, *modulus, limits)? {
                Strong::Yes => r.verdict = "yes".into(),
                Strong::No { witness } => {
                    r.verdict = "no".into();
                    r.detail("witness", witness.values());
                    r.artifact("witness", text::write_boundary(&witness));
                }
            }
            Ok((r, 0))
        }
        Command::Weight {
            graph,
            which,
            partition,
        } => {
            let g = load(graph, text::parse_graph)?;
            let mut r = Report::new("weight");
            r.input("graph", graph.display());
            if let Some(path) = partition {
                let p = load(path, text::parse_partition)?;
                r.input("partition", path.display());
                let w = WeightReport::new(&g, p.clone())?;
                r.verdict = format!("w = {}, rho = {}", w.w, w.rho);
                r.detail("w", w.w).detail("rho", w.rho).detail("kind", p.kind());
            } else {
                let f = match which {
                    WhichArg::W => WeightFn::W,
                    WhichArg::Rho => WeightFn::Rho,
                };
                let (value, p) = min_weight(&g, f, gl.partition_cap)?;
                let name = if matches!(f, WeightFn::W) { "w" } else { "rho" };
                r.input("which", name);
                r.verdict = format!("{name} = {value}");
                r.detail(name, value)
                    .detail("argmin", p.to_string())
                    .detail("argmin_kind", p.kind());
                r.artifact("argmin", text::write_partition(&p));
            }
            Ok((r, 0))
        }
        Command::Troublesome { graph, mode } => {
            let g = load(graph, text::parse_graph)?;
            let special = match mode {
                ModeArg::Z5 => SpecialMode::Troublesome,
                ModeArg::Z7 => SpecialMode::Problematic,
            };
            let mut r = Report::new("troublesome");
            r.input("graph", graph.display()).input("mode", Mode::from(*mode).modulus());
            match find_special_partition(&g, special, gl.partition_cap)? {
                Some((p, label)) => {
                    r.verdict = "found".into();
                    r.detail("contraction", label.to_string()).detail("partition", p.to_string());
                    r.artifact("partition", text::write_partition(&p));
                }
                None => r.verdict = "none".into(),
            }
            Ok((r, 0))
        }
        Command::Scan { graph, mode } => {
            let g = load(graph, text::parse_graph)?;
            let hits = forbidden_scan(&g, (*mode).into());
            let mut r = Report::new("scan");
            r.input("graph", graph.display()).input("mode", Mode::from(*mode).modulus());
            r.verdict = if hits.is_empty() {
                "none".into()
            } else {
                format!("{} found", hits.len())
            };
            let listed: Vec<String> = hits
                .iter()
                .map(|h| {
                    let (lifts, target) = h.host_reduction();
                    format!("{} ({}) at {:?}: lift {lifts:?}, contract {target:?}", h.config.id(), h.label, h.witness)
                })
                .collect();
            r.detail("configurations", listed);
            Ok((r, 0))
        }
        Command::Solve(args) => solve(gl, args),
        Command::Discharge { graph, rotation, mode } => {
            let g = load(graph, text::parse_graph)?;
            let rs = load(rotation, text::parse_rotation)?;
            let mode = Mode::from(*mode);
            if !rs.matches(&g) {
                return Err(Error::InvalidArgument("rotation system does not match the graph".into()).into());
            }
            let ledger = discharge(&rs, mode)?;
            let mut r = Report::new("discharge");
            r.input("graph", graph.display())
                .input("rotation", rotation.display())
                .input("mode", mode.modulus());
            let total = ledger.total();
            let conserved = total == (2 * g.edge_count() as i64).into() && ledger.replay() == ledger.final_charge;
            r.verdict = if conserved { "conserved" } else { "not conserved" }.into();
            let faces = ledger.final_charge.len();
            r.detail("faces", faces)
                .detail("total", total.to_string())
                .detail("target", mode.target().to_string())
                .detail("min_charge", ledger.min_charge().map(|c| c.to_string()))
                .detail("below_target", ledger.below_target())
                .detail("euler_bound", euler_bound(mode, faces as i64).to_string());
            match charge_bound(&g, mode, &rs) {
                Ok(holds) => r.detail("bound_holds", holds),
                Err(Error::PreconditionFailed(m)) => r.detail("bound_holds", format!("not applicable: {m}")),
                Err(e) => return Err(e.into()),
            };
            let mut lines = String::new();
            for (f, c) in ledger.final_charge.iter().enumerate() {
                lines += &format!("face {f} length {} initial {} final {c}\n", ledger.lengths[f], ledger.initial[f]);
            }
            for t in &ledger.transfers {
                lines += &format!("{} {} -> {} {}\n", t.rule, t.from, t.to, t.amount);
            }
            r.artifact("ledger", lines);
            Ok((r, 0))
        }
        Command::Gen { family, out } => generate(gl, family, out.as_deref()),
    }
}

fn check(graph: &Path, cert: Option<&Path>, flow: Option<&Path>, boundary: Option<&Path>) -> Outcome {
    let g = load(graph, text::parse_graph)?;
    let mut r = Report::new("check");
    r.input("graph", graph.display());
    let result = if let Some(path) = cert {
        let c = load(path, text::parse_certificate)?;
        r.input("certificate", path.display());
        let beta = match boundary {
            Some(b) => {
                r.input("boundary", b.display());
                load(b, text::parse_boundary)?
            }
            None => Boundary::zero(c.modulus, g.vertex_count())?,
        };
        verify_certificate(&g, &beta, &c)
    } else {
        let path = flow.expect("clap requires a certificate or a flow");
        let f = load(path, text::parse_flow)?;
        r.input("flow", path.display());
        check_zflow(&g, &f)
    };
    match result {
        Ok(()) => r.verdict = "pass".into(),
        Err(Error::Rejected(msg)) => {
            r.verdict = "fail".into();
            r.detail("reason", msg);
        }
        Err(e) => return Err(e.into()),
    }
    Ok((r, 0))
}

fn solve(gl: &Global, a: &SolveArgs) -> Outcome {
    let g = load(&a.graph, text::parse_graph)?;
    let rs = a.rotation.as_deref().map(|p| load(p, text::parse_rotation)).transpose()?;
    let mut cfg = SolverConfig {
        search: search_limits(gl),
        forbidden_lifts: !a.no_lifts,
        splitting: !a.no_split,
        split_threshold: a.split_threshold,
        lift_connectivity_check: !a.no_lift_connectivity_check,
        ..SolverConfig::default()
    };
    if let Some(b) = a.base_n {
        cfg.base_n = b;
    }
    if let Some(m) = a.max_direct_vertices {
        cfg.max_direct_vertices = m;
    }
    let out = solve_planar(&g, a.p, rs.as_ref(), &cfg)?;
    let mut r = Report::new("solve");
    r.input("graph", a.graph.display()).input("p", a.p);
    if let Some(p) = &a.rotation {
        r.input("rotation", p.display());
    }
    let trace = text::write_trace(&out.trace);
    let code = match &out.outcome {
        SolveOutcome::Found(c) => {
            r.verdict = "found".into();
            let cert = text::write_certificate(c);
            if let Some(p) = &a.cert_out {
                write(p, &cert)?;
            }
            r.artifact("certificate", cert);
            0
        }
        SolveOutcome::Refuted => {
            r.verdict = "refuted".into();
            0
        }
        SolveOutcome::Refused(why) => {
            r.verdict = "refused".into();
            r.detail("reason", why);
            1
        }
    };
    if let Some(p) = &a.trace_out {
        write(p, &trace)?;
    }
    r.detail("steps", out.trace.len()).detail("anomalies", &out.anomalies);
    r.artifact("trace", trace);
    Ok((r, code))
}

fn generate(gl: &Global, family: &Family, out: Option<&Path>) -> Outcome {
    let mut r = Report::new("gen");
    let rs: RotationSystem = match family {
        Family::Kcycle { k, n } => {
            r.input("family", "kcycle").input("k", k).input("n", n);
            gen::kcycle(*k, *n)?
        }
        Family::Replicate { base, k } => {
            let b = load(base, text::parse_rotation)?;
            r.input("family", "replicate").input("base", base.display()).input("k", k);
            gen::replicate(&b, *k)?
        }
        Family::Catalog { name } => {
            let label: CatalogLabel = name.parse()?;
            r.input("family", "catalog").input("name", label);
            gen::catalog_embedding(label)?
        }
        Family::Triangulation { n, flips, k } => {
            r.input("family", "triangulation")
                .input("n", n)
                .input("flips", flips)
                .input("k", k)
                .input("seed", gl.seed);
            let mut rng = StdRng::seed_from_u64(gl.seed);
            gen::replicate(&gen::random_triangulation(*n, *flips, &mut rng)?, *k)?
        }
    };
    let g: Multigraph = rs.graph();
    let faces = rs.faces()?.faces.len();
    r.verdict = "generated".into();
    r.detail("vertices", g.vertex_count())
        .detail("edges", g.edge_count())
        .detail("faces", faces)
        .detail("edge_connectivity", g.edge_connectivity());
    let (gt, rt) = (text::write_graph(&g), text::write_rotation(&rs));
    match out {
        Some(prefix) => {
            let gp = prefix.with_extension("mg");
            let rp = prefix.with_extension("rot");
            write(&gp, &gt)?;
            write(&rp, &rt)?;
            r.detail("graph_file", gp.display().to_string())
                .detail("rotation_file", rp.display().to_string());
        }
        None => {
            r.artifact("graph", gt).artifact("rotation", rt);
        }
    }
    Ok((r, 0))
}
