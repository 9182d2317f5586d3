use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tilelink::classify::{
    arithmetic_status, canonical_cells, classify_geometry, commensurable, minimal_orbifold_degree, table_csv,
    OrbifoldDegree, VertexCount,
};
use tilelink::coxeter::{build_hyperbolic_presentation, build_spherical_presentation, Geometry, TilingType};
use tilelink::exact::format_decimal;
use tilelink::exec::Execution;
use tilelink::report::{classification_report, geometry_verify, GeometryConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use tilelink::trace_field::{invariant_trace_field_with, BasisChoice, PathStrategy};
use tilelink::vinberg::{arithmetic_sweep, check_arithmetic};
use tilelink::Error;

#[derive(Parser, Debug)]
#[command(name = "tilelink", version, about = "Arithmeticity, trace fields and geometry of right-angled tiling links")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, env = "TILELINK_FORMAT", default_value = "text")]
    format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Run sweeps and sampling on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    Bfs,
    RandomBfs,
    RandomDfs,
    RandomTree,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of the Coxeter polyhedron P(m,n).
    Gram {
        m: u64,
        n: u64,
        /// Use the five-face polyhedron of a spherical type.
        #[arg(long)]
        spherical: bool,
    },
    /// Vinberg certificate for P(m,n).
    Arithmetic {
        m: u64,
        n: u64,
        #[arg(long)]
        spherical: bool,
    },
    /// Invariant trace field from det G'.
    Tracefield {
        m: u64,
        n: u64,
        #[arg(long, default_value = "bfs")]
        strategy: Strategy,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Geometry, arithmeticity and orbifold data of one type.
    Classify {
        m: u64,
        n: u64,
        #[arg(long)]
        genus: Option<u64>,
    },
    /// Commensurability of two types.
    Commensurable { m1: u64, n1: u64, m2: u64, n2: u64 },
    /// Numerical checks of polyhedra, horoballs, basins and gluing.
    GeometryVerify {
        #[arg(long, default_value_t = 12)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Vinberg verdicts for all hyperbolic m,n <= bound.
    Sweep {
        #[arg(long, default_value_t = 12)]
        bound: u64,
    },
    /// Full classification document for m,n <= bound.
    Report {
        #[arg(long, default_value_t = 12)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Skip the geometry verification section.
        #[arg(long)]
        no_geometry: bool,
    },
}

/// Rendered output and whether every internal check passed.
struct Output {
    text: String,
    checks_passed: bool,
}

fn ok(text: String) -> Result<Output, Error> {
    Ok(Output { text, checks_passed: true })
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn pair(m: u64, n: u64) -> Result<(u64, u64), Error> {
    let t = TilingType::new(m, n)?.normalized();
    Ok((t.m, t.n))
}

fn no_csv(command: &str) -> Error {
    Error::Domain(format!("csv output is not available for {command}"))
}

fn presentation(m: u64, n: u64, spherical: bool) -> Result<tilelink::coxeter::CoxeterPresentation, Error> {
    if spherical {
        build_spherical_presentation(m, n)
    } else {
        build_hyperbolic_presentation(m, n)
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let format = cli.format;
    match &cli.command {
        Command::Gram { m, n, spherical } => {
            let (m, n) = pair(*m, *n)?;
            let p = presentation(m, n, *spherical)?;
            match format {
                Format::Json => ok(json_text(&p.to_json())),
                Format::Csv => {
                    let mut s = String::new();
                    for row in &p.gram {
                        let cells: Vec<String> = row.iter().map(|x| format_decimal(x.to_f64())).collect();
                        let _ = writeln!(s, "{}", cells.join(","));
                    }
                    ok(s)
                }
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "Gram matrix of P({m},{n}), g = 2cos(pi/{})", p.context().level());
                    for row in &p.gram {
                        let cells: Vec<String> = row.iter().map(|x| format!("{:>15}", format_decimal(x.to_f64()))).collect();
                        let _ = writeln!(s, "{}", cells.join(" "));
                    }
                    let _ = writeln!(s, "exact entries");
                    for i in 0..p.size() {
                        for j in i..p.size() {
                            if !p.gram[i][j].is_zero() {
                                let _ = writeln!(s, "  a{}{} = {}", i + 1, j + 1, p.gram[i][j]);
                            }
                        }
                    }
                    ok(s)
                }
            }
        }
        Command::Arithmetic { m, n, spherical } => {
            let (m, n) = pair(*m, *n)?;
            let cert = check_arithmetic(&presentation(m, n, *spherical)?)?;
            match format {
                Format::Json => ok(json_text(&cert.to_json())),
                Format::Csv => Err(no_csv("arithmetic")),
                Format::Text => {
                    let mut s = String::new();
                    let verdict = if cert.arithmetic { "arithmetic" } else { "non-arithmetic" };
                    let _ = writeln!(s, "P({m},{n}) ({}): {verdict}", cert.family.name());
                    for e in &cert.entries {
                        let _ = writeln!(s, "  a{}{} = {}  integral: {}", e.i + 1, e.j + 1, e.value, e.integral);
                    }
                    for c in &cert.cycles {
                        let faces: Vec<String> = c.faces.iter().map(|f| (f + 1).to_string()).collect();
                        let value = match &c.rational {
                            Some(q) => tilelink::exact::rational_string(q),
                            None => format!("{} (irrational)", c.value),
                        };
                        let _ = writeln!(s, "  cycle ({}) = {value}", faces.join(","));
                    }
                    if let Some(f) = &cert.failing_item {
                        let _ = writeln!(s, "failing item: {}", f.describe());
                    }
                    ok(s)
                }
            }
        }
        Command::Tracefield { m, n, strategy, seed } => {
            let (m, n) = pair(*m, *n)?;
            let strategy = match strategy {
                Strategy::Bfs => PathStrategy::Bfs,
                Strategy::RandomBfs => PathStrategy::RandomBfs(*seed),
                Strategy::RandomDfs => PathStrategy::RandomDfs(*seed),
                Strategy::RandomTree => PathStrategy::RandomSpanningTree(*seed),
            };
            let basis = if matches!(strategy, PathStrategy::Bfs) { BasisChoice::Preferred } else { BasisChoice::Random(*seed) };
            let r = invariant_trace_field_with(&build_hyperbolic_presentation(m, n)?, strategy, basis)?;
            match format {
                Format::Json => ok(json_text(&r.to_json())),
                Format::Csv => Err(no_csv("tracefield")),
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "P({m},{n}): k(P) rational: {}", r.kp_rational);
                    let _ = writeln!(s, "  det G' = {} ({})", r.det, format_decimal(r.det.to_f64()));
                    let _ = writeln!(s, "  invariant trace field: {}", r.field_name());
                    ok(s)
                }
            }
        }
        Command::Classify { m, n, genus } => {
            let g = classify_geometry(*m, *n, *genus)?;
            let class = arithmetic_status(*m, *n)?;
            let degree = match g.tiling.geometry {
                Geometry::Hyperbolic => minimal_orbifold_degree(*m, *n)?,
                _ => OrbifoldDegree::NotApplicable,
            };
            let vertices = g.vertices.map(|v| match v {
                VertexCount::Forced(k) => json!(k),
                VertexCount::Any => json!("any"),
                VertexCount::NoSuchTiling => json!("no_such_tiling"),
            });
            let mut v = class.to_json();
            let obj = v.as_object_mut().expect("object");
            obj.insert("genus".into(), json!(genus));
            obj.insert("vertices".into(), vertices.unwrap_or(Value::Null));
            obj.insert("min_orbifold_degree".into(), degree.to_json());
            obj.insert("canonical_cells".into(), json!(canonical_cells(g.tiling)));
            match format {
                Format::Json => ok(json_text(&v)),
                Format::Csv => Err(no_csv("classify")),
                Format::Text => {
                    let mut s = String::new();
                    let t = g.tiling;
                    let _ = writeln!(s, "[{0},{1},{0},{1}]: {2}", t.m, t.n, t.geometry.name());
                    if let Some(vc) = g.vertices {
                        let count = match vc {
                            VertexCount::Forced(k) => k.to_string(),
                            VertexCount::Any => "any".into(),
                            VertexCount::NoSuchTiling => "no such tiling".into(),
                        };
                        let _ = writeln!(s, "  vertices on genus {}: {count}", genus.unwrap_or(0));
                    }
                    let _ = writeln!(s, "  arithmetic: {} ({})", class.arithmetic, class.source.name());
                    if let Some(f) = &class.trace_field {
                        let _ = writeln!(s, "  invariant trace field: {f}");
                    }
                    let _ = writeln!(s, "  minimal orbifold degree: {}", degree.text());
                    let _ = writeln!(s, "  canonical cells: {}", canonical_cells(t));
                    ok(s)
                }
            }
        }
        Command::Commensurable { m1, n1, m2, n2 } => {
            let c = commensurable(TilingType::new(*m1, *n1)?, TilingType::new(*m2, *n2)?);
            match format {
                Format::Json => ok(json_text(&c.to_json())),
                Format::Csv => Err(no_csv("commensurable")),
                Format::Text => ok(format!("{}, clause \"{}\": {}\n", c.commensurable, c.reason.clause(), c.reason.describe())),
            }
        }
        Command::GeometryVerify { bound, samples, seed } => {
            if *bound < 3 || *bound > 50 {
                return Err(Error::Domain(format!("geometry bound must be in 3..=50, got {bound}")));
            }
            let g = geometry_verify(&GeometryConfig { bound: *bound, samples: *samples, seed: *seed, exec })?;
            let text = match format {
                Format::Json => json_text(&g.to_json()),
                Format::Csv => return Err(no_csv("geometry-verify")),
                Format::Text => g.render_text(),
            };
            Ok(Output { text, checks_passed: g.passed() })
        }
        Command::Sweep { bound } => {
            if *bound > 50 {
                return Err(Error::Domain(format!("sweep bound must be at most 50, got {bound}")));
            }
            let rows = arithmetic_sweep(*bound, *bound, exec)?;
            let failing = |r: &tilelink::vinberg::SweepRow| r.failing_item.as_ref().map(|f| f.describe()).unwrap_or_default();
            match format {
                Format::Json => ok(json_text(&Value::Array(
                    rows.iter()
                        .map(|r| {
                            json!({
                                "m": r.m,
                                "n": r.n,
                                "arithmetic": r.arithmetic,
                                "failing_item": r.failing_item.as_ref().map(|f| f.to_json()),
                            })
                        })
                        .collect(),
                ))),
                Format::Csv | Format::Text => {
                    let mut s = String::from("m,n,arithmetic,failing_item\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{},{}", r.m, r.n, r.arithmetic, failing(r));
                    }
                    ok(s)
                }
            }
        }
        Command::Report { bound, samples, seed, no_geometry } => {
            let geometry = (!no_geometry).then_some(GeometryConfig { bound: (*bound).min(12), samples: *samples, seed: *seed, exec });
            let r = classification_report(*bound, geometry, exec)?;
            let passed = r.geometry.as_ref().is_none_or(|g| g.passed());
            let text = match format {
                Format::Json => json_text(&r.to_json()),
                Format::Csv => table_csv(&r.rows)?,
                Format::Text => r.render_text(),
            };
            Ok(Output { text, checks_passed: passed })
        }
    }
}

fn error_line(e: &Error) -> String {
    let kind = match e {
        Error::Algebra(_) => "algebra",
        Error::Domain(_) => "domain",
        Error::Geometry(_) => "geometry",
        Error::Structure(_) => "structure",
        Error::Verification(_) => "verification",
    };
    serde_json::to_string(&json!({ "error": kind, "reason": e.to_string() })).expect("serializable")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("{}", serde_json::to_string(&json!({ "error": "io", "reason": e.to_string() })).expect("serializable"));
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            if out.checks_passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}", error_line(&Error::Verification("geometry checks failed".into())));
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
