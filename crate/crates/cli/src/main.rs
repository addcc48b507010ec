mod analyses;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use folhol_core::dsl::{self, Document};
use folhol_core::exactalg::Rational;
use folhol_core::flows::FlowConfig;
use folhol_core::foliation::CoordinateSubspace;
use folhol_core::holonomy::PathHolonomyBiSubmersion;
use folhol_core::pointwise::Pointwise;
use serde_json::{Map, Value};

use analyses::{Coordinates, Outcome, WitnessInput};
use report::{float, AnalysisResult, Report};

const DEFAULT_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "folhol", version, about = "Analyses of singular foliations given by polynomial vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Foliation document (.fol).
    file: PathBuf,
    /// Also write the report as JSON to this file.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Comparison tolerance (overrides FOLHOL_TOL).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct Points {
    /// Point as comma-separated rationals, e.g. `0,-1/2`; a single value
    /// fills every coordinate. Repeatable.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    points: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the fiber, tangent space and isotropy space.
    Fiber {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        points: Points,
    },
    /// Structure constants of the isotropy Lie algebra.
    Isotropy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        points: Points,
    },
    /// Regular or singular point.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        points: Points,
    },
    /// Bracket-closure certificate for the generators.
    Involutivity {
        #[command(flatten)]
        common: Common,
    },
    /// All pairwise brackets of the generators.
    BracketTable {
        #[command(flatten)]
        common: Common,
    },
    /// Transitive algebroid data over a leaf.
    Algebroid {
        #[command(flatten)]
        common: Common,
        /// Leaf declared in the document.
        #[arg(long)]
        leaf: String,
        /// Base point on the leaf (default: free coordinates zero).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Linear holonomy of the path-holonomy bi-submersion.
    Holonomy {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Isotropy coefficients, mapped through the local group morphism.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "xi", required_unless_present = "xi")]
        lambda: Option<String>,
        /// Bi-submersion fiber coordinates.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Validity radius for --lambda.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Linear test for membership in the kernel of the holonomy map.
    ProbeKernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Injectivity box from the linear parts of the isotropy.
    ProbeDiscreteness {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Slice declared in the document (default: the whole chart).
        #[arg(long)]
        slice: Option<String>,
    },
    /// Compares the flow of a time-dependent field in I_x F_S with a witness.
    CheckWitness {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Slice declared in the document (default: the whole chart).
        #[arg(long)]
        slice: Option<String>,
        /// Field over the slice variables, may use the time variable `t`.
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        /// Candidate witness Z over the slice variables.
        #[arg(long, allow_hyphen_values = true)]
        witness: String,
        /// Sample points separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        samples: Option<String>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Fiber { common, .. }
            | Command::Isotropy { common, .. }
            | Command::Classify { common, .. }
            | Command::Involutivity { common }
            | Command::BracketTable { common }
            | Command::Algebroid { common, .. }
            | Command::Holonomy { common, .. }
            | Command::ProbeKernel { common, .. }
            | Command::ProbeDiscreteness { common, .. }
            | Command::CheckWitness { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Fiber { .. } => "fiber",
            Command::Isotropy { .. } => "isotropy",
            Command::Classify { .. } => "classify",
            Command::Involutivity { .. } => "involutivity",
            Command::BracketTable { .. } => "bracket-table",
            Command::Algebroid { .. } => "algebroid",
            Command::Holonomy { .. } => "holonomy",
            Command::ProbeKernel { .. } => "probe-kernel",
            Command::ProbeDiscreteness { .. } => "probe-discreteness",
            Command::CheckWitness { .. } => "check-witness",
        }
    }
}

/// Input problems detected before any analysis runs (exit code 2).
struct UsageError(String);

fn point(doc: &Document, src: &str) -> Result<Vec<Rational>, UsageError> {
    let mut p = dsl::parse_point(src).map_err(|d| UsageError(format!("--point {src}: {}", d.message)))?;
    if p.len() == 1 {
        p = vec![p[0].clone(); doc.vars.len()];
    }
    if p.len() != doc.vars.len() {
        return Err(UsageError(format!(
            "--point {src}: expected {} coordinates, got {}",
            doc.vars.len(),
            p.len()
        )));
    }
    Ok(p)
}

fn reals(flag: &str, src: &str) -> Result<Vec<f64>, UsageError> {
    src.split(',')
        .map(|s| {
            let s = s.trim();
            dsl::parse_rational(s)
                .map(|r| folhol_core::exactalg::rat_to_f64(&r))
                .or_else(|_| s.parse::<f64>())
                .map_err(|_| UsageError(format!("--{flag}: `{s}` is not a number")))
        })
        .collect()
}

fn subspace(doc: &Document, kind: &str, name: &Option<String>) -> Result<CoordinateSubspace, UsageError> {
    match name {
        None => Ok(CoordinateSubspace::full()),
        Some(n) => {
            let s = if kind == "leaf" { doc.leaf(n) } else { doc.slice(n) };
            s.ok_or_else(|| UsageError(format!("no {kind} named `{n}` in the document")))
        }
    }
}

fn tolerance(common: &Common) -> Result<f64, UsageError> {
    if let Some(t) = common.tol {
        return Ok(t);
    }
    match std::env::var("FOLHOL_TOL") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("FOLHOL_TOL: `{s}` is not a number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn text(s: &str) -> Value {
    Value::String(s.to_string())
}

/// A single value fills every coordinate.
fn fill(mut v: Vec<f64>, n: usize) -> Vec<f64> {
    if v.len() == 1 {
        v = vec![v[0]; n];
    }
    v
}

fn bisubmersion(doc: &Document, x: &[Rational], radius: f64) -> Result<PathHolonomyBiSubmersion, String> {
    PathHolonomyBiSubmersion::new(&doc.foliation(), x, None)
        .map(|u| u.with_validity_radius(radius))
        .map_err(|e| e.to_string())
}

/// Runs one analysis per point; the analyzer's cache is shared, so the
/// points are processed on scoped threads and collected in input order.
fn per_point(
    name: &str,
    pw: &Pointwise,
    points: &[Vec<Rational>],
    f: fn(&Pointwise, &[Rational]) -> Outcome,
) -> Vec<AnalysisResult> {
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = points.iter().map(|p| s.spawn(move || f(pw, p))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("analysis panicked".into())))
            .collect()
    });
    points
        .iter()
        .zip(outcomes)
        .map(|(p, outcome)| AnalysisResult {
            analysis: name.into(),
            params: params(&[("point", analyses::point_param(p))]),
            outcome,
        })
        .collect()
}

fn run(cmd: &Command, doc: &Document, tol: f64) -> Result<Vec<AnalysisResult>, UsageError> {
    let name = cmd.name();
    let single = |params: Map<String, Value>, outcome: Outcome| {
        vec![AnalysisResult {
            analysis: name.into(),
            params,
            outcome,
        }]
    };
    let f = doc.foliation();
    Ok(match cmd {
        Command::Fiber { points, .. } | Command::Isotropy { points, .. } | Command::Classify { points, .. } => {
            let pts = points.points.iter().map(|p| point(doc, p)).collect::<Result<Vec<_>, _>>()?;
            let analysis = match cmd {
                Command::Fiber { .. } => analyses::fiber,
                Command::Isotropy { .. } => analyses::isotropy,
                _ => analyses::classify,
            };
            per_point(name, &Pointwise::new(f), &pts, analysis)
        }
        Command::Involutivity { .. } => single(Map::new(), analyses::involutivity(&f)),
        Command::BracketTable { .. } => single(Map::new(), analyses::bracket_table(&f)),
        Command::Algebroid { leaf, point: p, .. } => {
            let l = subspace(doc, "leaf", &Some(leaf.clone()))?;
            let x = match p {
                Some(p) => point(doc, p)?,
                None => {
                    let mut x = vec![Rational::from_integer(0.into()); doc.vars.len()];
                    for (i, v) in l.fixed() {
                        x[*i] = v.clone();
                    }
                    x
                }
            };
            let ps = params(&[("leaf", text(leaf)), ("point", analyses::point_param(&x))]);
            single(ps, analyses::algebroid(&f, &l, &x))
        }
        Command::Holonomy {
            point: p,
            lambda,
            xi,
            radius,
            ..
        } => {
            let x = point(doc, p)?;
            let (coords, key, raw) = match (lambda, xi) {
                (Some(l), _) => (Coordinates::Lambda(reals("lambda", l)?), "lambda", l),
                (None, Some(v)) => (Coordinates::Xi(reals("xi", v)?), "xi", v),
                (None, None) => return Err(UsageError("one of --lambda or --xi is required".into())),
            };
            let mut ps = params(&[("point", analyses::point_param(&x)), (key, text(raw))]);
            if lambda.is_some() {
                ps.insert("radius".into(), float(*radius));
            }
            let outcome = bisubmersion(doc, &x, *radius).and_then(|u| {
                let coords = match coords {
                    Coordinates::Lambda(l) => Coordinates::Lambda(fill(l, u.isotropy_witnesses().len())),
                    Coordinates::Xi(v) => Coordinates::Xi(fill(v, u.fiber_dim())),
                };
                analyses::holonomy(&u, &coords)
            });
            single(ps, outcome)
        }
        Command::ProbeKernel { point: p, xi, .. } => {
            let x = point(doc, p)?;
            let v = reals("xi", xi)?;
            let ps = params(&[("point", analyses::point_param(&x)), ("xi", text(xi))]);
            let outcome = bisubmersion(doc, &x, 1.0).and_then(|u| {
                let v = fill(v, u.fiber_dim());
                analyses::probe_kernel(&u, &v, tol)
            });
            single(ps, outcome)
        }
        Command::ProbeDiscreteness { point: p, slice, .. } => {
            let x = point(doc, p)?;
            let s = subspace(doc, "slice", slice)?;
            let mut ps = params(&[("point", analyses::point_param(&x))]);
            if let Some(n) = slice {
                ps.insert("slice".into(), text(n));
            }
            single(ps, analyses::probe_discreteness(&f, &x, &s))
        }
        Command::CheckWitness {
            point: p,
            slice,
            field,
            witness,
            samples,
            ..
        } => {
            let x = point(doc, p)?;
            let s = subspace(doc, "slice", slice)?;
            let parsed = samples
                .as_ref()
                .map(|src| src.split(';').map(|q| reals("samples", q)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let mut ps = params(&[
                ("point", analyses::point_param(&x)),
                ("field", text(field)),
                ("witness", text(witness)),
            ]);
            if let Some(n) = slice {
                ps.insert("slice".into(), text(n));
            }
            if let Some(src) = samples {
                ps.insert("samples".into(), text(src));
            }
            let input = WitnessInput {
                slice: &s,
                point: &x,
                field,
                witness,
                samples: parsed,
            };
            single(ps, analyses::check_witness(&f, &input, tol))
        }
    })
}

fn tolerances(tol: f64) -> Map<String, Value> {
    let cfg = FlowConfig::default();
    params(&[
        ("comparison", float(tol)),
        ("flow_rel_tol", float(cfg.rel_tol)),
        ("flow_abs_tol", float(cfg.abs_tol)),
        ("flow_bound", float(cfg.bound)),
    ])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let file = common.file.display().to_string();
    let src = match std::fs::read_to_string(&common.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("folhol: cannot read {file}: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = match dsl::parse(&src) {
        Ok(d) => d,
        Err(d) => {
            eprintln!("{file}:{d}");
            return ExitCode::from(2);
        }
    };
    let outcome = tolerance(common).and_then(|tol| Ok((tol, run(&cli.command, &doc, tol)?)));
    let (tol, results) = match outcome {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            eprintln!("folhol: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = Report {
        input: analyses::document_input(&doc, &file),
        results,
        tolerances: tolerances(tol),
    };
    print!("{}", report.to_text());
    if let Some(path) = &common.json {
        let mut body = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
        body.push('\n');
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("folhol: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
