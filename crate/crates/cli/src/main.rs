//! `gyro`: command-line access to the gyrovector library.
//!
//! Exit codes: 0 success, 1 audit failure, 2 malformed input, 3 domain
//! error, 4 degenerate geometry.

mod output;

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gyrovector::ball::{gamma, BallParams, BallVector, Tolerance};
use gyrovector::error::GyroError;
use gyrovector::geometry::{arc_diagnostics, CurveKind, GyroCurve};
use gyrovector::gyro::{audit, gyr, AuditConfig, Model, VectorAddition};
use gyrovector::qic::{bures_fidelity, two_sum_bloch, FidelityMethod};
use gyrovector::relativity::{
    aberrate, aberration_gap, fictitious_mass, invariant_mass, AberrationMode, ParticleSystem,
};

use output::{object, Format, Report, Table};

#[derive(Parser, Debug)]
#[command(
    name = "gyro",
    version,
    about = "Gyrovector algebra, geometry and applications in the s-ball"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Ball radius
    #[arg(long, global = true, env = "GYR_S", default_value_t = 1.0)]
    s: f64,

    /// Dimension; inferred from vector arguments when omitted (default 3 for audit)
    #[arg(long, global = true, env = "GYR_DIM")]
    dim: Option<usize>,

    /// Gyrovector model
    #[arg(long, global = true, env = "GYR_MODEL", default_value = "mobius", value_parser = parse_model)]
    model: Model,

    #[arg(
        long,
        global = true,
        value_enum,
        env = "GYR_FORMAT",
        default_value = "json"
    )]
    format: Format,

    #[arg(long, global = true, env = "GYR_SEED", default_value_t = 0)]
    seed: u64,

    /// Relative tolerance for audits and cross-checks
    #[arg(long, global = true, env = "GYR_TOL", default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// u ⊕ v, with the gamma of the sum by direct evaluation and by identity
    Add {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// u ⊞ v
    Coadd {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// gyr[a,b]z
    Gyr {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// r ⊗ v
    Scalar {
        #[arg(allow_hyphen_values = true)]
        r: f64,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Lorentz factor of v
    Gamma {
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Sample a gyroline or cogyroline through A and B
    Curve {
        #[arg(value_parser = parse_kind)]
        kind: CurveKind,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Number of parameter intervals; N + 1 rows are emitted
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t1: f64,
    },
    /// Randomized audit of the gyrogroup axioms and identities
    Audit {
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Audit ordinary vector addition instead of the model
        #[arg(long)]
        control: bool,
    },
    /// Invariant mass of a particle system read from JSON
    Invmass {
        /// Path to `{"s": .., "particles": [{"m": .., "v": [..]}]}`, or `-` for stdin
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Apparent velocity of u seen from an observer moving with v_obs
    Aberrate {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v_obs: String,
    },
    /// Bures fidelity of the qubit states with Bloch vectors u and v
    Fidelity {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Bloch vector of the normalized product ρu ρv ρv ρu
    Twosum {
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<CurveKind, String> {
    s.parse()
}

enum Failure {
    Input(String),
    Domain(GyroError),
    Degenerate(GyroError),
    AuditFailed(Box<Report>),
    Io(io::Error),
}

impl From<GyroError> for Failure {
    fn from(e: GyroError) -> Self {
        match e {
            GyroError::DegenerateCurve
            | GyroError::DegenerateTriangle(_)
            | GyroError::DegenerateFit(_) => Failure::Degenerate(e),
            other => Failure::Domain(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<Report, Failure>;

/// Parses `x,y,z` or a JSON array of numbers.
fn parse_coords(text: &str) -> Result<Vec<f64>, Failure> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(t)
            .map_err(|e| Failure::Input(format!("invalid vector '{text}': {e}")));
    }
    t.split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| {
                Failure::Input(format!(
                    "invalid vector '{text}': '{}' is not a number",
                    x.trim()
                ))
            })
        })
        .collect()
}

struct Ctx<'a> {
    g: &'a Global,
}

impl Ctx<'_> {
    fn params(&self, dim: usize) -> Result<BallParams, Failure> {
        if let Some(expected) = self.g.dim {
            if expected != dim {
                return Err(Failure::Input(format!(
                    "vector has dimension {dim}, but --dim is {expected}"
                )));
            }
        }
        Ok(BallParams::new(self.g.s, dim)?)
    }

    fn vector(&self, text: &str) -> Result<BallVector, Failure> {
        let coords = parse_coords(text)?;
        if coords.is_empty() {
            return Err(Failure::Input(format!("invalid vector '{text}': empty")));
        }
        if !coords.iter().all(|x| x.is_finite()) {
            return Err(Failure::Input(format!(
                "invalid vector '{text}': non-finite component"
            )));
        }
        let p = self.params(coords.len())?;
        Ok(BallVector::new(coords, p)?)
    }

    fn vectors<const N: usize>(&self, texts: [&str; N]) -> Result<[BallVector; N], Failure> {
        let vs = texts.map(|t| self.vector(t));
        let mut out = Vec::with_capacity(N);
        for v in vs {
            out.push(v?);
        }
        for v in &out[1..] {
            if v.dim() != out[0].dim() {
                return Err(Failure::Input(format!(
                    "vectors have dimensions {} and {}",
                    out[0].dim(),
                    v.dim()
                )));
            }
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    fn tolerance(&self) -> Result<Tolerance, Failure> {
        Ok(Tolerance::relative(self.g.tol)?)
    }
}

fn vector_report(v: &BallVector) -> Report {
    Report::new(json!({ "result": v.coords() }))
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { g: &cli.global };
    let model = cli.global.model;
    match &cli.command {
        Command::Add { u, v } => {
            let [u, v] = ctx.vectors([u, v])?;
            let w = model.add(&u, &v)?;
            let direct = gamma(&w);
            let identity = model.gamma_of_sum(&u, &v)?;
            Ok(Report::new(object([
                ("result", json!(w.coords())),
                ("gamma_direct", json!(direct)),
                ("gamma_identity", json!(identity)),
                (
                    "gamma_residual",
                    json!((direct - identity).abs() / identity),
                ),
            ])))
        }
        Command::Coadd { u, v } => {
            let [u, v] = ctx.vectors([u, v])?;
            Ok(vector_report(&model.coadd(&u, &v)?))
        }
        Command::Gyr { a, b, z } => {
            let [a, b, z] = ctx.vectors([a, b, z])?;
            Ok(vector_report(&gyr(&model, &a, &b, &z)?))
        }
        Command::Scalar { r, v } => {
            if !r.is_finite() {
                return Err(Failure::Input(format!("scalar {r} is not finite")));
            }
            let v = ctx.vector(v)?;
            Ok(vector_report(&model.scalar(*r, &v)?))
        }
        Command::Gamma { v } => {
            let v = ctx.vector(v)?;
            Ok(Report::new(json!({ "gamma": gamma(&v) })))
        }
        Command::Curve {
            kind,
            a,
            b,
            samples,
            t0,
            t1,
        } => curve(&ctx, *kind, a, b, *samples, *t0, *t1),
        Command::Audit { samples, control } => {
            if *samples == 0 {
                return Err(Failure::Input("--samples must be at least 1".into()));
            }
            let params = BallParams::new(cli.global.s, cli.global.dim.unwrap_or(3))?;
            let cfg = AuditConfig::new(params, *samples, cli.global.seed)
                .with_tolerance(ctx.tolerance()?);
            let report = if *control {
                audit(&VectorAddition, &cfg)
            } else {
                audit(&model, &cfg)
            };
            let pass = report.all_pass();
            let mut out = Report::new(serde_json::to_value(&report).expect("report serializes"));
            out.table = Some(Table {
                header: ["name", "samples", "max_residual", "pass"]
                    .map(String::from)
                    .to_vec(),
                rows: report
                    .identities
                    .iter()
                    .map(|r| {
                        vec![
                            json!(r.name),
                            json!(r.samples),
                            json!(r.max_residual),
                            json!(r.pass),
                        ]
                    })
                    .collect(),
            });
            if pass {
                Ok(out)
            } else {
                Err(Failure::AuditFailed(Box::new(out)))
            }
        }
        Command::Invmass { input } => invmass(input),
        Command::Aberrate { u, v_obs } => {
            let [u, v] = ctx.vectors([u, v_obs])?;
            let classical = aberrate(&u, &v, AberrationMode::Classical)?;
            let relativistic = aberrate(&u, &v, AberrationMode::Relativistic)?;
            Ok(Report::new(object([
                (
                    "classical",
                    serde_json::to_value(&classical).expect("serializes"),
                ),
                (
                    "relativistic",
                    serde_json::to_value(&relativistic).expect("serializes"),
                ),
                ("angular_gap", json!(aberration_gap(&u, &v)?)),
            ])))
        }
        Command::Fidelity { u, v } => {
            let [u, v] = ctx.vectors([u, v])?;
            let fm = bures_fidelity(&u, &v, FidelityMethod::Matrix)?;
            let fg = bures_fidelity(&u, &v, FidelityMethod::Gyro)?;
            let residual = (fm - fg).abs();
            Ok(Report::new(object([
                ("matrix", json!(fm)),
                ("gyro", json!(fg)),
                ("residual", json!(residual)),
                ("agree", json!(residual <= ctx.tolerance()?.bound(1.0))),
            ])))
        }
        Command::Twosum { u, v } => {
            let [u, v] = ctx.vectors([u, v])?;
            let t = two_sum_bloch(&u, &v)?;
            let bound = ctx.tolerance()?.bound(1.0);
            Ok(Report::new(object([
                ("w", json!(t.w.coords())),
                ("w_doubled", json!(t.w_doubled.coords())),
                ("route_gap", json!(t.route_gap)),
                ("matrix_residual", json!(t.matrix_residual)),
                (
                    "agree",
                    json!(t.route_gap <= bound && t.matrix_residual <= bound),
                ),
            ])))
        }
    }
}

fn curve(
    ctx: &Ctx,
    kind: CurveKind,
    a: &str,
    b: &str,
    samples: usize,
    t0: f64,
    t1: f64,
) -> Outcome {
    if samples == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Failure::Input("--t0 and --t1 must be finite".into()));
    }
    let model = ctx.g.model;
    let [a, b] = ctx.vectors([a, b])?;
    let dim = a.dim();
    let c = GyroCurve::new(kind, a, b, model)?;
    let points = c.sample(t0, t1, samples)?;
    // the fit always uses the segment t in [0, 1], whatever range is printed
    let diagnostics = if dim == 2 && model == Model::Mobius {
        let d = arc_diagnostics(&c, (samples + 1).max(16))?;
        Some(serde_json::to_value(&d).expect("serializes"))
    } else {
        None
    };

    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    let rows: Vec<Vec<Value>> = points
        .iter()
        .map(|(t, p)| {
            std::iter::once(json!(t))
                .chain(p.coords().iter().map(|x| json!(x)))
                .collect()
        })
        .collect();
    let doc = object([
        ("kind", serde_json::to_value(kind).expect("serializes")),
        ("model", json!(model.name())),
        (
            "rows",
            Value::Array(
                points
                    .iter()
                    .map(|(t, p)| json!({ "t": t, "x": p.coords() }))
                    .collect(),
            ),
        ),
        ("diagnostics", diagnostics.clone().unwrap_or(Value::Null)),
    ]);
    let mut report = Report::new(doc);
    report.table = Some(Table { header, rows });
    if let Some(Value::Object(d)) = diagnostics {
        for (k, v) in d {
            let v = v.as_str().map_or_else(|| v.to_string(), str::to_string);
            report.notes.push(format!("{k}={v}"));
        }
    }
    Ok(report)
}

fn invmass(input: &str) -> Outcome {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(input)
            .map_err(|e| Failure::Input(format!("cannot read '{input}': {e}")))?
    };
    // syntax errors are input errors; well-formed but invalid systems are domain errors
    let raw: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("malformed JSON: {e}")))?;
    let sys: ParticleSystem =
        serde_json::from_value(raw).map_err(|e| classify_system_error(&e.to_string()))?;
    let m0 = invariant_mass(&sys)?;
    let rest = sys.total_rest_mass();

    // cross-check against the norm of the total four-momentum
    let s = sys.params().s();
    let mut energy = 0.0;
    let mut momentum = vec![0.0; sys.params().dim()];
    for p in sys.particles() {
        let g = gamma(p.velocity());
        energy += p.mass() * g;
        for (m, x) in momentum.iter_mut().zip(p.velocity().coords()) {
            *m += p.mass() * g * x / s;
        }
    }
    let p2: f64 = momentum.iter().map(|x| x * x).sum();
    let four_momentum = ((energy - p2.sqrt()) * (energy + p2.sqrt()))
        .max(0.0)
        .sqrt();
    Ok(Report::new(object([
        ("m0", json!(m0)),
        ("rest_mass", json!(rest)),
        ("fictitious", json!(fictitious_mass(&sys)?)),
        ("four_momentum_m0", json!(four_momentum)),
        (
            "residual",
            json!((m0 - four_momentum).abs() / m0.max(f64::MIN_POSITIVE)),
        ),
    ])))
}

fn classify_system_error(msg: &str) -> Failure {
    let domain = [
        "not inside the open ball",
        "invalid ball parameters",
        "particle mass",
        "different balls",
        "needs a particle",
    ];
    if domain.iter().any(|d| msg.contains(d)) {
        Failure::Domain(GyroError::InvalidParams(msg.to_string()))
    } else {
        Failure::Input(format!("invalid particle system: {msg}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    let emit = |r: &Report| {
        if let Err(e) = r.print(format) {
            if e.kind() != io::ErrorKind::BrokenPipe {
                eprintln!("gyro: {e}");
            }
        }
    };
    match run(&cli) {
        Ok(r) => {
            emit(&r);
            ExitCode::SUCCESS
        }
        Err(Failure::AuditFailed(r)) => {
            emit(&r);
            eprintln!("gyro: audit failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("gyro: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("gyro: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("gyro: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Degenerate(e)) => {
            eprintln!("gyro: {e}");
            ExitCode::from(4)
        }
    }
}
