//! Command-line front end. Every command reads one JSON document (or flags)
//! and writes one JSON value, or a bare integer, to stdout.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails or the
//! library reports a non-input error, 2 for malformed input. Errors go to
//! stderr as a JSON object with an `error` kind and a `message`; parse
//! errors add `line` and `column`, conversion errors add `path`.

pub mod json;

use crate::cohomology::{pairing_matrix, tangent_space, tangent_space_trace_free, TangentSpace};
use crate::error::Error;
use crate::family::{check_dagger, specialize, standard_grid, FamilyBlock, Fiber, ResidueKind};
use crate::formal::{default_buffer, pushforward_ramified, recover_exponent, Exponent};
use crate::global::{det_connection, det_exponents, dimension, euler_chars, is_stable, validate_exponent_set};
use crate::linalg;
use crate::localdata::{gauge_randomize, kernel_pi, mutate, reconstruct_check, LocalRamifiedData, VerifyReport};
use crate::scalars::{Field, Scalar};
use clap::{Parser, Subcommand};
use json::{ConvertError, Document, Render};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::{Read, Write};

#[derive(Debug, Parser)]
#[command(name = "ramified", version, about = "Exact computations with ramified irregular connections")]
pub struct Cli {
    /// Add a complex approximation next to every exact scalar.
    #[arg(long, global = true)]
    pub float: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify local data, an exponent set, or a global connection.
    Validate {
        /// Input document, `-` for stdin.
        input: String,
        /// For local data, also solve for compatible connections.
        #[arg(long)]
        reconstruct: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover exponents from an exponent, a formal connection or a global
    /// connection; for exponent sets, the determinant exponents.
    Exponents { input: String },
    /// Dimension of the moduli space from `g`, `r` and the pole orders.
    Dimension {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        r: i64,
        /// Pole order, once per pole.
        #[arg(long = "m", required = true)]
        m: Vec<i64>,
        /// Comma-separated block sizes, once per pole (default: one block).
        #[arg(long = "blocks")]
        blocks: Vec<String>,
        /// Print the Euler characteristics as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Stability verdict for a global connection.
    Stability { input: String },
    /// Tangent space and the pairing matrix on its basis.
    Tangent {
        input: String,
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long)]
        trace_free: bool,
    },
    /// Classify fibres of a two-parameter family.
    Family {
        /// Family document; omit with `--grid`.
        input: Option<String>,
        /// Use the built-in twelve-point grid.
        #[arg(long)]
        grid: bool,
    },
    /// Length of the kernel of the twisted quotient map for canonical data.
    Kernel {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        /// Seeds the exponent coefficients and an optional gauge change.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        gauge: bool,
        #[arg(long)]
        json: bool,
    },
}

/// Why a command stopped.
enum Failure {
    Parse(serde_json::Error),
    Convert(ConvertError),
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<ConvertError> for Failure {
    fn from(e: ConvertError) -> Self {
        Failure::Convert(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Successful output and whether every check passed.
struct Output {
    value: Value,
    ok: bool,
    /// Print `value` as a bare scalar instead of pretty JSON.
    bare: bool,
}

impl Output {
    fn ok(value: Value) -> Output {
        Output { value, ok: true, bare: false }
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    let end = dbg.find(|c: char| !c.is_alphanumeric()).unwrap_or(dbg.len());
    let name = &dbg[..end];
    let mut out = String::new();
    for (i, ch) in name.chars().enumerate() {
        if ch.is_uppercase() && i > 0 {
            out.push('_');
        }
        out.push(ch.to_ascii_lowercase());
    }
    out
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let render = Render { float: cli.float };
    match dispatch(&cli.command, render, stdin) {
        Ok(out) => {
            let text = if out.bare {
                match &out.value {
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                }
            } else {
                serde_json::to_string_pretty(&out.value).expect("values serialize")
            };
            let _ = writeln!(stdout, "{text}");
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let (code, body) = match f {
                Failure::Parse(e) => (
                    2,
                    json!({ "error": "parse", "message": e.to_string(), "line": e.line(), "column": e.column() }),
                ),
                Failure::Convert(e) => {
                    let code = if e.is_input_error() { 2 } else { 1 };
                    let kind = match &e {
                        ConvertError::Schema { .. } => "schema".to_string(),
                        ConvertError::Library { error, .. } => error_kind(error),
                    };
                    (code, json!({ "error": kind, "message": e.to_string(), "path": e.path() }))
                }
                Failure::Lib(e) => {
                    let code = if e.is_input_error() { 2 } else { 1 };
                    (code, json!({ "error": error_kind(&e), "message": e.to_string() }))
                }
                Failure::Usage(m) => (2, json!({ "error": "usage", "message": m })),
                Failure::Io(e) => (2, json!({ "error": "io", "message": e.to_string() })),
            };
            let _ = writeln!(stderr, "{body}");
            code
        }
    }
}

fn read_document(path: &str, stdin: &mut dyn Read) -> Result<Document, Failure> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(Failure::Io)?;
    } else {
        text = std::fs::read_to_string(path).map_err(Failure::Io)?;
    }
    serde_json::from_str(&text).map_err(Failure::Parse)
}

fn wrong_type(cmd: &str, doc: &Document) -> Failure {
    Failure::Usage(format!("`{cmd}` does not accept a document of type `{}`", doc.kind()))
}

fn dispatch(cmd: &Command, render: Render, stdin: &mut dyn Read) -> Result<Output, Failure> {
    match cmd {
        Command::Validate { input, reconstruct, seed } => validate(&read_document(input, stdin)?, *reconstruct, *seed, render),
        Command::Exponents { input } => exponents(&read_document(input, stdin)?, render),
        Command::Dimension { g, r, m, blocks, json } => dimension_cmd(*g, *r, m, blocks, *json),
        Command::Stability { input } => {
            let doc = read_document(input, stdin)?;
            let gc = connection_of(&doc, "stability")?;
            let verdict = is_stable(&gc)?;
            let ok = verdict.is_stable();
            let mut v = serde_json::to_value(&verdict).expect("verdict serializes");
            v["stable"] = Value::Bool(ok);
            Ok(Output::ok(v))
        }
        Command::Tangent { input, bound, trace_free } => {
            let doc = read_document(input, stdin)?;
            let gc = connection_of(&doc, "tangent")?;
            let ts = if *trace_free { tangent_space_trace_free(&gc, *bound)? } else { tangent_space(&gc, *bound)? };
            tangent_output(&ts, render)
        }
        Command::Family { input, grid } => {
            let (fb, points) = match (input, grid) {
                (None, true) => standard_grid(),
                (Some(path), false) => family_of(&read_document(path, stdin)?)?,
                _ => return Err(Failure::Usage("give either a family document or --grid".into())),
            };
            family_output(&fb, &points, render)
        }
        Command::Kernel { r, m, seed, gauge, json } => kernel_cmd(*r, *m, *seed, *gauge, *json, render),
    }
}

fn report_value(kind: &str, report: &VerifyReport) -> Value {
    json!({ "type": kind, "all_pass": report.all_pass(), "failed": report.failed(), "checks": report.checks })
}

fn local_data(doc: &Document) -> Result<LocalRamifiedData, Failure> {
    let Document::Local { field, r, m, c, gauge_seed, mutation } = doc else { unreachable!() };
    let f = json::field("$.field", field)?;
    let nu = json::exponent("$", &f, *r, *m, c)?;
    let mut data = LocalRamifiedData::canonical(&nu);
    if let Some(seed) = gauge_seed {
        data = gauge_randomize(&data, &mut ChaCha8Rng::seed_from_u64(*seed))?;
    }
    if let Some(mu) = mutation {
        data = mutate(&data, mu.kind, mu.index)?.data;
    }
    Ok(data)
}

fn validate(doc: &Document, reconstruct: bool, seed: u64, render: Render) -> Result<Output, Failure> {
    match doc {
        Document::Local { .. } => {
            let data = local_data(doc)?;
            let report = data.verify();
            let mut v = report_value("local", &report);
            let mut ok = report.all_pass();
            if reconstruct {
                let rep = reconstruct_check(&data, &mut ChaCha8Rng::seed_from_u64(seed), 3)?;
                ok &= rep.verdict;
                v["reconstruct"] = json!({
                    "verdict": rep.verdict,
                    "solution_dim": rep.solution_dim,
                    "exponent_match": rep.exponent_match,
                    "claim_holds": rep.claim_holds,
                    "claim_witness": rep.claim_witness,
                    "recovered": rep.recovered.iter().map(|e| render.exponent(e)).collect::<Vec<_>>(),
                });
            }
            Ok(Output { value: v, ok, bare: false })
        }
        Document::ExponentSet { field, a, poles } => {
            let f = json::field("$.field", field)?;
            let report = validate_exponent_set(&json::exponent_set(&f, *a, poles)?);
            Ok(Output { value: report_value("exponent_set", &report), ok: report.all_pass(), bare: false })
        }
        Document::Connection { .. } => {
            let report = connection_of(doc, "validate")?.check();
            Ok(Output { value: report_value("connection", &report), ok: report.all_pass(), bare: false })
        }
        other => Err(wrong_type("validate", other)),
    }
}

fn connection_of(doc: &Document, cmd: &str) -> Result<crate::global::GlobalConnection, Failure> {
    match doc {
        Document::Connection { field, splitting, numerators, poles } => {
            let f = json::field("$.field", field)?;
            Ok(json::connection(&f, splitting, numerators, poles)?)
        }
        other => Err(wrong_type(cmd, other)),
    }
}

fn exponents(doc: &Document, render: Render) -> Result<Output, Failure> {
    match doc {
        Document::Exponent { field, r, m, c } => {
            let f = json::field("$.field", field)?;
            let nu = json::exponent("$", &f, *r, *m, c)?;
            let conn = pushforward_ramified(&nu, default_buffer());
            let back = recover_exponent(&conn)?;
            let ok = back.same_orbit(&nu);
            Ok(Output {
                value: json!({ "input": render.exponent(&nu), "recovered": render.exponent(&back), "same_orbit": ok }),
                ok,
                bare: false,
            })
        }
        Document::Formal { field, m, a } => {
            let f = json::field("$.field", field)?;
            let conn = json::formal(&f, *m, a)?;
            let nu = recover_exponent(&conn)?;
            let chain: Vec<Value> = (0..nu.r as i64).map(|k| render.exponent(&nu.shift_dlog(k))).collect();
            Ok(Output::ok(json!({ "exponent": render.exponent(&nu), "chain": chain })))
        }
        Document::ExponentSet { field, a, poles } => {
            let f = json::field("$.field", field)?;
            let det = det_exponents(&json::exponent_set(&f, *a, poles)?)?;
            Ok(Output::ok(json!({ "det": render.exponent_set(&det) })))
        }
        Document::Connection { .. } => {
            let gc = connection_of(doc, "exponents")?;
            let (_, det) = det_connection(&gc)?;
            Ok(Output::ok(json!({
                "exponent_set": render.exponent_set(&gc.exponent_set()),
                "det": render.exponent_set(&det),
            })))
        }
        other => Err(wrong_type("exponents", other)),
    }
}

fn dimension_cmd(g: i64, r: i64, ms: &[i64], blocks: &[String], as_json: bool) -> Result<Output, Failure> {
    let parsed: Vec<Vec<i64>> = if blocks.is_empty() {
        vec![vec![r]; ms.len()]
    } else {
        blocks
            .iter()
            .map(|b| b.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad block list {b:?}")))).collect())
            .collect::<Result<_, _>>()?
    };
    let chars = euler_chars(g, r, ms, &parsed)?;
    if as_json {
        let mut v = serde_json::to_value(chars).expect("serializes");
        v["dimension"] = json!(dimension(g, r, ms));
        return Ok(Output::ok(v));
    }
    Ok(Output { value: json!(chars.dim_h1), ok: true, bare: true })
}

fn tangent_output(ts: &TangentSpace, render: Render) -> Result<Output, Failure> {
    let pm = pairing_matrix(&ts.basis)?;
    let n = pm.len();
    let skew = (0..n).all(|i| (0..n).all(|j| (&pm[i][j] + &pm[j][i]).is_zero()));
    let rank = linalg::rank(&pm, n);
    let rows: Vec<Value> = pm.iter().map(|row| render.scalars(row)).collect();
    let ok = skew && rank == ts.dimension;
    Ok(Output {
        value: json!({
            "dimension": ts.dimension,
            "bound": ts.bound,
            "certificate": ts.certificate,
            "trace_free": ts.trace_free,
            "pairing_matrix": rows,
            "rank": rank,
            "skew_check": skew,
        }),
        ok,
        bare: false,
    })
}

fn family_of(doc: &Document) -> Result<(FamilyBlock, Vec<(Scalar, Scalar)>), Failure> {
    match doc {
        Document::Family { field, r, m, c, kappa, points } => {
            let f = json::field("$.field", field)?;
            let fb = json::family(&f, *r, *m, c, kappa)?;
            let pts = points
                .iter()
                .enumerate()
                .map(|(i, (t, h))| {
                    Ok((json::scalar(&format!("$.points[{i}][0]"), &f, t)?, json::scalar(&format!("$.points[{i}][1]"), &f, h)?))
                })
                .collect::<Result<_, ConvertError>>()?;
            Ok((fb, pts))
        }
        other => Err(wrong_type("family", other)),
    }
}

fn fiber_value(fiber: &Fiber, render: Render) -> Value {
    match fiber {
        Fiber::Ramified { chain } => json!({ "chain": chain.iter().map(|e| render.exponent(e)).collect::<Vec<_>>() }),
        Fiber::Unramified { leading, distinct } => json!({ "leading": render.scalars(leading), "distinct": distinct }),
        Fiber::RegularSingular { points } => {
            let pts: Vec<Value> = points
                .iter()
                .map(|p| {
                    let kind = match &p.kind {
                        ResidueKind::Parabolic { eigenvalues } => json!({ "kind": "parabolic", "eigenvalues": render.scalars(eigenvalues) }),
                        ResidueKind::Semisimple { eigenvalues, distinct } => {
                            json!({ "kind": "semisimple", "eigenvalues": render.scalars(eigenvalues), "distinct": distinct })
                        }
                        ResidueKind::Nilpotent { beta, minimal_polynomial, full_degree } => json!({
                            "kind": "nilpotent",
                            "beta": render.scalar(beta),
                            "minimal_polynomial": render.poly(minimal_polynomial),
                            "full_degree": full_degree,
                        }),
                    };
                    json!({ "q": p.q, "position": render.scalar(&p.position), "b": render.scalar(&p.b), "residue": kind })
                })
                .collect();
            json!({ "points": pts })
        }
    }
}

fn family_output(fb: &FamilyBlock, points: &[(Scalar, Scalar)], render: Render) -> Result<Output, Failure> {
    let mut out = Vec::with_capacity(points.len());
    for (t, h) in points {
        let fiber = specialize(fb, t, h)?;
        let dagger = check_dagger(fb, t, h)?;
        out.push(json!({
            "t": render.scalar(t),
            "h": render.scalar(h),
            "class": fiber.label(),
            "fiber": fiber_value(&fiber, render),
            "dagger": { "pass": dagger.pass, "violation": dagger.violation },
        }));
    }
    let counts = ["ramified", "unramified", "regular_singular"]
        .map(|l| (l, out.iter().filter(|v| v["class"] == l).count()));
    Ok(Output::ok(json!({
        "r": fb.r,
        "m": fb.m,
        "c": render.scalars(&fb.c),
        "kappa": render.scalars(&fb.kappa),
        "counts": counts.iter().map(|(l, n)| (l.to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
        "points": out,
    })))
}

/// Seeded exponent over `Q(zeta_r)` with integer coefficients in
/// `[-3, 3]` and `c_1 != 0`.
pub fn seeded_exponent(r: usize, m: usize, seed: u64) -> Result<Exponent, Error> {
    if r == 0 || m == 0 {
        return Err(Error::Invalid("need r >= 1 and m >= 1".into()));
    }
    let f = Field::cyclotomic(r as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m * r - r + 1;
    let c = (0..n)
        .map(|l| {
            let mut x = rng.gen_range(-3i64..=3);
            if l == 1 && x == 0 {
                x = 1;
            }
            f.from_int(x)
        })
        .collect();
    Exponent::new(r, m, c)
}

fn kernel_cmd(r: usize, m: usize, seed: u64, gauge: bool, as_json: bool, render: Render) -> Result<Output, Failure> {
    let nu = seeded_exponent(r, m, seed)?;
    let mut data = LocalRamifiedData::canonical(&nu);
    if gauge {
        data = gauge_randomize(&data, &mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9))?;
    }
    let k = kernel_pi(&data)?;
    if !as_json {
        return Ok(Output { value: json!(k.length), ok: true, bare: true });
    }
    let basis: Vec<Value> = k.basis.iter().map(|b| Value::Array(b.iter().map(|s| render.scalars(s.coeffs())).collect())).collect();
    Ok(Output::ok(json!({
        "r": r,
        "m": m,
        "exponent": render.exponent(&nu),
        "length": k.length,
        "expected": r * (r - 1) / 2,
        "basis": basis,
    })))
}
