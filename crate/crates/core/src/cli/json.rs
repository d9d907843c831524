//! Input documents and their conversion into library types. Every
//! conversion error carries the JSON path of the offending value.

use crate::error::Error;
use crate::family::FamilyBlock;
use crate::formal::{Exponent, FormalConnection};
use crate::global::{ExponentSet, GlobalConnection, PoleExponents, PoleSpec, Position};
use crate::poly::Poly;
use crate::scalars::{Field, FieldSpec, Scalar, Q};
use crate::series::TruncSeries;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Value};

/// Failure while turning a parsed document into library values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvertError {
    /// Malformed content at a JSON path.
    Schema { path: String, message: String },
    /// A library constructor rejected the values at `path`.
    Library { path: String, error: Error },
}

impl ConvertError {
    pub fn path(&self) -> &str {
        match self {
            ConvertError::Schema { path, .. } | ConvertError::Library { path, .. } => path,
        }
    }

    /// Input errors exit with 2; library failures that are mathematical
    /// (the values are well formed but the object does not exist) exit with 1.
    pub fn is_input_error(&self) -> bool {
        match self {
            ConvertError::Schema { .. } => true,
            ConvertError::Library { error, .. } => error.is_input_error(),
        }
    }
}

impl std::fmt::Display for ConvertError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvertError::Schema { path, message } => write!(f, "{path}: {message}"),
            ConvertError::Library { path, error } => write!(f, "{path}: {error}"),
        }
    }
}

pub type SResult<T> = std::result::Result<T, ConvertError>;

fn schema(path: &str, message: impl Into<String>) -> ConvertError {
    ConvertError::Schema { path: path.to_string(), message: message.into() }
}

fn lib(path: &str, error: Error) -> ConvertError {
    ConvertError::Library { path: path.to_string(), error }
}

/// A rational written as a JSON integer or a string `"p"` / `"p/q"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatJson {
    Int(i64),
    Str(String),
}

/// A field element: a rational, or its coordinates in the power basis.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Rat(RatJson),
    Coords(Vec<RatJson>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadicalJson {
    pub e: u32,
    pub u: Vec<RatJson>,
}

/// Cyclotomic order `L` and Kummer radicals; absent means `Q`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    #[serde(default = "one")]
    pub cyclotomic: u64,
    #[serde(default)]
    pub radicals: Vec<RadicalJson>,
}

fn one() -> u64 {
    1
}

impl Default for FieldJson {
    fn default() -> Self {
        FieldJson { cyclotomic: 1, radicals: Vec::new() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationJson {
    pub kind: crate::localdata::MutationKind,
    #[serde(default)]
    pub index: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BlockJson {
    /// `nu_{j,0}` of a block of size `r`; the chain is `nu_{j,0} + k dw/w`.
    Base { r: usize, c: Vec<ScalarJson> },
    Chain { chain: Vec<Vec<ScalarJson>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleExpJson {
    pub m: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleJson {
    /// `"inf"` or a field element.
    pub at: ScalarJson,
    pub m: usize,
    pub blocks: Vec<usize>,
    pub weights: Vec<RatJson>,
}

/// Top-level input document, selected by its `type` field.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Document {
    Exponent {
        #[serde(default)]
        field: FieldJson,
        r: usize,
        m: usize,
        c: Vec<ScalarJson>,
    },
    Formal {
        #[serde(default)]
        field: FieldJson,
        m: usize,
        /// `a[j][k]`: coefficients of a `z`-series, low to high; all
        /// entries share one length `M`.
        a: Vec<Vec<Vec<ScalarJson>>>,
    },
    Local {
        #[serde(default)]
        field: FieldJson,
        r: usize,
        m: usize,
        c: Vec<ScalarJson>,
        #[serde(default)]
        gauge_seed: Option<u64>,
        #[serde(default)]
        mutation: Option<MutationJson>,
    },
    ExponentSet {
        #[serde(default)]
        field: FieldJson,
        a: i64,
        poles: Vec<PoleExpJson>,
    },
    Connection {
        #[serde(default)]
        field: FieldJson,
        splitting: Vec<i64>,
        /// `numerators[a][b]`: polynomial coefficients, low to high.
        numerators: Vec<Vec<Vec<ScalarJson>>>,
        poles: Vec<PoleJson>,
    },
    Family {
        #[serde(default)]
        field: FieldJson,
        r: usize,
        m: usize,
        c: Vec<ScalarJson>,
        kappa: Vec<ScalarJson>,
        points: Vec<(ScalarJson, ScalarJson)>,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Exponent { .. } => "exponent",
            Document::Formal { .. } => "formal",
            Document::Local { .. } => "local",
            Document::ExponentSet { .. } => "exponent_set",
            Document::Connection { .. } => "connection",
            Document::Family { .. } => "family",
        }
    }
}

pub fn rational(path: &str, x: &RatJson) -> SResult<Q> {
    match x {
        RatJson::Int(n) => Ok(Q::from_integer(BigInt::from(*n))),
        RatJson::Str(s) => {
            let s = s.trim();
            let (p, q) = s.split_once('/').unwrap_or((s, "1"));
            let p: BigInt = p.trim().parse().map_err(|_| schema(path, format!("not a rational: {s:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| schema(path, format!("not a rational: {s:?}")))?;
            if q.is_zero() {
                return Err(schema(path, "zero denominator"));
            }
            Ok(Q::new(p, q))
        }
    }
}

pub fn field(path: &str, f: &FieldJson) -> SResult<Field> {
    let radicals = f
        .radicals
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let p = format!("{path}.radicals[{i}].u");
            let u = r.u.iter().enumerate().map(|(j, x)| rational(&format!("{p}[{j}]"), x)).collect::<SResult<Vec<_>>>()?;
            Ok((r.e, u))
        })
        .collect::<SResult<Vec<_>>>()?;
    Field::make(&FieldSpec { cyclotomic_order: f.cyclotomic, radicals }).map_err(|e| lib(path, e))
}

pub fn scalar(path: &str, f: &Field, x: &ScalarJson) -> SResult<Scalar> {
    match x {
        ScalarJson::Rat(q) => Ok(f.from_q(rational(path, q)?)),
        ScalarJson::Coords(cs) => {
            if cs.len() != f.degree() {
                return Err(schema(path, format!("expected {} coordinates, got {}", f.degree(), cs.len())));
            }
            let c = cs.iter().enumerate().map(|(i, q)| rational(&format!("{path}[{i}]"), q)).collect::<SResult<Vec<_>>>()?;
            f.from_coeffs(c).map_err(|e| lib(path, e))
        }
    }
}

pub fn scalars(path: &str, f: &Field, xs: &[ScalarJson]) -> SResult<Vec<Scalar>> {
    xs.iter().enumerate().map(|(i, x)| scalar(&format!("{path}[{i}]"), f, x)).collect()
}

pub fn exponent(path: &str, f: &Field, r: usize, m: usize, c: &[ScalarJson]) -> SResult<Exponent> {
    Exponent::new(r, m, scalars(&format!("{path}.c"), f, c)?).map_err(|e| lib(path, e))
}

pub fn formal(f: &Field, m: usize, a: &[Vec<Vec<ScalarJson>>]) -> SResult<FormalConnection> {
    let big_m = a.first().and_then(|row| row.first()).map_or(0, Vec::len);
    if a.is_empty() || big_m == 0 {
        return Err(schema("$.a", "need a nonempty matrix of nonempty series"));
    }
    let mut mat = Vec::with_capacity(a.len());
    for (j, row) in a.iter().enumerate() {
        if row.len() != a.len() {
            return Err(schema(&format!("$.a[{j}]"), "matrix must be square"));
        }
        let mut out = Vec::with_capacity(row.len());
        for (k, s) in row.iter().enumerate() {
            let p = format!("$.a[{j}][{k}]");
            if s.len() != big_m {
                return Err(schema(&p, format!("every entry needs {big_m} coefficients")));
            }
            out.push(TruncSeries::new(1, scalars(&p, f, s)?));
        }
        mat.push(out);
    }
    FormalConnection::new(m, big_m, mat).map_err(|e| lib("$.a", e))
}

pub fn exponent_set(f: &Field, a: i64, poles: &[PoleExpJson]) -> SResult<ExponentSet> {
    let mut out = Vec::with_capacity(poles.len());
    for (i, p) in poles.iter().enumerate() {
        let mut blocks = Vec::with_capacity(p.blocks.len());
        for (j, b) in p.blocks.iter().enumerate() {
            let path = format!("$.poles[{i}].blocks[{j}]");
            let chain = match b {
                BlockJson::Base { r, c } => {
                    let nu = exponent(&path, f, *r, p.m, c)?;
                    (0..*r as i64).map(|k| nu.shift_dlog(k)).collect()
                }
                BlockJson::Chain { chain } => {
                    let r = chain.len();
                    chain
                        .iter()
                        .enumerate()
                        .map(|(k, c)| exponent(&format!("{path}.chain[{k}]"), f, r, p.m, c))
                        .collect::<SResult<Vec<_>>>()?
                }
            };
            blocks.push(chain);
        }
        out.push(PoleExponents { m: p.m, blocks });
    }
    Ok(ExponentSet { a, poles: out })
}

pub fn connection(f: &Field, splitting: &[i64], numerators: &[Vec<Vec<ScalarJson>>], poles: &[PoleJson]) -> SResult<GlobalConnection> {
    let r = splitting.len();
    if numerators.len() != r || numerators.iter().any(|row| row.len() != r) {
        return Err(schema("$.numerators", format!("expected a {r} x {r} matrix")));
    }
    let nums = numerators
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(|(b, p)| Ok(Poly::new(f, scalars(&format!("$.numerators[{a}][{b}]"), f, p)?)))
                .collect::<SResult<Vec<_>>>()
        })
        .collect::<SResult<Vec<_>>>()?;
    let specs = poles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let path = format!("$.poles[{i}]");
            let position = match &p.at {
                ScalarJson::Rat(RatJson::Str(s)) if s.trim() == "inf" => Position::Infinity,
                other => Position::Finite(scalar(&format!("{path}.at"), f, other)?),
            };
            let weights = p.weights.iter().enumerate().map(|(j, w)| rational(&format!("{path}.weights[{j}]"), w)).collect::<SResult<Vec<_>>>()?;
            Ok(PoleSpec { position, m: p.m, block_sizes: p.blocks.clone(), weights })
        })
        .collect::<SResult<Vec<_>>>()?;
    GlobalConnection::from_matrix(f.clone(), splitting.to_vec(), nums, specs).map_err(|e| lib("$", e))
}

pub fn family(f: &Field, r: usize, m: usize, c: &[ScalarJson], kappa: &[ScalarJson]) -> SResult<FamilyBlock> {
    FamilyBlock::new(r, m, scalars("$.c", f, c)?, scalars("$.kappa", f, kappa)?).map_err(|e| lib("$", e))
}

/// Exact rendering, with a complex approximation when `float` is set.
#[derive(Clone, Copy, Debug, Default)]
pub struct Render {
    pub float: bool,
}

impl Render {
    pub fn scalar(&self, x: &Scalar) -> Value {
        if self.float {
            let z = x.embed_complex(64);
            json!({ "exact": x.render(), "approx": [z.re, z.im] })
        } else {
            Value::String(x.render())
        }
    }

    pub fn scalars(&self, xs: &[Scalar]) -> Value {
        Value::Array(xs.iter().map(|x| self.scalar(x)).collect())
    }

    pub fn exponent(&self, e: &Exponent) -> Value {
        json!({ "r": e.r, "m": e.m, "c": self.scalars(&e.c) })
    }

    pub fn exponent_set(&self, s: &ExponentSet) -> Value {
        let poles: Vec<Value> = s
            .poles
            .iter()
            .map(|p| json!({ "m": p.m, "blocks": p.blocks.iter().map(|b| b.iter().map(|e| self.scalars(&e.c)).collect::<Vec<_>>()).collect::<Vec<_>>() }))
            .collect();
        json!({ "a": s.a, "poles": poles })
    }

    pub fn poly(&self, p: &Poly) -> Value {
        self.scalars(p.coeffs())
    }
}
