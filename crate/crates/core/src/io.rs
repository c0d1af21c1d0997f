//! JSON encodings for graphs, targets, quantum graphs, matrices and moment
//! sequences.
//!
//! Exact numbers are written as strings `"p/q"` (or `"n"` for integers) and
//! floats as JSON numbers. Readers accept either form for both scalar types.
//!
//! | value | shape |
//! |---|---|
//! | multigraph | `{"nodes": 3, "labels": 0, "edges": [[0, 1, 2], ...]}` |
//! | weighted graph | `{"kind": "weighted", "alpha": [...], "beta": [[...]]}` |
//! | randomly weighted graph | `{"kind": "random", "alpha": [...], "dist": [[[[value, prob], ...]]]}` |
//! | step graphon | `{"kind": "graphon", "measures": [...], "values": [[...]], "bound": b}` |
//! | quantum graph | `{"labels": k, "terms": [{"coef": c, "graph": {...}}]}` |
//! | matrix | `{"rows": [[...]]}` |
//! | moment sequence | `{"domain": "unit" \| {"symmetric": d}, "values": [...]}` |

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::hom::QuantumGraph;
use crate::linalg::Matrix;
use crate::moments::{Domain, MomentSequence};
use crate::scalar::{format_rational, parse_rational, rational_from_f64, Rational, Scalar};
use crate::targets::{Distribution, RandomWeightedGraph, StepGraphon, WeightedGraph};

/// Scalars with a JSON encoding.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Rational::from_integer(i.into())),
                None => rational_from_f64(n.as_f64().ok_or_else(|| parse_err("number out of range"))?),
            },
            _ => Err(parse_err(format!("expected a number, found {v}"))),
        }
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| parse_err("number out of range")),
            Value::String(s) => Ok(parse_rational(s)?.to_f64()),
            _ => Err(parse_err(format!("expected a number, found {v}"))),
        }
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("`{what}` must be an array")))
}

fn uint(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| parse_err(format!("`{what}` must be a nonnegative integer")))
}

fn vector<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    array(v, what)?.iter().map(T::from_json).collect()
}

fn rows<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<Vec<T>>> {
    array(v, what)?.iter().map(|r| vector(r, what)).collect()
}

fn encode_vec<T: JsonScalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(T::to_json).collect())
}

fn encode_rows<T: JsonScalar>(rows: &[Vec<T>]) -> Value {
    Value::Array(rows.iter().map(|r| encode_vec(r)).collect())
}

pub fn graph_to_json(g: &Multigraph) -> Value {
    let edges: Vec<Value> = g.edges().map(|(u, v, m)| json!([u, v, m])).collect();
    json!({"nodes": g.node_count(), "labels": g.label_count(), "edges": edges})
}

pub fn graph_from_json(v: &Value) -> Result<Multigraph> {
    let nodes = uint(field(v, "nodes")?, "nodes")? as usize;
    let labels = v.get("labels").map_or(Ok(0), |l| uint(l, "labels"))? as usize;
    let edges = match v.get("edges") {
        Some(e) => array(e, "edges")?
            .iter()
            .map(|e| {
                let t = array(e, "edge")?;
                match t.as_slice() {
                    [a, b] => Ok((uint(a, "edge")? as usize, uint(b, "edge")? as usize, 1)),
                    [a, b, m] => Ok((uint(a, "edge")? as usize, uint(b, "edge")? as usize, uint(m, "edge")? as u32)),
                    _ => Err(parse_err("edges are [u, v] or [u, v, multiplicity]")),
                }
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Multigraph::from_edges(nodes, labels, &edges)
}

pub fn weighted_to_json<T: JsonScalar>(h: &WeightedGraph<T>) -> Value {
    json!({"kind": "weighted", "alpha": encode_vec(h.alpha()), "beta": encode_rows(&h.beta_rows())})
}

pub fn weighted_from_json<T: JsonScalar>(v: &Value) -> Result<WeightedGraph<T>> {
    let beta = rows(field(v, "beta")?, "beta")?;
    match v.get("alpha") {
        Some(a) => WeightedGraph::new(vector(a, "alpha")?, beta),
        None => WeightedGraph::unweighted(beta),
    }
}

pub fn distribution_to_json(d: &Distribution) -> Value {
    Value::Array(d.atoms().iter().map(|(x, p)| json!([x.to_json(), p.to_json()])).collect())
}

pub fn distribution_from_json(v: &Value) -> Result<Distribution> {
    let atoms = array(v, "distribution")?
        .iter()
        .map(|a| match array(a, "atom")?.as_slice() {
            [x, p] => Ok((Rational::from_json(x)?, Rational::from_json(p)?)),
            _ => Err(parse_err("atoms are [value, probability]")),
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::new(atoms)
}

pub fn random_to_json(h: &RandomWeightedGraph) -> Value {
    let q = h.node_count();
    let dist: Vec<Value> = (0..q)
        .map(|i| Value::Array((0..q).map(|j| distribution_to_json(h.dist(i, j))).collect()))
        .collect();
    json!({"kind": "random", "alpha": encode_vec(h.alpha()), "dist": dist})
}

pub fn random_from_json(v: &Value) -> Result<RandomWeightedGraph> {
    let alpha = vector(field(v, "alpha")?, "alpha")?;
    let dist = array(field(v, "dist")?, "dist")?
        .iter()
        .map(|r| array(r, "dist")?.iter().map(distribution_from_json).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    RandomWeightedGraph::new(alpha, dist)
}

pub fn graphon_to_json<T: JsonScalar>(w: &StepGraphon<T>) -> Value {
    json!({
        "kind": "graphon",
        "measures": encode_vec(w.measures()),
        "values": encode_rows(&w.value_rows()),
        "bound": w.bound().to_json(),
    })
}

pub fn graphon_from_json<T: JsonScalar>(v: &Value) -> Result<StepGraphon<T>> {
    StepGraphon::new(
        vector(field(v, "measures")?, "measures")?,
        rows(field(v, "values")?, "values")?,
        T::from_json(field(v, "bound")?)?,
    )
}

/// Any of the target encodings.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Weighted(WeightedGraph<Rational>),
    Random(RandomWeightedGraph),
    Graphon(StepGraphon<Rational>),
}

impl Target {
    /// Reads `kind` when present and otherwise infers it from the fields.
    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some(k) => k.to_owned(),
            None if v.get("dist").is_some() => "random".into(),
            None if v.get("measures").is_some() => "graphon".into(),
            None => "weighted".into(),
        };
        match kind.as_str() {
            "weighted" => Ok(Self::Weighted(weighted_from_json(v)?)),
            "random" => Ok(Self::Random(random_from_json(v)?)),
            "graphon" => Ok(Self::Graphon(graphon_from_json(v)?)),
            other => Err(parse_err(format!("unknown target kind `{other}`"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Weighted(h) => weighted_to_json(h),
            Self::Random(h) => random_to_json(h),
            Self::Graphon(w) => graphon_to_json(w),
        }
    }

    /// The randomly weighted view (degenerate distributions for the other kinds).
    pub fn as_random(&self) -> Result<RandomWeightedGraph> {
        Ok(match self {
            Self::Weighted(h) => RandomWeightedGraph::from_weighted(h),
            Self::Random(h) => h.clone(),
            Self::Graphon(w) => RandomWeightedGraph::from_weighted(&w.to_weighted_graph()),
        })
    }
}

pub fn quantum_to_json(p: &QuantumGraph) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(g, c)| json!({"coef": c.to_json(), "graph": graph_to_json(g)}))
        .collect();
    json!({"labels": p.label_count(), "terms": terms})
}

pub fn quantum_from_json(v: &Value) -> Result<QuantumGraph> {
    let mut p = QuantumGraph::new(uint(field(v, "labels")?, "labels")? as usize);
    for t in array(field(v, "terms")?, "terms")? {
        p.add_term(Rational::from_json(field(t, "coef")?)?, &graph_from_json(field(t, "graph")?)?)?;
    }
    Ok(p)
}

pub fn matrix_to_json<T: JsonScalar>(m: &Matrix<T>) -> Value {
    json!({"rows": encode_rows(&m.rows())})
}

pub fn matrix_from_json<T: JsonScalar>(v: &Value) -> Result<Matrix<T>> {
    Matrix::from_rows(rows(field(v, "rows")?, "rows")?)
}

pub fn moments_to_json(s: &MomentSequence) -> Value {
    let domain = match s.domain() {
        Domain::Unit => json!("unit"),
        Domain::Symmetric(d) => json!({"symmetric": d.to_json()}),
    };
    json!({"domain": domain, "values": encode_vec(s.values())})
}

pub fn moments_from_json(v: &Value) -> Result<MomentSequence> {
    let domain = match v.get("domain") {
        None => Domain::Unit,
        Some(Value::String(s)) if s == "unit" => Domain::Unit,
        Some(d) => match d.get("symmetric") {
            Some(b) => Domain::Symmetric(Rational::from_json(b)?),
            None => return Err(parse_err("domain is \"unit\" or {\"symmetric\": d}")),
        },
    };
    MomentSequence::new(vector(field(v, "values")?, "values")?, domain)
}

/// Parses a JSON document from text.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}
