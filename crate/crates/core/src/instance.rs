//! JSON encoding of structures, elements, sets, and problem instances.
//!
//! Instance files look like
//! `{"structure": "Z", "sets": [[0, 2], [0, 1]], "graph": {...}, "params": {...}}`.
//! Graph edge indices are 1-based positions in the canonically sorted first
//! set (and second set, for a non-symmetric graph). Edges of a symmetric graph
//! are unordered pairs.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{AmbientStructure, Element, Permutation};
use crate::error::SumsetError;
use crate::set::{AdditionGraph, FiniteSet};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Schema(String),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, InstanceError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub structure: AmbientStructure,
    pub sets: Vec<FiniteSet>,
    pub graph: Option<AdditionGraph>,
    /// Extra numeric parameters (`i`, `k`, `kmax`, `t`, ...) for some verifiers.
    pub params: Map<String, Value>,
}

impl Instance {
    pub fn new(structure: AmbientStructure, sets: Vec<FiniteSet>) -> Self {
        Instance {
            structure,
            sets,
            graph: None,
            params: Map::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| schema("instance must be a JSON object"))?;
        let structure = decode_structure(obj.get("structure").ok_or_else(|| schema("missing \"structure\""))?)?;
        let sets = obj
            .get("sets")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("missing \"sets\" array"))?
            .iter()
            .map(|s| decode_set(&structure, s))
            .collect::<Result<Vec<_>>>()?;
        let graph = match obj.get("graph") {
            None | Some(Value::Null) => None,
            Some(g) => Some(decode_graph(g, &sets)?),
        };
        let params = match obj.get("params") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(schema("\"params\" must be an object")),
        };
        Ok(Instance {
            structure,
            sets,
            graph,
            params,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("structure".into(), encode_structure(&self.structure));
        obj.insert("sets".into(), Value::Array(self.sets.iter().map(encode_set).collect()));
        if let Some(g) = &self.graph {
            obj.insert("graph".into(), encode_graph(g));
        }
        if !self.params.is_empty() {
            obj.insert("params".into(), Value::Object(self.params.clone()));
        }
        Value::Object(obj)
    }

    pub fn param_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| schema(&format!("param \"{key}\" must be a nonnegative integer"))),
        }
    }
}

fn schema(msg: &str) -> InstanceError {
    InstanceError::Schema(msg.to_string())
}

pub fn encode_structure(s: &AmbientStructure) -> Value {
    serde_json::to_value(s).expect("structures serialize")
}

pub fn decode_structure(v: &Value) -> Result<AmbientStructure> {
    let s: AmbientStructure =
        serde_json::from_value(v.clone()).map_err(|e| schema(&format!("unknown structure {v}: {e}")))?;
    s.validate()?;
    Ok(s)
}

fn encode_int(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(n) => json!(n),
        None => json!(v.to_string()),
    }
}

fn decode_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| schema(&format!("{n} is not an integer"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| schema(&format!("\"{s}\" is not a decimal integer"))),
        _ => Err(schema(&format!("expected an integer, got {v}"))),
    }
}

pub fn encode_element(e: &Element) -> Value {
    match e {
        Element::Int(v) => encode_int(v),
        Element::Vector(c) => Value::Array(c.iter().map(encode_int).collect()),
        Element::Residue(r) => json!(r),
        Element::Perm(p) => json!(p.one_line()),
        Element::Subset(m) => json!(m),
        Element::Tuple(t) => Value::Array(t.iter().map(encode_element).collect()),
    }
}

pub fn decode_element(structure: &AmbientStructure, v: &Value) -> Result<Element> {
    use AmbientStructure::*;
    let array = |v: &Value| -> Result<Vec<Value>> {
        v.as_array()
            .cloned()
            .ok_or_else(|| schema(&format!("expected an array element of {structure}, got {v}")))
    };
    let e = match structure {
        Integers => Element::Int(decode_int(v)?),
        Lattice(_) => Element::Vector(array(v)?.iter().map(decode_int).collect::<Result<_>>()?),
        Residues(n) => {
            let r = decode_int(v)?;
            let n = BigInt::from(*n);
            let reduced = ((r % &n) + &n) % &n;
            Element::Residue(reduced.to_u64().expect("reduced residue fits"))
        }
        Permutations(_) => {
            let images = array(v)?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| schema(&format!("{v} is not a one-line permutation")))?;
            Element::Perm(Permutation::from_one_line(&images)?)
        }
        IntersectionSemigroup(_) => {
            let m = v
                .as_u64()
                .ok_or_else(|| schema(&format!("{v} is not a subset bitmask")))?;
            Element::Subset(u16::try_from(m).map_err(|_| schema(&format!("bitmask {m} too wide")))?)
        }
        DirectPower { base, .. } => Element::Tuple(
            array(v)?
                .iter()
                .map(|c| decode_element(base, c))
                .collect::<Result<_>>()?,
        ),
    };
    structure.check(&e)?;
    Ok(e)
}

pub fn encode_set(s: &FiniteSet) -> Value {
    Value::Array(s.iter().map(encode_element).collect())
}

pub fn decode_set(structure: &AmbientStructure, v: &Value) -> Result<FiniteSet> {
    let items = v.as_array().ok_or_else(|| schema("each set must be a JSON array"))?;
    let elems = items
        .iter()
        .map(|x| decode_element(structure, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteSet::new(structure.clone(), elems)?)
}

pub fn encode_graph(g: &AdditionGraph) -> Value {
    let edges: Vec<Value> = g.edges().iter().map(|&(i, j)| json!([i + 1, j + 1])).collect();
    json!({"edges": edges, "symmetric": g.is_symmetric(), "loops": g.loops_allowed()})
}

fn decode_graph(v: &Value, sets: &[FiniteSet]) -> Result<AdditionGraph> {
    let obj = v.as_object().ok_or_else(|| schema("\"graph\" must be an object"))?;
    let symmetric = obj.get("symmetric").and_then(Value::as_bool).unwrap_or(true);
    let loops = obj.get("loops").and_then(Value::as_bool).unwrap_or(true);
    let left = sets
        .first()
        .ok_or_else(|| schema("a graph needs at least one set"))?
        .len();
    let right = if symmetric {
        left
    } else {
        sets.get(1)
            .ok_or_else(|| schema("a bipartite graph needs two sets"))?
            .len()
    };
    let mut edges = Vec::new();
    for e in obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("graph needs \"edges\""))?
    {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .and_then(|p| Some((p[0].as_u64()? as usize, p[1].as_u64()? as usize)))
            .filter(|&(i, j)| i >= 1 && j >= 1)
            .ok_or_else(|| schema(&format!("edge {e} must be a pair of 1-based indices")))?;
        edges.push((pair.0 - 1, pair.1 - 1));
    }
    if symmetric {
        Ok(AdditionGraph::undirected(left, edges, loops)?)
    } else {
        Ok(AdditionGraph::new(left, right, edges, false, loops)?)
    }
}
