//! JSON formats. Rationals are always `"num/den"` strings and indices in algebra files
//! are 1-based.
//!
//! - algebra: `{name, labels, weights, brackets: {"i,j": [{"k": 3, "c": "1/1"}]}}`
//! - polynomial: `{"e1,e2,…": "num/den"}`, keyed by exponent vectors
//! - `W`-valued polynomial: `{"e1,e2,…": ["num/den", …]}`
//! - tensor: `{word: ["num/den", …]}`, one entry per `W` component
//! - point: `{base: [..], stack: {"k": tensor}}`
//! - map: `{algebra, W, m, F_G: [poly], "F^0": [poly], …}`

use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::algebra::{catalog, Bracket, StratAlg};
use crate::contact::PolyMap;
use crate::error::{check_len, Error, Result};
use crate::hd::{self, Membership, Tensor};
use crate::jet::{JetPoint, JetSpace};
use crate::mpoly::MPoly;
use crate::pbw;
use crate::polyjet::WPoly;
use crate::rat::{self, Rat};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn rat_to_json(r: &Rat) -> Value {
    Value::String(rat::to_string(r))
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => rat::parse(s),
        Value::Number(n) if n.is_i64() => Ok(rat::int(n.as_i64().unwrap())),
        _ => Err(perr(format!("expected a rational, got {v}"))),
    }
}

pub fn rats_to_json(xs: &[Rat]) -> Value {
    Value::Array(xs.iter().map(rat_to_json).collect())
}

pub fn rats_from_json(v: &Value) -> Result<Vec<Rat>> {
    v.as_array().ok_or_else(|| perr(format!("expected an array, got {v}")))?.iter().map(rat_from_json).collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field `{key}`")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| perr(format!("`{what}` must be a non-negative integer")))
}

pub fn algebra_to_json(alg: &StratAlg) -> Value {
    let mut brackets = Map::new();
    for (i, j, terms) in alg.structure() {
        let list: Vec<Value> = terms.iter().map(|(k, c)| json!({"k": k + 1, "c": rat::to_string(c)})).collect();
        brackets.insert(format!("{},{}", i + 1, j + 1), Value::Array(list));
    }
    json!({
        "name": alg.name(),
        "labels": alg.labels(),
        "weights": alg.weights(),
        "brackets": brackets,
    })
}

/// Parse without validating; see [`StratAlg::validate`].
pub fn algebra_from_json(v: &Value) -> Result<StratAlg> {
    let name = field(v, "name")?.as_str().ok_or_else(|| perr("`name` must be a string"))?;
    let weights: Vec<u32> = field(v, "weights")?
        .as_array()
        .ok_or_else(|| perr("`weights` must be an array"))?
        .iter()
        .map(|w| w.as_u64().map(|x| x as u32).ok_or_else(|| perr("weights must be positive integers")))
        .collect::<Result<_>>()?;
    let n = weights.len();
    let labels: Vec<String> = match v.get("labels") {
        Some(l) => l
            .as_array()
            .ok_or_else(|| perr("`labels` must be an array"))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| perr("labels must be strings")))
            .collect::<Result<_>>()?,
        None => (1..=n).map(|i| format!("X{i}")).collect(),
    };
    let mut brackets: Vec<(usize, usize, Bracket)> = Vec::new();
    if let Some(b) = v.get("brackets") {
        let obj = b.as_object().ok_or_else(|| perr("`brackets` must be an object"))?;
        for (key, terms) in obj {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .filter(|&(a, b)| a >= 1 && b >= 1)
                .ok_or_else(|| perr(format!("bad bracket key `{key}`")))?;
            let list = terms.as_array().ok_or_else(|| perr(format!("bracket `{key}` must be a list")))?;
            let mut t: Bracket = Vec::new();
            for term in list {
                let k = as_usize(field(term, "k")?, "k")?;
                if k == 0 {
                    return Err(perr("bracket targets are 1-based"));
                }
                t.push((k - 1, rat_from_json(field(term, "c")?)?));
            }
            let (i, j) = (i - 1, j - 1);
            if i < j {
                brackets.push((i, j, t));
            } else if i > j {
                brackets.push((j, i, t.into_iter().map(|(k, c)| (k, -c)).collect()));
            } else {
                return Err(perr(format!("bracket `{key}` of a vector with itself")));
            }
        }
    }
    StratAlg::new(name, labels, weights, &brackets)
}

/// Catalog name, or path to an algebra JSON file. Returned unvalidated.
pub fn load_algebra_unchecked(source: &str) -> Result<Arc<StratAlg>> {
    let path = Path::new(source);
    if source.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| perr(format!("{source}: {e}")))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| perr(format!("{source}: {e}")))?;
        Ok(Arc::new(algebra_from_json(&v)?))
    } else {
        catalog(source)
    }
}

/// Like [`load_algebra_unchecked`], rejecting algebras that fail validation.
pub fn load_algebra(source: &str) -> Result<Arc<StratAlg>> {
    let alg = load_algebra_unchecked(source)?;
    let report = alg.validate();
    if !report.all_pass() {
        return Err(Error::InvalidAlgebra(report.failures().join("; ")));
    }
    Ok(alg)
}

fn exp_key(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_exp(key: &str, nvars: usize) -> Result<Vec<u32>> {
    let e: Vec<u32> = if key.is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|s| s.trim().parse().map_err(|_| perr(format!("bad exponent key `{key}`"))))
            .collect::<Result<_>>()?
    };
    if e.len() != nvars {
        return Err(perr(format!("exponent key `{key}` needs {nvars} entries")));
    }
    Ok(e)
}

pub fn poly_to_json(p: &MPoly) -> Value {
    let mut m = Map::new();
    for (e, c) in p.terms() {
        m.insert(exp_key(e), rat_to_json(c));
    }
    Value::Object(m)
}

pub fn poly_from_json(v: &Value, nvars: usize) -> Result<MPoly> {
    let obj = v.as_object().ok_or_else(|| perr("polynomial must be an object"))?;
    let mut p = MPoly::zero(nvars);
    for (k, c) in obj {
        p.add_term(parse_exp(k, nvars)?, rat_from_json(c)?);
    }
    Ok(p)
}

pub fn wpoly_to_json(f: &WPoly) -> Value {
    let mut keys: Vec<Vec<u32>> = f.comps.iter().flat_map(|p| p.terms().map(|(e, _)| e.clone())).collect();
    keys.sort();
    keys.dedup();
    let mut m = Map::new();
    for e in keys {
        m.insert(exp_key(&e), Value::Array(f.comps.iter().map(|p| rat_to_json(&p.coeff(&e))).collect()));
    }
    Value::Object(m)
}

pub fn wpoly_from_json(v: &Value, nvars: usize, wdim: usize) -> Result<WPoly> {
    let obj = v.as_object().ok_or_else(|| perr("polynomial must be an object"))?;
    let mut comps = vec![MPoly::zero(nvars); wdim];
    for (k, cs) in obj {
        let e = parse_exp(k, nvars)?;
        let cs = match cs {
            Value::Array(_) => rats_from_json(cs)?,
            _ => vec![rat_from_json(cs)?],
        };
        check_len(wdim, cs.len())?;
        for (p, c) in comps.iter_mut().zip(cs) {
            p.add_term(e.clone(), c);
        }
    }
    Ok(WPoly { comps })
}

pub fn tensor_to_json(alg: &StratAlg, t: &Tensor) -> Value {
    let mut m = Map::new();
    for (p, w) in pbw::words(t.r, t.degree).iter().enumerate() {
        let vals: Vec<Value> = (0..t.wdim).map(|c| rat_to_json(&t.coeffs[p * t.wdim + c])).collect();
        m.insert(hd::word_key(alg, w), Value::Array(vals));
    }
    Value::Object(m)
}

/// Missing words are zero.
pub fn tensor_from_json(alg: &StratAlg, v: &Value, degree: usize, wdim: usize) -> Result<Tensor> {
    let obj = v.as_object().ok_or_else(|| perr("tensor must be an object"))?;
    let mut t = Tensor::zeros(degree, alg.rank(), wdim);
    for (k, vals) in obj {
        let w = hd::parse_word_key(alg, k)?;
        if w.len() != degree {
            return Err(perr(format!("word `{k}` has length {}, expected {degree}", w.len())));
        }
        let vals = rats_from_json(vals)?;
        check_len(wdim, vals.len())?;
        for (c, x) in vals.into_iter().enumerate() {
            t.set(&w, c, x);
        }
    }
    Ok(t)
}

pub fn point_to_json(space: &JetSpace, p: &JetPoint) -> Value {
    let mut stack = Map::new();
    for (d, t) in space.stack_tensors(&p.stack).iter().enumerate() {
        stack.insert(d.to_string(), tensor_to_json(space.alg(), t));
    }
    json!({"base": rats_to_json(&p.base), "stack": stack})
}

/// Parse a point; tensors outside `HD` give [`Error::NotMember`].
pub fn point_from_json(space: &JetSpace, v: &Value) -> Result<JetPoint> {
    let base = rats_from_json(field(v, "base")?)?;
    check_len(space.n(), base.len())?;
    let obj = field(v, "stack")?.as_object().ok_or_else(|| perr("`stack` must be an object"))?;
    for k in obj.keys() {
        match k.parse::<usize>() {
            Ok(d) if d <= space.order() => {}
            _ => return Err(perr(format!("stack degree `{k}` out of range 0..={}", space.order()))),
        }
    }
    let mut stack = Vec::with_capacity(space.order() + 1);
    for d in 0..=space.order() {
        let coords = match obj.get(&d.to_string()) {
            None => vec![Rat::zero(); space.block_dim(d)],
            Some(tv) => {
                let t = tensor_from_json(space.alg(), tv, d, space.wdim())?;
                match space.hd().degree(d).membership(&t) {
                    Membership::Member(c) => c,
                    Membership::NotMember { component, witness } => {
                        return Err(Error::NotMember { degree: d, component, witness })
                    }
                }
            }
        };
        stack.push(coords);
    }
    Ok(JetPoint { base, stack })
}

pub fn map_to_json(f: &PolyMap) -> Value {
    let space = f.space();
    let mut m = Map::new();
    m.insert("algebra".into(), algebra_to_json(space.alg()));
    m.insert("W".into(), json!(space.wdim()));
    m.insert("m".into(), json!(space.order()));
    m.insert("F_G".into(), Value::Array(f.base_part().iter().map(poly_to_json).collect()));
    for k in 0..=space.order() {
        m.insert(format!("F^{k}"), Value::Array(f.degree_part(k).iter().map(poly_to_json).collect()));
    }
    Value::Object(m)
}

/// Space descriptor of a map file: the algebra (catalog name or algebra object), `W`, `m`.
pub fn map_space_from_json(v: &Value) -> Result<Arc<JetSpace>> {
    let alg = match field(v, "algebra")? {
        Value::String(s) => load_algebra(s)?,
        a => {
            let alg = algebra_from_json(a)?;
            let report = alg.validate();
            if !report.all_pass() {
                return Err(Error::InvalidAlgebra(report.failures().join("; ")));
            }
            Arc::new(alg)
        }
    };
    JetSpace::new(&alg, as_usize(field(v, "W")?, "W")?, as_usize(field(v, "m")?, "m")?)
}

/// Parse the components of a map on `space`; every `F^k` must be present.
pub fn map_from_json(space: &Arc<JetSpace>, v: &Value) -> Result<PolyMap> {
    let nv = space.dim();
    let list = |key: &str, len: usize| -> Result<Vec<MPoly>> {
        let arr = field(v, key)?.as_array().ok_or_else(|| perr(format!("`{key}` must be an array")))?;
        check_len(len, arr.len())?;
        arr.iter().map(|p| poly_from_json(p, nv)).collect()
    };
    let mut comps = list("F_G", space.n())?;
    for k in 0..=space.order() {
        comps.extend(list(&format!("F^{k}"), space.block_dim(k))?);
    }
    PolyMap::new(space, comps)
}
