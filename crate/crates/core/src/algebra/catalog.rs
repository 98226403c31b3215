//! Built-in algebras.
//!
//! Names: `abelian(n)`, `heisenberg`, `heisenberg(k)`, `engel`, `cartan_n23`,
//! `jet_counterexample(<name>)`.

use std::sync::Arc;

use super::{Bracket, StratAlg};
use crate::error::{Error, Result};
use crate::rat::int;

pub fn catalog(name: &str) -> Result<Arc<StratAlg>> {
    let name = name.trim();
    let (head, arg) = match name.find('(') {
        Some(p) if name.ends_with(')') => (&name[..p], Some(&name[p + 1..name.len() - 1])),
        Some(_) => return Err(Error::UnknownAlgebra(name.into())),
        None => (name, None),
    };
    let count = |a: Option<&str>| -> Result<usize> {
        let k: usize = a
            .ok_or_else(|| Error::UnknownAlgebra(name.into()))?
            .trim()
            .parse()
            .map_err(|_| Error::UnknownAlgebra(name.into()))?;
        if k == 0 {
            return Err(Error::UnknownAlgebra(name.into()));
        }
        Ok(k)
    };
    match head {
        "abelian" => abelian(count(arg)?),
        "heisenberg" => heisenberg(if arg.is_some() { count(arg)? } else { 1 }),
        "engel" if arg.is_none() => engel(),
        "cartan_n23" if arg.is_none() => cartan_n23(),
        "jet_counterexample" => {
            let inner = catalog(arg.ok_or_else(|| Error::UnknownAlgebra(name.into()))?)?;
            jet_counterexample(&inner)
        }
        _ => Err(Error::UnknownAlgebra(name.into())),
    }
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn one(k: usize) -> Bracket {
    vec![(k, int(1))]
}

pub fn abelian(n: usize) -> Result<Arc<StratAlg>> {
    let l = if n == 1 { vec!["X".to_string()] } else { (1..=n).map(|i| format!("X{i}")).collect() };
    StratAlg::validated(&format!("abelian({n})"), l, vec![1; n], &[])
}

pub fn heisenberg(k: usize) -> Result<Arc<StratAlg>> {
    let l = if k == 1 {
        labels(&["X", "Y", "Z"])
    } else {
        let mut l: Vec<String> = (1..=k).map(|i| format!("X{i}")).collect();
        l.extend((1..=k).map(|i| format!("Y{i}")));
        l.push("Z".into());
        l
    };
    let mut w = vec![1; 2 * k];
    w.push(2);
    let br: Vec<_> = (0..k).map(|i| (i, k + i, one(2 * k))).collect();
    StratAlg::validated(&format!("heisenberg({k})"), l, w, &br)
}

/// `[X1,X2] = X3`, `[X1,X3] = X4`.
pub fn engel() -> Result<Arc<StratAlg>> {
    StratAlg::validated(
        "engel",
        labels(&["X1", "X2", "X3", "X4"]),
        vec![1, 1, 2, 3],
        &[(0, 1, one(2)), (0, 2, one(3))],
    )
}

/// Free nilpotent of rank 2 and step 3: `[X1,X2] = X3`, `[X1,X3] = X4`, `[X2,X3] = X5`.
pub fn cartan_n23() -> Result<Arc<StratAlg>> {
    StratAlg::validated(
        "cartan_n23",
        labels(&["X1", "X2", "X3", "X4", "X5"]),
        vec![1, 1, 2, 3, 3],
        &[(0, 1, one(2)), (0, 2, one(3)), (1, 2, one(4))],
    )
}

/// `g' × R` with the new central generator `H` placed right after the first layer of `g'`.
pub fn jet_counterexample(base: &StratAlg) -> Result<Arc<StratAlg>> {
    let r = base.rank();
    let n = base.dim();
    let shift = |i: usize| if i < r { i } else { i + 1 };
    let mut l: Vec<String> = base.labels()[..r].to_vec();
    l.push("H".into());
    l.extend(base.labels()[r..].iter().cloned());
    let mut w: Vec<u32> = base.weights()[..r].to_vec();
    w.push(1);
    w.extend(base.weights()[r..].iter().cloned());
    let br: Vec<_> = base
        .structure()
        .into_iter()
        .map(|(i, j, t)| (shift(i), shift(j), t.into_iter().map(|(k, c)| (shift(k), c)).collect()))
        .collect();
    debug_assert_eq!(l.len(), n + 1);
    StratAlg::validated(&format!("jet_counterexample({})", base.name()), l, w, &br)
}
