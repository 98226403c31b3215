//! Graded universal enveloping algebra in PBW normal form.
//!
//! A word `(i1, …, ik)` denotes the operator `b̃_{i1} ∘ … ∘ b̃_{ik}`. Normal forms are
//! combinations of ordered monomials `b̃^I = b̃_1^{I_1} ⋯ b̃_n^{I_n}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::StratAlg;
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rat::{self, Rat};
use crate::scalar::Scalar;

/// Exponent vector of a PBW monomial. Ordered colexicographically: the last
/// coordinate is compared first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev()).then(self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn weight(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(a, w)| a * w).sum()
    }

    /// Number of letters.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The sorted word `1^{I_1} 2^{I_2} …` (0-based letters).
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    }

    pub fn from_word(word: &[usize], n: usize) -> Self {
        let mut e = vec![0; n];
        for &i in word {
            e[i] += 1;
        }
        MultiIndex(e)
    }

    pub fn format(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        format!("({})", parts.join(","))
    }

    /// Operator form `b̃^I`, e.g. `X̃^2Ỹ`; `1` for the empty index.
    pub fn format_operator(&self, labels: &[String]) -> String {
        let s: String = self
            .0
            .iter()
            .zip(labels)
            .filter(|(&k, _)| k > 0)
            .map(|(&k, l)| if k == 1 { format!("{l}\u{303}") } else { format!("{l}\u{303}^{k}") })
            .collect();
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }
}

/// Text form of a rational-coefficient enveloping-algebra element, terms in increasing
/// multi-index order: `X̃^2Ỹ - 2X̃Z̃`.
pub fn format_uea(alg: &StratAlg, u: &Uea<Rat>) -> String {
    if u.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (idx, c)) in u.terms.iter().enumerate() {
        let neg = c < &Rat::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let op = idx.format_operator(alg.labels());
        if mag.is_one() {
            out.push_str(&op);
        } else {
            out.push_str(&rat::to_display(&mag));
            if op != "1" {
                out.push_str(&op);
            }
        }
    }
    out
}

/// All `I` with `w(I) = m`, in colexicographic order.
pub fn multi_indices(weights: &[u32], m: u32) -> Vec<MultiIndex> {
    fn rec(weights: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if i == weights.len() {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
            }
            return;
        }
        for k in 0..=left / weights[i] {
            cur[i] = k;
            rec(weights, i + 1, left - k * weights[i], cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(weights, 0, m, &mut vec![0; weights.len()], &mut out);
    out.sort();
    out
}

pub type Normal = BTreeMap<MultiIndex, Rat>;

fn first_descent(word: &[usize]) -> Option<usize> {
    word.windows(2).position(|w| w[0] > w[1])
}

/// Normal form of a word, reducing the leftmost descent first. Memoized per algebra.
pub fn normalize(alg: &StratAlg, word: &[usize]) -> Arc<Normal> {
    if let Some(hit) = alg.cache.pbw.read().unwrap().get(word) {
        return hit.clone();
    }
    let n = alg.dim();
    let out = match first_descent(word) {
        None => {
            let mut m = Normal::new();
            m.insert(MultiIndex::from_word(word, n), Rat::one());
            m
        }
        Some(p) => {
            let (j, i) = (word[p], word[p + 1]);
            let mut swapped = word.to_vec();
            swapped.swap(p, p + 1);
            let mut acc = (*normalize(alg, &swapped)).clone();
            for (k, c) in alg.bracket_basis(i, j) {
                let mut w = word[..p].to_vec();
                w.push(*k);
                w.extend_from_slice(&word[p + 2..]);
                for (idx, v) in normalize(alg, &w).iter() {
                    add_into(&mut acc, idx, &-(c * v));
                }
            }
            acc
        }
    };
    let out = Arc::new(out);
    alg.cache.pbw.write().unwrap().insert(word.to_vec(), out.clone());
    out
}

/// Unmemoized normalization where `choose` picks which descent to reduce. Used to test
/// that the normal form does not depend on the rewriting order.
pub fn normalize_with(alg: &StratAlg, word: &[usize], choose: &mut dyn FnMut(&[usize]) -> usize) -> Normal {
    let descents: Vec<usize> = word.windows(2).enumerate().filter(|(_, w)| w[0] > w[1]).map(|(p, _)| p).collect();
    if descents.is_empty() {
        let mut m = Normal::new();
        m.insert(MultiIndex::from_word(word, alg.dim()), Rat::one());
        return m;
    }
    let p = descents[choose(&descents) % descents.len()];
    let (j, i) = (word[p], word[p + 1]);
    let mut swapped = word.to_vec();
    swapped.swap(p, p + 1);
    let mut acc = normalize_with(alg, &swapped, choose);
    for (k, c) in alg.bracket_basis(i, j) {
        let mut w = word[..p].to_vec();
        w.push(*k);
        w.extend_from_slice(&word[p + 2..]);
        for (idx, v) in normalize_with(alg, &w, choose) {
            add_into(&mut acc, &idx, &-(c * v));
        }
    }
    acc
}

fn add_into(acc: &mut Normal, idx: &MultiIndex, v: &Rat) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(idx.clone()).or_insert_with(Rat::zero);
    *e += v;
    if e.is_zero() {
        acc.remove(idx);
    }
}

/// Element of the enveloping algebra truncated at weight `bound`, with coefficients in
/// any [`Scalar`] ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Uea<S> {
    pub terms: BTreeMap<MultiIndex, S>,
    pub bound: u32,
}

impl<S: Scalar> Uea<S> {
    pub fn zero(bound: u32) -> Self {
        Uea { terms: BTreeMap::new(), bound }
    }

    pub fn one(sample: &S, n: usize, bound: u32) -> Self {
        let mut u = Self::zero(bound);
        u.terms.insert(MultiIndex::zero(n), sample.one_like());
        u
    }

    /// Degree-one element `Σ x_i b̃_i`.
    pub fn from_lie(alg: &StratAlg, x: &[S], bound: u32) -> Self {
        let mut u = Self::zero(bound);
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero_s() && alg.weights()[i] <= bound {
                let mut e = vec![0; alg.dim()];
                e[i] = 1;
                u.terms.insert(MultiIndex(e), c.clone());
            }
        }
        u
    }

    fn add_term(&mut self, idx: &MultiIndex, c: &S) {
        if c.is_zero_s() {
            return;
        }
        match self.terms.get_mut(idx) {
            Some(e) => {
                e.add_s(c);
                if e.is_zero_s() {
                    self.terms.remove(idx);
                }
            }
            None => {
                self.terms.insert(idx.clone(), c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i, c);
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut out = Self::zero(self.bound);
        for (i, c) in &self.terms {
            out.add_term(i, &c.scale_s(r));
        }
        out
    }

    pub fn mul(&self, alg: &StratAlg, other: &Self) -> Result<Self> {
        if self.bound != other.bound {
            return Err(Error::InvalidArgument("weight bounds differ".into()));
        }
        let w = alg.weights();
        let mut out = Self::zero(self.bound);
        for (i, a) in &self.terms {
            let wi = i.weight(w);
            for (j, b) in &other.terms {
                if wi + j.weight(w) > self.bound {
                    continue;
                }
                let mut word = i.word();
                word.extend(j.word());
                let ab = a.mul_s(b);
                for (k, c) in normalize(alg, &word).iter() {
                    out.add_term(k, &ab.scale_s(c));
                }
            }
        }
        Ok(out)
    }

    pub fn constant_term(&self, n: usize) -> Option<&S> {
        self.terms.get(&MultiIndex::zero(n))
    }

    /// Truncated `exp` of a Lie element.
    pub fn exp(alg: &StratAlg, x: &[S], bound: u32) -> Self {
        let one = Self::one(&x[0], alg.dim(), bound);
        let xu = Self::from_lie(alg, x, bound);
        let mut acc = one.clone();
        let mut pow = one;
        for k in 1..=bound {
            pow = pow.mul(alg, &xu).expect("same bound");
            if pow.terms.is_empty() {
                break;
            }
            acc = acc.add(&pow.scale(&(Rat::one() / rat::factorial(k))));
        }
        acc
    }

    /// Truncated `log` of an element with constant term 1.
    pub fn log(&self, alg: &StratAlg) -> Result<Self> {
        let n = alg.dim();
        let c = self
            .constant_term(n)
            .ok_or_else(|| Error::InvalidArgument("log of element with constant term 0".into()))?;
        if *c != c.one_like() {
            return Err(Error::InvalidArgument("log of element with constant term != 1".into()));
        }
        let mut v = self.clone();
        v.terms.remove(&MultiIndex::zero(n));
        let mut acc = Self::zero(self.bound);
        let mut pow = v.clone();
        for k in 1..=self.bound {
            if pow.terms.is_empty() {
                break;
            }
            let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
            acc = acc.add(&pow.scale(&(sign / rat::int(k as i64))));
            pow = pow.mul(alg, &v)?;
        }
        Ok(acc)
    }

    /// Coordinates if every monomial has a single letter.
    pub fn to_lie(&self, n: usize, zero: &S) -> Option<Vec<S>> {
        let mut out = vec![zero.zero_like(); n];
        for (i, c) in &self.terms {
            if i.length() != 1 {
                return None;
            }
            let k = i.0.iter().position(|&e| e == 1).unwrap();
            out[k] = c.clone();
        }
        Some(out)
    }
}

/// Normal form of a word with monomials above `bound` dropped.
pub fn pbw_normalize(alg: &StratAlg, word: &[usize], bound: u32) -> Uea<Rat> {
    let mut u = Uea::zero(bound);
    for (i, c) in normalize(alg, word).iter() {
        if i.weight(alg.weights()) <= bound {
            u.terms.insert(i.clone(), c.clone());
        }
    }
    u
}

/// `tau(v_{i1} ⊗ … ⊗ v_{ik}) = ṽ_{ik} ⋯ ṽ_{i1}` in normal form.
pub fn tau(alg: &StratAlg, word: &[usize]) -> Result<Uea<Rat>> {
    let r = alg.rank();
    if let Some(&bad) = word.iter().find(|&&i| i >= r) {
        return Err(Error::InvalidArgument(format!("letter {bad} is not in the first layer")));
    }
    let rev: Vec<usize> = word.iter().rev().cloned().collect();
    Ok(pbw_normalize(alg, &rev, word.len() as u32))
}

/// Words of length `k` over `r` letters in base-`r` order, first letter most significant.
pub fn words(r: usize, k: usize) -> Vec<Vec<usize>> {
    let count = r.pow(k as u32);
    (0..count)
        .map(|mut idx| {
            let mut w = vec![0; k];
            for slot in (0..k).rev() {
                w[slot] = idx % r;
                idx /= r;
            }
            w
        })
        .collect()
}

pub fn word_index(word: &[usize], r: usize) -> usize {
    word.iter().fold(0, |acc, &l| acc * r + l)
}

/// Coefficients `tau_I(ξ)` for all words `ξ` of length `m`.
#[derive(Debug)]
pub struct TauTable {
    pub m: u32,
    pub words: Vec<Vec<usize>>,
    pub indices: Vec<MultiIndex>,
    /// Rows indexed by words, columns by multi-indices.
    pub matrix: RatMatrix,
}

pub fn tau_table(alg: &StratAlg, m: u32) -> Arc<TauTable> {
    if let Some(t) = alg.cache.tau.lock().unwrap().get(&m) {
        return t.clone();
    }
    let ws = words(alg.rank(), m as usize);
    let indices = multi_indices(alg.weights(), m);
    let pos: BTreeMap<&MultiIndex, usize> = indices.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let rows = crate::par::map(&ws, |w| tau(alg, w).expect("first-layer word"));
    let mut matrix = RatMatrix::zeros(ws.len(), indices.len());
    for (r, u) in rows.iter().enumerate() {
        for (i, c) in &u.terms {
            matrix.set(r, pos[i], c.clone());
        }
    }
    let t = Arc::new(TauTable { m, words: ws, indices, matrix });
    alg.cache.tau.lock().unwrap().entry(m).or_insert(t).clone()
}
