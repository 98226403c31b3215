//! Horizontal-derivative spaces `HD^k(g;W)`: multilinear maps on V1 spanned by the
//! tensors `A_I = Σ_ξ tau_I(ξ) ξ*`, tensored with a coordinatized `W`.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::algebra::{DecompTerm, StratAlg};
use crate::error::{check_len, Error, Result};
use crate::linalg::{LeftInverse, RatMatrix};
use crate::pbw::{self, MultiIndex};
use crate::rat::{self, Rat};
use crate::scalar::Scalar;

/// `W`-valued multilinear map of degree `degree` on V1 (dim `r`), dense over words.
/// Entry `(word, c)` lives at `word_index * wdim + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub degree: usize,
    pub r: usize,
    pub wdim: usize,
    pub coeffs: Vec<Rat>,
}

impl Tensor {
    pub fn zeros(degree: usize, r: usize, wdim: usize) -> Self {
        Tensor { degree, r, wdim, coeffs: vec![Rat::zero(); r.pow(degree as u32) * wdim] }
    }

    pub fn num_words(&self) -> usize {
        self.r.pow(self.degree as u32)
    }

    pub fn get(&self, word: &[usize], c: usize) -> &Rat {
        &self.coeffs[pbw::word_index(word, self.r) * self.wdim + c]
    }

    pub fn set(&mut self, word: &[usize], c: usize, v: Rat) {
        let i = pbw::word_index(word, self.r) * self.wdim + c;
        self.coeffs[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        assert_eq!((self.degree, self.r, self.wdim), (o.degree, o.r, o.wdim));
        Tensor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn scale(&self, c: &Rat) -> Tensor {
        Tensor { coeffs: self.coeffs.iter().map(|a| a * c).collect(), ..self.clone() }
    }

    /// Scalar slice for `W`-component `c`.
    pub fn component(&self, c: usize) -> Vec<Rat> {
        self.coeffs.iter().skip(c).step_by(self.wdim).cloned().collect()
    }

    /// `(v⌐A)(v_1..v_{k-1}) = A(v_1..v_{k-1}, v)` for `v ∈ V1` given by `r` coordinates.
    pub fn contract_last(&self, v: &[Rat]) -> Tensor {
        assert_eq!(v.len(), self.r);
        if self.degree == 0 {
            return Tensor::zeros(0, self.r, self.wdim);
        }
        let mut out = Tensor::zeros(self.degree - 1, self.r, self.wdim);
        for p in 0..out.num_words() {
            for (l, vl) in v.iter().enumerate() {
                if vl.is_zero() {
                    continue;
                }
                let src = (p * self.r + l) * self.wdim;
                for c in 0..self.wdim {
                    let a = &self.coeffs[src + c];
                    if !a.is_zero() {
                        out.coeffs[p * self.wdim + c] += a * vl;
                    }
                }
            }
        }
        out
    }

    /// Tensor product with a `W` basis vector.
    pub fn with_w(&self, wdim: usize, c: usize) -> Tensor {
        assert_eq!(self.wdim, 1);
        let mut out = Tensor::zeros(self.degree, self.r, wdim);
        for (i, a) in self.coeffs.iter().enumerate() {
            out.coeffs[i * wdim + c] = a.clone();
        }
        out
    }
}

/// Key of a word, e.g. `XY`; labels are comma-separated when any has several characters.
pub fn word_key(alg: &StratAlg, word: &[usize]) -> String {
    let labels = &alg.labels()[..alg.rank()];
    let sep = if labels.iter().all(|l| l.chars().count() == 1) { "" } else { "," };
    word.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join(sep)
}

pub fn parse_word_key(alg: &StratAlg, key: &str) -> Result<Vec<usize>> {
    let labels = &alg.labels()[..alg.rank()];
    let find = |s: &str| {
        labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| Error::Parse(format!("unknown letter `{s}` in word `{key}`")))
    };
    if key.is_empty() {
        return Ok(Vec::new());
    }
    if labels.iter().all(|l| l.chars().count() == 1) {
        key.chars().map(|c| find(&c.to_string())).collect()
    } else {
        key.split(',').map(find).collect()
    }
}

/// Text form such as `-2X*⊗X*⊗Y* - X*⊗Y*⊗X*`.
pub fn format_tensor(alg: &StratAlg, t: &Tensor) -> String {
    let labels = &alg.labels()[..alg.rank()];
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (p, w) in pbw::words(t.r, t.degree).iter().enumerate() {
        for c in 0..t.wdim {
            let a = &t.coeffs[p * t.wdim + c];
            if a.is_zero() {
                continue;
            }
            let mut body: String = if w.is_empty() {
                "1".into()
            } else {
                w.iter().map(|&i| format!("{}*", labels[i])).collect::<Vec<_>>().join("⊗")
            };
            if t.wdim > 1 {
                body = format!("{body}⊗w{}", c + 1);
            }
            let mag = if a < &Rat::zero() { -a.clone() } else { a.clone() };
            let s = if mag.is_one() { body } else { format!("{}{}", rat::to_display(&mag), body) };
            parts.push((a < &Rat::zero(), s));
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, s)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&s);
    }
    out
}

/// Result of testing a tensor for membership in `HD^k ⊗ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Coordinates in the basis `A_I ⊗ w_c`, index `I * wdim + c`.
    Member(Vec<Rat>),
    /// An element of `ker tau` (coefficients over words) pairing nontrivially with
    /// `W`-component `component`.
    NotMember { component: usize, witness: Vec<Rat> },
}

/// Basis and coordinate solver for one degree.
#[derive(Debug)]
pub struct HdDegree {
    pub degree: usize,
    pub indices: Vec<MultiIndex>,
    /// Scalar tensors `A_I`, in the order of `indices`.
    pub basis: Vec<Tensor>,
    matrix: RatMatrix,
    solver: LeftInverse,
    kernel: OnceLock<Vec<Vec<Rat>>>,
}

impl HdDegree {
    fn build(alg: &StratAlg, d: usize) -> HdDegree {
        let r = alg.rank();
        let table = pbw::tau_table(alg, d as u32);
        let basis: Vec<Tensor> = (0..table.indices.len())
            .map(|j| Tensor {
                degree: d,
                r,
                wdim: 1,
                coeffs: (0..table.words.len()).map(|w| table.matrix.get(w, j)).collect(),
            })
            .collect();
        let solver = LeftInverse::new(&table.matrix).expect("tau is surjective");
        HdDegree {
            degree: d,
            indices: table.indices.clone(),
            basis,
            matrix: table.matrix.clone(),
            solver,
            kernel: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Coordinates of a scalar tensor given over words, if it lies in the span.
    pub fn expand_scalar<S: Scalar>(&self, t: &[S]) -> Option<Vec<S>> {
        let zero = t[0].zero_like();
        let coords: Vec<S> = self
            .solver
            .inv
            .iter()
            .map(|row| {
                let mut acc = zero.clone();
                for (c, &pr) in row.iter().zip(&self.solver.pivot_rows) {
                    if !c.is_zero() {
                        acc.add_scaled_s(&t[pr], c);
                    }
                }
                acc
            })
            .collect();
        for (w, tw) in t.iter().enumerate() {
            let mut acc = zero.clone();
            for (j, c) in self.matrix.row(w) {
                acc.add_scaled_s(&coords[*j], c);
            }
            if acc != *tw {
                return None;
            }
        }
        Some(coords)
    }

    /// `W`-valued version: `t` has `words * wdim` entries.
    pub fn expand_generic<S: Scalar>(&self, t: &[S], wdim: usize) -> Option<Vec<S>> {
        let zero = t[0].zero_like();
        let mut out = vec![zero; self.dim() * wdim];
        for c in 0..wdim {
            let slice: Vec<S> = t.iter().skip(c).step_by(wdim).cloned().collect();
            let coords = self.expand_scalar(&slice)?;
            for (i, v) in coords.into_iter().enumerate() {
                out[i * wdim + c] = v;
            }
        }
        Some(out)
    }

    pub fn membership(&self, t: &Tensor) -> Membership {
        assert_eq!(t.degree, self.degree);
        let mut out = vec![Rat::zero(); self.dim() * t.wdim];
        for c in 0..t.wdim {
            match self.expand_scalar(&t.component(c)) {
                Some(coords) => {
                    for (i, v) in coords.into_iter().enumerate() {
                        out[i * t.wdim + c] = v;
                    }
                }
                None => {
                    let slice = t.component(c);
                    let witness = self
                        .kernel()
                        .iter()
                        .find(|k| k.iter().zip(&slice).map(|(a, b)| a * b).sum::<Rat>() != Rat::zero())
                        .cloned()
                        .expect("a non-member pairs nontrivially with ker tau");
                    return Membership::NotMember { component: c, witness };
                }
            }
        }
        Membership::Member(out)
    }

    /// Basis of `ker tau` in word coordinates.
    pub fn kernel(&self) -> &[Vec<Rat>] {
        self.kernel.get_or_init(|| self.matrix.transpose().kernel_basis())
    }

    /// Tensor with coordinates `coords` (index `I * wdim + c`).
    pub fn tensor_of(&self, coords: &[Rat], wdim: usize) -> Tensor {
        let words = self.matrix.rows();
        let r = self.basis.first().map_or(0, |b| b.r);
        let mut t = Tensor::zeros(self.degree, r, wdim);
        assert_eq!(t.coeffs.len(), words * wdim);
        for w in 0..words {
            for (j, a) in self.matrix.row(w) {
                for c in 0..wdim {
                    let v = &coords[j * wdim + c];
                    if !v.is_zero() {
                        t.coeffs[w * wdim + c] += a * v;
                    }
                }
            }
        }
        t
    }

    /// Word-coordinate polynomials/values for generic coordinates.
    pub fn words_of_generic<S: Scalar>(&self, coords: &[S], wdim: usize) -> Vec<S> {
        let zero = coords[0].zero_like();
        let words = self.matrix.rows();
        let mut out = vec![zero; words * wdim];
        for w in 0..words {
            for (j, a) in self.matrix.row(w) {
                for c in 0..wdim {
                    out[w * wdim + c].add_scaled_s(&coords[j * wdim + c], a);
                }
            }
        }
        out
    }
}

/// `HD^0 .. HD^max_degree` for one algebra, with contraction matrices in `A_I` coordinates.
#[derive(Debug)]
pub struct HdSpace {
    weights: Vec<u32>,
    decomp: Vec<Vec<DecompTerm>>,
    degrees: Vec<HdDegree>,
    /// `contraction[u][d]`: matrix (rows `HD^{d-w_u}`, cols `HD^d`) of `b_u ⌐`, scalar `W`.
    contraction: Vec<Vec<Option<Vec<Vec<Rat>>>>>,
}

impl HdSpace {
    /// Shared space covering at least degrees `0..=m`.
    pub fn get(alg: &Arc<StratAlg>, m: usize) -> Arc<HdSpace> {
        let mut slot = alg.cache.hd.lock().unwrap();
        if let Some(h) = slot.as_ref() {
            if h.max_degree() >= m {
                return h.clone();
            }
        }
        let h = Arc::new(HdSpace::build(alg, m));
        *slot = Some(h.clone());
        h
    }

    fn build(alg: &StratAlg, m: usize) -> HdSpace {
        let ds: Vec<usize> = (0..=m).collect();
        let degrees = crate::par::map(&ds, |&d| HdDegree::build(alg, d));
        let n = alg.dim();
        let mut space = HdSpace {
            weights: alg.weights().to_vec(),
            decomp: (0..n).map(|u| alg.decomp(u).to_vec()).collect(),
            degrees,
            contraction: Vec::new(),
        };
        let us: Vec<usize> = (0..n).collect();
        let contraction = crate::par::map(&us, |&u| {
            let w = space.weights[u] as usize;
            (0..=m)
                .map(|d| {
                    if d < w {
                        return None;
                    }
                    let cols: Vec<Vec<Rat>> = space.degrees[d]
                        .basis
                        .iter()
                        .map(|b| {
                            let t = space.contract_tensor(u, b);
                            match space.degrees[d - w].membership(&t) {
                                Membership::Member(c) => c,
                                Membership::NotMember { .. } => {
                                    panic!("contraction left HD; the algebra is not stratified")
                                }
                            }
                        })
                        .collect();
                    let rows = space.degrees[d - w].dim();
                    Some((0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
                })
                .collect()
        });
        space.contraction = contraction;
        space
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn degree(&self, d: usize) -> &HdDegree {
        &self.degrees[d]
    }

    pub fn dim(&self, d: usize) -> usize {
        self.degrees[d].dim()
    }

    /// Contraction of an arbitrary tensor by a basis vector, through the bracket
    /// decomposition for higher layers.
    pub fn contract_tensor(&self, u: usize, t: &Tensor) -> Tensor {
        contract_tensor_with(&self.weights, u, t, &|u| self.decomp[u].clone())
    }

    /// `x⌐T` for `x ∈ g`, tensor level.
    pub fn contract_tensor_elem(&self, x: &[Rat], t: &Tensor) -> Tensor {
        let mut out: Option<Tensor> = None;
        for (u, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let part = self.contract_tensor(u, t).scale(c);
            out = Some(match out {
                Some(o) if o.degree == part.degree => o.add(&part),
                Some(o) => o,
                None => part,
            });
        }
        out.unwrap_or_else(|| Tensor::zeros(t.degree.saturating_sub(1), t.r, t.wdim))
    }

    pub fn contraction_matrix(&self, u: usize, d: usize) -> Option<&Vec<Vec<Rat>>> {
        self.contraction[u][d].as_ref()
    }

    /// `(x⌐A)` on a coordinate stack (degrees `0..=m`, each `dim_d * wdim` long).
    pub fn contract_stack<S: Scalar>(&self, x: &[S], a: &[Vec<S>], wdim: usize) -> Vec<Vec<S>> {
        let m = a.len() - 1;
        let zero = a[0][0].zero_like();
        let mut out: Vec<Vec<S>> = (0..=m).map(|d| vec![zero.clone(); self.dim(d) * wdim]).collect();
        for (u, xu) in x.iter().enumerate() {
            if xu.is_zero_s() {
                continue;
            }
            let w = self.weights[u] as usize;
            for d in 0..=m {
                if d + w > m {
                    break;
                }
                let k = self.contraction[u][d + w].as_ref().expect("degree in range");
                let src = &a[d + w];
                for (i, row) in k.iter().enumerate() {
                    for c in 0..wdim {
                        let mut acc = zero.clone();
                        for (j, kij) in row.iter().enumerate() {
                            if !kij.is_zero() {
                                acc.add_scaled_s(&src[j * wdim + c], kij);
                            }
                        }
                        if !acc.is_zero_s() {
                            out[d][i * wdim + c].add_s(&acc.mul_s(xu));
                        }
                    }
                }
            }
        }
        out
    }

    /// `e^{x⌐} A = Σ (x⌐)^k A / k!`.
    pub fn contract_exp_stack<S: Scalar>(&self, x: &[S], a: &[Vec<S>], wdim: usize) -> Vec<Vec<S>> {
        let mut out = a.to_vec();
        let mut term = a.to_vec();
        for k in 1..a.len() as u32 {
            term = self.contract_stack(x, &term, wdim);
            if term.iter().all(|d| d.iter().all(Scalar::is_zero_s)) {
                break;
            }
            let f = Rat::one() / rat::factorial(k);
            for (o, t) in out.iter_mut().zip(&term) {
                for (a, b) in o.iter_mut().zip(t) {
                    a.add_scaled_s(b, &f);
                }
            }
        }
        out
    }

    pub fn basis_tensor(&self, d: usize, i: usize, wdim: usize, c: usize) -> Tensor {
        self.degrees[d].basis[i].with_w(wdim, c)
    }

    pub fn stack_tensors(&self, a: &[Vec<Rat>], wdim: usize) -> Vec<Tensor> {
        a.iter().enumerate().map(|(d, c)| self.degrees[d].tensor_of(c, wdim)).collect()
    }

    pub fn stack_coords(&self, ts: &[Tensor]) -> Result<Vec<Vec<Rat>>> {
        ts.iter()
            .enumerate()
            .map(|(d, t)| match self.degrees[d].membership(t) {
                Membership::Member(c) => Ok(c),
                Membership::NotMember { component, witness } => {
                    Err(Error::NotMember { degree: d, component, witness })
                }
            })
            .collect()
    }
}

/// Contraction with a caller-supplied decomposition rule for higher basis vectors.
pub fn contract_tensor_with(
    weights: &[u32],
    u: usize,
    t: &Tensor,
    decomp: &dyn Fn(usize) -> Vec<DecompTerm>,
) -> Tensor {
    let w = weights[u] as usize;
    if t.degree < w {
        return Tensor::zeros(0, t.r, t.wdim);
    }
    if w == 1 {
        let mut v = vec![Rat::zero(); t.r];
        v[u] = Rat::one();
        return t.contract_last(&v);
    }
    let mut out = Tensor::zeros(t.degree - w, t.r, t.wdim);
    for (a, i, j) in decomp(u) {
        let ji = contract_tensor_with(weights, j, &contract_tensor_with(weights, i, t, decomp), decomp);
        let ij = contract_tensor_with(weights, i, &contract_tensor_with(weights, j, t, decomp), decomp);
        out = out.add(&ji.add(&ij.scale(&-Rat::one())).scale(&a));
    }
    out
}

/// The public entry points by name.
pub fn hd_basis(alg: &Arc<StratAlg>, m: usize) -> Vec<(MultiIndex, Tensor)> {
    let h = HdSpace::get(alg, m);
    let d = h.degree(m);
    d.indices.iter().cloned().zip(d.basis.iter().cloned()).collect()
}

pub fn hd_membership(alg: &Arc<StratAlg>, t: &Tensor) -> Membership {
    HdSpace::get(alg, t.degree).degree(t.degree).membership(t)
}

/// `v⌐A` for `v ∈ V1` given in full `g` coordinates.
pub fn contract_v1(alg: &Arc<StratAlg>, v: &[Rat], a: &Tensor) -> Result<Tensor> {
    check_len(alg.dim(), v.len())?;
    let r = alg.rank();
    if v[r..].iter().any(|c| !c.is_zero()) {
        return Err(Error::InvalidArgument("contraction vector is not in V1".into()));
    }
    let out = a.contract_last(&v[..r]);
    if let Membership::NotMember { component, witness } = hd_membership(alg, &out) {
        return Err(Error::NotMember { degree: out.degree, component, witness });
    }
    Ok(out)
}

/// `x⌐A` on a tensor stack (degrees `0..=m`).
pub fn contract_full(alg: &Arc<StratAlg>, x: &[Rat], stack: &[Tensor]) -> Result<Vec<Tensor>> {
    check_len(alg.dim(), x.len())?;
    let m = stack.len() - 1;
    let h = HdSpace::get(alg, m);
    let wdim = stack[0].wdim;
    let coords = h.stack_coords(stack)?;
    Ok(h.stack_tensors(&h.contract_stack(x, &coords, wdim), wdim))
}

pub fn contract_exp(alg: &Arc<StratAlg>, x: &[Rat], stack: &[Tensor]) -> Result<Vec<Tensor>> {
    check_len(alg.dim(), x.len())?;
    let m = stack.len() - 1;
    let h = HdSpace::get(alg, m);
    let wdim = stack[0].wdim;
    let coords = h.stack_coords(stack)?;
    Ok(h.stack_tensors(&h.contract_exp_stack(x, &coords, wdim), wdim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::rat::int;

    #[test]
    fn heisenberg_dims() {
        let h = catalog("heisenberg(1)").unwrap();
        let s = HdSpace::get(&h, 3);
        assert_eq!((0..=3).map(|d| s.dim(d)).collect::<Vec<_>>(), vec![1, 2, 4, 6]);
    }

    #[test]
    fn heisenberg_degree_two_basis() {
        let h = catalog("heisenberg(1)").unwrap();
        let b = hd_basis(&h, 2);
        assert_eq!(format_tensor(&h, &b[3].1), "-X*⊗Y*");
        assert_eq!(format_tensor(&h, &b[1].1), "X*⊗Y* + Y*⊗X*");
    }

    #[test]
    fn contraction_examples() {
        let h = catalog("heisenberg(1)").unwrap();
        let a001 = hd_basis(&h, 2)[3].1.clone();
        let x = vec![int(1), int(0), int(0)];
        let y = vec![int(0), int(1), int(0)];
        assert!(contract_v1(&h, &x, &a001).unwrap().is_zero());
        let ya = contract_v1(&h, &y, &a001).unwrap();
        assert_eq!(format_tensor(&h, &ya), "-X*");
        let s = HdSpace::get(&h, 2);
        let za = s.contract_tensor(2, &a001);
        assert_eq!(za.degree, 0);
        assert_eq!(za.coeffs, vec![int(1)]);
        assert!(contract_v1(&h, &[int(0), int(0), int(1)], &a001).is_err());
    }

    #[test]
    fn non_member_has_witness() {
        let a = catalog("abelian(2)").unwrap();
        let mut t = Tensor::zeros(2, 2, 1);
        t.set(&[0, 1], 0, int(1));
        match hd_membership(&a, &t) {
            Membership::NotMember { witness, .. } => {
                let pair: Rat = witness.iter().zip(&t.coeffs).map(|(a, b)| a * b).sum();
                assert_ne!(pair, Rat::zero());
            }
            Membership::Member(_) => panic!("antisymmetric tensor is not in HD for abelian base"),
        }
    }
}
