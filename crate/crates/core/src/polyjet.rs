//! Polynomial realization: invariant derivatives of polynomials in exponential
//! coordinates, horizontal-derivative stacks, pairings, dual bases and Taylor data.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::StratAlg;
use crate::error::{check_len, Error, Result};
use crate::hd::{HdSpace, Membership, Tensor};
use crate::linalg::RatMatrix;
use crate::mpoly::MPoly;
use crate::pbw::{multi_indices, MultiIndex, Uea};
use crate::rat::Rat;

/// `W`-valued polynomial on `G`: one polynomial in the `n` exponential coordinates per
/// `W` basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoly {
    pub comps: Vec<MPoly>,
}

impl WPoly {
    pub fn scalar(p: MPoly) -> Self {
        WPoly { comps: vec![p] }
    }

    pub fn zero(n: usize, wdim: usize) -> Self {
        WPoly { comps: vec![MPoly::zero(n); wdim] }
    }

    pub fn wdim(&self) -> usize {
        self.comps.len()
    }

    pub fn map(&self, f: impl Fn(&MPoly) -> MPoly) -> WPoly {
        WPoly { comps: self.comps.iter().map(f).collect() }
    }

    pub fn eval(&self, p: &[Rat]) -> Vec<Rat> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MPoly::is_zero)
    }
}

/// `ṽ f` for `v ∈ g`.
pub fn left_inv_derive(alg: &StratAlg, v: &[Rat], f: &MPoly) -> MPoly {
    derive(&alg.invariant_fields().left, v, f)
}

/// `v† f` for `v ∈ g`.
pub fn right_inv_derive(alg: &StratAlg, v: &[Rat], f: &MPoly) -> MPoly {
    derive(&alg.invariant_fields().right, v, f)
}

fn derive(fields: &[Vec<MPoly>], v: &[Rat], f: &MPoly) -> MPoly {
    let n = f.nvars();
    let mut out = MPoly::zero(n);
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (k, coef) in fields[i].iter().enumerate() {
            if coef.is_zero() || !f.depends_on(k) {
                continue;
            }
            out.add_scaled(&(coef * &f.derivative(k)), vi);
        }
    }
    out
}

pub fn left_basis_derive(alg: &StratAlg, i: usize, f: &MPoly) -> MPoly {
    left_inv_derive(alg, &alg.unit(i), f)
}

/// `b̃^I f = b̃_1^{I_1}( ⋯ b̃_n^{I_n} f)`.
pub fn apply_pbw(alg: &StratAlg, idx: &MultiIndex, f: &MPoly) -> MPoly {
    let mut out = f.clone();
    for l in idx.word().into_iter().rev() {
        if out.is_zero() {
            break;
        }
        out = left_basis_derive(alg, l, &out);
    }
    out
}

/// Word-indexed derivative polynomials `ṽ_{ik} ⋯ ṽ_{i1} f` for every word of length
/// `0..=m`, as scalar-valued lists per degree.
fn derivative_tree(alg: &StratAlg, f: &MPoly, m: usize) -> Vec<Vec<MPoly>> {
    let r = alg.rank();
    let mut levels = vec![vec![f.clone()]];
    for _ in 0..m {
        let prev = levels.last().unwrap();
        let items: Vec<(usize, usize)> = (0..prev.len()).flat_map(|p| (0..r).map(move |l| (p, l))).collect();
        let next = crate::par::map(&items, |&(p, l)| left_basis_derive(alg, l, &prev[p]));
        levels.push(next);
    }
    levels
}

/// `A^k_{f,p}` for `k = 0..=m` as raw tensors.
pub fn horizontal_tensors(alg: &StratAlg, f: &WPoly, p: &[Rat], m: usize) -> Vec<Tensor> {
    let r = alg.rank();
    let wdim = f.wdim();
    let mut out: Vec<Tensor> = (0..=m).map(|d| Tensor::zeros(d, r, wdim)).collect();
    for (c, fc) in f.comps.iter().enumerate() {
        for (d, level) in derivative_tree(alg, fc, m).iter().enumerate() {
            for (w, poly) in level.iter().enumerate() {
                out[d].coeffs[w * wdim + c] = poly.eval(p);
            }
        }
    }
    out
}

/// `A^{≤m}_{f,p}`, each degree checked for membership in `HD`.
pub fn horizontal_stack(alg: &Arc<StratAlg>, f: &WPoly, p: &[Rat], m: usize) -> Result<Vec<Tensor>> {
    check_len(alg.dim(), p.len())?;
    let ts = horizontal_tensors(alg, f, p, m);
    HdSpace::get(alg, m).stack_coords(&ts)?;
    Ok(ts)
}

/// `A^{≤m}_{f,p}` in `A_I ⊗ w` coordinates.
pub fn horizontal_coords(alg: &Arc<StratAlg>, f: &WPoly, p: &[Rat], m: usize) -> Result<Vec<Vec<Rat>>> {
    check_len(alg.dim(), p.len())?;
    let ts = horizontal_tensors(alg, f, p, m);
    HdSpace::get(alg, m).stack_coords(&ts)
}

/// The section `p ↦ A^{≤m}_{f,p}` in `A_I ⊗ w` coordinates, polynomial in `p`.
pub fn horizontal_symbolic(alg: &Arc<StratAlg>, f: &WPoly, m: usize) -> Result<Vec<Vec<MPoly>>> {
    let hd = HdSpace::get(alg, m);
    let wdim = f.wdim();
    let trees: Vec<Vec<Vec<MPoly>>> = f.comps.iter().map(|fc| derivative_tree(alg, fc, m)).collect();
    (0..=m)
        .map(|d| {
            let words = trees[0][d].len();
            let mut flat = Vec::with_capacity(words * wdim);
            for w in 0..words {
                for tree in &trees {
                    flat.push(tree[d][w].clone());
                }
            }
            hd.degree(d).expand_generic(&flat, wdim).ok_or_else(|| {
                Error::Certificate(format!("symbolic horizontal derivatives of degree {d} left HD"))
            })
        })
        .collect()
}

/// `⟨D | f⟩_p = D f(p)` for `D` of pure weight.
pub fn pairing(alg: &StratAlg, d: &Uea<Rat>, f: &WPoly, p: &[Rat]) -> Result<Vec<Rat>> {
    check_len(alg.dim(), p.len())?;
    let w = alg.weights();
    let mut weights = d.terms.keys().map(|i| i.weight(w));
    if let Some(first) = weights.next() {
        if weights.any(|x| x != first) {
            return Err(Error::InvalidArgument("operator is not homogeneous".into()));
        }
    }
    let mut out = vec![Rat::zero(); f.wdim()];
    for (idx, c) in &d.terms {
        for (o, fc) in out.iter_mut().zip(&f.comps) {
            *o += c * apply_pbw(alg, idx, fc).eval(p);
        }
    }
    Ok(out)
}

/// Monomial `x^J` in `n` variables.
pub fn monomial(j: &MultiIndex) -> MPoly {
    MPoly::monomial(j.0.clone(), Rat::one())
}

/// `M[J][I] = b̃^I x^J (e)` with `I`, `J` over `{w = m}` in colex order.
pub fn pairing_matrix(alg: &StratAlg, m: u32) -> (Vec<MultiIndex>, RatMatrix) {
    let idx = multi_indices(alg.weights(), m);
    let e = alg.zero_elem();
    let rows: Vec<Vec<Rat>> = crate::par::map(&idx, |j| {
        let xj = monomial(j);
        idx.iter().map(|i| apply_pbw(alg, i, &xj).eval(&e)).collect()
    });
    (idx, RatMatrix::from_dense(&rows))
}

/// `f ∘ L_{q}`, i.e. `x ↦ f(q x)`.
pub fn translate(alg: &StratAlg, f: &MPoly, q: &[Rat]) -> MPoly {
    let n = alg.dim();
    let qc: Vec<MPoly> = q.iter().map(|c| MPoly::constant(n, c.clone())).collect();
    let xs: Vec<MPoly> = (0..n).map(|i| MPoly::var(n, i)).collect();
    let subs = alg.bch_generic(&qc, &xs);
    f.compose(&subs).expect("arity")
}

/// Basis `P_{p,I}` of weighted-homogeneous polynomials at `p` with
/// `b̃^K P_{p,I}(p) = δ_{KI}`, obtained from the pairing against translated monomials.
pub fn dual_poly_basis(alg: &StratAlg, p: &[Rat], m: u32) -> Result<Vec<(MultiIndex, MPoly)>> {
    check_len(alg.dim(), p.len())?;
    let idx = multi_indices(alg.weights(), m);
    let pinv = alg.inverse_elem(p);
    let translated: Vec<MPoly> = crate::par::map(&idx, |j| translate(alg, &monomial(j), &pinv));
    let rows: Vec<Vec<Rat>> = crate::par::map(&translated, |t| {
        idx.iter().map(|i| apply_pbw(alg, i, t).eval(p)).collect()
    });
    let mt = RatMatrix::from_dense(&rows).transpose();
    let c = mt
        .inverse()
        .ok_or_else(|| Error::Certificate("pairing matrix is singular".into()))?;
    let n = alg.dim();
    Ok(idx
        .iter()
        .enumerate()
        .map(|(i, ii)| {
            let mut poly = MPoly::zero(n);
            for (j, t) in translated.iter().enumerate() {
                poly.add_scaled(t, &c.get(j, i));
            }
            (ii.clone(), poly)
        })
        .collect())
}

/// Homogeneous components `P^k_{f,p}`, `k = 0..=m`.
pub fn taylor(alg: &StratAlg, f: &WPoly, p: &[Rat], m: u32) -> Result<Vec<WPoly>> {
    (0..=m)
        .map(|k| {
            let basis = dual_poly_basis(alg, p, k)?;
            let n = alg.dim();
            let comps = f
                .comps
                .iter()
                .map(|fc| {
                    let mut acc = MPoly::zero(n);
                    for (i, pi) in &basis {
                        acc.add_scaled(pi, &apply_pbw(alg, i, fc).eval(p));
                    }
                    acc
                })
                .collect();
            Ok(WPoly { comps })
        })
        .collect()
}

/// `f ∘ δ_{p,λ}` with `λ` as an extra trailing variable, where
/// `δ_{p,λ} = L_p ∘ δ_λ ∘ L_{p^{-1}}`.
pub fn centered_dilation_pullback(alg: &StratAlg, f: &MPoly, p: &[Rat]) -> MPoly {
    let n = alg.dim();
    let nv = n + 1;
    let lam = MPoly::var(nv, n);
    let pc = |sign: bool| -> Vec<MPoly> {
        p.iter()
            .map(|c| MPoly::constant(nv, if sign { -c.clone() } else { c.clone() }))
            .collect()
    };
    let xs: Vec<MPoly> = (0..n).map(|i| MPoly::var(nv, i)).collect();
    let q = alg.bch_generic(&pc(true), &xs);
    let dq: Vec<MPoly> = q
        .iter()
        .zip(alg.weights())
        .map(|(qk, &w)| qk * &lam.pow(w))
        .collect();
    let r = alg.bch_generic(&pc(false), &dq);
    f.compose(&r).expect("arity")
}

/// `f ∘ δ_{p,λ} = λ^m f` as a polynomial identity in `(x, λ)`.
pub fn is_homogeneous_at(alg: &StratAlg, f: &MPoly, p: &[Rat], m: u32) -> bool {
    let n = alg.dim();
    let lhs = centered_dilation_pullback(alg, f, p);
    let rhs = &f.extend(n + 1) * &MPoly::var(n + 1, n).pow(m);
    lhs == rhs
}

/// `σ_p(f) = A^m_{f,p}`.
pub fn sigma_p(alg: &Arc<StratAlg>, f: &WPoly, p: &[Rat], m: usize) -> Result<Tensor> {
    let mut ts = horizontal_stack(alg, f, p, m)?;
    Ok(ts.pop().unwrap())
}

/// Inverse of `σ_p`: the homogeneous polynomial at `p` with `A^m_{f,p} = t`.
pub fn sigma_p_inverse(alg: &Arc<StratAlg>, t: &Tensor, p: &[Rat]) -> Result<WPoly> {
    let m = t.degree;
    let hd = HdSpace::get(alg, m);
    let coords = match hd.degree(m).membership(t) {
        Membership::Member(c) => c,
        Membership::NotMember { component, witness } => {
            return Err(Error::NotMember { degree: m, component, witness })
        }
    };
    let basis = dual_poly_basis(alg, p, m as u32)?;
    let n = alg.dim();
    let comps = (0..t.wdim)
        .map(|c| {
            let mut acc = MPoly::zero(n);
            for (i, (_, pi)) in basis.iter().enumerate() {
                acc.add_scaled(pi, &coords[i * t.wdim + c]);
            }
            acc
        })
        .collect();
    Ok(WPoly { comps })
}

/// Change of basis between `{σ_e(x^J)}` and `{A_I}`: column `J` holds the `A_I`
/// coordinates of `σ_e(x^J)`.
pub fn monomial_to_hd_basis(alg: &Arc<StratAlg>, m: usize) -> Result<RatMatrix> {
    let idx = multi_indices(alg.weights(), m as u32);
    let e = alg.zero_elem();
    let hd = HdSpace::get(alg, m);
    let cols: Vec<Vec<Rat>> = idx
        .iter()
        .map(|j| {
            let t = sigma_p(alg, &WPoly::scalar(monomial(j)), &e, m)?;
            match hd.degree(m).membership(&t) {
                Membership::Member(c) => Ok(c),
                Membership::NotMember { .. } => Err(Error::Certificate("σ_e left HD".into())),
            }
        })
        .collect::<Result<_>>()?;
    Ok(RatMatrix::from_columns(&cols, idx.len()))
}

/// Coordinate names: lowercase basis labels (`x, y, z` for Heisenberg).
pub fn coordinate_names(alg: &StratAlg) -> Vec<String> {
    alg.labels().iter().map(|l| l.to_lowercase()).collect()
}

/// The operator `b̃^I` as an enveloping-algebra element.
pub fn pbw_operator(alg: &StratAlg, idx: &MultiIndex) -> Uea<Rat> {
    let mut u = Uea::zero(idx.weight(alg.weights()));
    u.terms.insert(idx.clone(), Rat::one());
    u
}
