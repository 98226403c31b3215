//! Jet algebras `j^m(g;W) = g ⋉ HD^{≤m}` and jet groups `J^m(G;W) = G ⋉ HD^{≤m}` in
//! the product chart `(a, A)`: `a` in exponential coordinates of `G`, `A` in
//! `A_I ⊗ w_c` coordinates, degrees `0..=m` in order.

use std::ops::Range;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{Bracket, StratAlg};
use crate::error::{check_len, Error, Result};
use crate::hd::{HdSpace, Tensor};
use crate::mpoly::MPoly;
use crate::polyjet::{self, WPoly};
use crate::rat::{self, Rat};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoint {
    pub base: Vec<Rat>,
    /// Coordinates per degree `0..=m`, each of length `dim HD^d * dim W`.
    pub stack: Vec<Vec<Rat>>,
}

/// Values of the contact forms on one tangent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CoFrame<S> {
    /// `ω^ℓ` for `ℓ = 0..m-1`, in `HD^ℓ ⊗ W` coordinates.
    pub omega: Vec<Vec<S>>,
    /// `θ^j` for `j = 2..=s`, in coordinates of `V_j`.
    pub theta: Vec<Vec<S>>,
}

impl<S: Scalar> CoFrame<S> {
    pub fn vanishes(&self) -> bool {
        self.omega.iter().chain(&self.theta).all(|v| v.iter().all(Scalar::is_zero_s))
    }

    /// First nonzero entry as `(form name, value)`.
    pub fn first_violation(&self) -> Option<(String, S)> {
        for (l, v) in self.omega.iter().enumerate() {
            if let Some(x) = v.iter().find(|x| !x.is_zero_s()) {
                return Some((format!("omega^{l}"), x.clone()));
            }
        }
        for (j, v) in self.theta.iter().enumerate() {
            if let Some(x) = v.iter().find(|x| !x.is_zero_s()) {
                return Some((format!("theta^{}", j + 2), x.clone()));
            }
        }
        None
    }
}

#[derive(Debug)]
pub struct JetSpace {
    alg: Arc<StratAlg>,
    wdim: usize,
    m: usize,
    hd: Arc<HdSpace>,
    offsets: Vec<usize>,
}

/// Jet algebra with its own adapted (layer-ordered) basis.
#[derive(Debug)]
pub struct JetAlg {
    pub space: Arc<JetSpace>,
    pub alg: Arc<StratAlg>,
    /// Provenance of each derived basis vector.
    pub provenance: Vec<Provenance>,
    /// `to_layered[i]`: derived index of product coordinate `i`.
    pub to_layered: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Base(usize),
    Hd { degree: usize, index: usize, w: usize },
}

impl JetSpace {
    pub fn new(alg: &Arc<StratAlg>, wdim: usize, m: usize) -> Result<Arc<JetSpace>> {
        if wdim == 0 {
            return Err(Error::InvalidArgument("W must have positive dimension".into()));
        }
        let hd = HdSpace::get(alg, m);
        let mut offsets = vec![alg.dim()];
        for d in 0..=m {
            let last = *offsets.last().unwrap();
            offsets.push(last + hd.dim(d) * wdim);
        }
        Ok(Arc::new(JetSpace { alg: alg.clone(), wdim, m, hd, offsets }))
    }

    pub fn alg(&self) -> &Arc<StratAlg> {
        &self.alg
    }

    pub fn wdim(&self) -> usize {
        self.wdim
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn hd(&self) -> &Arc<HdSpace> {
        &self.hd
    }

    /// `dim G`.
    pub fn n(&self) -> usize {
        self.alg.dim()
    }

    /// Total number of product coordinates.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block(&self, d: usize) -> Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn block_dim(&self, d: usize) -> usize {
        self.hd.dim(d) * self.wdim
    }

    /// Same base and `W`, order `m + 1`.
    pub fn higher(&self) -> Result<Arc<JetSpace>> {
        JetSpace::new(&self.alg, self.wdim, self.m + 1)
    }

    pub fn lower(&self) -> Result<Arc<JetSpace>> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("no jet space below order 0".into()));
        }
        JetSpace::new(&self.alg, self.wdim, self.m - 1)
    }

    pub fn coord_names(&self) -> Vec<String> {
        let mut out = polyjet::coordinate_names(&self.alg);
        for d in 0..=self.m {
            for idx in &self.hd.degree(d).indices {
                for c in 0..self.wdim {
                    let base = format!("A{}", idx.format());
                    out.push(if self.wdim > 1 { format!("{base}w{}", c + 1) } else { base });
                }
            }
        }
        out
    }

    pub fn split<S: Clone>(&self, coords: &[S]) -> (Vec<S>, Vec<Vec<S>>) {
        assert_eq!(coords.len(), self.dim());
        let base = coords[..self.n()].to_vec();
        let stack = (0..=self.m).map(|d| coords[self.block(d)].to_vec()).collect();
        (base, stack)
    }

    pub fn join<S: Clone>(&self, base: &[S], stack: &[Vec<S>]) -> Vec<S> {
        let mut out = base.to_vec();
        for s in stack {
            out.extend(s.iter().cloned());
        }
        out
    }

    pub fn point_coords(&self, p: &JetPoint) -> Vec<Rat> {
        self.join(&p.base, &p.stack)
    }

    pub fn point(&self, coords: &[Rat]) -> Result<JetPoint> {
        check_len(self.dim(), coords.len())?;
        let (base, stack) = self.split(coords);
        Ok(JetPoint { base, stack })
    }

    pub fn check_point(&self, p: &JetPoint) -> Result<()> {
        check_len(self.n(), p.base.len())?;
        check_len(self.m + 1, p.stack.len())?;
        for (d, s) in p.stack.iter().enumerate() {
            check_len(self.block_dim(d), s.len())?;
        }
        Ok(())
    }

    /// Coordinate functions on the product chart.
    pub fn vars(&self) -> Vec<MPoly> {
        let n = self.dim();
        (0..n).map(|i| MPoly::var(n, i)).collect()
    }

    pub fn identity(&self) -> JetPoint {
        JetPoint {
            base: self.alg.zero_elem(),
            stack: (0..=self.m).map(|d| vec![Rat::zero(); self.block_dim(d)]).collect(),
        }
    }

    pub fn stack_tensors(&self, stack: &[Vec<Rat>]) -> Vec<Tensor> {
        self.hd.stack_tensors(stack, self.wdim)
    }

    /// `x⌐A` on a stack of this space.
    pub fn contract<S: Scalar>(&self, x: &[S], a: &[Vec<S>]) -> Vec<Vec<S>> {
        self.hd.contract_stack(x, a, self.wdim)
    }

    pub fn contract_exp<S: Scalar>(&self, x: &[S], a: &[Vec<S>]) -> Vec<Vec<S>> {
        self.hd.contract_exp_stack(x, a, self.wdim)
    }

    /// `(a,A)(b,B) = (ab, B + e^{b⌐}A)`.
    pub fn mul_generic<S: Scalar>(&self, a: &[S], aa: &[Vec<S>], b: &[S], bb: &[Vec<S>]) -> (Vec<S>, Vec<Vec<S>>) {
        let base = self.alg.bch_generic(a, b);
        let mut stack = self.contract_exp(b, aa);
        for (s, t) in stack.iter_mut().zip(bb) {
            for (x, y) in s.iter_mut().zip(t) {
                x.add_s(y);
            }
        }
        (base, stack)
    }

    pub fn mul(&self, p: &JetPoint, q: &JetPoint) -> Result<JetPoint> {
        self.check_point(p)?;
        self.check_point(q)?;
        let base = self.alg.bch(&p.base, &q.base)?;
        let (_, stack) = self.mul_generic(&p.base, &p.stack, &q.base, &q.stack);
        Ok(JetPoint { base, stack })
    }

    /// `(a,A)^{-1} = (a^{-1}, -e^{(log a^{-1})⌐} A)`.
    pub fn inverse(&self, p: &JetPoint) -> JetPoint {
        let ainv = self.alg.inverse_elem(&p.base);
        let e = self.contract_exp(&ainv, &p.stack);
        JetPoint {
            base: ainv,
            stack: e.into_iter().map(|s| s.into_iter().map(|x| -x).collect()).collect(),
        }
    }

    /// `exp_J(x, X) = (x, Σ (x⌐)^k X / (k+1)!)`.
    pub fn exp_generic<S: Scalar>(&self, x: &[S], xx: &[Vec<S>]) -> (Vec<S>, Vec<Vec<S>>) {
        let mut out = xx.to_vec();
        let mut term = xx.to_vec();
        for k in 1..=self.m as u32 {
            term = self.contract(x, &term);
            let f = Rat::one() / rat::factorial(k + 1);
            for (o, t) in out.iter_mut().zip(&term) {
                for (a, b) in o.iter_mut().zip(t) {
                    a.add_scaled_s(b, &f);
                }
            }
        }
        (x.to_vec(), out)
    }

    pub fn exp(&self, x: &[Rat], xx: &[Vec<Rat>]) -> JetPoint {
        let (base, stack) = self.exp_generic(x, xx);
        JetPoint { base, stack }
    }

    /// Inverse of [`JetSpace::exp_generic`], via `t/(e^t - 1) = Σ B_k t^k / k!`.
    pub fn log_generic<S: Scalar>(&self, a: &[S], aa: &[Vec<S>]) -> (Vec<S>, Vec<Vec<S>>) {
        let bern = bernoulli(self.m as u32);
        let mut out = aa.to_vec();
        let mut term = aa.to_vec();
        for k in 1..=self.m as u32 {
            term = self.contract(a, &term);
            let f = &bern[k as usize] / rat::factorial(k);
            if f.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(&term) {
                for (x, y) in o.iter_mut().zip(t) {
                    x.add_scaled_s(y, &f);
                }
            }
        }
        (a.to_vec(), out)
    }

    pub fn log(&self, p: &JetPoint) -> (Vec<Rat>, Vec<Vec<Rat>>) {
        self.log_generic(&p.base, &p.stack)
    }

    /// `D_{λ,μ}(a, A) = (δ_λ a, μ λ^{-d} A^d)`; the group dilation is `μ = λ^{m+1}`.
    pub fn dilation_factors(&self, lambda: &Rat, mu: &Rat) -> Vec<Rat> {
        let mut f: Vec<Rat> = self.alg.weights().iter().map(|&w| rat::pow(lambda, w)).collect();
        for d in 0..=self.m {
            let s = mu / rat::pow(lambda, d as u32);
            f.extend(std::iter::repeat_n(s, self.block_dim(d)));
        }
        f
    }

    pub fn dilate(&self, p: &JetPoint, lambda: &Rat) -> Result<JetPoint> {
        if !rat::is_positive(lambda) {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        let mu = rat::pow(lambda, self.m as u32 + 1);
        let f = self.dilation_factors(lambda, &mu);
        let c: Vec<Rat> = self.point_coords(p).iter().zip(&f).map(|(a, b)| a * b).collect();
        self.point(&c)
    }

    /// Contact forms at `(a, A)` on a tangent `(x, X)` with `x` already left-trivialized.
    pub fn coframe<S: Scalar>(&self, aa: &[Vec<S>], x: &[S], xx: &[Vec<S>]) -> CoFrame<S> {
        let r = self.alg.rank();
        let zero = x[0].zero_like();
        let mut x1 = vec![zero.clone(); self.n()];
        x1[..r].clone_from_slice(&x[..r]);
        let c = self.contract(&x1, aa);
        let omega = (0..self.m)
            .map(|l| {
                xx[l].iter()
                    .zip(&c[l])
                    .map(|(a, b)| {
                        let mut v = a.clone();
                        v.sub_s(b);
                        v
                    })
                    .collect()
            })
            .collect();
        let theta = (2..=self.alg.step()).map(|j| self.alg.layer(j).map(|i| x[i].clone()).collect()).collect();
        CoFrame { omega, theta }
    }

    /// Contact forms at a point on a tangent, both in product coordinates.
    pub fn coframe_coords<S: Scalar>(&self, point: &[S], tangent: &[S]) -> CoFrame<S> {
        let (a, aa) = self.split(point);
        let (adot, xx) = self.split(tangent);
        let x = self.alg.left_trivialize(&a, &adot);
        self.coframe(&aa, &x, &xx)
    }

    /// Frame of the contact distribution as polynomial vector fields:
    /// `𝕏_j = (ṽ_j(a), v_j⌐A)` for `j < r`, then `𝕐_k = (0, B_k)` over `HD^m ⊗ W`.
    pub fn frame_fields(&self) -> Vec<Vec<MPoly>> {
        let vars = self.vars();
        let (a, aa) = self.split(&vars);
        let nv = self.dim();
        let zero = MPoly::zero(nv);
        let mut out = Vec::new();
        for j in 0..self.alg.rank() {
            let mut e = vec![zero.clone(); self.n()];
            e[j] = MPoly::one(nv);
            let base = self.alg.left_field_at(&e, &a);
            let fib = self.contract(&e, &aa);
            out.push(self.join(&base, &fib));
        }
        for k in self.block(self.m) {
            let mut v = vec![zero.clone(); nv];
            v[k] = MPoly::one(nv);
            out.push(v);
        }
        out
    }

    pub fn frame_at(&self, p: &JetPoint) -> Vec<Vec<Rat>> {
        let c = self.point_coords(p);
        self.frame_fields().iter().map(|v| v.iter().map(|q| q.eval(&c)).collect()).collect()
    }

    /// Left-invariant field of `(x, X)` at a point: `(x̃(a), x⌐A + X)`.
    pub fn left_invariant_at<S: Scalar>(&self, x: &[S], xx: &[Vec<S>], point: &[S]) -> Vec<S> {
        let (a, aa) = self.split(point);
        let base = self.alg.left_field_at(x, &a);
        let mut fib = self.contract(x, &aa);
        for (f, t) in fib.iter_mut().zip(xx) {
            for (u, v) in f.iter_mut().zip(t) {
                u.add_s(v);
            }
        }
        self.join(&base, &fib)
    }

    pub fn jet_of(&self, f: &WPoly, p: &[Rat]) -> Result<JetPoint> {
        check_len(self.wdim, f.wdim())?;
        let stack = polyjet::horizontal_coords(&self.alg, f, p, self.m)?;
        Ok(JetPoint { base: p.to_vec(), stack })
    }

    /// `p ↦ A^{≤m}_{f,p}` as polynomial coordinates in the base variables.
    pub fn jet_section(&self, f: &WPoly) -> Result<Vec<Vec<MPoly>>> {
        check_len(self.wdim, f.wdim())?;
        polyjet::horizontal_symbolic(&self.alg, f, self.m)
    }

    /// Whether a polynomial section `a ↦ (a, γ(a))` is the jet of a function.
    pub fn is_jet_section(&self, gamma: &[Vec<MPoly>]) -> Result<SectionVerdict> {
        check_len(self.m + 1, gamma.len())?;
        let n = self.n();
        for (d, g) in gamma.iter().enumerate() {
            check_len(self.block_dim(d), g.len())?;
            if g.iter().any(|p| p.nvars() != n) {
                return Err(Error::InvalidArgument("section components must be polynomials on G".into()));
            }
        }
        for j in 0..self.alg.rank() {
            let e = self.alg.unit(j);
            let mut ej = vec![MPoly::zero(n); n];
            ej[j] = MPoly::one(n);
            let c = self.contract(&ej, gamma);
            for l in 0..self.m {
                for (k, (g, cc)) in gamma[l].iter().zip(&c[l]).enumerate() {
                    let w = &polyjet::left_inv_derive(&self.alg, &e, g) - cc;
                    if !w.is_zero() {
                        return Ok(SectionVerdict::NotJet { ell: l, j, component: k, witness: w });
                    }
                }
            }
        }
        let f = WPoly { comps: gamma[0].clone() };
        let expect = self.jet_section(&f)?;
        if expect != gamma {
            return Err(Error::Certificate("section passes the contact test but is not the jet of γ⁰".into()));
        }
        Ok(SectionVerdict::Jet(f))
    }

    pub fn jet_algebra(self: &Arc<Self>) -> Result<JetAlg> {
        let n = self.n();
        let total = self.dim();
        let step = self.alg.step().max(self.m as u32 + 1);
        let mut provenance = Vec::with_capacity(total);
        let mut layer_of = Vec::with_capacity(total);
        for i in 0..n {
            provenance.push(Provenance::Base(i));
            layer_of.push(self.alg.weights()[i]);
        }
        for d in 0..=self.m {
            for index in 0..self.hd.dim(d) {
                for w in 0..self.wdim {
                    provenance.push(Provenance::Hd { degree: d, index, w });
                    layer_of.push((self.m + 1 - d) as u32);
                }
            }
        }
        let mut order: Vec<usize> = (0..total).collect();
        order.sort_by_key(|&i| (layer_of[i], i));
        let mut to_layered = vec![0; total];
        for (pos, &i) in order.iter().enumerate() {
            to_layered[i] = pos;
        }
        let labels: Vec<String> = order
            .iter()
            .map(|&i| match &provenance[i] {
                Provenance::Base(b) => self.alg.labels()[*b].clone(),
                Provenance::Hd { degree, index, w } => {
                    let idx = self.hd.degree(*degree).indices[*index].format();
                    if self.wdim > 1 {
                        format!("A[{idx}]⊗w{}", w + 1)
                    } else {
                        format!("A[{idx}]")
                    }
                }
            })
            .collect();
        let weights: Vec<u32> = order.iter().map(|&i| layer_of[i]).collect();
        let mut brackets: Vec<(usize, usize, Bracket)> = Vec::new();
        for i in 0..total {
            for j in i + 1..total {
                let b = self.bracket_product_basis(i, j);
                if b.is_empty() {
                    continue;
                }
                let (li, lj) = (to_layered[i], to_layered[j]);
                let mapped: Bracket = b.into_iter().map(|(k, c)| (to_layered[k], c)).collect();
                if li < lj {
                    brackets.push((li, lj, mapped));
                } else {
                    brackets.push((lj, li, mapped.into_iter().map(|(k, c)| (k, -c)).collect()));
                }
            }
        }
        let name = format!("j^{}({};R^{})", self.m, self.alg.name(), self.wdim);
        let derived = StratAlg::new(&name, labels, weights, &brackets)?;
        debug_assert_eq!(derived.step(), step);
        let provenance = order.iter().map(|&i| provenance[i].clone()).collect();
        Ok(JetAlg { space: self.clone(), alg: Arc::new(derived), provenance, to_layered })
    }

    /// `[(v,A),(w,B)] = ([v,w], w⌐A - v⌐B)` on elements in product coordinates.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let (v, a) = self.split(x);
        let (w, b) = self.split(y);
        let base = self.alg.bracket_generic(&v, &w);
        let wa = self.contract(&w, &a);
        let vb = self.contract(&v, &b);
        let fib: Vec<Vec<Rat>> = wa
            .iter()
            .zip(&vb)
            .map(|(p, q)| p.iter().zip(q).map(|(s, t)| s - t).collect())
            .collect();
        self.join(&base, &fib)
    }

    fn bracket_product_basis(&self, i: usize, j: usize) -> Bracket {
        let mut x = vec![Rat::zero(); self.dim()];
        let mut y = x.clone();
        x[i] = Rat::one();
        y[j] = Rat::one();
        self.bracket(&x, &y).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    }
}

impl JetAlg {
    pub fn layer_dims(&self) -> Vec<usize> {
        self.alg.layer_dims()
    }

    /// Product-coordinate vector to derived-basis coordinates.
    pub fn to_derived(&self, x: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); x.len()];
        for (i, v) in x.iter().enumerate() {
            out[self.to_layered[i]] = v.clone();
        }
        out
    }

    pub fn from_derived(&self, x: &[Rat]) -> Vec<Rat> {
        self.to_layered.iter().map(|&k| x[k].clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SectionVerdict {
    Jet(WPoly),
    NotJet { ell: usize, j: usize, component: usize, witness: MPoly },
}

/// Lie bracket of polynomial vector fields in one coordinate system.
pub fn vector_field_bracket(x: &[MPoly], y: &[MPoly]) -> Vec<MPoly> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut acc = MPoly::zero(x[0].nvars());
            for k in 0..n {
                if !x[k].is_zero() && y[i].depends_on(k) {
                    acc += &(&x[k] * &y[i].derivative(k));
                }
                if !y[k].is_zero() && x[i].depends_on(k) {
                    acc -= &(&y[k] * &x[i].derivative(k));
                }
            }
            acc
        })
        .collect()
}

/// Bernoulli numbers `B_0..=B_k` with `B_1 = -1/2`.
pub fn bernoulli(k: u32) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for j in 1..=k {
        let mut acc = Rat::zero();
        for (i, bi) in b.iter().enumerate() {
            acc += binom(j + 1, i as u32) * bi;
        }
        b.push(-acc / rat::int(j as i64 + 1));
    }
    b
}

fn binom(n: u32, k: u32) -> Rat {
    rat::factorial(n) / (rat::factorial(k) * rat::factorial(n - k))
}
