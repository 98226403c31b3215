//! Embedding a stratified algebra `g` of step `s+1` into the jet algebra
//! `j^s(g'; V_{s+1})` over its step-`s` quotient `g'`, through the cocycle
//! `η(x,y) = Π_{s+1}(xy) - x_{s+1} - y_{s+1}`.
//!
//! Jet algebras have two models: the multilinear one (`HD` tensors, [`JetSpace::bracket`])
//! and the polynomial one, where the fibre is polynomials homogeneous at `e` and the
//! bracket is `[(v,P),(w,Q)] = ([v,w], w†P - v†Q)`. `σ_e` maps one to the other.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::StratAlg;
use crate::error::{check_len, Error, Result};
use crate::hd::Tensor;
use crate::jet::JetSpace;
use crate::linalg::rank_of;
use crate::mpoly::MPoly;
use crate::par;
use crate::polyjet::{self, WPoly};
use crate::rat::Rat;

/// Element of the polynomial model: base vector and `W`-valued polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyElem {
    pub base: Vec<Rat>,
    pub poly: WPoly,
}

/// `[(v,P),(w,Q)] = ([v,w], w†P - v†Q)`.
pub fn poly_bracket(alg: &StratAlg, x: &PolyElem, y: &PolyElem) -> PolyElem {
    let base = alg.bracket_generic(&x.base, &y.base);
    let comps = x
        .poly
        .comps
        .iter()
        .zip(&y.poly.comps)
        .map(|(p, q)| &polyjet::right_inv_derive(alg, &y.base, p) - &polyjet::right_inv_derive(alg, &x.base, q))
        .collect();
    PolyElem { base, poly: WPoly { comps } }
}

/// `σ_e`: polynomial-model element to product coordinates of `space`.
pub fn sigma(space: &JetSpace, x: &PolyElem) -> Result<Vec<Rat>> {
    check_len(space.n(), x.base.len())?;
    check_len(space.wdim(), x.poly.wdim())?;
    let stack = polyjet::horizontal_coords(space.alg(), &x.poly, &space.alg().zero_elem(), space.order())?;
    Ok(space.join(&x.base, &stack))
}

/// `σ_e^{-1}`: product coordinates to the polynomial model, through the dual basis at `e`.
pub fn sigma_inverse(space: &JetSpace, x: &[Rat]) -> Result<PolyElem> {
    check_len(space.dim(), x.len())?;
    let alg = space.alg();
    let (n, wdim) = (space.n(), space.wdim());
    let (base, stack) = space.split(x);
    let e = alg.zero_elem();
    let mut comps = vec![MPoly::zero(n); wdim];
    for (d, block) in stack.iter().enumerate() {
        if block.iter().all(Zero::is_zero) {
            continue;
        }
        let basis = polyjet::dual_poly_basis(alg, &e, d as u32)?;
        for (i, (_, p)) in basis.iter().enumerate() {
            for (c, comp) in comps.iter_mut().enumerate() {
                let a = &block[i * wdim + c];
                if !a.is_zero() {
                    comp.add_scaled(p, a);
                }
            }
        }
    }
    Ok(PolyElem { base, poly: WPoly { comps } })
}

/// Basis pairs `(i, j)` of product coordinates where the two models disagree:
/// `[x, y]` versus `σ_e [σ_e^{-1} x, σ_e^{-1} y]`.
pub fn model_disagreements(space: &JetSpace) -> Result<Vec<(usize, usize)>> {
    let nv = space.dim();
    let unit = |i: usize| {
        let mut e = vec![Rat::zero(); nv];
        e[i] = Rat::one();
        e
    };
    let polys: Vec<PolyElem> = (0..nv).map(|i| sigma_inverse(space, &unit(i))).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i..nv).map(move |j| (i, j))).collect();
    let res = par::map(&pairs, |&(i, j)| -> Result<Option<(usize, usize)>> {
        let hd = space.bracket(&unit(i), &unit(j));
        let pb = sigma(space, &poly_bracket(space.alg(), &polys[i], &polys[j]))?;
        Ok((hd != pb).then_some((i, j)))
    });
    res.into_iter().filter_map(|r| r.transpose()).collect()
}

/// Quotient `g' = g / V_s` of a step-`s` algebra, `s ≥ 2`.
pub fn quotient_algebra(g: &StratAlg) -> Result<Arc<StratAlg>> {
    let s = g.step();
    if s < 2 {
        return Err(Error::InvalidArgument(format!("{} has step {s}; nothing to quotient", g.name())));
    }
    let q = g.truncate(&format!("{}/V{s}", g.name()), s - 1)?;
    let report = q.validate();
    if !report.all_pass() {
        return Err(Error::Certificate(format!("quotient fails validation: {:?}", report.failures())));
    }
    Ok(Arc::new(q))
}

/// `η(x, y)` in coordinates of the top layer.
pub fn eta(g: &StratAlg, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
    check_len(g.dim(), x.len())?;
    check_len(g.dim(), y.len())?;
    let args: Vec<Rat> = x.iter().chain(y).cloned().collect();
    Ok(g.eta_polys().iter().map(|p| p.eval(&args)).collect())
}

/// Image of one basis vector `b_i ∈ V_k`: `b_i + φ_k(b_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub layer: u32,
    /// Homogeneous degree of the polynomial part, `s + 1 - k`.
    pub degree: usize,
    pub elem: PolyElem,
    /// Product coordinates in `J^s(g'; V_{s+1})`.
    pub coords: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub name: String,
    pub checked: usize,
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub alg: Arc<StratAlg>,
    pub quotient: Arc<StratAlg>,
    pub space: Arc<JetSpace>,
    pub images: Vec<Image>,
    pub certificates: Vec<Certificate>,
}

impl Embedding {
    /// `Σ x_i φ(b_i)` in product coordinates.
    pub fn apply(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        check_len(self.alg.dim(), x.len())?;
        let mut out = vec![Rat::zero(); self.space.dim()];
        for (c, im) in x.iter().zip(&self.images) {
            if !c.is_zero() {
                for (o, v) in out.iter_mut().zip(&im.coords) {
                    *o += c * v;
                }
            }
        }
        Ok(out)
    }

    /// The multilinear part of `φ(b_i)` as one tensor per degree.
    pub fn tensors(&self, i: usize) -> Vec<Tensor> {
        let (_, stack) = self.space.split(&self.images[i].coords);
        self.space.stack_tensors(&stack)
    }
}

fn fail(msg: String) -> Error {
    Error::Certificate(msg)
}

/// `φ(v) = v + φ_k(v)` with `φ_k(v)(y) = ∂_t η(t v, y)|_{t=0}`, certified for homogeneity,
/// morphism (polynomial model), injectivity and strata preservation.
pub fn embed(g: &Arc<StratAlg>) -> Result<Embedding> {
    let report = g.validate();
    if !report.all_pass() {
        return Err(Error::InvalidAlgebra(format!("{}: {:?}", g.name(), report.failures())));
    }
    let quotient = quotient_algebra(g)?;
    let s = g.step() - 1;
    let (n, nq) = (g.dim(), quotient.dim());
    let wdim = n - nq;
    let space = JetSpace::new(&quotient, wdim, s as usize)?;
    let eta = g.eta_polys();

    // x ↦ 0, y ↦ (y', 0).
    let mut subs = vec![MPoly::zero(nq); 2 * n];
    for (j, sub) in subs[n..n + nq].iter_mut().enumerate() {
        *sub = MPoly::var(nq, j);
    }
    let images: Vec<Image> = (0..n)
        .map(|i| -> Result<Image> {
            let layer = g.weights()[i];
            let mut base = vec![Rat::zero(); nq];
            let (degree, comps) = if layer == s + 1 {
                let mut comps = vec![MPoly::zero(nq); wdim];
                comps[i - nq] = MPoly::one(nq);
                (0, comps)
            } else {
                base[i] = Rat::one();
                let comps = eta.iter().map(|p| p.derivative(i).compose(&subs)).collect::<Result<_>>()?;
                ((s + 1 - layer) as usize, comps)
            };
            let elem = PolyElem { base, poly: WPoly { comps } };
            let coords = sigma(&space, &elem)?;
            Ok(Image { layer, degree, elem, coords })
        })
        .collect::<Result<_>>()?;

    let e = quotient.zero_elem();
    let mut certificates = Vec::new();

    let mut checked = 0;
    for (i, im) in images.iter().enumerate() {
        for p in &im.elem.poly.comps {
            if !polyjet::is_homogeneous_at(&quotient, p, &e, im.degree as u32) {
                return Err(fail(format!("φ(b{}) is not homogeneous of degree {}", i + 1, im.degree)));
            }
            checked += 1;
        }
    }
    certificates.push(Certificate { name: "homogeneity".into(), checked });

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let bad = par::find_map_first(&pairs, |&(i, j)| {
        let lhs = poly_bracket(&quotient, &images[i].elem, &images[j].elem);
        let mut rhs = PolyElem { base: vec![Rat::zero(); nq], poly: WPoly::zero(nq, wdim) };
        for (k, c) in g.bracket_basis(i, j) {
            for (a, b) in rhs.base.iter_mut().zip(&images[*k].elem.base) {
                *a += c * b;
            }
            for (a, b) in rhs.poly.comps.iter_mut().zip(&images[*k].elem.poly.comps) {
                a.add_scaled(b, c);
            }
        }
        (lhs != rhs).then_some((i, j))
    });
    if let Some((i, j)) = bad {
        return Err(fail(format!("φ[b{},b{}] ≠ [φ b{}, φ b{}] in the polynomial model", i + 1, j + 1, i + 1, j + 1)));
    }
    certificates.push(Certificate { name: "morphism".into(), checked: pairs.len() });

    let coords: Vec<Vec<Rat>> = images.iter().map(|im| im.coords.clone()).collect();
    if rank_of(&coords) != n {
        return Err(fail("φ is not injective".into()));
    }
    certificates.push(Certificate { name: "injectivity".into(), checked: n });

    for (i, im) in images.iter().enumerate() {
        let k = im.layer;
        let hd_block = space.block((s + 1 - k) as usize);
        let ok = im.coords.iter().enumerate().all(|(c, v)| {
            v.is_zero() || (c < nq && quotient.weights()[c] == k) || hd_block.contains(&c)
        });
        if !ok {
            return Err(fail(format!("φ(b{}) leaves layer {k}", i + 1)));
        }
    }
    certificates.push(Certificate { name: "strata".into(), checked: n });

    Ok(Embedding { alg: g.clone(), quotient, space, images, certificates })
}

/// Per-basis-vector product coordinates, after re-checking the morphism identities with
/// the multilinear bracket and against the polynomial route.
pub fn embed_multilinear(res: &Embedding) -> Result<Vec<Vec<Rat>>> {
    let n = res.alg.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let bad = par::find_map_first(&pairs, |&(i, j)| {
        let (x, y) = (&res.images[i], &res.images[j]);
        let hd = res.space.bracket(&x.coords, &y.coords);
        let mut rhs = vec![Rat::zero(); res.space.dim()];
        for (k, c) in res.alg.bracket_basis(i, j) {
            for (a, b) in rhs.iter_mut().zip(&res.images[*k].coords) {
                *a += c * b;
            }
        }
        let poly = sigma(&res.space, &poly_bracket(&res.quotient, &x.elem, &y.elem)).ok();
        (hd != rhs || poly.as_ref() != Some(&hd)).then_some((i, j))
    });
    if let Some((i, j)) = bad {
        return Err(fail(format!("multilinear morphism identity fails on (b{}, b{})", i + 1, j + 1)));
    }
    Ok(res.images.iter().map(|im| im.coords.clone()).collect())
}
