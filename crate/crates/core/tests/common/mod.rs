#![allow(dead_code)]

use std::sync::Arc;

use carnot_jets::jet::{JetPoint, JetSpace};
use carnot_jets::polyjet::WPoly;
use carnot_jets::rat::rat;
use carnot_jets::scalar::Scalar;
use carnot_jets::{MPoly, Rat, StratAlg};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(r: &mut impl Rng) -> Rat {
    rat(r.gen_range(-4..=4), r.gen_range(1..=3))
}

pub fn rats(r: &mut impl Rng, n: usize) -> Vec<Rat> {
    (0..n).map(|_| small_rat(r)).collect()
}

pub fn point(space: &JetSpace, r: &mut impl Rng) -> JetPoint {
    space.point(&rats(r, space.dim())).unwrap()
}

/// `x + y + ½[x,y] + (1/12)([x,[x,y]] + [y,[y,x]])`, exact up to step 3.
pub fn bch3<S: Scalar>(alg: &StratAlg, x: &[S], y: &[S]) -> Vec<S> {
    assert!(alg.step() <= 3);
    let xy = alg.bracket_generic(x, y);
    let xxy = alg.bracket_generic(x, &xy);
    let yyx = alg.bracket_generic(y, &alg.bracket_generic(y, x));
    (0..x.len())
        .map(|i| {
            let mut s = x[i].clone();
            s.add_s(&y[i]);
            s.add_scaled_s(&xy[i], &rat(1, 2));
            s.add_scaled_s(&xxy[i], &rat(1, 12));
            s.add_scaled_s(&yyx[i], &rat(1, 12));
            s
        })
        .collect()
}

/// `ṽ_{ik}⋯ṽ_{i1} f(p)`, read off as the coefficient of `t_1⋯t_k` in
/// `f(p · exp(t_k v_{ik}) ⋯ exp(t_1 v_{i1}))`.
pub fn word_derivative(alg: &StratAlg, f: &MPoly, p: &[Rat], word: &[usize]) -> Rat {
    let k = word.len();
    let n = alg.dim();
    let mut g: Vec<MPoly> = p.iter().map(|c| MPoly::constant(k, c.clone())).collect();
    for (pos, &letter) in word.iter().enumerate().rev() {
        let mut v = vec![MPoly::zero(k); n];
        v[letter] = MPoly::var(k, pos);
        g = bch3(alg, &g, &v);
    }
    f.compose(&g).unwrap().coeff(&vec![1; k])
}

pub fn field_derivative(alg: &StratAlg, f: &MPoly, p: &[Rat], i: usize) -> Rat {
    let mut g: Vec<MPoly> = p.iter().map(|c| MPoly::constant(1, c.clone())).collect();
    let mut v = vec![MPoly::zero(1); alg.dim()];
    v[i] = MPoly::var(1, 0);
    g = bch3(alg, &g, &v);
    f.compose(&g).unwrap().coeff(&[1])
}

/// Random polynomial with small coefficients and total degree at most `deg`.
pub fn random_poly(r: &mut impl Rng, nvars: usize, deg: u32, terms: usize) -> MPoly {
    let mut p = MPoly::zero(nvars);
    for _ in 0..terms {
        let mut e = vec![0u32; nvars];
        let mut left = r.gen_range(0..=deg);
        while left > 0 {
            e[r.gen_range(0..nvars)] += 1;
            left -= 1;
        }
        p.add_term(e, small_rat(r));
    }
    p
}

pub fn random_wpoly(r: &mut impl Rng, nvars: usize, wdim: usize, deg: u32) -> WPoly {
    WPoly { comps: (0..wdim).map(|_| random_poly(r, nvars, deg, 4)).collect() }
}

pub fn space(name: &str, wdim: usize, m: usize) -> Arc<JetSpace> {
    JetSpace::new(&carnot_jets::catalog(name).unwrap(), wdim, m).unwrap()
}
