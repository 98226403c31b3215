//! Group law in exponential coordinates.

use std::sync::Arc;

use super::StratAlg;
use crate::error::{check_len, Error, Result};
use crate::mpoly::MPoly;
use crate::pbw::Uea;
use crate::rat::Rat;
use crate::scalar::Scalar;

/// `bch(x, y)_k` as polynomials in `x_1..x_n, y_1..y_n`.
#[derive(Debug)]
pub struct BchTable {
    pub polys: Vec<MPoly>,
}

/// Coefficients of the invariant vector fields in exponential coordinates.
#[derive(Debug)]
pub struct InvariantFields {
    /// `left[i][k]`: coefficient of `∂_k` in `b̃_i`.
    pub left: Vec<Vec<MPoly>>,
    /// `right[i][k]`: coefficient of `∂_k` in `b_i†`.
    pub right: Vec<Vec<MPoly>>,
    /// `left_inv[i][k]`: the `i`-th left-trivialized component of a coordinate tangent is
    /// `Σ_k left_inv[i][k](a) ȧ_k`.
    pub left_inv: Vec<Vec<MPoly>>,
}

impl StratAlg {
    fn bch_uea<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        let s = self.step();
        let ex = Uea::exp(self, x, s);
        let ey = Uea::exp(self, y, s);
        let l = ex.mul(self, &ey)?.log(self)?;
        l.to_lie(self.dim(), &x[0])
            .ok_or_else(|| Error::Certificate("log(exp x exp y) is not a Lie element".into()))
    }

    /// `log(exp x · exp y)` computed in the enveloping algebra.
    pub fn bch(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), y.len())?;
        self.bch_uea(x, y)
    }

    pub fn bch_table(&self) -> Arc<BchTable> {
        self.cache
            .bch
            .get_or_init(|| {
                let n = self.dim();
                let x: Vec<MPoly> = (0..n).map(|i| MPoly::var(2 * n, i)).collect();
                let y: Vec<MPoly> = (0..n).map(|i| MPoly::var(2 * n, n + i)).collect();
                let polys = self.bch_uea(&x, &y).expect("symbolic BCH is a Lie element");
                Arc::new(BchTable { polys })
            })
            .clone()
    }

    /// BCH through the symbolic table, for any coefficient ring.
    pub fn bch_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Vec<S> {
        let t = self.bch_table();
        let args: Vec<S> = x.iter().chain(y).cloned().collect();
        t.polys.iter().map(|p| S::eval_poly(p, &args)).collect()
    }

    pub fn inverse_elem(&self, x: &[Rat]) -> Vec<Rat> {
        x.iter().map(|c| -c.clone()).collect()
    }

    /// Top-layer defect `Π_s(bch(x,y)) - x_s - y_s`, as polynomials in `(x, y)`, one per
    /// top-layer basis vector.
    pub fn eta_polys(&self) -> Vec<MPoly> {
        let n = self.dim();
        let t = self.bch_table();
        self.layer(self.step())
            .map(|k| {
                let mut p = t.polys[k].clone();
                p -= &MPoly::var(2 * n, k);
                p -= &MPoly::var(2 * n, n + k);
                p
            })
            .collect()
    }

    pub fn invariant_fields(&self) -> Arc<InvariantFields> {
        self.cache
            .fields
            .get_or_init(|| {
                let n = self.dim();
                let t = self.bch_table();
                let x_at = |swap: bool| -> Vec<MPoly> {
                    // Substitution for (x, y) with y = 0, keeping x.
                    let mut subs = Vec::with_capacity(2 * n);
                    for i in 0..2 * n {
                        let is_point = if swap { i >= n } else { i < n };
                        subs.push(if is_point { MPoly::var(n, i % n) } else { MPoly::zero(n) });
                    }
                    subs
                };
                let left_subs = x_at(false);
                let right_subs = x_at(true);
                let mut left = vec![Vec::with_capacity(n); n];
                let mut right = vec![Vec::with_capacity(n); n];
                for i in 0..n {
                    for k in 0..n {
                        let dl = t.polys[k].derivative(n + i).compose(&left_subs).unwrap();
                        let dr = t.polys[k].derivative(i).compose(&right_subs).unwrap();
                        left[i].push(dl);
                        right[i].push(dr);
                    }
                }
                // M[k][i] = left[i][k] = I + N with N nilpotent.
                let nil: Vec<Vec<MPoly>> = (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|i| {
                                let mut p = left[i][k].clone();
                                if i == k {
                                    p -= &MPoly::one(n);
                                }
                                p
                            })
                            .collect()
                    })
                    .collect();
                let ident: Vec<Vec<MPoly>> = (0..n)
                    .map(|k| (0..n).map(|i| if i == k { MPoly::one(n) } else { MPoly::zero(n) }).collect())
                    .collect();
                let mut inv = ident.clone();
                let mut pow = ident;
                for j in 1..n {
                    pow = mat_mul(&pow, &nil);
                    if pow.iter().all(|r| r.iter().all(MPoly::is_zero)) {
                        break;
                    }
                    for (ri, rp) in inv.iter_mut().zip(&pow) {
                        for (a, b) in ri.iter_mut().zip(rp) {
                            if j % 2 == 1 {
                                *a -= b;
                            } else {
                                *a += b;
                            }
                        }
                    }
                }
                Arc::new(InvariantFields { left, right, left_inv: inv })
            })
            .clone()
    }

    /// Left-trivialization of a coordinate tangent `ȧ` at `a`.
    pub fn left_trivialize<S: Scalar>(&self, a: &[S], adot: &[S]) -> Vec<S> {
        let f = self.invariant_fields();
        let n = self.dim();
        let zero = adot[0].zero_like();
        (0..n)
            .map(|i| {
                let mut acc = zero.clone();
                for (d, c) in adot.iter().zip(&f.left_inv[i]) {
                    if d.is_zero_s() || c.is_zero() {
                        continue;
                    }
                    acc.add_s(&S::eval_poly(c, a).mul_s(d));
                }
                acc
            })
            .collect()
    }

    /// Coordinate vector `x̃(a)` of the left-invariant field generated by `x`.
    pub fn left_field_at<S: Scalar>(&self, x: &[S], a: &[S]) -> Vec<S> {
        let f = self.invariant_fields();
        let n = self.dim();
        let zero = a[0].zero_like();
        (0..n)
            .map(|k| {
                let mut acc = zero.clone();
                for (xi, row) in x.iter().zip(&f.left) {
                    if xi.is_zero_s() || row[k].is_zero() {
                        continue;
                    }
                    acc.add_s(&S::eval_poly(&row[k], a).mul_s(xi));
                }
                acc
            })
            .collect()
    }
}

fn mat_mul(a: &[Vec<MPoly>], b: &[Vec<MPoly>]) -> Vec<Vec<MPoly>> {
    let n = a.len();
    let nv = a[0][0].nvars();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = MPoly::zero(nv);
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&a[i][k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
