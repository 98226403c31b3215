//! Coefficient rings used generically: rationals for pointwise work and polynomials
//! for symbolic identities.

use num_traits::{One, Zero};

use crate::mpoly::MPoly;
use crate::rat::Rat;

pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn from_rat_like(&self, r: &Rat) -> Self;
    fn is_zero_s(&self) -> bool;
    fn add_s(&mut self, o: &Self);
    fn sub_s(&mut self, o: &Self);
    fn add_scaled_s(&mut self, o: &Self, c: &Rat);
    fn mul_s(&self, o: &Self) -> Self;
    fn scale_s(&self, c: &Rat) -> Self;
    /// Evaluate a polynomial at arguments of this type (composition for polynomials).
    fn eval_poly(p: &MPoly, args: &[Self]) -> Self;

    fn one_like(&self) -> Self {
        self.from_rat_like(&Rat::one())
    }
}

impl Scalar for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        r.clone()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_s(&mut self, o: &Self) {
        *self -= o;
    }
    fn add_scaled_s(&mut self, o: &Self, c: &Rat) {
        *self += o * c;
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_s(&self, c: &Rat) -> Self {
        self * c
    }
    fn eval_poly(p: &MPoly, args: &[Self]) -> Self {
        p.eval(args)
    }
}

impl Scalar for MPoly {
    fn zero_like(&self) -> Self {
        MPoly::zero(self.nvars())
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        MPoly::constant(self.nvars(), r.clone())
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_s(&mut self, o: &Self) {
        *self -= o;
    }
    fn add_scaled_s(&mut self, o: &Self, c: &Rat) {
        self.add_scaled(o, c);
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_s(&self, c: &Rat) -> Self {
        self.scale(c)
    }
    fn eval_poly(p: &MPoly, args: &[Self]) -> Self {
        p.compose(args).expect("substitution arity")
    }
}

/// `Σ c_i v_i` over a non-empty family, or `zero` if every coefficient vanishes.
pub fn lin_comb<S: Scalar>(zero: &S, terms: impl IntoIterator<Item = (Rat, S)>) -> S {
    let mut acc = zero.zero_like();
    for (c, v) in terms {
        acc.add_scaled_s(&v, &c);
    }
    acc
}
