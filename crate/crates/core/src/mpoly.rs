//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

pub type Exponent = Vec<u32>;

/// Polynomial in `nvars` ordered variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Exponent, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn add_term(&mut self, e: Exponent, c: Rat) {
        assert_eq!(e.len(), self.nvars, "exponent length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MPoly, c: &Rat) {
        assert_eq!(self.nvars, other.nvars, "variable count");
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * rat::int(e[i] as i64));
            }
        }
        out
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn weighted_degree_of(e: &[u32], weights: &[u32]) -> u32 {
        e.iter().zip(weights).map(|(a, w)| a * w).sum()
    }

    /// Every monomial has weighted degree exactly `d`.
    pub fn is_weighted_homogeneous(&self, weights: &[u32], d: u32) -> bool {
        self.terms.keys().all(|e| Self::weighted_degree_of(e, weights) == d)
    }

    /// Drop monomials of weighted degree above `max`.
    pub fn truncate_weighted(&self, weights: &[u32], max: u32) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Self::weighted_degree_of(e, weights) <= max)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keep the part of weighted degree exactly `d`.
    pub fn weighted_part(&self, weights: &[u32], d: u32) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Self::weighted_degree_of(e, weights) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars, "evaluation point length");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= rat::pow(x, k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute polynomial `subs[i]` for variable `i`. All substitutions must share a
    /// variable count; the result lives in those variables.
    pub fn compose(&self, subs: &[MPoly]) -> Result<MPoly> {
        if subs.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "substitution provides {} images for {} variables",
                subs.len(),
                self.nvars
            )));
        }
        let Some(target) = subs.first().map(MPoly::nvars) else {
            return Ok(self.clone());
        };
        if subs.iter().any(|s| s.nvars != target) {
            return Err(Error::InvalidArgument("substitutions disagree on variable count".into()));
        }
        let mut powers: Vec<Vec<MPoly>> = vec![vec![MPoly::one(target)]; self.nvars];
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out += &t;
        }
        Ok(out)
    }

    /// Drop monomials of total degree above `max`.
    pub fn truncate_total(&self, max: u32) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= max)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// [`MPoly::compose`] keeping only total degree `<= max` in the new variables.
    pub fn compose_truncated(&self, subs: &[MPoly], max: u32) -> Result<MPoly> {
        if subs.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "substitution provides {} images for {} variables",
                subs.len(),
                self.nvars
            )));
        }
        let Some(target) = subs.first().map(MPoly::nvars) else {
            return Ok(self.clone());
        };
        if subs.iter().any(|s| s.nvars != target) {
            return Err(Error::InvalidArgument("substitutions disagree on variable count".into()));
        }
        let subs: Vec<MPoly> = subs.iter().map(|s| s.truncate_total(max)).collect();
        let mut powers: Vec<Vec<MPoly>> = vec![vec![MPoly::one(target)]; self.nvars];
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = (powers[i].last().unwrap() * &subs[i]).truncate_total(max);
                    powers[i].push(next);
                }
                t = (&t * &powers[i][k as usize]).truncate_total(max);
                if t.is_zero() {
                    break;
                }
            }
            out += &t;
        }
        Ok(out)
    }

    /// Move variable `i` to position `map[i]` in a ring with `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Extend with trailing variables that do not occur.
    pub fn extend(&self, nvars: usize) -> MPoly {
        assert!(nvars >= self.nvars);
        let map: Vec<usize> = (0..self.nvars).collect();
        self.embed(nvars, &map)
    }

    /// Drop trailing variables down to `nvars`; `None` if a dropped variable occurs.
    pub fn restrict(&self, nvars: usize) -> Option<MPoly> {
        assert!(nvars <= self.nvars);
        let mut out = MPoly::zero(nvars);
        for (e, c) in &self.terms {
            if e[nvars..].iter().any(|&k| k > 0) {
                return None;
            }
            out.add_term(e[..nvars].to_vec(), c.clone());
        }
        Some(out)
    }

    /// Coefficient of `t^k` where `t` is variable `i`, as a polynomial in the remaining
    /// positions (variable `i` kept with exponent zero).
    pub fn coeff_in(&self, i: usize, k: u32) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut f = e.clone();
                f[i] = 0;
                out.add_term(f, c.clone());
            }
        }
        out
    }

    /// Short form such as `yz - xy^2/2`: juxtaposed variables, denominators last, terms
    /// with later variables first.
    pub fn format_compact(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut terms: Vec<(&Exponent, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.iter().rev().cmp(a.0.iter().rev()));
        let mut s = String::new();
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rat::zero();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: String = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let num = c.numer().magnitude().to_string();
            let den = c.denom().to_string();
            let lead = if mono.is_empty() {
                num
            } else if num == "1" {
                mono
            } else {
                format!("{num}{mono}")
            };
            s.push_str(&lead);
            if den != "1" {
                let _ = write!(s, "/{den}");
            }
        }
        s
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rat::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            if mono.is_empty() {
                s.push_str(&rat::to_display(&a));
            } else {
                if !a.is_one() {
                    let _ = write!(s, "{}*", rat::to_display(&a));
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl AddAssign<&MPoly> for MPoly {
    fn add_assign(&mut self, rhs: &MPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&MPoly> for MPoly {
    fn sub_assign(&mut self, rhs: &MPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count");
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}
