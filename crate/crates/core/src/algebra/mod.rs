//! Stratified Lie algebras in an adapted basis.

mod bch;
pub mod catalog;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_traits::{One, Zero};

pub use bch::{BchTable, InvariantFields};
pub use catalog::catalog;

use crate::error::{check_len, Error, Result};
use crate::hd::HdSpace;
use crate::linalg::RatMatrix;
use crate::pbw::{MultiIndex, TauTable};
use crate::rat::{self, Rat};
use crate::scalar::Scalar;

/// Sparse bracket `[b_i, b_j] = Σ c_k b_k`.
pub type Bracket = Vec<(usize, Rat)>;

/// One term `α [b_i, b_j]` of a bracket decomposition, `b_i ∈ V1`.
pub type DecompTerm = (Rat, usize, usize);

pub struct StratAlg {
    name: String,
    labels: Vec<String>,
    weights: Vec<u32>,
    step: u32,
    table: Vec<Vec<Bracket>>,
    decomp: Vec<Vec<DecompTerm>>,
    pub(crate) cache: AlgCache,
}

type PbwCache = HashMap<Vec<usize>, Arc<std::collections::BTreeMap<MultiIndex, Rat>>>;

#[derive(Default)]
pub(crate) struct AlgCache {
    pub(crate) pbw: RwLock<PbwCache>,
    pub(crate) tau: Mutex<HashMap<u32, Arc<TauTable>>>,
    pub(crate) bch: OnceLock<Arc<BchTable>>,
    pub(crate) fields: OnceLock<Arc<InvariantFields>>,
    pub(crate) hd: Mutex<Option<Arc<HdSpace>>>,
}

impl fmt::Debug for StratAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StratAlg")
            .field("name", &self.name)
            .field("labels", &self.labels)
            .field("weights", &self.weights)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub pass: bool,
    pub detail: Option<String>,
}

impl Check {
    fn ok() -> Self {
        Check { pass: true, detail: None }
    }
    fn fail(msg: String) -> Self {
        Check { pass: false, detail: Some(msg) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub jacobi: Check,
    pub grading: Check,
    pub bracket_generating: Check,
    pub decomposition: Check,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.jacobi.pass && self.grading.pass && self.bracket_generating.pass && self.decomposition.pass
    }

    pub fn failures(&self) -> Vec<String> {
        [
            ("jacobi", &self.jacobi),
            ("grading", &self.grading),
            ("bracket-generating", &self.bracket_generating),
            ("decomposition", &self.decomposition),
        ]
        .iter()
        .filter(|(_, c)| !c.pass)
        .map(|(n, c)| format!("{n}: {}", c.detail.clone().unwrap_or_default()))
        .collect()
    }
}

impl StratAlg {
    /// Build from 0-based brackets `(i, j, [(k, c)])` with `i < j`. Only shape errors are
    /// reported here; mathematical checks live in [`StratAlg::validate`].
    pub fn new(
        name: &str,
        labels: Vec<String>,
        weights: Vec<u32>,
        brackets: &[(usize, usize, Bracket)],
    ) -> Result<StratAlg> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        check_len(n, labels.len())?;
        if weights[0] != 1 {
            return Err(Error::InvalidAlgebra("first basis vector must have weight 1".into()));
        }
        if weights.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidAlgebra("weights must be non-decreasing".into()));
        }
        let mut table = vec![vec![Bracket::new(); n]; n];
        for (i, j, terms) in brackets {
            let (i, j) = (*i, *j);
            if i >= j || j >= n {
                return Err(Error::InvalidAlgebra(format!("bad bracket index pair ({i},{j})")));
            }
            if !table[i][j].is_empty() {
                return Err(Error::InvalidAlgebra(format!("duplicate bracket ({i},{j})")));
            }
            let mut dense = vec![Rat::zero(); n];
            for (k, c) in terms {
                if *k >= n {
                    return Err(Error::InvalidAlgebra(format!("bracket target {k} out of range")));
                }
                dense[*k] += c;
            }
            let sparse: Bracket =
                dense.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            table[j][i] = sparse.iter().map(|(k, c)| (*k, -c.clone())).collect();
            table[i][j] = sparse;
        }
        let step = *weights.last().unwrap();
        let mut alg = StratAlg {
            name: name.to_string(),
            labels,
            weights,
            step,
            table,
            decomp: vec![Vec::new(); n],
            cache: AlgCache::default(),
        };
        for u in 0..n {
            if alg.weights[u] > 1 {
                alg.decomp[u] = alg.solve_decomp(u).unwrap_or_default();
            }
        }
        Ok(alg)
    }

    /// Build and reject unless every validation check passes.
    pub fn validated(
        name: &str,
        labels: Vec<String>,
        weights: Vec<u32>,
        brackets: &[(usize, usize, Bracket)],
    ) -> Result<Arc<StratAlg>> {
        let alg = Self::new(name, labels, weights, brackets)?;
        let report = alg.validate();
        if !report.all_pass() {
            return Err(Error::InvalidAlgebra(report.failures().join("; ")));
        }
        Ok(Arc::new(alg))
    }

    /// Replace the bracket decomposition of `u`; it must reproduce `b_u`.
    pub fn with_decomp(mut self, u: usize, terms: Vec<DecompTerm>) -> Result<StratAlg> {
        if u >= self.dim() || self.weights[u] == 1 {
            return Err(Error::InvalidArgument(format!("no decomposition for basis index {u}")));
        }
        let mut acc = vec![Rat::zero(); self.dim()];
        for (a, i, j) in &terms {
            if self.weights[*i] != 1 || self.weights[*j] + 1 != self.weights[u] {
                return Err(Error::InvalidArgument("decomposition term has wrong weights".into()));
            }
            for (k, c) in &self.table[*i][*j] {
                acc[*k] += a * c;
            }
        }
        if acc != self.unit(u) {
            return Err(Error::InvalidArgument("decomposition does not reproduce the basis vector".into()));
        }
        self.decomp[u] = terms;
        self.cache = AlgCache::default();
        Ok(self)
    }

    fn solve_decomp(&self, u: usize) -> Option<Vec<DecompTerm>> {
        let k = self.weights[u] - 1;
        let pairs: Vec<(usize, usize)> = self
            .layer(1)
            .flat_map(|i| self.layer(k).map(move |j| (i, j)))
            .collect();
        if pairs.is_empty() {
            return None;
        }
        let n = self.dim();
        let cols: Vec<Vec<Rat>> = pairs.iter().map(|&(i, j)| self.bracket_basis_dense(i, j)).collect();
        let a = RatMatrix::from_columns(&cols, n);
        let sol = a.solve(&self.unit(u))?;
        Some(
            pairs
                .iter()
                .zip(sol)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&(i, j), c)| (c, i, j))
                .collect(),
        )
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut jacobi = Check::ok();
        'outer: for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (bi, bj, bk) = (self.unit(i), self.unit(j), self.unit(k));
                    let mut s = self.bracket_generic(&bi, &self.bracket_generic(&bj, &bk));
                    add_vec(&mut s, &self.bracket_generic(&bj, &self.bracket_generic(&bk, &bi)));
                    add_vec(&mut s, &self.bracket_generic(&bk, &self.bracket_generic(&bi, &bj)));
                    if s.iter().any(|c| !c.is_zero()) {
                        jacobi = Check::fail(format!(
                            "fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        ));
                        break 'outer;
                    }
                }
            }
        }

        let mut grading = Check::ok();
        'g: for i in 0..n {
            for j in i + 1..n {
                for (k, _) in &self.table[i][j] {
                    if self.weights[*k] != self.weights[i] + self.weights[j] {
                        grading = Check::fail(format!(
                            "[{}, {}] has a component along {} of weight {} != {}",
                            self.labels[i],
                            self.labels[j],
                            self.labels[*k],
                            self.weights[*k],
                            self.weights[i] + self.weights[j]
                        ));
                        break 'g;
                    }
                }
            }
        }

        let mut generating = Check::ok();
        for k in 1..self.step {
            let span: Vec<Vec<Rat>> = self
                .layer(1)
                .flat_map(|i| self.layer(k).map(move |j| (i, j)))
                .map(|(i, j)| self.bracket_basis_dense(i, j))
                .collect();
            let want = self.layer(k + 1).len();
            let got = crate::linalg::rank_of(&span);
            // Rank of the span projected to V_{k+1}; with grading this is the full span.
            let proj: Vec<Vec<Rat>> = span
                .iter()
                .map(|v| self.layer(k + 1).map(|i| v[i].clone()).collect())
                .collect();
            let got_proj = crate::linalg::rank_of(&proj);
            if want == 0 || got_proj != want || got != want {
                generating = Check::fail(format!(
                    "[V1, V{k}] spans dimension {got}, layer V{} has dimension {want}",
                    k + 1
                ));
                break;
            }
        }

        let mut decomposition = Check::ok();
        for u in 0..n {
            if self.weights[u] == 1 {
                continue;
            }
            let mut acc = vec![Rat::zero(); n];
            for (a, i, j) in &self.decomp[u] {
                for (k, c) in &self.table[*i][*j] {
                    acc[*k] += a * c;
                }
            }
            if acc != self.unit(u) {
                decomposition = Check::fail(format!("no valid decomposition for {}", self.labels[u]));
                break;
            }
        }

        ValidationReport { jacobi, grading, bracket_generating: generating, decomposition }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    /// Dimension of V1.
    pub fn rank(&self) -> usize {
        self.layer(1).len()
    }

    /// Basis indices of layer `k` (empty if the layer is zero).
    pub fn layer(&self, k: u32) -> std::ops::Range<usize> {
        let start = self.weights.partition_point(|&w| w < k);
        let end = self.weights.partition_point(|&w| w <= k);
        start..end
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        (1..=self.step).map(|k| self.layer(k).len()).collect()
    }

    pub fn unit(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim()];
        v[i] = Rat::one();
        v
    }

    pub fn zero_elem(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.dim()]
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Bracket {
        &self.table[i][j]
    }

    pub fn bracket_basis_dense(&self, i: usize, j: usize) -> Vec<Rat> {
        let mut v = self.zero_elem();
        for (k, c) in &self.table[i][j] {
            v[*k] = c.clone();
        }
        v
    }

    pub fn decomp(&self, u: usize) -> &[DecompTerm] {
        &self.decomp[u]
    }

    /// Brackets as `(i, j, terms)` with `i < j`, non-zero only.
    pub fn structure(&self) -> Vec<(usize, usize, Bracket)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.table[i][j].is_empty() {
                    out.push((i, j, self.table[i][j].clone()));
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|r| r.iter().all(Vec::is_empty))
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), y.len())?;
        Ok(self.bracket_generic(x, y))
    }

    pub fn bracket_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Vec<S> {
        let zero = x[0].zero_like();
        let mut out = vec![zero; self.dim()];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero_s() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero_s() || self.table[i][j].is_empty() {
                    continue;
                }
                let p = xi.mul_s(yj);
                for (k, c) in &self.table[i][j] {
                    out[*k].add_scaled_s(&p, c);
                }
            }
        }
        out
    }

    pub fn project(&self, x: &[Rat], k: u32) -> Vec<Rat> {
        let r = self.layer(k);
        x.iter()
            .enumerate()
            .map(|(i, c)| if r.contains(&i) { c.clone() } else { Rat::zero() })
            .collect()
    }

    pub fn dilate(&self, x: &[Rat], lambda: &Rat) -> Result<Vec<Rat>> {
        check_len(self.dim(), x.len())?;
        if !rat::is_positive(lambda) {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        Ok(x.iter()
            .zip(&self.weights)
            .map(|(c, &w)| c * rat::pow(lambda, w))
            .collect())
    }

    /// `Ad_{exp p} x = Σ ad_p^k x / k!`.
    pub fn adjoint(&self, p: &[Rat], x: &[Rat]) -> Result<Vec<Rat>> {
        check_len(self.dim(), p.len())?;
        check_len(self.dim(), x.len())?;
        let mut out = x.to_vec();
        let mut term = x.to_vec();
        for k in 1..=self.step {
            term = self.bracket_generic(p, &term);
            if term.iter().all(Zero::is_zero) {
                break;
            }
            let f = rat::factorial(k);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t / &f;
            }
        }
        Ok(out)
    }

    /// Quotient by the layers above `top`: basis and brackets truncated to `V_1..V_top`.
    pub fn truncate(&self, name: &str, top: u32) -> Result<StratAlg> {
        let keep = self.layer(1).start..self.layer(top).end;
        let keep_n = keep.end;
        let mut brackets = Vec::new();
        for i in 0..keep_n {
            for j in i + 1..keep_n {
                let t: Bracket =
                    self.table[i][j].iter().filter(|(k, _)| *k < keep_n).cloned().collect();
                if !t.is_empty() {
                    brackets.push((i, j, t));
                }
            }
        }
        StratAlg::new(name, self.labels[..keep_n].to_vec(), self.weights[..keep_n].to_vec(), &brackets)
    }

    /// Human label of a linear combination, e.g. `X + 1/2*Z`.
    pub fn format_elem(&self, x: &[Rat]) -> String {
        let mut parts = Vec::new();
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = if c.is_one() {
                self.labels[i].clone()
            } else if *c == -Rat::one() {
                format!("-{}", self.labels[i])
            } else {
                format!("{}*{}", rat::to_display(c), self.labels[i])
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

pub(crate) fn add_vec<S: Scalar>(a: &mut [S], b: &[S]) {
    for (x, y) in a.iter_mut().zip(b) {
        x.add_s(y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn heisenberg_validates() {
        let h = catalog("heisenberg(1)").unwrap();
        assert!(h.validate().all_pass());
        assert_eq!(h.layer_dims(), vec![2, 1]);
        assert_eq!(h.bracket(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), v(&[0, 0, 1]));
        assert_eq!(h.bracket(&v(&[0, 1, 0]), &v(&[1, 0, 0])).unwrap(), v(&[0, 0, -1]));
        assert_eq!(h.bracket(&v(&[1, 2, 3]), &v(&[1, 2, 3])).unwrap(), v(&[0, 0, 0]));
    }

    #[test]
    fn bad_grading_detected() {
        let labels = vec!["X".into(), "Y".into(), "Z".into()];
        let a = StratAlg::new("bad", labels, vec![1, 1, 3], &[(0, 1, vec![(2, int(1))])]).unwrap();
        let r = a.validate();
        assert!(!r.grading.pass);
        assert!(!r.all_pass());
    }

    #[test]
    fn abelian_with_declared_step_two_fails_generation() {
        let a = StratAlg::new("flat", vec!["A".into(), "B".into()], vec![1, 2], &[]).unwrap();
        assert!(!a.validate().bracket_generating.pass);
    }

    #[test]
    fn dilation_and_adjoint() {
        let h = catalog("heisenberg(1)").unwrap();
        assert_eq!(h.dilate(&v(&[1, 0, 1]), &int(2)).unwrap(), v(&[2, 0, 4]));
        assert_eq!(h.dilate(&v(&[1, 2, 3]), &int(1)).unwrap(), v(&[1, 2, 3]));
        assert!(h.dilate(&v(&[1, 0, 0]), &int(0)).is_err());
        assert!(h.dilate(&v(&[1, 0, 0]), &rat(-1, 2)).is_err());
        assert_eq!(h.adjoint(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), v(&[0, 1, 1]));
    }

    #[test]
    fn decomposition_override_is_checked() {
        let labels = vec!["X".into(), "Y".into(), "Z".into()];
        let a = StratAlg::new("h", labels, vec![1, 1, 2], &[(0, 1, vec![(2, int(1))])]).unwrap();
        assert_eq!(a.decomp(2), &[(int(1), 0, 1)]);
        let a = a.with_decomp(2, vec![(int(-1), 1, 0)]).unwrap();
        assert!(a.validate().all_pass());
        let labels = vec!["X".into(), "Y".into(), "Z".into()];
        let b = StratAlg::new("h", labels, vec![1, 1, 2], &[(0, 1, vec![(2, int(1))])]).unwrap();
        assert!(b.with_decomp(2, vec![(int(2), 0, 1)]).is_err());
    }

    #[test]
    fn catalog_dims() {
        assert_eq!(catalog("engel").unwrap().layer_dims(), vec![2, 1, 1]);
        assert_eq!(catalog("cartan_n23").unwrap().layer_dims(), vec![2, 1, 2]);
        assert_eq!(catalog("heisenberg(2)").unwrap().layer_dims(), vec![4, 1]);
        assert_eq!(catalog("abelian(3)").unwrap().layer_dims(), vec![3]);
        assert_eq!(catalog("jet_counterexample(abelian(1))").unwrap().layer_dims(), vec![2]);
        assert_eq!(catalog("jet_counterexample(heisenberg(1))").unwrap().layer_dims(), vec![3, 1]);
        assert!(matches!(catalog("sl2"), Err(Error::UnknownAlgebra(_))));
    }
}
