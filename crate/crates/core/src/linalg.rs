//! Sparse exact linear algebra over `Rat`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rat::Rat;

type Row = BTreeMap<usize, Rat>;

/// Row-sparse rational matrix. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Row>,
}

/// Reduced row echelon form with leftmost-column pivoting.
#[derive(Clone, Debug)]
pub struct Rref {
    /// Nonzero rows only, each with a leading 1 at `pivots[i]`.
    pub rows: Vec<BTreeMap<usize, Rat>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Row::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rat>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rat>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i].get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Rat> {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                t.data[*j].insert(i, v.clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        self.data
            .iter()
            .map(|r| {
                let mut acc = Rat::zero();
                for (j, v) in r {
                    acc += v * &x[*j];
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = Row::new();
            for (k, a) in r {
                for (j, b) in &other.data[*k] {
                    let e = acc.entry(*j).or_insert_with(Rat::zero);
                    *e += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Row> = self.data.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut pivots = Vec::new();
        let mut done = 0usize;
        for col in 0..self.cols {
            let Some(p) = (done..rows.len()).find(|&i| rows[i].contains_key(&col)) else {
                continue;
            };
            rows.swap(done, p);
            let inv = Rat::one() / &rows[done][&col];
            for v in rows[done].values_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[done].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == done {
                    continue;
                }
                if let Some(f) = row.get(&col).cloned() {
                    axpy(row, &-f, &pivot_row);
                }
            }
            pivots.push(col);
            done += 1;
            if done == rows.len() {
                break;
            }
        }
        rows.truncate(done);
        Rref { rows, pivots, cols: self.cols }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Exact solution of `A x = b`, free variables set to zero; `None` if inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = self.clone();
        aug.cols += 1;
        for (i, v) in b.iter().enumerate() {
            aug.set(i, self.cols, v.clone());
        }
        let e = aug.rref();
        if e.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            x[p] = row.get(&self.cols).cloned().unwrap_or_else(Rat::zero);
        }
        Some(x)
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (row, &p) in e.rows.iter().zip(&e.pivots) {
                    if let Some(c) = row.get(&f) {
                        v[p] = -c.clone();
                    }
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                aug.set(i, *j, v.clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for (i, row) in e.rows.iter().enumerate().take(n) {
            for (j, v) in row.range(n..) {
                inv.set(i, j - n, v.clone());
            }
        }
        Some(inv)
    }
}

fn axpy(row: &mut Row, f: &Rat, other: &Row) {
    for (j, v) in other {
        let e = row.entry(*j).or_insert_with(Rat::zero);
        *e += f * v;
        if e.is_zero() {
            row.remove(j);
        }
    }
}

/// Rank of a list of vectors of common length.
pub fn rank_of(vectors: &[Vec<Rat>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    RatMatrix::from_dense(vectors).rank()
}

/// Solver for `B c = t` with `B` of full column rank, reused across right-hand sides.
/// It keeps a set of independent rows of `B` and the inverse of that square block;
/// callers verify consistency against the remaining rows.
#[derive(Clone, Debug)]
pub struct LeftInverse {
    pub pivot_rows: Vec<usize>,
    pub inv: Vec<Vec<Rat>>,
}

impl LeftInverse {
    pub fn new(b: &RatMatrix) -> Option<LeftInverse> {
        let e = b.transpose().rref();
        if e.pivots.len() != b.cols() {
            return None;
        }
        let pivot_rows = e.pivots.clone();
        let block: Vec<Vec<Rat>> = pivot_rows
            .iter()
            .map(|&r| (0..b.cols()).map(|c| b.get(r, c)).collect())
            .collect();
        let inv = RatMatrix::from_dense(&block).inverse()?.to_dense();
        Some(LeftInverse { pivot_rows, inv })
    }
}
