//! Compressed sparse row matrices for logistic-regression designs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(n_cols: usize) -> Self {
        CsrMatrix { n_cols, indptr: vec![0], indices: Vec::new(), values: Vec::new() }
    }

    /// Appends a row of `(column, value)` pairs. Zeros are dropped and
    /// columns must be strictly increasing.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (u32, f64)>) {
        let mut last: Option<u32> = None;
        for (c, v) in entries {
            assert!((c as usize) < self.n_cols, "column {c} out of range");
            assert!(last.is_none_or(|l| c > l), "columns must be increasing");
            last = Some(c);
            if v != 0.0 {
                self.indices.push(c);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
    }

    pub fn from_rows(n_cols: usize, rows: &[Vec<(u32, f64)>]) -> Self {
        let mut m = CsrMatrix::new(n_cols);
        for r in rows {
            m.push_row(r.iter().copied());
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&c, &v)| v * w[c as usize]).sum()
    }

    /// `X w`
    pub fn matvec(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row_dot(i, w)).collect()
    }

    /// `Xᵀ v`
    pub fn tmatvec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            for (&c, &x) in idx.iter().zip(val) {
                out[c as usize] += x * vi;
            }
        }
        out
    }

    /// Dense `Xᵀ diag(w) X`, row-major p×p.
    pub fn weighted_gram(&self, w: &[f64]) -> Vec<f64> {
        let p = self.n_cols;
        let mut g = vec![0.0; p * p];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            for (a, (&ca, &va)) in idx.iter().zip(val).enumerate() {
                let s = wi * va;
                for (&cb, &vb) in idx[a..].iter().zip(&val[a..]) {
                    g[ca as usize * p + cb as usize] += s * vb;
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g[a * p + b] = g[b * p + a];
            }
        }
        g
    }

    /// Rows selected in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        let mut m = CsrMatrix::new(self.n_cols);
        for &r in rows {
            let (idx, val) = self.row(r);
            m.push_row(idx.iter().copied().zip(val.iter().copied()));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> CsrMatrix {
        CsrMatrix::from_rows(3, &[vec![(0, 1.0), (2, 2.0)], vec![], vec![(1, -1.0), (2, 0.0)]])
    }

    #[test]
    fn products_match_dense() {
        let m = m();
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![7.0, 0.0, -2.0]);
        assert_eq!(m.tmatvec(&[1.0, 5.0, 2.0]), vec![1.0, -2.0, 2.0]);
        let g = m.weighted_gram(&[1.0, 1.0, 3.0]);
        assert_eq!(g, vec![1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 2.0, 0.0, 4.0]);
    }

    #[test]
    fn select() {
        let s = m().select_rows(&[2, 0]);
        assert_eq!(s.row(0).0, &[1]);
        assert_eq!(s.row(1).0, &[0, 2]);
    }
}
