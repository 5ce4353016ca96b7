//! Real CSR matrices for operators on a truncated Fock space.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    pub hermitian: bool,
    pub unitary: bool,
}

impl SparseOperator {
    /// Builds from unsorted triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(dim: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in t {
            let row = &mut rows[r];
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => row.push((c, v)),
            }
        }
        Self::from_rows(dim, rows)
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOperator { dim, row_ptr, cols, vals, hermitian: false, unitary: false }
    }

    pub fn zero(dim: usize) -> Self {
        SparseOperator { dim, row_ptr: vec![0; dim + 1], cols: vec![], vals: vec![], hermitian: true, unitary: false }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::diagonal(&vec![1.0; dim]);
        m.unitary = true;
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::from_rows(d.len(), d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect());
        m.hermitian = true;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[a..b].binary_search(&j) {
            Ok(k) => self.vals[a + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.dim).flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v))).collect()
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        let mut m = Self::from_triplets(self.dim, t);
        m.hermitian = self.hermitian;
        m.unitary = self.unitary;
        m
    }

    pub fn adjoint(&self) -> Self {
        self.transpose()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m.unitary = false;
        m.hermitian = self.hermitian;
        m.prune()
    }

    fn prune(self) -> Self {
        let rows = (0..self.dim).map(|i| self.row(i).collect()).collect();
        let mut m = Self::from_rows(self.dim, rows);
        m.hermitian = self.hermitian;
        m.unitary = self.unitary;
        m
    }

    /// self + s·other.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = par::map_range(self.dim, |i| {
            let mut out: Vec<(usize, f64)> = Vec::new();
            let (mut a, mut b) = (self.row(i).peekable(), other.row(i).peekable());
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some(x), None) => {
                        out.push(x);
                        a.next();
                    }
                    (None, Some((j, v))) => {
                        out.push((j, s * v));
                        b.next();
                    }
                    (Some((ja, va)), Some((jb, vb))) => {
                        if ja < jb {
                            out.push((ja, va));
                            a.next();
                        } else if jb < ja {
                            out.push((jb, s * vb));
                            b.next();
                        } else {
                            out.push((ja, va + s * vb));
                            a.next();
                            b.next();
                        }
                    }
                }
            }
            out
        });
        Self::from_rows(self.dim, rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let rows = par::map_range(n, |i| {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    acc.push((j, a * b));
                }
            }
            acc.sort_by_key(|x| x.0);
            let mut out: Vec<(usize, f64)> = Vec::with_capacity(acc.len());
            for (j, v) in acc {
                match out.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => out.push((j, v)),
                }
            }
            out
        });
        Self::from_rows(n, rows)
    }

    /// A·B − B·A.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// U A U†.
    pub fn conjugate(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        par::map_range(self.dim, |i| self.row(i).map(|(j, v)| v * x[j]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Max deviation over the entries whose row and column both pass `keep`.
    pub fn max_abs_on(&self, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.dim)
            .filter(|&i| keep(i))
            .flat_map(|i| self.row(i).filter(|&(j, _)| keep(j)).map(|(_, v)| v.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn off_diagonal_max(&self) -> f64 {
        (0..self.dim).flat_map(|i| self.row(i).filter(move |&(j, _)| j != i)).fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        par::neumaier(self.diag())
    }

    /// Tr(A·B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> f64 {
        par::sum_by(self.dim, |i| self.row(i).map(|(j, v)| v * other.get(j, i)).sum())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_diff(&self.transpose())
    }

    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().matmul(self).max_diff(&Self::identity(self.dim))
    }

    /// Checks the flags carried by the operator.
    pub fn validate_flags(&self) -> Result<()> {
        if self.hermitian {
            let e = self.hermiticity_error();
            if e > 1e-12 {
                return Err(Error::Numerical(format!("flagged hermitian operator off by {e:e}")));
            }
        }
        if self.unitary {
            let e = self.unitarity_error();
            if e > 1e-10 {
                return Err(Error::Numerical(format!("flagged unitary operator off by {e:e}")));
            }
        }
        Ok(())
    }

    pub fn with_flags(mut self, hermitian: bool, unitary: bool) -> Self {
        self.hermitian = hermitian;
        self.unitary = unitary;
        self
    }

    pub fn dense_block(&self, idx: &[usize]) -> DMatrix<f64> {
        let pos: std::collections::HashMap<usize, usize> = idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut d = DMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (j, v) in self.row(i) {
                if let Some(&b) = pos.get(&j) {
                    d[(a, b)] = v;
                }
            }
        }
        d
    }

    /// Assembles a matrix from dense diagonal blocks over disjoint index sets.
    pub fn from_blocks(dim: usize, blocks: &[(Vec<usize>, DMatrix<f64>)]) -> Self {
        let mut t = Vec::new();
        for (idx, d) in blocks {
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    let v = d[(a, b)];
                    if v != 0.0 {
                        t.push((i, j, v));
                    }
                }
            }
        }
        Self::from_triplets(dim, t)
    }

    /// Writes `row col re im` lines.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:?} 0.0")?;
        }
        Ok(())
    }
}

/// Connected components of the union of the sparsity graphs, each sorted.
pub fn components(dim: usize, ops: &[&SparseOperator]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for op in ops {
        for i in 0..dim {
            for (j, _) in op.row(i) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..dim {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = SparseOperator::from_triplets(4, vec![(0, 1, 2.0), (1, 2, 3.0), (0, 1, 1.0)]);
        assert_eq!(a.get(0, 1), 3.0);
        let p = a.matmul(&a);
        assert_eq!(p.get(0, 2), 9.0);
        assert_eq!(p.nnz(), 1);
        assert_eq!(a.transpose().get(2, 1), 3.0);
        assert_eq!(a.trace_product(&a.transpose()), 18.0);
        let comps = components(4, &[&a]);
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3]]);
    }
}
