//! Dense exact linear algebra over GF(p).
//!
//! Matrices here are small (dimensions in the low hundreds), so a dense
//! row-major representation with straightforward Gauss-Jordan elimination is
//! used throughout. All routines are deterministic.

use alloc::vec;
use alloc::vec::Vec;

use crate::ring::inv_mod;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMat {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMat {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        FpMat {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows);
        let mut out = FpMat::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) + a * other.get(k, j)) % self.p;
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = 0u64;
                for (j, x) in v.iter().enumerate() {
                    s = (s + self.get(i, j) * x) % self.p;
                }
                s
            })
            .collect()
    }

    pub fn transpose(&self) -> FpMat {
        let mut out = FpMat::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// In-place reduced row echelon form. Returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = inv_mod(self.get(r, c), self.p);
            for j in c..self.cols {
                let v = self.get(r, j) * inv % self.p;
                self.data[r * self.cols + j] = v;
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let f = self.get(i, c);
                    for j in c..self.cols {
                        let v = (self.get(i, j) + (self.p - f) * self.get(r, j)) % self.p;
                        self.data[i * self.cols + j] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace (solutions of Mx = 0), one vector per
    /// free column, deterministic order.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut x = vec![0u64; self.cols];
            x[free] = 1;
            for (c, pr) in pivot_set.iter().enumerate() {
                if let Some(r) = pr {
                    x[c] = (self.p - m.get(*r, free)) % self.p;
                }
            }
            basis.push(x);
        }
        basis
    }

    /// Solve Mx = b; None if inconsistent. Returns one solution.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(self.rows, b.len());
        let mut aug = FpMat::zero(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<FpMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMat::zero(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut out = FpMat::zero(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }
}

/// Row-space membership helper: a matrix kept in RREF with its pivot columns,
/// supporting reduction of vectors against the space.
#[derive(Clone, Debug)]
pub struct RowSpace {
    pub p: u64,
    pub cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(p: u64, cols: usize) -> Self {
        RowSpace {
            p,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors(p: u64, cols: usize, vecs: &[Vec<u64>]) -> Self {
        let mut s = Self::new(p, cols);
        for v in vecs {
            s.insert(v.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Reduce `v` against the stored rows; result has zeros in all pivot
    /// columns.
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = v[pc] % self.p;
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = (*x + (self.p - f) * y) % self.p;
                }
            }
        }
        v
    }

    /// Reduce and report the elimination coefficients: v = sum coeffs·rows + r.
    pub fn reduce_with_coeffs(&self, mut v: Vec<u64>) -> (Vec<u64>, Vec<u64>) {
        let mut coeffs = vec![0u64; self.rows.len()];
        for (i, (row, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let f = v[pc] % self.p;
            if f != 0 {
                coeffs[i] = f;
                for (x, y) in v.iter_mut().zip(row) {
                    *x = (*x + (self.p - f) * y) % self.p;
                }
            }
        }
        (v, coeffs)
    }

    /// Insert a vector; returns true if it enlarged the space.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|x| *x % self.p != 0) else {
            return false;
        };
        let inv = inv_mod(v[pc] % self.p, self.p);
        for x in v.iter_mut() {
            *x = *x % self.p * inv % self.p;
        }
        // Back-substitute into existing rows to keep full RREF.
        for row in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = (*x + (self.p - f) * y) % self.p;
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > pc)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, pc);
        self.rows.insert(at, v);
        true
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| *x % self.p == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = FpMat::from_rows(5, &[vec![1, 2, 3], vec![2, 4, 1], vec![0, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| *x == 0));
        }
    }

    #[test]
    fn solve_and_invert() {
        let m = FpMat::from_rows(7, &[vec![1, 2], vec![3, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FpMat::identity(7, 2));
        let x = m.solve(&[5, 6]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![5, 6]);
    }

    #[test]
    fn rowspace_membership() {
        let mut s = RowSpace::new(3, 4);
        assert!(s.insert(vec![1, 1, 0, 0]));
        assert!(s.insert(vec![0, 1, 1, 0]));
        assert!(!s.insert(vec![1, 2, 1, 0]));
        assert!(s.contains(&[1, 0, 2, 0]));
        assert!(!s.contains(&[0, 0, 0, 1]));
        let (r, c) = s.reduce_with_coeffs(vec![1, 2, 1, 0]);
        assert!(r.iter().all(|x| *x == 0));
        assert_eq!(c.len(), 2);
    }
}
