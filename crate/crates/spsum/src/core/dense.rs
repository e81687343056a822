use std::ops::{Deref, Index, IndexMut};

use super::error::{Error, Result};
use super::scalar::Scalar;

/// Plain row-major dense matrix used for materialized artifacts and the
/// dense baselines.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == S::zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out[(i, j)] += aik * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + o[(i, j)])
    }

    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - o[(i, j)])
    }

    pub fn scale(&self, s: S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> S {
        let mut best = S::zero();
        for i in 0..self.rows {
            let mut acc = S::zero();
            for j in 0..self.cols {
                acc += self[(i, j)].abs();
            }
            if acc > best {
                best = acc;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, o: &Mat<S>) -> S {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut best = S::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - o[(i, j)]).abs();
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric dense matrix; construction mirrors the upper triangle so the
/// symmetry invariant holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymmetric<S> {
    m: Mat<S>,
}

impl<S: Scalar> DenseSymmetric<S> {
    /// Builds from an upper-triangle generator; (i, j) with i <= j.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        DenseSymmetric { m }
    }

    /// Symmetrizes an arbitrary square matrix as (M + M^T) / 2.
    pub fn symmetrize(m: &Mat<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch {
                detail: format!("cannot symmetrize {}x{}", m.rows(), m.cols()),
            });
        }
        let half = S::c(0.5);
        Ok(DenseSymmetric::from_upper_fn(m.rows(), |i, j| {
            (m[(i, j)] + m[(j, i)]) * half
        }))
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.m
    }

    pub fn into_mat(self) -> Mat<S> {
        self.m
    }
}

impl<S> Deref for DenseSymmetric<S> {
    type Target = Mat<S>;
    fn deref(&self) -> &Mat<S> {
        &self.m
    }
}
