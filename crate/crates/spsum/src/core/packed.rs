use super::dense::DenseSymmetric;
use super::scalar::Scalar;

/// Upper-triangle packed storage of a symmetric n x n matrix.
///
/// Entry (i, j) with 1 <= i <= j <= n lives at flat offset
/// `(2n - i)(i - 1)/2 + j - 1`, the same layout as the reference driver's
/// packing macro; the buffer length is n(n+1)/2.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedSymmetric<S> {
    n: usize,
    q: Vec<S>,
}

impl<S: Scalar> PackedSymmetric<S> {
    pub fn zeros(n: usize) -> Self {
        PackedSymmetric { n, q: vec![S::zero(); n * (n + 1) / 2] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i <= j && j <= self.n);
        (2 * self.n - i) * (i - 1) / 2 + j - 1
    }

    /// 1-based symmetric read; (i, j) and (j, i) return the same entry.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.q[self.offset(i, j)]
    }

    /// 1-based write into the stored upper triangle (i <= j required).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        let k = self.offset(i, j);
        self.q[k] = v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.q
    }

    pub fn to_dense(&self) -> DenseSymmetric<S> {
        DenseSymmetric::from_upper_fn(self.n, |i, j| self.get(i + 1, j + 1))
    }

    pub fn iter_finite(&self) -> bool {
        self.q.iter().all(|v| v.is_finite())
    }
}
