use super::dense::DenseSymmetric;
use super::error::{Error, Result};
use super::scalar::Scalar;
use super::tridiag::SymTridiagonal;

/// Generator pair (a_i), (b_i) of the symmetric matrix with entries
/// a_min(i,j) * b_max(i,j), optionally conjugated by a diagonal scale d.
///
/// Sequences are 1-based with sentinel slot 0 (a_0 = b_0 = 0, d_0 = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct SinglePairGenerators<S> {
    n: usize,
    a: Vec<S>,
    b: Vec<S>,
    d: Option<Vec<S>>,
}

impl<S: Scalar> SinglePairGenerators<S> {
    /// `a` and `b` are natural 0-based sequences of equal length n >= 2;
    /// every entry must be finite and nonzero.
    pub fn new(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        let n = a.len();
        if n < 2 || b.len() != n {
            return Err(Error::InvalidArgument {
                reason: format!("need two generator sequences of equal length >= 2, got {n} and {}", b.len()),
            });
        }
        for (name, seq) in [("a", &a), ("b", &b)] {
            if let Some(i) = seq.iter().position(|v| !v.is_finite() || v.is_zero()) {
                return Err(Error::InvalidArgument {
                    reason: format!("generator {name}[{}] must be finite and nonzero", i + 1),
                });
            }
        }
        let mut pa = Vec::with_capacity(n + 1);
        pa.push(S::zero());
        pa.extend(a);
        let mut pb = Vec::with_capacity(n + 1);
        pb.push(S::zero());
        pb.extend(b);
        Ok(SinglePairGenerators { n, a: pa, b: pb, d: None })
    }

    /// Attaches a diagonal scale (natural 0-based, length n, finite nonzero).
    pub fn with_scaling(mut self, d: Vec<S>) -> Result<Self> {
        if d.len() != self.n {
            return Err(Error::InvalidArgument {
                reason: format!("diagonal scale has length {}, expected {}", d.len(), self.n),
            });
        }
        if let Some(i) = d.iter().position(|v| !v.is_finite() || v.is_zero()) {
            return Err(Error::InvalidArgument {
                reason: format!("diagonal scale d[{}] must be finite and nonzero", i + 1),
            });
        }
        let mut pd = Vec::with_capacity(self.n + 1);
        pd.push(S::one());
        pd.extend(d);
        self.d = Some(pd);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based accessor; a(0) returns the zero sentinel.
    #[inline]
    pub fn a(&self, i: usize) -> S {
        self.a[i]
    }

    /// 1-based accessor; b(0) returns the zero sentinel.
    #[inline]
    pub fn b(&self, i: usize) -> S {
        self.b[i]
    }

    /// 1-based diagonal scale, 1 when no scale is attached.
    #[inline]
    pub fn d(&self, i: usize) -> S {
        match &self.d {
            Some(d) => d[i],
            None => S::one(),
        }
    }

    pub fn has_scaling(&self) -> bool {
        self.d.is_some()
    }

    /// The generator pair with the diagonal scale folded away, i.e. the
    /// matrix conjugated by 1/d. Identity when no scale is attached.
    pub fn without_scaling(&self) -> Self {
        match &self.d {
            None => self.clone(),
            Some(_) => SinglePairGenerators {
                n: self.n,
                a: self.a.clone(),
                b: self.b.clone(),
                d: None,
            },
        }
    }
}

/// Builds the dense symmetric matrix with entries
/// a_min(i,j) * b_max(i,j) * d_i * d_j.
pub fn sp_materialize<S: Scalar>(g: &SinglePairGenerators<S>) -> DenseSymmetric<S> {
    DenseSymmetric::from_upper_fn(g.n(), |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        g.a(i) * g.b(j) * g.d(i) * g.d(j)
    })
}

/// Inverse of the single-pair matrix in closed form, as a symmetric
/// tridiagonal matrix.
///
/// With theta_i = a_{i+1} b_i - a_i b_{i+1}, the entries are
/// (1,1) = (a_2/a_1)/theta_1, (n,n) = (b_{n-1}/b_n)/theta_{n-1},
/// (i,i) = (a_{i+1} b_{i-1} - a_{i-1} b_{i+1})/(theta_{i-1} theta_i),
/// (i,i+1) = -1/theta_i. A diagonal scale d conjugates the result by 1/d.
pub fn sp_inverse_closed_form<S: Scalar>(
    g: &SinglePairGenerators<S>,
    tol: S,
) -> Result<SymTridiagonal<S>> {
    let n = g.n();
    let mut theta = vec![S::zero(); n];
    for i in 1..n {
        theta[i] = g.a(i + 1) * g.b(i) - g.a(i) * g.b(i + 1);
        if theta[i].abs() < tol {
            return Err(Error::DegenerateDenominator { index: i });
        }
    }
    if g.a(1).abs() < tol {
        return Err(Error::DegenerateDenominator { index: 1 });
    }
    if g.b(n).abs() < tol {
        return Err(Error::DegenerateDenominator { index: n });
    }

    let mut alpha = vec![S::zero(); n + 1];
    alpha[1] = (g.a(2) / g.a(1)) / theta[1];
    alpha[n] = (g.b(n - 1) / g.b(n)) / theta[n - 1];
    for i in 2..n {
        alpha[i] =
            (g.a(i + 1) * g.b(i - 1) - g.a(i - 1) * g.b(i + 1)) / (theta[i - 1] * theta[i]);
    }
    // matrix entry (i,i+1) = -1/theta_i, so the stored positive-convention
    // coefficient is beta_i = 1/theta_i
    let mut beta = vec![S::zero(); n];
    for i in 1..n {
        beta[i] = S::one() / theta[i];
    }

    if g.has_scaling() {
        for i in 1..=n {
            alpha[i] = alpha[i] / (g.d(i) * g.d(i));
        }
        for i in 1..n {
            beta[i] = beta[i] / (g.d(i) * g.d(i + 1));
        }
    }
    Ok(SymTridiagonal::from_padded(n, alpha, beta))
}

/// Rescales the generator pair elementwise; the materialization of the
/// result equals diag(lambda) * M * diag(lambda).
pub fn sp_scale<S: Scalar>(
    g: &SinglePairGenerators<S>,
    lambda: &[S],
) -> Result<SinglePairGenerators<S>> {
    let n = g.n();
    if lambda.len() != n {
        return Err(Error::InvalidArgument {
            reason: format!("scale vector has length {}, expected {n}", lambda.len()),
        });
    }
    if let Some(i) = lambda.iter().position(|v| !v.is_finite() || v.is_zero()) {
        return Err(Error::InvalidArgument {
            reason: format!("scale lambda[{}] must be finite and nonzero", i + 1),
        });
    }
    let a = (1..=n).map(|i| lambda[i - 1] * g.a(i)).collect();
    let b = (1..=n).map(|i| lambda[i - 1] * g.b(i)).collect();
    let scaled = SinglePairGenerators::new(a, b)?;
    match &g.d {
        None => Ok(scaled),
        Some(d) => scaled.with_scaling(d[1..].to_vec()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::dense::Mat;

    #[test]
    fn materialize_small_pair() {
        let g = SinglePairGenerators::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let m = sp_materialize(&g);
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 2.0);
        assert_eq!(m[(1, 1)], 2.0);
    }

    #[test]
    fn materialize_three_by_three() {
        let g = SinglePairGenerators::new(vec![1.0, 1.0, 1.0], vec![1.0, 5.0 / 3.0, 3.0]).unwrap();
        let m = sp_materialize(&g);
        let want = [
            [1.0, 5.0 / 3.0, 3.0],
            [5.0 / 3.0, 5.0 / 3.0, 3.0],
            [3.0, 3.0, 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], want[i][j]);
            }
        }
    }

    #[test]
    fn closed_form_inverse_of_small_pair() {
        let g = SinglePairGenerators::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let t = sp_inverse_closed_form(&g, 1e-12).unwrap();
        let d = t.to_dense();
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(0, 1)], 1.0);
        assert_eq!(d[(1, 1)], -0.5);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let g = SinglePairGenerators::new(vec![0.7, 1.3, 2.9, 3.1], vec![4.0, 2.5, 1.9, 0.6])
            .unwrap();
        let t = sp_inverse_closed_form(&g, 1e-12).unwrap();
        let prod = t.to_dense().mat().mul(sp_materialize(&g).mat());
        assert!(prod.max_abs_diff(&Mat::identity(4)) < 1e-12);
    }

    #[test]
    fn diagonal_entries_equal_weighted_neighbor_sums() {
        let g: SinglePairGenerators<f64> =
            SinglePairGenerators::new(vec![0.7, 1.3, 2.9, 3.1], vec![4.0, 2.5, 1.9, 0.6])
                .unwrap();
        let t = sp_inverse_closed_form(&g, 1e-12).unwrap();
        let n = g.n();
        let theta = |i: usize| g.a(i + 1) * g.b(i) - g.a(i) * g.b(i + 1);
        for i in 2..n {
            let s1 = (g.a(i - 1) / g.a(i)) / theta(i - 1) + (g.a(i + 1) / g.a(i)) / theta(i);
            let s2 = (g.b(i - 1) / g.b(i)) / theta(i - 1) + (g.b(i + 1) / g.b(i)) / theta(i);
            assert!((t.alpha(i) - s1).abs() < 1e-12 * s1.abs());
            assert!((t.alpha(i) - s2).abs() < 1e-12 * s2.abs());
        }
        // endpoint extensions with a_0 = b_{n+1} = 0 and any nonzero b_0
        let b0 = 7.0;
        let s_first = (b0 / g.b(1)) / (g.a(1) * b0) + (g.b(2) / g.b(1)) / theta(1);
        assert!((t.alpha(1) - s_first).abs() < 1e-12 * s_first.abs());
        let s_last = (g.b(n - 1) / g.b(n)) / theta(n - 1);
        assert!((t.alpha(n) - s_last).abs() < 1e-12 * s_last.abs());
    }

    #[test]
    fn scaling_multiplies_rows_and_columns() {
        let g = SinglePairGenerators::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let scaled = sp_scale(&g, &[2.0, 2.0]).unwrap();
        let m = sp_materialize(&scaled);
        assert_eq!(m[(0, 0)], 4.0);
        assert_eq!(m[(0, 1)], 8.0);
        assert_eq!(m[(1, 1)], 8.0);

        let unchanged = sp_scale(&g, &[1.0, 1.0]).unwrap();
        assert_eq!(sp_materialize(&unchanged).mat(), sp_materialize(&g).mat());
    }

    #[test]
    fn zero_scale_entries_are_rejected() {
        let g = SinglePairGenerators::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(sp_scale(&g, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn diagonal_scale_conjugates_the_inverse() {
        let g = SinglePairGenerators::new(vec![0.7, 1.3, 2.9], vec![4.0, 2.5, 1.9])
            .unwrap()
            .with_scaling(vec![2.0, -1.5, 0.5])
            .unwrap();
        let m = sp_materialize(&g);
        let t = sp_inverse_closed_form(&g, 1e-12).unwrap();
        let prod = t.to_dense().mat().mul(m.mat());
        assert!(prod.max_abs_diff(&Mat::identity(3)) < 1e-12);
    }
}
