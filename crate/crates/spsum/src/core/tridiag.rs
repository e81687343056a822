use super::dense::{DenseSymmetric, Mat};
use super::error::{Error, Result};
use super::scalar::Scalar;
use super::single_pair::SinglePairGenerators;

/// Irreducible symmetric tridiagonal matrix.
///
/// Stored in the positive off-diagonal convention: the matrix entry
/// (i, i+1) is `-beta_i`. Sequences are 1-based with a sentinel slot 0
/// (beta_0 = 0), so `alpha(i)` and `beta(i)` take 1-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal<S> {
    n: usize,
    alpha: Vec<S>,
    beta: Vec<S>,
}

impl<S: Scalar> SymTridiagonal<S> {
    /// `alpha` has length n >= 2, `beta` length n-1 (natural 0-based input).
    pub fn new(alpha: Vec<S>, beta: Vec<S>) -> Result<Self> {
        let n = alpha.len();
        if n < 2 || beta.len() != n - 1 {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "need n >= 2 with |beta| = n-1, got |alpha| = {n}, |beta| = {}",
                    beta.len()
                ),
            });
        }
        let mut al = Vec::with_capacity(n + 1);
        al.push(S::zero());
        al.extend(alpha);
        let mut be = Vec::with_capacity(n);
        be.push(S::zero());
        be.extend(beta);
        Ok(SymTridiagonal { n, alpha: al, beta: be })
    }

    /// Builds directly from sentinel-padded sequences (`alpha[0]`,
    /// `beta[0]` are the slot-0 sentinels).
    pub(crate) fn from_padded(n: usize, alpha: Vec<S>, beta: Vec<S>) -> Self {
        debug_assert_eq!(alpha.len(), n + 1);
        debug_assert_eq!(beta.len(), n);
        SymTridiagonal { n, alpha, beta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based diagonal entry.
    #[inline]
    pub fn alpha(&self, i: usize) -> S {
        self.alpha[i]
    }

    /// 1-based off-diagonal coefficient; matrix entry (i, i+1) is -beta(i).
    /// beta(0) returns the zero sentinel.
    #[inline]
    pub fn beta(&self, i: usize) -> S {
        self.beta[i]
    }

    pub fn to_dense(&self) -> DenseSymmetric<S> {
        DenseSymmetric::from_upper_fn(self.n, |i, j| {
            let (i, j) = (i + 1, j + 1);
            if i == j {
                self.alpha(i)
            } else if j == i + 1 {
                -self.beta(i)
            } else {
                S::zero()
            }
        })
    }

    /// Whether every off-diagonal coefficient clears the tolerance.
    pub fn is_irreducible(&self, tol: S) -> bool {
        (1..self.n).all(|i| self.beta(i).abs() >= tol)
    }
}

/// General (not necessarily symmetric) tridiagonal matrix for the
/// triangular-tridiagonal product formulas; 1-based band accessors.
#[derive(Clone, Debug)]
pub struct Tridiagonal<S> {
    n: usize,
    diag: Vec<S>,
    sub: Vec<S>,
    sup: Vec<S>,
}

impl<S: Scalar> Tridiagonal<S> {
    /// `diag` length n, `sub`/`sup` length n-1 (0-based natural input);
    /// `sub[i]` is entry (i+2, i+1), `sup[i]` is entry (i+1, i+2).
    pub fn new(diag: Vec<S>, sub: Vec<S>, sup: Vec<S>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() != n - 1 || sup.len() != n - 1 {
            return Err(Error::InvalidArgument {
                reason: "tridiagonal bands must have lengths n, n-1, n-1".into(),
            });
        }
        Ok(Tridiagonal { n, diag, sub, sup })
    }

    pub fn from_symmetric(t: &SymTridiagonal<S>) -> Self {
        let n = t.n();
        Tridiagonal {
            n,
            diag: (1..=n).map(|i| t.alpha(i)).collect(),
            sub: (1..n).map(|i| -t.beta(i)).collect(),
            sup: (1..n).map(|i| -t.beta(i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based entry accessor; zero outside the three bands.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> S {
        if i == j {
            self.diag[i - 1]
        } else if i == j + 1 {
            self.sub[j - 1]
        } else if j == i + 1 {
            self.sup[i - 1]
        } else {
            S::zero()
        }
    }

    pub fn to_mat(&self) -> Mat<S> {
        Mat::from_fn(self.n, self.n, |i, j| self.entry(i + 1, j + 1))
    }
}

/// Product L * T * U of a lower-triangular grid, a tridiagonal, and an
/// upper-triangular grid, expanded as three banded sums per entry; sums with
/// an empty index range contribute zero.
pub fn ltu_product<S: Scalar>(l: &Mat<S>, t: &Tridiagonal<S>, u: &Mat<S>) -> Mat<S> {
    let n = t.n();
    assert!(l.rows() == n && l.cols() == n && u.rows() == n && u.cols() == n);
    Mat::from_fn(n, n, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        let mut acc = S::zero();
        for k in 1..=i.min(j) {
            acc += l[(i - 1, k - 1)] * t.entry(k, k) * u[(k - 1, j - 1)];
        }
        for k in 1..=(i - 1).min(j) {
            acc += l[(i - 1, k)] * t.entry(k + 1, k) * u[(k - 1, j - 1)];
        }
        for k in 1..=i.min(j - 1) {
            acc += l[(i - 1, k - 1)] * t.entry(k, k + 1) * u[(k, j - 1)];
        }
        acc
    })
}

/// Product U * T * L, the mirrored expansion with max-based lower bounds.
pub fn utl_product<S: Scalar>(u: &Mat<S>, t: &Tridiagonal<S>, l: &Mat<S>) -> Mat<S> {
    let n = t.n();
    assert!(l.rows() == n && l.cols() == n && u.rows() == n && u.cols() == n);
    Mat::from_fn(n, n, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        let mut acc = S::zero();
        for k in i.max(j)..=n {
            acc += u[(i - 1, k - 1)] * t.entry(k, k) * l[(k - 1, j - 1)];
        }
        for k in i.max(j + 1)..=n {
            acc += u[(i - 1, k - 1)] * t.entry(k, k - 1) * l[(k - 2, j - 1)];
        }
        for k in i.max(j.saturating_sub(1).max(1))..=n.saturating_sub(1) {
            acc += u[(i - 1, k - 1)] * t.entry(k, k + 1) * l[(k, j - 1)];
        }
        acc
    })
}

/// Solves T X = B for a general tridiagonal T against dense right-hand
/// sides, by banded LU with partial pivoting (one fill-in band).
pub fn solve_tridiagonal<S: Scalar>(t: &Tridiagonal<S>, b: &Mat<S>, tol: S) -> Result<Mat<S>> {
    let n = t.n();
    if b.rows() != n {
        return Err(Error::ShapeMismatch {
            detail: format!("rhs has {} rows, system has {n}", b.rows()),
        });
    }
    let mut d: Vec<S> = (0..n).map(|i| t.entry(i + 1, i + 1)).collect();
    let mut c: Vec<S> = (0..n - 1).map(|i| t.entry(i + 1, i + 2)).collect();
    let mut a: Vec<S> = (0..n - 1).map(|i| t.entry(i + 2, i + 1)).collect();
    let mut e = vec![S::zero(); n.saturating_sub(2)];
    let mut x = b.clone();

    for k in 0..n - 1 {
        if a[k].abs() > d[k].abs() {
            // swap rows k and k+1 across the (at most) three stored bands
            std::mem::swap(&mut d[k], &mut a[k]);
            std::mem::swap(&mut c[k], &mut d[k + 1]);
            if k + 2 < n {
                std::mem::swap(&mut e[k], &mut c[k + 1]);
            }
            for col in 0..x.cols() {
                let tmp = x[(k, col)];
                x[(k, col)] = x[(k + 1, col)];
                x[(k + 1, col)] = tmp;
            }
        }
        if d[k].abs() < tol {
            return Err(Error::Singular { detail: format!("zero pivot at row {}", k + 1) });
        }
        let m = a[k] / d[k];
        d[k + 1] = d[k + 1] - m * c[k];
        if k + 2 < n {
            c[k + 1] = c[k + 1] - m * e[k];
        }
        for col in 0..x.cols() {
            let upd = x[(k, col)] * m;
            x[(k + 1, col)] -= upd;
        }
    }
    if d[n - 1].abs() < tol {
        return Err(Error::Singular { detail: format!("zero pivot at row {n}") });
    }

    for col in 0..x.cols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            if i + 1 < n {
                acc -= c[i] * x[(i + 1, col)];
            }
            if i + 2 < n {
                acc -= e[i] * x[(i + 2, col)];
            }
            x[(i, col)] = acc / d[i];
        }
    }
    Ok(x)
}

/// Closed-form inverse of an irreducible symmetric tridiagonal matrix as a
/// single-pair generator vector pair.
///
/// Runs the backward sweep d_n = alpha_n, d_{i-1} = alpha_{i-1} -
/// beta_{i-1}^2 / d_i and the forward sweep delta_1 = alpha_1,
/// delta_{i+1} = alpha_{i+1} - beta_i^2 / delta_i, then assembles
/// b_i = (beta_1 ... beta_{i-1}) / (d_1 ... d_i) and
/// a_i = (beta_i ... beta_{n-1}) / (delta_i ... delta_n b_n), with void
/// products equal to 1.
pub fn tridiag_inverse_meurant<S: Scalar>(
    t: &SymTridiagonal<S>,
    tol: S,
) -> Result<SinglePairGenerators<S>> {
    let n = t.n();
    if !t.is_irreducible(tol) {
        return Err(Error::InvalidArgument {
            reason: "matrix must be irreducible (all off-diagonals nonzero)".into(),
        });
    }

    let mut d = vec![S::zero(); n + 1];
    d[n] = t.alpha(n);
    for i in (2..=n).rev() {
        if d[i].abs() < tol {
            return Err(Error::PivotBreakdown { index: i, sweep: "backward" });
        }
        d[i - 1] = t.alpha(i - 1) - t.beta(i - 1) * t.beta(i - 1) / d[i];
    }
    let mut delta = vec![S::zero(); n + 1];
    delta[1] = t.alpha(1);
    for i in 1..n {
        if delta[i].abs() < tol {
            return Err(Error::PivotBreakdown { index: i, sweep: "forward" });
        }
        delta[i + 1] = t.alpha(i + 1) - t.beta(i) * t.beta(i) / delta[i];
    }
    if d[1].abs() < tol {
        return Err(Error::PivotBreakdown { index: 1, sweep: "backward" });
    }
    if delta[n].abs() < tol {
        return Err(Error::PivotBreakdown { index: n, sweep: "forward" });
    }

    // b_i: running products of beta and d from the left
    let mut b = vec![S::zero(); n + 1];
    let mut beta_prod = S::one();
    let mut d_prod = S::one();
    for i in 1..=n {
        d_prod = d_prod * d[i];
        b[i] = beta_prod / d_prod;
        if i < n {
            beta_prod = beta_prod * t.beta(i);
        }
    }
    // a_i: running products of beta and delta from the right, over b_n
    let mut a = vec![S::zero(); n + 1];
    let mut tail_beta = S::one();
    let mut tail_delta = S::one();
    for i in (1..=n).rev() {
        tail_delta = tail_delta * delta[i];
        a[i] = tail_beta / (tail_delta * b[n]);
        if i >= 2 {
            tail_beta = tail_beta * t.beta(i - 1);
        }
    }

    SinglePairGenerators::new(a[1..].to_vec(), b[1..].to_vec())
}
