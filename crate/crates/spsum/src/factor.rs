//! Constructive factorizations of the sum of two single-pair matrices and
//! of symmetric tridiagonal matrices, with the semi-closed-form inverses
//! they induce.
//!
//! All factor objects keep their defining sequences 1-based with sentinel
//! slot 0 and materialize triangular factors lazily from closed-form entry
//! expressions rather than by triangular inversion.

use crate::core::dd::{dd_diff, dd_prod, Dd};
use crate::core::dense::{DenseSymmetric, Mat};
use crate::core::error::{Error, Result};
use crate::core::scalar::Scalar;
use crate::core::single_pair::SinglePairGenerators;
use crate::core::sum::SpSum;
use crate::core::tridiag::{utl_product, SymTridiagonal, Tridiagonal};

/// Factorization A + C = F T F^T with F lower triangular, F(i,j) =
/// b_i - b_{j-1}, and T symmetric tridiagonal.
///
/// The tridiagonal coefficients are evaluated in double-word arithmetic and
/// kept in both rounded and double-word form; the shadows feed the
/// determinant continuant, which is cancellation-prone.
#[derive(Clone, Debug)]
pub struct TriFactorization<S> {
    n: usize,
    b: Vec<S>,
    t: SymTridiagonal<S>,
    beta_last: S,
    alpha_dd: Vec<Dd<S>>,
    beta_dd: Vec<Dd<S>>,
}

impl<S: Scalar> TriFactorization<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The symmetric tridiagonal middle factor.
    pub fn tridiag(&self) -> &SymTridiagonal<S> {
        &self.t
    }

    /// 1-based coefficient beta_i for 1 <= i <= n; the index-n value feeds
    /// only the last diagonal entry, not the matrix off-diagonal.
    pub fn beta(&self, i: usize) -> S {
        if i == self.n {
            self.beta_last
        } else {
            self.t.beta(i)
        }
    }

    /// 1-based diagonal scale entry d_i = b_i - b_{i-1} (with b_0 = x).
    pub fn d(&self, i: usize) -> S {
        self.b[i] - self.b[i - 1]
    }

    /// The lower-triangular outer factor with entries b_i - b_{j-1}.
    pub fn factor(&self) -> Mat<S> {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| {
            if j <= i {
                self.b[i + 1] - self.b[j]
            } else {
                S::zero()
            }
        })
    }

    /// F T F^T, for reconstruction checks.
    pub fn reconstruct(&self) -> Mat<S> {
        let f = self.factor();
        let ft = f.transpose();
        crate::core::tridiag::ltu_product(&f, &Tridiagonal::from_symmetric(&self.t), &ft)
    }
}

/// Factors A + C into F T F^T where F is the lower-triangular cumulative
/// gap matrix of the b sequence and T is symmetric tridiagonal with
///   alpha_1 = (a_1 b_1 + c_1)/(b_1 - x)^2,
///   beta_1  = (a_1 x + c_1)/(b_1 - x)^2,
///   beta_i  = (a_i b_{i-1} - a_{i-1} b_i + c_i - c_{i-1})/(b_i - b_{i-1})^2,
///   alpha_i = beta_i + beta_{i-1}
///             + (a_i - a_{i-1})/(b_i - b_{i-1})
///             - (a_{i-1} - a_{i-2})/(b_{i-1} - b_{i-2}).
pub fn sum_factor_tridiagonal<S: Scalar>(s: &SpSum<S>) -> Result<TriFactorization<S>> {
    let n = s.n();
    let tol = s.tol();
    for i in 2..=n {
        if (s.b(i) - s.b(i - 1)).abs() < tol {
            return Err(Error::SpacingTooClose { index: i });
        }
    }

    let mut alpha_dd = vec![Dd::from(S::zero()); n + 1];
    let mut beta_dd = vec![Dd::from(S::zero()); n + 1];
    let gap1 = dd_diff(s.b(1), s.b(0)).sqr();
    alpha_dd[1] = dd_prod(s.a(1), s.b(1)).add(Dd::from(s.c(1))).div(gap1);
    beta_dd[1] = dd_prod(s.a(1), s.b(0)).add(Dd::from(s.c(1))).div(gap1);
    // slope of a against b over the previous gap
    let mut g_prev = Dd::from(s.a(1)).div(dd_diff(s.b(1), s.b(0)));
    for i in 2..=n {
        let gap = dd_diff(s.b(i), s.b(i - 1));
        let num = dd_prod(s.a(i), s.b(i - 1))
            .sub(dd_prod(s.a(i - 1), s.b(i)))
            .add(dd_diff(s.c(i), s.c(i - 1)));
        beta_dd[i] = num.div(gap.sqr());
        let g = dd_diff(s.a(i), s.a(i - 1)).div(gap);
        alpha_dd[i] = beta_dd[i].add(beta_dd[i - 1]).add(g).sub(g_prev);
        g_prev = g;
    }

    let alpha: Vec<S> = alpha_dd.iter().map(|v| v.value()).collect();
    let mut beta: Vec<S> = (0..n).map(|i| beta_dd[i].value()).collect();
    beta[0] = S::zero();
    let t = SymTridiagonal::from_padded(n, alpha, beta);
    Ok(TriFactorization {
        n,
        b: (0..=n).map(|i| s.b(i)).collect(),
        t,
        beta_last: beta_dd[n].value(),
        alpha_dd,
        beta_dd,
    })
}

/// Determinant of A + C as (b_1 - x)^2 (b_2 - b_1)^2 ... (b_n - b_{n-1})^2
/// times the tridiagonal determinant, the latter by the three-term
/// continuant p_i = alpha_i p_{i-1} - beta_{i-1}^2 p_{i-2} carried in
/// double-word arithmetic.
pub fn det_via_factorization<S: Scalar>(f: &TriFactorization<S>) -> S {
    let n = f.n;
    let mut p_prev = Dd::from(S::one());
    let mut p = f.alpha_dd[1];
    for i in 2..=n {
        let next = f.alpha_dd[i].mul(p).sub(f.beta_dd[i - 1].sqr().mul(p_prev));
        p_prev = p;
        p = next;
    }
    let mut scale = Dd::from(S::one());
    for i in 1..=n {
        scale = scale.mul(dd_diff(f.b[i], f.b[i - 1]).sqr());
    }
    scale.mul(p).value()
}

/// Factorization T = F^{-1} SP(a,b) F^{-T} of an irreducible symmetric
/// tridiagonal matrix, where F is the cumulative gap factor of the produced
/// b sequence.
#[derive(Clone, Debug)]
pub struct SinglePairFactorization<S> {
    n: usize,
    x: S,
    y: S,
    a: Vec<S>,
    b: Vec<S>,
}

impl<S: Scalar> SinglePairFactorization<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> S {
        self.x
    }

    pub fn y(&self) -> S {
        self.y
    }

    /// 1-based produced generator; a(0) = 0.
    pub fn a(&self, i: usize) -> S {
        self.a[i]
    }

    /// 1-based produced generator; b(0) = x.
    pub fn b(&self, i: usize) -> S {
        self.b[i]
    }

    pub fn generators(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.a[1..].to_vec(), self.b[1..].to_vec())
    }

    /// The lower-triangular factor with entries b_i - b_{j-1}.
    pub fn factor(&self) -> Mat<S> {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| {
            if j <= i {
                self.b[i + 1] - self.b[j]
            } else {
                S::zero()
            }
        })
    }
}

/// Rewrites an irreducible symmetric tridiagonal matrix as a congruence of
/// a single-pair matrix, T = F^{-1} SP(a,b) F^{-T}, by the coupled
/// recursion
///   a_1 = x (alpha_1 - beta_1)^2 / beta_1,  b_1 = x alpha_1 / beta_1,
///   b_i = (alpha_i/beta_i) b_{i-1} - (beta_{i-1}/beta_i) b_{i-2},
///   a_i = a_{i-1} - (a_{i-1}/beta_i) S_i + (b_{i-1}/beta_i) S_i^2,
/// with S_i the running sum of (alpha_j - beta_j - beta_{j-1}) and the free
/// parameters b_0 = x != 0 and beta_n = y != 0.
pub fn tridiag_to_single_pair<S: Scalar>(
    t: &SymTridiagonal<S>,
    x: S,
    y: S,
    tol: S,
) -> Result<SinglePairFactorization<S>> {
    let n = t.n();
    if x.abs() < tol {
        return Err(Error::InvalidArgument {
            reason: "free parameter x must be nonzero".into(),
        });
    }
    if y.abs() < tol {
        return Err(Error::InvalidArgument {
            reason: "free parameter y must be nonzero".into(),
        });
    }
    if !t.is_irreducible(tol) {
        return Err(Error::InvalidArgument {
            reason: "matrix must be irreducible (all off-diagonals nonzero)".into(),
        });
    }
    let beta = |i: usize| if i == n { y } else { t.beta(i) };

    let mut a = vec![S::zero(); n + 1];
    let mut b = vec![S::zero(); n + 1];
    b[0] = x;
    let d1 = t.alpha(1) - beta(1);
    a[1] = x * d1 * d1 / beta(1);
    b[1] = x * t.alpha(1) / beta(1);
    if (b[1] - b[0]).abs() < tol {
        return Err(Error::Collision { quantity: "b", index: 1 });
    }
    let mut run = t.alpha(1) - beta(1);
    for i in 2..=n {
        run += t.alpha(i) - beta(i) - beta(i - 1);
        b[i] = (t.alpha(i) / beta(i)) * b[i - 1] - (beta(i - 1) / beta(i)) * b[i - 2];
        a[i] = a[i - 1] - (a[i - 1] / beta(i)) * run + (b[i - 1] / beta(i)) * run * run;
        if (b[i] - b[i - 1]).abs() < tol {
            return Err(Error::Collision { quantity: "b", index: i });
        }
    }
    Ok(SinglePairFactorization { n, x, y, a, b })
}

/// Semi-closed-form inverse of an irreducible symmetric tridiagonal matrix:
/// T^{-1} = F^T W F with F the factor of [`SinglePairFactorization`] and W
/// the symmetric tridiagonal with diagonal lambda and off-diagonal -mu.
#[derive(Clone, Debug)]
pub struct FactoredTridiagInverse<S> {
    sp: SinglePairFactorization<S>,
    lambda: Vec<S>,
    mu: Vec<S>,
}

impl<S: Scalar> FactoredTridiagInverse<S> {
    pub fn n(&self) -> usize {
        self.sp.n()
    }

    /// 1-based diagonal coefficient of W.
    pub fn lambda(&self, i: usize) -> S {
        self.lambda[i]
    }

    /// Off-diagonal coefficient of W for 0 <= i <= n; mu(0) is the seed
    /// 1/(a_1 x) and mu(n) = 0.
    pub fn mu(&self, i: usize) -> S {
        self.mu[i]
    }

    pub fn single_pair(&self) -> &SinglePairFactorization<S> {
        &self.sp
    }

    /// Assembles T^{-1} = F^T W F.
    pub fn to_dense(&self) -> Result<DenseSymmetric<S>> {
        let n = self.n();
        let w = Tridiagonal::new(
            self.lambda[1..].to_vec(),
            (1..n).map(|i| -self.mu[i]).collect(),
            (1..n).map(|i| -self.mu[i]).collect(),
        )?;
        let f = self.sp.factor();
        let ft = f.transpose();
        DenseSymmetric::symmetrize(&utl_product(&ft, &w, &f))
    }
}

/// Inverts an irreducible symmetric tridiagonal matrix through the
/// single-pair rewrite: mu_i = 1/((b_{i+1} - b_i)^2 beta_{i+1}) and
/// lambda_i = (b_{i+1}/b_i) mu_i + (b_{i-1}/b_i) mu_{i-1}, with
/// mu_0 = beta_1/(x (alpha_1 - beta_1))^2 and mu_n = 0.
pub fn tridiag_inverse_factored<S: Scalar>(
    t: &SymTridiagonal<S>,
    x: S,
    y: S,
    tol: S,
) -> Result<FactoredTridiagInverse<S>> {
    let sp = tridiag_to_single_pair(t, x, y, tol)?;
    let n = sp.n();
    let beta = |i: usize| if i == n { y } else { t.beta(i) };

    let seed = t.alpha(1) - beta(1);
    if seed.abs() < tol {
        return Err(Error::DegenerateDenominator { index: 1 });
    }
    let mut mu = vec![S::zero(); n + 1];
    mu[0] = beta(1) / (x * seed * (x * seed));
    for i in 1..n {
        let gap = sp.b(i + 1) - sp.b(i);
        mu[i] = S::one() / (gap * gap * beta(i + 1));
    }
    let mut lambda = vec![S::zero(); n + 1];
    for i in 1..=n {
        if sp.b(i).abs() < tol {
            return Err(Error::DegenerateDenominator { index: i });
        }
        let up = if i < n {
            (sp.b(i + 1) / sp.b(i)) * mu[i]
        } else {
            S::zero()
        };
        lambda[i] = up + (sp.b(i - 1) / sp.b(i)) * mu[i - 1];
    }
    Ok(FactoredTridiagInverse { sp, lambda, mu })
}

/// Factorization T = G SP(as, bs) G^T where the generators carry the
/// running product of the off-diagonal coefficients and G is the tri-banded
/// lower factor assembled from unit-bidiagonal, diagonal, and cumulative
/// pieces. Avoids the per-step divisions of the plain rewrite.
#[derive(Clone, Debug)]
pub struct ScaledSinglePairFactorization<S> {
    n: usize,
    x: S,
    y: S,
    a_scaled: Vec<S>,
    b_scaled: Vec<S>,
    beta: Vec<S>,
}

impl<S: Scalar> ScaledSinglePairFactorization<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Free parameters carried over from the originating sum.
    pub fn free_parameters(&self) -> (S, S) {
        (self.x, self.y)
    }

    /// 1-based scaled generator (the plain generator times the running
    /// product beta_1 ... beta_i).
    pub fn a_scaled(&self, i: usize) -> S {
        self.a_scaled[i]
    }

    /// 1-based scaled generator; b_scaled(0) = x.
    pub fn b_scaled(&self, i: usize) -> S {
        self.b_scaled[i]
    }

    pub fn generators(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.a_scaled[1..].to_vec(), self.b_scaled[1..].to_vec())
    }

    /// 1-based diagonal entry of the scale diag(b_i - beta_i b_{i-1}) over
    /// the scaled b sequence.
    pub fn d_scaled(&self, i: usize) -> S {
        self.b_scaled[i] - self.beta[i] * self.b_scaled[i - 1]
    }

    /// The tri-banded lower factor G with rows
    ///   G(i,i) = 1/D_i,
    ///   G(i,i-1) = -beta_i/D_i - 1/D_{i-1},
    ///   G(i,i-2) = beta_{i-1}/D_{i-1},
    /// where D_i = b_i - beta_i b_{i-1} over the scaled sequence.
    pub fn factor(&self) -> Mat<S> {
        let n = self.n;
        let d = |i: usize| self.d_scaled(i);
        Mat::from_fn(n, n, |i0, j0| {
            let (i, j) = (i0 + 1, j0 + 1);
            if i == j {
                S::one() / d(i)
            } else if i == j + 1 {
                -self.beta[i] / d(i) - S::one() / d(i - 1)
            } else if i == j + 2 {
                self.beta[i - 1] / d(i - 1)
            } else {
                S::zero()
            }
        })
    }
}

/// Division-free variant of the tridiagonal-to-single-pair rewrite: the
/// produced pair absorbs the running product of off-diagonal coefficients,
///   as_1 = x (alpha_1 - beta_1)^2,  bs_1 = x alpha_1,  bs_0 = x,
///   as_i = beta_i as_{i-1} - as_{i-1} S_i + bs_{i-1} S_i^2,
///   bs_i = alpha_i bs_{i-1} - beta_{i-1}^2 bs_{i-2},
/// so bs_i is x times the determinant of the leading i-by-i submatrix.
pub fn tridiag_to_single_pair_scaled<S: Scalar>(
    t: &SymTridiagonal<S>,
    x: S,
    y: S,
    tol: S,
) -> Result<ScaledSinglePairFactorization<S>> {
    let n = t.n();
    if x.abs() < tol {
        return Err(Error::InvalidArgument {
            reason: "free parameter x must be nonzero".into(),
        });
    }
    if y.abs() < tol {
        return Err(Error::InvalidArgument {
            reason: "free parameter y must be nonzero".into(),
        });
    }
    if !t.is_irreducible(tol) {
        return Err(Error::InvalidArgument {
            reason: "matrix must be irreducible (all off-diagonals nonzero)".into(),
        });
    }
    let mut beta: Vec<S> = (0..n).map(|i| t.beta(i)).collect();
    beta.push(y);

    let mut a = vec![S::zero(); n + 1];
    let mut b = vec![S::zero(); n + 1];
    b[0] = x;
    let d1 = t.alpha(1) - beta[1];
    a[1] = x * d1 * d1;
    b[1] = x * t.alpha(1);
    if (b[1] - beta[1] * b[0]).abs() < tol {
        return Err(Error::Collision { quantity: "scaled b", index: 1 });
    }
    let mut run = t.alpha(1) - beta[1];
    for i in 2..=n {
        run += t.alpha(i) - beta[i] - beta[i - 1];
        a[i] = beta[i] * a[i - 1] - a[i - 1] * run + b[i - 1] * run * run;
        b[i] = t.alpha(i) * b[i - 1] - beta[i - 1] * beta[i - 1] * b[i - 2];
        if (b[i] - beta[i] * b[i - 1]).abs() < tol {
            return Err(Error::Collision { quantity: "scaled b", index: i });
        }
    }
    Ok(ScaledSinglePairFactorization { n, x, y, a_scaled: a, b_scaled: b, beta })
}

/// Factorization A + C = F M F^T with M a single-pair matrix on the
/// generalized-continuant pair (u, v) and F lower triangular with constant
/// columns delta_j - delta_{j+1} below the diagonal entry delta_j.
#[derive(Clone, Debug)]
pub struct SumFactorization<S> {
    n: usize,
    u: Vec<S>,
    v: Vec<S>,
    delta: Vec<S>,
}

impl<S: Scalar> SumFactorization<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based continuant pair member; u(0) = 0.
    pub fn u(&self, i: usize) -> S {
        self.u[i]
    }

    /// 1-based continuant pair member; v(0) = z.
    pub fn v(&self, i: usize) -> S {
        self.v[i]
    }

    /// 1-based column scale delta_i = (b_i - b_{i-1})/(v_i - v_{i-1}).
    pub fn delta(&self, i: usize) -> S {
        self.delta[i]
    }

    pub fn generators(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.u[1..].to_vec(), self.v[1..].to_vec())
    }

    /// The lower-triangular factor: diagonal delta_i, and delta_j -
    /// delta_{j+1} everywhere below it in column j.
    pub fn factor(&self) -> Mat<S> {
        let n = self.n;
        Mat::from_fn(n, n, |i0, j0| {
            let (i, j) = (i0 + 1, j0 + 1);
            if i == j {
                self.delta[i]
            } else if j < i {
                self.delta[j] - self.delta[j + 1]
            } else {
                S::zero()
            }
        })
    }
}

/// Factors A + C = F M F^T through the coupled recursion on (u, v):
///   u_1 = z a_1^2/(a_1 x + c_1),  v_1 = z (a_1 b_1 + c_1)/(a_1 x + c_1),
///   u_i = u_{i-1} - phi_i (u_{i-1} g_i - v_{i-1} g_i^2),
///   v_i = v_{i-1} + phi_i (v_{i-1} (g_i - g_{i-1})
///         + (v_{i-1} - v_{i-2}) w_{i-1}/(b_{i-1} - b_{i-2})^2),
/// where w_i = a_i b_{i-1} - a_{i-1} b_i + c_i - c_{i-1}, phi_i =
/// (b_i - b_{i-1})^2 / w_i, and g_i = (a_i - a_{i-1})/(b_i - b_{i-1}).
///
/// The recursion runs in double-word arithmetic and every stored value is
/// rounded on exit; the column scales divide by consecutive-v differences,
/// which cancel catastrophically when carried in working precision.
pub fn sum_factor_single_pair<S: Scalar>(s: &SpSum<S>) -> Result<SumFactorization<S>> {
    let n = s.n();
    let tol = s.tol();
    let seed = dd_prod(s.a(1), s.x()).add(Dd::from(s.c(1)));
    if seed.value().abs() < tol {
        return Err(Error::InvalidArgument {
            reason: "free parameter x must satisfy a_1 x + c_1 != 0".into(),
        });
    }
    for i in 2..=n {
        if (s.b(i) - s.b(i - 1)).abs() < tol {
            return Err(Error::SpacingTooClose { index: i });
        }
    }

    let z = Dd::from(s.z());
    let mut u = vec![Dd::from(S::zero()); n + 1];
    let mut v = vec![Dd::from(S::zero()); n + 1];
    v[0] = z;
    u[1] = dd_prod(s.a(1), s.a(1)).mul(z).div(seed);
    v[1] = dd_prod(s.a(1), s.b(1)).add(Dd::from(s.c(1))).mul(z).div(seed);
    if v[1].sub(v[0]).value().abs() < tol {
        return Err(Error::Collision { quantity: "v", index: 1 });
    }
    let w = |i: usize| {
        dd_prod(s.a(i), s.b(i - 1))
            .sub(dd_prod(s.a(i - 1), s.b(i)))
            .add(dd_diff(s.c(i), s.c(i - 1)))
    };
    let g = |i: usize| dd_diff(s.a(i), s.a(i - 1)).div(dd_diff(s.b(i), s.b(i - 1)));
    for i in 2..=n {
        let wi = w(i);
        if wi.value().abs() < tol {
            return Err(Error::DegenerateDenominator { index: i });
        }
        let gap = dd_diff(s.b(i), s.b(i - 1));
        let phi = gap.sqr().div(wi);
        let gi = g(i);
        u[i] = u[i - 1].sub(phi.mul(u[i - 1].mul(gi).sub(v[i - 1].mul(gi.sqr()))));
        let prev_gap = dd_diff(s.b(i - 1), s.b(i - 2));
        let carry = v[i - 1].sub(v[i - 2]).mul(w(i - 1).div(prev_gap.sqr()));
        v[i] = v[i - 1].add(phi.mul(v[i - 1].mul(gi.sub(g(i - 1))).add(carry)));
        if v[i].sub(v[i - 1]).value().abs() < tol {
            return Err(Error::Collision { quantity: "v", index: i });
        }
    }
    let mut delta = vec![S::zero(); n + 1];
    for i in 1..=n {
        delta[i] = dd_diff(s.b(i), s.b(i - 1)).div(v[i].sub(v[i - 1])).value();
    }
    Ok(SumFactorization {
        n,
        u: u.iter().map(|d| d.value()).collect(),
        v: v.iter().map(|d| d.value()).collect(),
        delta,
    })
}

/// Factorization A + C = F Ms F^T on the scaled continuant pair (us, vs),
/// where vs carries the running product of the beta coefficients and F is
/// the lower factor with column entries delta_j - beta_{j+1} delta_{j+1}.
#[derive(Clone, Debug)]
pub struct ScaledSumFactorization<S> {
    n: usize,
    u_scaled: Vec<S>,
    v_scaled: Vec<S>,
    beta: Vec<S>,
    delta: Vec<S>,
}

impl<S: Scalar> ScaledSumFactorization<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based scaled continuant pair member; u_scaled(0) = 0.
    pub fn u_scaled(&self, i: usize) -> S {
        self.u_scaled[i]
    }

    /// 1-based scaled continuant; v_scaled(0) = z and v_scaled(i) is z
    /// times the leading i-by-i determinant over the squared gap products.
    pub fn v_scaled(&self, i: usize) -> S {
        self.v_scaled[i]
    }

    /// 1-based coupling coefficient beta_i for 1 <= i <= n.
    pub fn beta(&self, i: usize) -> S {
        self.beta[i]
    }

    /// 1-based column scale delta_i = (b_i - b_{i-1})/(vs_i - beta_i vs_{i-1}).
    pub fn delta(&self, i: usize) -> S {
        self.delta[i]
    }

    pub fn generators(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.u_scaled[1..].to_vec(), self.v_scaled[1..].to_vec())
    }

    /// The lower-triangular factor: diagonal delta_i, and delta_j -
    /// beta_{j+1} delta_{j+1} everywhere below it in column j.
    pub fn factor(&self) -> Mat<S> {
        let n = self.n;
        Mat::from_fn(n, n, |i0, j0| {
            let (i, j) = (i0 + 1, j0 + 1);
            if i == j {
                self.delta[i]
            } else if j < i {
                self.delta[j] - self.beta[j + 1] * self.delta[j + 1]
            } else {
                S::zero()
            }
        })
    }
}

/// Division-light counterpart of [`sum_factor_single_pair`]: the produced
/// pair absorbs the running product of the beta coefficients,
///   us_1 = z a_1^2/(b_1 - x)^2,  vs_1 = z (a_1 b_1 + c_1)/(b_1 - x)^2,
///   us_i = beta_i us_{i-1} - us_{i-1} g_i + vs_{i-1} g_i^2,
///   vs_i = (B1_i - B2_i) vs_{i-1} - beta_{i-1}^2 vs_{i-2},
/// with beta_i = w_i/(b_i - b_{i-1})^2 and B1, B2 the two displayed
/// difference quotients whose difference equals the tridiagonal diagonal.
///
/// The three-term vs recursion is a generalized continuant and loses
/// relative accuracy in working precision whenever it passes near zero, so
/// it runs in double-word arithmetic like the determinant continuant; all
/// stored values are rounded on exit.
pub fn sum_factor_single_pair_scaled<S: Scalar>(s: &SpSum<S>) -> Result<ScaledSumFactorization<S>> {
    let n = s.n();
    let tol = s.tol();
    for i in 2..=n {
        if (s.b(i) - s.b(i - 1)).abs() < tol {
            return Err(Error::SpacingTooClose { index: i });
        }
    }

    let mut beta = vec![Dd::from(S::zero()); n + 1];
    for i in 1..=n {
        let gap = dd_diff(s.b(i), s.b(i - 1));
        beta[i] = dd_prod(s.a(i), s.b(i - 1))
            .sub(dd_prod(s.a(i - 1), s.b(i)))
            .add(dd_diff(s.c(i), s.c(i - 1)))
            .div(gap.sqr());
    }

    let z = Dd::from(s.z());
    let mut u = vec![Dd::from(S::zero()); n + 1];
    let mut v = vec![Dd::from(S::zero()); n + 1];
    v[0] = z;
    let gap1 = dd_diff(s.b(1), s.b(0)).sqr();
    u[1] = dd_prod(s.a(1), s.a(1)).mul(z).div(gap1);
    v[1] = dd_prod(s.a(1), s.b(1)).add(Dd::from(s.c(1))).mul(z).div(gap1);
    if v[1].sub(beta[1].mul(v[0])).value().abs() < tol {
        return Err(Error::Collision { quantity: "scaled v", index: 1 });
    }
    for i in 2..=n {
        let gap = dd_diff(s.b(i), s.b(i - 1));
        let prev_gap = dd_diff(s.b(i - 1), s.b(i - 2));
        let gi = dd_diff(s.a(i), s.a(i - 1)).div(gap);
        u[i] = beta[i].mul(u[i - 1]).sub(u[i - 1].mul(gi)).add(v[i - 1].mul(gi.sqr()));
        let twice_prev = s.a(i - 1) + s.a(i - 1);
        let b1 = dd_prod(s.a(i), s.b(i))
            .sub(dd_prod(twice_prev, s.b(i)))
            .add(dd_prod(s.a(i - 1), s.b(i - 1)))
            .add(dd_diff(s.c(i), s.c(i - 1)))
            .div(gap.sqr());
        let b2 = dd_prod(s.a(i - 1), s.b(i - 1))
            .sub(dd_prod(twice_prev, s.b(i - 2)))
            .add(dd_prod(s.a(i - 2), s.b(i - 2)))
            .sub(dd_diff(s.c(i - 1), s.c(i - 2)))
            .div(prev_gap.sqr());
        v[i] = b1.sub(b2).mul(v[i - 1]).sub(beta[i - 1].sqr().mul(v[i - 2]));
        if v[i].sub(beta[i].mul(v[i - 1])).value().abs() < tol {
            return Err(Error::Collision { quantity: "scaled v", index: i });
        }
    }
    let mut delta = vec![S::zero(); n + 1];
    for i in 1..=n {
        delta[i] = dd_diff(s.b(i), s.b(i - 1))
            .div(v[i].sub(beta[i].mul(v[i - 1])))
            .value();
    }
    Ok(ScaledSumFactorization {
        n,
        u_scaled: u.iter().map(|d| d.value()).collect(),
        v_scaled: v.iter().map(|d| d.value()).collect(),
        beta: beta.iter().map(|d| d.value()).collect(),
        delta,
    })
}

/// Which produced pair drives the semi-closed-form inverse of A + C.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumInverseVariant {
    /// The (u, v) pair with per-step normalization.
    Plain,
    /// The scaled pair that absorbs the beta running product.
    Scaled,
}

/// Semi-closed-form inverse of A + C: (A+C)^{-1} = G^T W G with W the
/// symmetric tridiagonal on (lambda, -mu) and G the inverse of the
/// factorization's lower factor, materialized in closed form.
#[derive(Clone, Debug)]
pub struct FactoredSumInverse<S> {
    n: usize,
    variant: SumInverseVariant,
    lambda: Vec<S>,
    mu: Vec<S>,
    g: Mat<S>,
}

impl<S: Scalar> FactoredSumInverse<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> SumInverseVariant {
        self.variant
    }

    /// 1-based diagonal coefficient of W.
    pub fn lambda(&self, i: usize) -> S {
        self.lambda[i]
    }

    /// Off-diagonal coefficient of W, 0 <= i <= n (mu(0) is the seed,
    /// mu(n) = 0).
    pub fn mu(&self, i: usize) -> S {
        self.mu[i]
    }

    /// The lower-triangular factor G.
    pub fn lower_factor(&self) -> &Mat<S> {
        &self.g
    }

    /// Assembles (A+C)^{-1} = G^T W G.
    pub fn to_dense(&self) -> Result<DenseSymmetric<S>> {
        let n = self.n;
        let w = Tridiagonal::new(
            self.lambda[1..].to_vec(),
            (1..n).map(|i| -self.mu[i]).collect(),
            (1..n).map(|i| -self.mu[i]).collect(),
        )?;
        let gt = self.g.transpose();
        DenseSymmetric::symmetrize(&utl_product(&gt, &w, &self.g))
    }
}

/// Inverts A + C through either produced pair.
///
/// Plain variant: mu_i = ((b_{i+1}-b_i)/(v_{i+1}-v_i))^2 / w_{i+1} with
/// mu_0 = (a_1 x + c_1)/(a_1 z)^2; scaled variant: mu_i =
/// 1/(vs_{i+1} - beta_{i+1} vs_i)^2 with mu_0 = ((b_1 - x)/(a_1 z))^2.
/// Both use lambda_i = (v_{i+1}/v_i) mu_i + (v_{i-1}/v_i) mu_{i-1} over
/// their own v sequence, and require every v_i nonzero.
pub fn sum_inverse_factored<S: Scalar>(
    s: &SpSum<S>,
    variant: SumInverseVariant,
) -> Result<FactoredSumInverse<S>> {
    let n = s.n();
    let tol = s.tol();
    if s.a(1).abs() < tol {
        return Err(Error::DegenerateDenominator { index: 1 });
    }
    match variant {
        SumInverseVariant::Plain => {
            let f = sum_factor_single_pair(s)?;
            let mut mu = vec![S::zero(); n + 1];
            mu[0] = (s.a(1) * s.x() + s.c(1)) / (s.a(1) * s.z() * (s.a(1) * s.z()));
            for i in 1..n {
                let w = s.a(i + 1) * s.b(i) - s.a(i) * s.b(i + 1) + s.c(i + 1) - s.c(i);
                if w.abs() < tol {
                    return Err(Error::DegenerateDenominator { index: i + 1 });
                }
                let r = (s.b(i + 1) - s.b(i)) / (f.v(i + 1) - f.v(i));
                mu[i] = r * r / w;
            }
            let lambda = assemble_lambda(n, tol, &mu, |i| f.v(i))?;
            let g = Mat::from_fn(n, n, |i0, j0| {
                let (i, j) = (i0 + 1, j0 + 1);
                if i == j {
                    S::one() / f.delta(i)
                } else if j < i {
                    S::one() / f.delta(j) - S::one() / f.delta(j + 1)
                } else {
                    S::zero()
                }
            });
            Ok(FactoredSumInverse { n, variant, lambda, mu, g })
        }
        SumInverseVariant::Scaled => {
            let f = sum_factor_single_pair_scaled(s)?;
            let mut mu = vec![S::zero(); n + 1];
            let r0 = (s.b(1) - s.x()) / (s.a(1) * s.z());
            mu[0] = r0 * r0;
            for i in 1..n {
                let d = f.v_scaled(i + 1) - f.beta(i + 1) * f.v_scaled(i);
                mu[i] = S::one() / (d * d);
            }
            let lambda = assemble_lambda(n, tol, &mu, |i| f.v_scaled(i))?;
            // row scan with backward running products of beta
            let g = Mat::from_fn(n, n, |i0, j0| {
                let (i, j) = (i0 + 1, j0 + 1);
                if i == j {
                    S::one() / f.delta(i)
                } else if j < i {
                    let mut tail = S::one();
                    for k in (j + 2)..=i {
                        tail = tail * f.beta(k);
                    }
                    (f.beta(j + 1) * tail) / f.delta(j) - tail / f.delta(j + 1)
                } else {
                    S::zero()
                }
            });
            Ok(FactoredSumInverse { n, variant, lambda, mu, g })
        }
    }
}

fn assemble_lambda<S: Scalar>(
    n: usize,
    tol: S,
    mu: &[S],
    v: impl Fn(usize) -> S,
) -> Result<Vec<S>> {
    let mut lambda = vec![S::zero(); n + 1];
    for i in 1..=n {
        if v(i).abs() < tol {
            return Err(Error::LowContinuant { index: i });
        }
        let up = if i < n { (v(i + 1) / v(i)) * mu[i] } else { S::zero() };
        lambda[i] = up + (v(i - 1) / v(i)) * mu[i - 1];
    }
    Ok(lambda)
}
