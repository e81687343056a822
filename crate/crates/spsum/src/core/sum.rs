use super::dense::DenseSymmetric;
use super::error::{Error, Result};
use super::scalar::Scalar;
use super::single_pair::{sp_inverse_closed_form, SinglePairGenerators};
use super::tridiag::{solve_tridiagonal, Tridiagonal};

/// Sum of two single-pair matrices: entries a_min b_max + c_min, together
/// with the free parameters x (the b_0 sentinel) and z (the leading
/// continuant seed) and the zero-test tolerance used by every derived
/// factorization.
///
/// Sequences are 1-based with sentinels a_0 = c_0 = 0 and b_0 = x.
#[derive(Clone, Debug, PartialEq)]
pub struct SpSum<S> {
    n: usize,
    a: Vec<S>,
    b: Vec<S>,
    c: Vec<S>,
    x: S,
    z: S,
    tol: S,
}

impl<S: Scalar> SpSum<S> {
    /// `a`, `b`, `c` are natural 0-based sequences of equal length n >= 2.
    pub fn new(a: Vec<S>, b: Vec<S>, c: Vec<S>, x: S, z: S, tol: S) -> Result<Self> {
        let n = a.len();
        if n < 2 || b.len() != n || c.len() != n {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "need three sequences of equal length >= 2, got {n}, {}, {}",
                    b.len(),
                    c.len()
                ),
            });
        }
        if !(tol > S::zero()) || !tol.is_finite() {
            return Err(Error::InvalidArgument {
                reason: "tolerance must be a positive finite number".into(),
            });
        }
        for (name, seq) in [("a", &a), ("b", &b), ("c", &c)] {
            if let Some(i) = seq.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument {
                    reason: format!("sequence {name}[{}] must be finite", i + 1),
                });
            }
        }
        if !x.is_finite() || !z.is_finite() {
            return Err(Error::InvalidArgument {
                reason: "free parameters must be finite".into(),
            });
        }
        if z.abs() < tol {
            return Err(Error::InvalidArgument {
                reason: "free parameter z must be nonzero (|z| >= tol)".into(),
            });
        }
        if (b[0] - x).abs() < tol {
            return Err(Error::InvalidFreeParameter {
                gap: (b[0] - x).abs().to_f64().unwrap_or(0.0),
            });
        }
        let pad = |mut v: Vec<S>, s0: S| {
            v.insert(0, s0);
            v
        };
        Ok(SpSum {
            n,
            a: pad(a, S::zero()),
            b: pad(b, x),
            c: pad(c, S::zero()),
            x,
            z,
            tol,
        })
    }

    /// Convenience constructor with x = 0, z = 1 and the default tolerance.
    pub fn with_defaults(a: Vec<S>, b: Vec<S>, c: Vec<S>) -> Result<Self> {
        SpSum::new(a, b, c, S::zero(), S::one(), S::default_tol())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based accessor; a(0) returns the zero sentinel.
    #[inline]
    pub fn a(&self, i: usize) -> S {
        self.a[i]
    }

    /// 1-based accessor; b(0) returns the free parameter x.
    #[inline]
    pub fn b(&self, i: usize) -> S {
        self.b[i]
    }

    /// 1-based accessor; c(0) returns the zero sentinel.
    #[inline]
    pub fn c(&self, i: usize) -> S {
        self.c[i]
    }

    pub fn x(&self) -> S {
        self.x
    }

    pub fn z(&self) -> S {
        self.z
    }

    pub fn tol(&self) -> S {
        self.tol
    }

    /// Same data with different free parameters (sentinel b_0 re-seeded).
    pub fn with_free_parameters(&self, x: S, z: S) -> Result<Self> {
        SpSum::new(
            self.a[1..].to_vec(),
            self.b[1..].to_vec(),
            self.c[1..].to_vec(),
            x,
            z,
            self.tol,
        )
    }

    /// First addend as a generator pair, when its entries are all nonzero.
    pub fn first_addend(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.a[1..].to_vec(), self.b[1..].to_vec())
    }

    /// Second addend c_min(i,j) as a generator pair (c, ones).
    pub fn second_addend(&self) -> Result<SinglePairGenerators<S>> {
        SinglePairGenerators::new(self.c[1..].to_vec(), vec![S::one(); self.n])
    }
}

/// Builds the dense symmetric matrix with entries
/// a_min(i,j) b_max(i,j) + c_min(i,j).
pub fn spsum_materialize<S: Scalar>(s: &SpSum<S>) -> DenseSymmetric<S> {
    DenseSymmetric::from_upper_fn(s.n(), |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        s.a(i) * s.b(j) + s.c(i)
    })
}

/// Inverts A + C through the identity (A+C)^{-1} = C^{-1} (C^{-1} +
/// A^{-1})^{-1} A^{-1}: both addends are inverted in closed form, the middle
/// factor is applied by a pivoted tridiagonal solve, and the result is
/// symmetrized.
///
/// Requires both addends invertible, so all c_i nonzero and consecutive c_i
/// distinct; much slower than the factored routes but useful as a check.
pub fn invert_sum_baseline<S: Scalar>(s: &SpSum<S>) -> Result<DenseSymmetric<S>> {
    let tol = s.tol();
    let a_inv = sp_inverse_closed_form(&s.first_addend()?, tol)?;
    let c_inv = sp_inverse_closed_form(&s.second_addend()?, tol)?;

    let n = s.n();
    let mid = Tridiagonal::new(
        (1..=n).map(|i| c_inv.alpha(i) + a_inv.alpha(i)).collect(),
        (1..n).map(|i| -(c_inv.beta(i) + a_inv.beta(i))).collect(),
        (1..n).map(|i| -(c_inv.beta(i) + a_inv.beta(i))).collect(),
    )?;
    let w = solve_tridiagonal(&mid, a_inv.to_dense().mat(), tol)?;
    let out = c_inv.to_dense().mat().mul(&w);
    DenseSymmetric::symmetrize(&out)
}
