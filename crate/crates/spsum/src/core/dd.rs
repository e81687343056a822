//! Compensated (double-word) arithmetic used inside cancellation-prone
//! continuant recursions.
//!
//! The three-term recursions behind determinants and inverse assembly can
//! lose all relative accuracy when the recursion value collapses through a
//! near-singular region while its inputs stay O(1). Evaluating just those
//! recursions in double-word arithmetic and rounding the results back keeps
//! every stored value an ordinarily-rounded scalar while restoring relative
//! accuracy of the underlying rational function of the inputs.

use super::scalar::Scalar;

/// Unevaluated sum `hi + lo` with `|lo|` at most one ulp of `hi`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd<S> {
    pub hi: S,
    pub lo: S,
}

#[inline]
fn two_sum<S: Scalar>(a: S, b: S) -> (S, S) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum<S: Scalar>(a: S, b: S) -> (S, S) {
    let s = a + b;
    (s, b - (s - a))
}

// mul_add is a fused single-rounding operation for f32/f64, so this error
// term is exact.
#[inline]
fn two_prod<S: Scalar>(a: S, b: S) -> (S, S) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<S: Scalar> Dd<S> {
    #[inline]
    pub fn from(v: S) -> Self {
        Dd { hi: v, lo: S::zero() }
    }

    #[inline]
    pub fn value(self) -> S {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Self {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self.mul(self)
    }

    #[inline]
    pub fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.value() / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

/// `a * b` as a double-word from two plain scalars.
#[inline]
pub(crate) fn dd_prod<S: Scalar>(a: S, b: S) -> Dd<S> {
    let (hi, lo) = two_prod(a, b);
    Dd { hi, lo }
}

/// `a - b` as a double-word from two plain scalars.
#[inline]
pub(crate) fn dd_diff<S: Scalar>(a: S, b: S) -> Dd<S> {
    let (hi, lo) = two_sum(a, -b);
    Dd { hi, lo }
}
