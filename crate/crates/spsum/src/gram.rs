//! Gram matrices of ramp-function families: their single-pair-sum
//! generators, the specialized tridiagonal and continuant recursions the
//! generators induce, a dense closed-form inverse, and the exact integer
//! coefficient tables of the continuant polynomials.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::core::dense::DenseSymmetric;
use crate::core::error::{Error, Result};
use crate::core::scalar::Scalar;
use crate::core::sum::SpSum;
use crate::core::tridiag::SymTridiagonal;

/// Family of ramp functions max(0, k_i - t) described by strictly
/// increasing shifts 0 < k_1 < ... < k_n <= 1.
///
/// The shifts are stored 1-based with the sentinel k_0 = 0, so gaps
/// x_i = k_i - k_{i-1} are defined down to i = 1.
#[derive(Clone, Debug)]
pub struct RampSystem<S> {
    n: usize,
    k: Vec<S>,
}

impl<S: Scalar> RampSystem<S> {
    /// `k` is the natural 0-based shift sequence of length n >= 2.
    pub fn new(k: Vec<S>) -> Result<Self> {
        let n = k.len();
        if n < 2 {
            return Err(Error::InvalidArgument {
                reason: format!("need at least 2 shifts, got {n}"),
            });
        }
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument {
                reason: "shifts must be finite".into(),
            });
        }
        if !(k[0] > S::zero()) {
            return Err(Error::InvalidArgument {
                reason: "first shift must be positive".into(),
            });
        }
        if !(k[n - 1] <= S::one()) {
            return Err(Error::InvalidArgument {
                reason: "last shift must not exceed 1".into(),
            });
        }
        if let Some(i) = (1..n).find(|&i| !(k[i] > k[i - 1])) {
            return Err(Error::InvalidArgument {
                reason: format!("shifts must strictly increase, violated at {}", i + 1),
            });
        }
        let mut padded = k;
        padded.insert(0, S::zero());
        Ok(RampSystem { n, k: padded })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based shift; k(0) = 0.
    #[inline]
    pub fn k(&self, i: usize) -> S {
        self.k[i]
    }

    /// Gap x_i = k_i - k_{i-1}, positive for 1 <= i <= n.
    #[inline]
    pub fn gap(&self, i: usize) -> S {
        self.k[i] - self.k[i - 1]
    }
}

/// Generator triple whose single-pair sum is six times the Gram matrix of
/// the ramp family: a_i = 3 k_i^2, b_i = k_i, c_i = -k_i^3, with the
/// returned scale 1/6 mapping the sum back to the Gram entries
/// k_min^2 k_max / 2 - k_min^3 / 6.
pub fn gram_build<S: Scalar>(r: &RampSystem<S>) -> Result<(SpSum<S>, S)> {
    let three = S::c(3.0);
    let a = (1..=r.n()).map(|i| three * r.k(i) * r.k(i)).collect();
    let b = (1..=r.n()).map(|i| r.k(i)).collect();
    let c = (1..=r.n()).map(|i| -(r.k(i) * r.k(i) * r.k(i))).collect();
    let s = SpSum::with_defaults(a, b, c)?;
    Ok((s, S::one() / S::c(6.0)))
}

/// Tridiagonal factor coefficients of 6G, which collapse to gap sums:
/// alpha_1 = 2 k_1, alpha_i = 2 (k_i - k_{i-2}), beta_i = -(k_i - k_{i-1}).
pub fn gram_tridiag<S: Scalar>(r: &RampSystem<S>) -> SymTridiagonal<S> {
    let n = r.n();
    let two = S::c(2.0);
    let mut alpha = vec![S::zero(); n + 1];
    let mut beta = vec![S::zero(); n];
    alpha[1] = two * r.k(1);
    for i in 2..=n {
        alpha[i] = two * (r.k(i) - r.k(i - 2));
    }
    for i in 1..n {
        beta[i] = -r.gap(i);
    }
    SymTridiagonal::from_padded(n, alpha, beta)
}

/// Continuants of the Gram tridiagonal factor, v_0 = 1, v_1 = 2 k_1,
/// v_i = 2 (x_i + x_{i-1}) v_{i-1} - x_{i-1}^2 v_{i-2}.
///
/// All recursion coefficients are positive for a valid ramp system, so
/// plain evaluation does not cancel; entries are checked against `tol`.
fn ramp_continuants<S: Scalar>(r: &RampSystem<S>, tol: S) -> Result<Vec<S>> {
    let n = r.n();
    let two = S::c(2.0);
    let mut v = vec![S::one(); n + 1];
    v[1] = two * r.k(1);
    for i in 2..=n {
        v[i] = two * (r.gap(i) + r.gap(i - 1)) * v[i - 1] - r.gap(i - 1) * r.gap(i - 1) * v[i - 2];
    }
    if let Some(i) = (1..=n).find(|&i| v[i].abs() < tol) {
        return Err(Error::LowContinuant { index: i });
    }
    Ok(v)
}

/// Gap products, continuants, and the two coefficient families entering the
/// closed-form inverse of 6G.
struct RampInverseInputs<S> {
    n: usize,
    x: Vec<S>,
    v: Vec<S>,
    // phi[i] multiplies the shared tail sums, psi[j] the inner-edge terms
    phi: Vec<S>,
    psi: Vec<S>,
}

impl<S: Scalar> RampInverseInputs<S> {
    fn new(r: &RampSystem<S>, v: Vec<S>) -> Self {
        let n = r.n();
        let x: Vec<S> = (0..=n)
            .map(|i| if i == 0 { S::zero() } else { r.gap(i) })
            .collect();
        let mut phi = vec![S::zero(); n.max(1)];
        let mut psi = vec![S::zero(); n.max(1)];
        for i in 1..n {
            phi[i] = v[i + 1] / x[i + 1] + (x[i + 1] + x[i]) / x[i] * v[i] + x[i + 1] * v[i - 1];
            psi[i] = (S::one() / x[i + 1] + S::one() / x[i]) * v[i] + v[i - 1];
        }
        RampInverseInputs { n, x, v, phi, psi }
    }

    /// Sum over k of (x_{j+2} ... x_{k-1})^2 / (v_k v_{k-1}), k = j+2 .. n.
    fn tail_sum(&self, j: usize) -> S {
        let mut acc = S::zero();
        let mut tau = S::one();
        for k in (j + 2)..=self.n {
            acc += tau * tau / (self.v[k] * self.v[k - 1]);
            tau = tau * self.x[k];
        }
        acc
    }

    /// Column j of the inverse of 6G, entries i = 1..=j as a 0-based vec.
    fn column(&self, j: usize) -> Vec<S> {
        let n = self.n;
        let (x, v) = (&self.x, &self.v);
        let mut col = vec![S::zero(); j];
        let tail = self.tail_sum(j);

        let mut diag = v[j - 1] / (x[j] * x[j] * v[j]);
        if j + 2 <= n {
            diag += self.phi[j] * self.phi[j] * tail;
        }
        if j < n {
            diag += self.psi[j] * self.psi[j] / (v[j + 1] * v[j]);
        }
        col[j - 1] = diag;

        // running gap products over the three index ranges that appear in
        // the off-diagonal terms; the lower bound moves with i
        let mut sign = -S::one();
        let mut prod_a = if j + 1 <= n { x[j + 1] } else { S::one() };
        let mut prod_b = S::one();
        let mut prod_c = S::one();
        for i in (1..j).rev() {
            let mut entry = S::zero();
            if j + 2 <= n {
                entry += sign * self.phi[i] * self.phi[j] * prod_a * tail;
            }
            if i < j - 1 {
                entry += sign * self.phi[i] * prod_b / (x[j] * v[j]);
            }
            if j < n {
                entry += sign * self.phi[i] * self.psi[j] * prod_c / (v[j + 1] * v[j]);
            }
            if i == j - 1 {
                entry -= self.psi[j - 1] / (x[j] * v[j]);
            }
            col[i - 1] = entry;
            prod_a = prod_a * x[i + 1];
            prod_c = prod_c * x[i + 1];
            if i < j - 1 {
                prod_b = prod_b * x[i + 1];
            }
            sign = -sign;
        }
        col
    }
}

/// Dense inverse of the Gram matrix itself, assembled from the specialized
/// closed form for (6G)^{-1} and rescaled by 6.
pub fn gram_inverse<S: Scalar>(r: &RampSystem<S>) -> Result<DenseSymmetric<S>> {
    let n = r.n();
    let v = ramp_continuants(r, S::default_tol())?;
    let inputs = RampInverseInputs::new(r, v);
    let columns: Vec<Vec<S>> = (1..=n).map(|j| inputs.column(j)).collect();
    let six = S::c(6.0);
    Ok(DenseSymmetric::from_upper_fn(n, |i, j| {
        six * columns[j][i]
    }))
}

/// Largest continuant-polynomial degree whose integer coefficients are
/// built; gamma <= 2^16 there, far inside i64 range, and table sizes stay
/// in the tens of thousands of terms.
pub const GAMMA_DEGREE_CAP: usize = 16;

/// Homogeneous integer polynomial expressing the continuant v_i in the
/// gaps x_1 .. x_i.
///
/// Terms map exponent tuples (p_1 .. p_i) with entries in {0,1,2} and
/// sum i to their nonzero integer coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuantPolynomial {
    degree: usize,
    terms: BTreeMap<Vec<u8>, i64>,
}

impl ContinuantPolynomial {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, i64> {
        &self.terms
    }

    /// Evaluates the polynomial at the gap values `gaps[0..degree]`.
    pub fn eval<S: Scalar>(&self, gaps: &[S]) -> S {
        assert!(
            gaps.len() >= self.degree,
            "need {} gap values, got {}",
            self.degree,
            gaps.len()
        );
        let mut acc = S::zero();
        for (p, &g) in &self.terms {
            let mut term = S::c(g as f64);
            for (&e, &gap) in p.iter().zip(gaps) {
                for _ in 0..e {
                    term = term * gap;
                }
            }
            acc += term;
        }
        acc
    }

    /// One term per line, "p_1 ... p_i gamma", tuples in lexicographic
    /// order.
    pub fn export_rows(&self) -> String {
        let mut out = String::new();
        for (p, g) in &self.terms {
            for e in p {
                let _ = write!(out, "{e} ");
            }
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

/// Exact integer coefficient table of the degree-`degree` continuant
/// polynomial, built by the term recurrence: appending exponent 1 doubles a
/// coefficient, appending 0 adds the doubled increment-by-one source and,
/// for tuples ending (2, 0), subtracts the two-degrees-lower coefficient;
/// tuples ending in 2 never occur.
pub fn gamma_coefficients(degree: usize) -> Result<ContinuantPolynomial> {
    if degree == 0 {
        return Err(Error::InvalidArgument {
            reason: "polynomial degree must be at least 1".into(),
        });
    }
    if degree > GAMMA_DEGREE_CAP {
        return Err(Error::CapExceeded {
            degree,
            cap: GAMMA_DEGREE_CAP,
        });
    }
    let mut older: BTreeMap<Vec<u8>, i64> = BTreeMap::from([(vec![], 1)]);
    let mut table: BTreeMap<Vec<u8>, i64> = BTreeMap::from([(vec![1], 2)]);
    for _ in 1..degree {
        let mut next: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
        for (p, &g) in &table {
            let mut t = p.clone();
            t.push(1);
            *next.entry(t).or_insert(0) += 2 * g;
            if *p.last().unwrap() < 2 {
                let mut t = p.clone();
                *t.last_mut().unwrap() += 1;
                t.push(0);
                *next.entry(t).or_insert(0) += 2 * g;
            }
        }
        for (p, &g) in &older {
            let mut t = p.clone();
            t.push(2);
            t.push(0);
            *next.entry(t).or_insert(0) -= g;
        }
        next.retain(|_, g| *g != 0);
        older = std::mem::replace(&mut table, next);
    }
    Ok(ContinuantPolynomial {
        degree,
        terms: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::dense::Mat;
    use crate::core::sum::spsum_materialize;
    use crate::core::tridiag::{ltu_product, Tridiagonal};
    use crate::factor::sum_factor_tridiagonal;
    use crate::inverse::{sp_sum_inverse, unpack};

    fn thirds() -> RampSystem<f64> {
        RampSystem::new(vec![1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap()
    }

    fn eight_knots() -> RampSystem<f64> {
        RampSystem::new(vec![0.07, 0.19, 0.26, 0.40, 0.52, 0.61, 0.83, 0.97]).unwrap()
    }

    // multiples of 1/128, so 3k^2 and k^3 are exact and the coefficient
    // identity can be checked at the ulp level
    fn dyadic_knots() -> RampSystem<f64> {
        let k = [9.0, 24.0, 33.0, 51.0, 66.0, 78.0, 106.0, 124.0];
        RampSystem::new(k.iter().map(|v| v / 128.0).collect()).unwrap()
    }

    #[test]
    fn ramp_system_rejects_bad_shift_sequences() {
        assert!(RampSystem::<f64>::new(vec![0.5]).is_err());
        assert!(RampSystem::new(vec![0.5, 0.5]).is_err());
        assert!(RampSystem::new(vec![0.5, 0.4]).is_err());
        assert!(RampSystem::new(vec![0.0, 0.5]).is_err());
        assert!(RampSystem::new(vec![-0.5, 0.5]).is_err());
        assert!(RampSystem::new(vec![0.5, 1.5]).is_err());
        assert!(RampSystem::new(vec![0.5, f64::NAN]).is_err());
        assert!(RampSystem::new(vec![0.25, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn two_shift_matrix_matches_cubic_entries() {
        let r: RampSystem<f64> = RampSystem::new(vec![0.5, 1.0]).unwrap();
        let (s, scale) = gram_build(&r).unwrap();
        assert_eq!(scale, 1.0 / 6.0);
        let six_g = spsum_materialize(&s);
        // 2 k1^3, k1^2 (3 k2 - k1), 2 k2^3 with k = (1/2, 1), all dyadic
        assert_eq!(six_g.mat()[(0, 0)], 0.25);
        assert_eq!(six_g.mat()[(0, 1)], 0.625);
        assert_eq!(six_g.mat()[(1, 1)], 2.0);
        // and the generic entry rule k_min^2 k_max / 2 - k_min^3 / 6
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 1)] {
            let (kmin, kmax) = (r.k(i + 1), r.k(j + 1));
            let g = 0.5 * kmin * kmin * kmax - kmin * kmin * kmin / 6.0;
            assert!((six_g.mat()[(i, j)] * scale - g).abs() <= 4.0 * f64::EPSILON * g.abs());
        }
    }

    #[test]
    fn tridiagonal_coefficients_collapse_to_gap_sums() {
        let t = gram_tridiag(&thirds());
        for (i, want) in [(1, 2.0 / 3.0), (2, 4.0 / 3.0), (3, 4.0 / 3.0)] {
            assert!((t.alpha(i) - want).abs() <= 1e-15);
        }
        assert!((t.beta(1) + 1.0 / 3.0).abs() <= 1e-15);
        assert!((t.beta(2) + 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn tridiagonal_specialization_matches_general_factorization() {
        // exactness holds at the ulp level only when the generators 3k^2 and
        // -k^3 carry no representation error of their own; rounding them
        // first is amplified by about (k/gap)^3 in the general path
        let r = dyadic_knots();
        let (s, _) = gram_build(&r).unwrap();
        let f = sum_factor_tridiagonal(&s).unwrap();
        let t = gram_tridiag(&r);
        for i in 1..=r.n() {
            let ulp = f64::EPSILON * t.alpha(i).abs().max(1e-300);
            assert!(
                (f.tridiag().alpha(i) - t.alpha(i)).abs() <= 4.0 * ulp,
                "alpha {i}"
            );
        }
        for i in 1..r.n() {
            let ulp = f64::EPSILON * t.beta(i).abs();
            assert!((f.tridiag().beta(i) - t.beta(i)).abs() <= 4.0 * ulp, "beta {i}");
        }
        assert!((f.beta(r.n()) + r.gap(r.n())).abs() <= 4.0 * f64::EPSILON * r.gap(r.n()));

        // on non-dyadic shifts the deviation is bounded by that input noise
        let r = eight_knots();
        let (s, _) = gram_build(&r).unwrap();
        let f = sum_factor_tridiagonal(&s).unwrap();
        let t = gram_tridiag(&r);
        for i in 1..r.n() {
            let amp = (r.k(i) / r.gap(i)).powi(3) + (r.k(i) / r.gap(i + 1)).powi(3);
            let budget = 8.0 * f64::EPSILON * (1.0 + amp) * r.k(i).max(r.gap(i));
            assert!(
                (f.tridiag().beta(i) - t.beta(i)).abs() <= budget,
                "beta {i} beyond the generator-rounding level"
            );
        }
    }

    #[test]
    fn gap_factor_times_tridiagonal_reconstructs_six_gram() {
        let r = eight_knots();
        let n = r.n();
        let (s, scale) = gram_build(&r).unwrap();
        let six_g = spsum_materialize(&s);
        assert_eq!(scale * 6.0, 1.0);
        let t = Tridiagonal::from_symmetric(&gram_tridiag(&r));
        let f = Mat::from_fn(n, n, |i, j| {
            if j <= i {
                r.k(i + 1) - r.k(j)
            } else {
                0.0
            }
        });
        let back = ltu_product(&f, &t, &f.transpose());
        let err = back.max_abs_diff(six_g.mat());
        assert!(err <= 1e-12 * six_g.mat().inf_norm(), "err {err}");
    }

    #[test]
    fn continuants_track_the_general_recursion() {
        let v = ramp_continuants(&thirds(), 1e-12).unwrap();
        let want = [1.0, 2.0 / 3.0, 7.0 / 9.0, 26.0 / 27.0];
        for (got, want) in v.iter().zip(want) {
            assert!((got - want).abs() <= 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn closed_form_inverse_on_two_shifts() {
        let r: RampSystem<f64> = RampSystem::new(vec![0.5, 1.0]).unwrap();
        let inv = gram_inverse(&r).unwrap();
        let lead = 384.0 / 7.0;
        let want = [[2.0 * lead, -0.625 * lead], [-0.625 * lead, 0.25 * lead]];
        for i in 0..2 {
            for j in 0..2 {
                let err = (inv.mat()[(i, j)] - want[i][j]).abs();
                assert!(err <= 1e-12 * want[i][j].abs(), "({i},{j}) err {err}");
            }
        }
    }

    #[test]
    fn inverse_matches_the_general_path() {
        let r = eight_knots();
        let (s, _) = gram_build(&r).unwrap();
        let rep = sp_sum_inverse(&s);
        assert!(rep.status.is_ok(), "{}", rep.message);
        let general = unpack(&rep.result.unwrap());
        let special = gram_inverse(&r).unwrap();
        for i in 0..r.n() {
            for j in 0..r.n() {
                let want = 6.0 * general.mat()[(i, j)];
                let err = (special.mat()[(i, j)] - want).abs();
                assert!(err <= 1e-11 * want.abs(), "({i},{j}): {err}");
            }
        }
    }

    #[test]
    fn inverse_times_gram_is_identity() {
        let k: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let r = RampSystem::new(k).unwrap();
        let (s, scale) = gram_build(&r).unwrap();
        let g = spsum_materialize(&s).into_mat().scale(scale);
        let inv = gram_inverse(&r).unwrap();
        let prod = g.mul(inv.mat());
        let err = prod.max_abs_diff(&Mat::identity(r.n()));
        assert!(err <= 1e-8, "residual {err}");
    }

    #[test]
    fn edge_coefficient_rewrite_drops_the_next_continuant() {
        // the tail-sum coefficient can be rewritten without v_{i+1} through
        // the recursion; both forms must agree
        let r = eight_knots();
        let v = ramp_continuants(&r, 1e-12).unwrap();
        let inputs = RampInverseInputs::new(&r, v.clone());
        for i in 1..r.n() {
            let (xi, xn) = (r.gap(i), r.gap(i + 1));
            let rewritten = (xn + xi) / xn * ((2.0 + xn / xi) * v[i] + (xn - xi) * v[i - 1]);
            assert!(
                (inputs.phi[i] - rewritten).abs() <= 1e-13 * rewritten.abs(),
                "index {i}"
            );
        }
    }

    #[test]
    fn gamma_tables_start_as_published() {
        let p1 = gamma_coefficients(1).unwrap();
        assert_eq!(p1.terms(), &BTreeMap::from([(vec![1], 2)]));
        let p2 = gamma_coefficients(2).unwrap();
        assert_eq!(
            p2.terms(),
            &BTreeMap::from([(vec![1, 1], 4), (vec![2, 0], 3)])
        );
        let p3 = gamma_coefficients(3).unwrap();
        assert_eq!(
            p3.terms(),
            &BTreeMap::from([
                (vec![1, 1, 1], 8),
                (vec![1, 2, 0], 6),
                (vec![2, 0, 1], 6),
                (vec![2, 1, 0], 6),
            ])
        );
    }

    #[test]
    fn gamma_evaluation_reproduces_continuants() {
        let p3 = gamma_coefficients(3).unwrap();
        let third: f64 = 1.0 / 3.0;
        let got = p3.eval(&[third, third, third]);
        assert!((got - 26.0 / 27.0).abs() <= 1e-15);

        let r = eight_knots();
        let v = ramp_continuants(&r, 1e-12).unwrap();
        let gaps: Vec<f64> = (1..=r.n()).map(|i| r.gap(i)).collect();
        for i in 1..=r.n() {
            let got: f64 = gamma_coefficients(i).unwrap().eval(&gaps);
            assert!(
                (got - v[i]).abs() <= 1e-12 * v[i].abs(),
                "degree {i}: {got} vs {}",
                v[i]
            );
        }
    }

    #[test]
    fn gamma_bounds_hold_through_degree_twelve() {
        for i in 1..=12usize {
            let p = gamma_coefficients(i).unwrap();
            let (lo, hi) = if i % 2 == 0 {
                (3f64.powi(i as i32 / 2), 2f64.powi(i as i32))
            } else {
                (2.0 * 3f64.powi((i as i32 - 1) / 2), 2f64.powi(i as i32))
            };
            for (p_tuple, &g) in p.terms() {
                assert_eq!(p_tuple.iter().map(|&e| e as usize).sum::<usize>(), i);
                assert!(p_tuple.iter().all(|&e| e <= 2));
                let g = g as f64;
                assert!(g >= lo && g <= hi, "degree {i}: gamma {g} not in [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn gamma_degree_is_capped() {
        assert!(gamma_coefficients(GAMMA_DEGREE_CAP).is_ok());
        let err = gamma_coefficients(GAMMA_DEGREE_CAP + 1).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { degree: 17, cap: 16 }));
        assert!(gamma_coefficients(0).is_err());
    }

    #[test]
    fn gamma_rows_export_in_tuple_order() {
        let rows = gamma_coefficients(2).unwrap().export_rows();
        assert_eq!(rows, "1 1 4\n2 0 3\n");
    }
}
