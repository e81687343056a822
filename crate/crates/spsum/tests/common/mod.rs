//! Shared oracles for the integration suites: dense LU with partial
//! pivoting, brute-force materializers, adaptive quadrature, a Jacobi
//! eigensolver, and seeded random instance generators. Everything here is
//! deliberately independent of the library's own algorithms.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spsum::core::dense::Mat;
use spsum::core::sum::{spsum_materialize, SpSum};
use spsum::core::tridiag::SymTridiagonal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- dense LU oracle ------------------------------------------------------

pub struct Lu {
    lu: Mat<f64>,
    perm: Vec<usize>,
    sign: f64,
}

/// Doolittle factorization with partial pivoting; `None` when a pivot
/// column is exactly zero.
pub fn lu_decompose(m: &Mat<f64>) -> Option<Lu> {
    assert!(m.is_square());
    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in (k + 1)..n {
            if lu[(i, k)].abs() > lu[(p, k)].abs() {
                p = i;
            }
        }
        if lu[(p, k)] == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(p, j)];
                lu[(p, j)] = lu[(k, j)];
                lu[(k, j)] = tmp;
            }
            perm.swap(p, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let upd = lu[(i, j)] - f * lu[(k, j)];
                lu[(i, j)] = upd;
            }
        }
    }
    Some(Lu { lu, perm, sign })
}

impl Lu {
    pub fn det(&self) -> f64 {
        let n = self.lu.rows();
        (0..n).fold(self.sign, |d, k| d * self.lu[(k, k)])
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] -= self.lu[(i, j)] * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> Mat<f64> {
        let n = self.lu.rows();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn lu_invert(m: &Mat<f64>) -> Option<Mat<f64>> {
    lu_decompose(m).map(|f| f.inverse())
}

pub fn lu_det(m: &Mat<f64>) -> Option<f64> {
    lu_decompose(m).map(|f| f.det())
}

/// Infinity-norm condition estimate through the LU inverse.
pub fn kappa_inf(m: &Mat<f64>) -> Option<f64> {
    lu_invert(m).map(|inv| m.inf_norm() * inv.inf_norm())
}

// ---- brute-force materializers -------------------------------------------

pub fn max_abs(m: &Mat<f64>) -> f64 {
    let mut top = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            top = top.max(m[(i, j)].abs());
        }
    }
    top
}

/// Largest entry gap scaled by the magnitude of the reference grid.
pub fn rel_gap(got: &Mat<f64>, want: &Mat<f64>) -> f64 {
    got.max_abs_diff(want) / max_abs(want)
}

/// Entries a_min(i,j) * b_max(i,j) from 0-based generator slices.
pub fn brute_single_pair(a: &[f64], b: &[f64]) -> Mat<f64> {
    let n = a.len();
    Mat::from_fn(n, n, |i, j| a[i.min(j)] * b[i.max(j)])
}

/// Entries a_min b_max + c_min from 0-based slices.
pub fn brute_sum(a: &[f64], b: &[f64], c: &[f64]) -> Mat<f64> {
    let n = a.len();
    Mat::from_fn(n, n, |i, j| a[i.min(j)] * b[i.max(j)] + c[i.min(j)])
}

// ---- Jacobi eigensolver ---------------------------------------------------

/// Eigenvalues of a symmetric grid by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m0: &Mat<f64>) -> Vec<f64> {
    assert!(m0.is_square());
    let n = m0.rows();
    let mut a = m0.clone();
    let scale = max_abs(&a).max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

// ---- quadrature -----------------------------------------------------------

fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, b, fa, fm, fb, whole, eps, 40)
}

/// Overlap integral of two hinge functions over the unit interval,
/// integral of max(0, ki - t) * max(0, kj - t) dt; the integrand has kinks
/// at ki and kj, so the quadrature runs on the smooth pieces.
pub fn ramp_overlap_integral(ki: f64, kj: f64) -> f64 {
    let f = |t: f64| (ki - t).max(0.0) * (kj - t).max(0.0);
    let lo = ki.min(kj).clamp(0.0, 1.0);
    let hi = ki.max(kj).clamp(0.0, 1.0);
    adaptive_simpson(f, 0.0, lo, 1e-15)
        + adaptive_simpson(f, lo, hi, 1e-15)
        + adaptive_simpson(f, hi, 1.0, 1e-15)
}

// ---- random instances -----------------------------------------------------

fn signed(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = r.gen_range(lo..hi);
    if r.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Random sum generators: increasing b with controlled gaps, signed a and
/// c bounded away from zero, consecutive c distinct. Defaults x = 0, z = 1.
pub fn random_spsum(r: &mut ChaCha8Rng, n: usize, min_gap: f64) -> SpSum<f64> {
    let mut b = vec![r.gen_range(0.5..1.5)];
    for _ in 1..n {
        let g = r.gen_range(min_gap..min_gap + 0.9);
        b.push(b.last().unwrap() + g);
    }
    let a: Vec<f64> = (0..n).map(|_| signed(r, 0.3, 1.5)).collect();
    let mut c = vec![signed(r, 0.3, 1.5)];
    for _ in 1..n {
        let step = r.gen_range(0.15..1.2) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        c.push(c.last().unwrap() + step);
    }
    SpSum::with_defaults(a, b, c).expect("construction guards satisfied")
}

/// Keeps only instances whose factorization and baseline denominators are
/// bounded away from zero, so every inversion route is applicable.
pub fn denominators_are_safe(s: &SpSum<f64>) -> bool {
    let n = s.n();
    for i in 1..n {
        // closed-form denominators of the two addends
        let theta_a = s.a(i + 1) * s.b(i) - s.a(i) * s.b(i + 1);
        let theta_c = s.c(i + 1) - s.c(i);
        if theta_a.abs() < 0.05 || theta_c.abs() < 0.05 {
            return false;
        }
    }
    for i in 2..=n {
        // pair-factorization couplings
        let w = s.a(i) * s.b(i - 1) - s.a(i - 1) * s.b(i) + s.c(i) - s.c(i - 1);
        if w.abs() < 0.05 {
            return false;
        }
    }
    true
}

/// Draws until the materialized matrix is invertible with condition number
/// at most `kappa_max` and all route denominators are safe; returns the
/// instance together with its LU inverse and condition estimate.
pub fn well_conditioned_spsum(
    r: &mut ChaCha8Rng,
    n: usize,
    kappa_max: f64,
) -> (SpSum<f64>, Mat<f64>, f64) {
    loop {
        let s = random_spsum(r, n, 0.1);
        if !denominators_are_safe(&s) {
            continue;
        }
        let m = spsum_materialize(&s);
        if let Some(inv) = lu_invert(m.mat()) {
            let kappa = m.mat().inf_norm() * inv.inf_norm();
            if kappa <= kappa_max {
                return (s, inv, kappa);
            }
        }
    }
}

/// Random irreducible, strictly diagonally dominant symmetric tridiagonal.
pub fn random_dominant_tridiag(r: &mut ChaCha8Rng, n: usize) -> SymTridiagonal<f64> {
    let beta: Vec<f64> = (0..n - 1).map(|_| signed(r, 0.3, 1.2)).collect();
    let alpha: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
            let right = if i < n - 1 { beta[i].abs() } else { 0.0 };
            left + right + r.gen_range(0.3..1.0)
        })
        .collect();
    SymTridiagonal::new(alpha, beta).expect("valid shape")
}

// Double-word helpers (Dekker/Knuth splits) for evaluating products whose
// intermediates outgrow the result. Verification arithmetic must resolve
// below the budgets being checked, and a plain f64 triple product does not
// when a factor carries large scale that cancels in the sandwich.

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Debug)]
pub struct Wide {
    hi: f64,
    lo: f64,
}

impl Wide {
    pub const ZERO: Wide = Wide { hi: 0.0, lo: 0.0 };

    pub fn product(a: f64, b: f64) -> Wide {
        let (hi, lo) = two_prod(a, b);
        Wide { hi, lo }
    }

    pub fn add(self, o: Wide) -> Wide {
        let (s, e) = two_sum(self.hi, o.hi);
        let lo = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, lo);
        Wide { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Wide {
        let (p, e) = two_prod(self.hi, x);
        let lo = self.lo.mul_add(x, e);
        let (hi, lo) = two_sum(p, lo);
        Wide { hi, lo }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// f * mid * f^T accumulated in double-word with no intermediate rounding,
/// so the result reflects the stored factor entries rather than the
/// verification matmul.
pub fn sandwich_accurate(f: &Mat<f64>, mid: &Mat<f64>) -> Mat<f64> {
    let n = f.rows();
    assert_eq!(f.cols(), mid.rows());
    assert_eq!(mid.rows(), mid.cols());
    let m = mid.rows();
    let mut right = vec![vec![Wide::ZERO; n]; m];
    for k in 0..m {
        for j in 0..n {
            let mut acc = Wide::ZERO;
            for l in 0..m {
                acc = acc.add(Wide::product(mid[(k, l)], f[(j, l)]));
            }
            right[k][j] = acc;
        }
    }
    Mat::from_fn(n, n, |i, j| {
        let mut acc = Wide::ZERO;
        for k in 0..m {
            acc = acc.add(right[k][j].mul_f64(f[(i, k)]));
        }
        acc.value()
    })
}

/// Largest entry of |f| |mid| |f^T|, normalized by the largest entry of the
/// target: how much the sandwich amplifies half-ulp storage rounding of the
/// factor data. A reconstruction can only be expected to land within about
/// this factor times machine epsilon of the target.
pub fn amplification(f: &Mat<f64>, mid: &Mat<f64>, target_scale: f64) -> f64 {
    let n = f.rows();
    let m = mid.rows();
    let fa = Mat::from_fn(n, m, |i, j| f[(i, j)].abs());
    let ma = Mat::from_fn(m, m, |i, j| mid[(i, j)].abs());
    max_abs(&fa.mul(&ma).mul(&fa.transpose())) / target_scale
}
