//! Empirical accuracy studies: dense baselines (Householder QR inversion,
//! 3x3 adjugate inversion), mean-absolute-error metrics, the determinant
//! family with determinant -eps/9, and the fixed-spectrum {-1, eps, 1}
//! family with its polynomial-system solver and grid sweep.
//!
//! Experiment drivers are f64-concrete; the baseline operations stay
//! generic over the scalar.

use rayon::prelude::*;

use crate::core::dd::{dd_prod, Dd};
use crate::core::dense::Mat;
use crate::core::error::{Error, Result};
use crate::core::scalar::Scalar;
use crate::core::sum::{spsum_materialize, SpSum};
use crate::inverse::{sp_sum_inverse, unpack};

/// Inverse through a Householder QR factorization without pivoting,
/// finishing with one backward substitution per column.
pub fn qr_invert<S: Scalar>(m: &Mat<S>, tol: S) -> Result<Mat<S>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            detail: format!("need a square grid, got {}x{}", m.rows(), m.cols()),
        });
    }
    let n = m.rows();
    let two = S::c(2.0);
    let mut r = m.clone();
    let mut qt = Mat::identity(n);
    let mut v = vec![S::zero(); n];
    for k in 0..n {
        let mut norm2 = S::zero();
        for i in k..n {
            norm2 += r[(i, k)] * r[(i, k)];
        }
        let norm = norm2.sqrt();
        if norm < tol {
            return Err(Error::Singular {
                detail: format!("diagonal {} of the triangular factor vanishes", k + 1),
            });
        }
        let alpha = if r[(k, k)] >= S::zero() { -norm } else { norm };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vtv = v[k..n].iter().fold(S::zero(), |s, &x| s + x * x);
        if vtv > S::zero() {
            for grid in [&mut r, &mut qt] {
                for j in 0..n {
                    let mut dot = S::zero();
                    for i in k..n {
                        dot += v[i] * grid[(i, j)];
                    }
                    let f = two * dot / vtv;
                    for i in k..n {
                        let upd = grid[(i, j)] - f * v[i];
                        grid[(i, j)] = upd;
                    }
                }
            }
        }
        r[(k, k)] = alpha;
        for i in (k + 1)..n {
            r[(i, k)] = S::zero();
        }
    }
    let mut inv = Mat::zeros(n, n);
    let mut col = vec![S::zero(); n];
    for j in 0..n {
        for i in (0..n).rev() {
            let mut s = qt[(i, j)];
            for l in (i + 1)..n {
                s -= r[(i, l)] * col[l];
            }
            col[i] = s / r[(i, i)];
        }
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// 3x3 inverse as the adjugate divided by the cofactor-expansion
/// determinant.
pub fn cramer3_invert<S: Scalar>(m: &Mat<S>, tol: S) -> Result<Mat<S>> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::ShapeMismatch {
            detail: format!("need a 3x3 grid, got {}x{}", m.rows(), m.cols()),
        });
    }
    let minor =
        |r1: usize, c1: usize, r2: usize, c2: usize| m[(r1, c1)] * m[(r2, c2)] - m[(r1, c2)] * m[(r2, c1)];
    let mut cof = Mat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let (r1, r2) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c1, c2) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let sign = if (i + j) % 2 == 0 { S::one() } else { -S::one() };
            cof[(i, j)] = sign * minor(r1, c1, r2, c2);
        }
    }
    let det = m[(0, 0)] * cof[(0, 0)] + m[(0, 1)] * cof[(0, 1)] + m[(0, 2)] * cof[(0, 2)];
    if det.abs() < tol {
        return Err(Error::Singular {
            detail: "determinant vanishes within tolerance".into(),
        });
    }
    Ok(Mat::from_fn(3, 3, |i, j| cof[(j, i)] / det))
}

/// Mean absolute entrywise difference between two equally shaped grids.
pub fn mae<S: Scalar>(m1: &Mat<S>, m2: &Mat<S>) -> Result<S> {
    if m1.rows() != m2.rows() || m1.cols() != m2.cols() {
        return Err(Error::ShapeMismatch {
            detail: format!(
                "{}x{} against {}x{}",
                m1.rows(),
                m1.cols(),
                m2.rows(),
                m2.cols()
            ),
        });
    }
    let mut acc = S::zero();
    for i in 0..m1.rows() {
        for j in 0..m1.cols() {
            acc += (m1[(i, j)] - m2[(i, j)]).abs();
        }
    }
    Ok(acc / S::c((m1.rows() * m1.cols()) as f64))
}

/// One experiment sample: the mean absolute error of a method pair at one
/// epsilon.
#[derive(Clone, Debug)]
pub struct MaeRecord {
    pub epsilon: f64,
    pub method: &'static str,
    pub mae: f64,
}

/// Order statistics of an error sample; percentiles are nearest-rank on
/// the sorted values, the deviation is the sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub avg: f64,
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub p99: f64,
    pub max: f64,
}

impl SummaryStats {
    pub fn from_sample(mut sample: Vec<f64>) -> SummaryStats {
        let count = sample.len();
        if count == 0 {
            return SummaryStats {
                count: 0,
                avg: 0.0,
                std: 0.0,
                min: 0.0,
                median: 0.0,
                p99: 0.0,
                max: 0.0,
            };
        }
        sample.sort_by(f64::total_cmp);
        let n = count as f64;
        let avg = sample.iter().sum::<f64>() / n;
        let var = if count > 1 {
            sample.iter().map(|x| (x - avg) * (x - avg)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let rank = |p: f64| sample[((p * n / 100.0).ceil() as usize).clamp(1, count) - 1];
        SummaryStats {
            count,
            avg,
            std: var.sqrt(),
            min: sample[0],
            median: rank(50.0),
            p99: rank(99.0),
            max: sample[count - 1],
        }
    }
}

// the eps-parametrized test family: determinant -eps/9, inverse entries
// growing like 1/eps
fn family(eps: f64) -> SpSum<f64> {
    SpSum::with_defaults(
        vec![1.0, 1.0, 1.0],
        vec![1.0, 5.0 / 3.0, 3.0],
        vec![0.0, 1.0, eps - 3.0],
    )
    .expect("family generators are valid")
}

/// Exact-to-working-precision inverse of the family matrix as actually
/// represented: entries are built and the adjugate is formed in double-word
/// arithmetic from the rounded generators, so the result is the true
/// inverse of the rounded input, not of the unrounded formulas.
fn family_reference_inverse(eps: f64) -> Mat<f64> {
    let s = family(eps);
    let mut m = [[Dd::from(0.0); 3]; 3];
    for i in 1..=3usize {
        for j in i..=3usize {
            let entry = dd_prod(s.a(i), s.b(j)).add(Dd::from(s.c(i)));
            m[i - 1][j - 1] = entry;
            m[j - 1][i - 1] = entry;
        }
    }
    let minor = |r1: usize, c1: usize, r2: usize, c2: usize| {
        m[r1][c1].mul(m[r2][c2]).sub(m[r1][c2].mul(m[r2][c1]))
    };
    let pick = |k: usize| match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut cof = [[Dd::from(0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r1, r2) = pick(i);
            let (c1, c2) = pick(j);
            let v = minor(r1, c1, r2, c2);
            cof[i][j] = if (i + j) % 2 == 0 { v } else { v.neg() };
        }
    }
    let det = m[0][0]
        .mul(cof[0][0])
        .add(m[0][1].mul(cof[0][1]))
        .add(m[0][2].mul(cof[0][2]));
    Mat::from_fn(3, 3, |i, j| cof[j][i].div(det).value())
}

/// Records from sweeping the family over `count` log-spaced eps values in
/// [1e-6, 0.1]: for each eps, the mean absolute error of the packed
/// semi-closed-form inverse and of the QR inverse against the double-word
/// reference. Failed inversions are excluded from the records and returned
/// with their diagnostics.
pub struct DetFamilyReport {
    pub records: Vec<MaeRecord>,
    pub failures: Vec<(f64, String)>,
}

pub fn det_family_experiment(count: usize) -> DetFamilyReport {
    let count = count.max(2);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for i in 0..count {
        let eps = 10f64.powf(-6.0 + 5.0 * i as f64 / (count - 1) as f64);
        let s = family(eps);
        let reference = family_reference_inverse(eps);
        let rep = sp_sum_inverse(&s);
        match rep.result {
            Some(packed) => {
                let err = mae(unpack(&packed).mat(), &reference).expect("3x3 shapes");
                records.push(MaeRecord {
                    epsilon: eps,
                    method: "algo",
                    mae: err,
                });
            }
            None => failures.push((eps, rep.message.clone())),
        }
        match qr_invert(spsum_materialize(&s).mat(), 1e-13) {
            Ok(inv) => {
                let err = mae(&inv, &reference).expect("3x3 shapes");
                records.push(MaeRecord {
                    epsilon: eps,
                    method: "qr",
                    mae: err,
                });
            }
            Err(e) => failures.push((eps, e.to_string())),
        }
    }
    DetFamilyReport { records, failures }
}

/// Least-squares slope of ln(y) against ln(x); points with nonpositive
/// coordinates are skipped.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    let (sx, sy) = logs
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (sxx, sxy) = logs.iter().fold((0.0, 0.0), |(sxx, sxy), (x, y)| {
        (sxx + x * x, sxy + x * y)
    });
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// CSV rows `epsilon,method,mae` with 17 significant digits.
pub fn det_family_csv(records: &[MaeRecord]) -> String {
    let mut out = String::from("epsilon,method,mae\n");
    for r in records {
        out.push_str(&format!("{:.16e},{},{:.16e}\n", r.epsilon, r.method, r.mae));
    }
    out
}

// ---- fixed-spectrum family ----------------------------------------------

// With b = (1, -1, 1), x = 0, z = 1, the sum matrix reads
//   [ a1+c1  -a1+c1  a1+c1 ]
//   [-a1+c1  -a2+c2  a2+c2 ]
//   [ a1+c1   a2+c2  a3+c3 ]
// and c3 is eliminated through the linear trace condition.
fn spectrum_matrix(a1: f64, a3: f64, c2: f64, eps: f64, a2: f64, c1: f64) -> [[f64; 3]; 3] {
    let c3 = eps - a1 - c1 + a2 - c2 - a3;
    [
        [a1 + c1, -a1 + c1, a1 + c1],
        [-a1 + c1, -a2 + c2, a2 + c2],
        [a1 + c1, a2 + c2, a3 + c3],
    ]
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

// trace of M^2 for symmetric M is the squared Frobenius norm
fn frob2(m: &[[f64; 3]; 3]) -> f64 {
    m.iter().flatten().map(|v| v * v).sum()
}

fn cof3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let pick = |k: usize| -> (usize, usize) {
        match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    };
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r1, r2) = pick(i);
            let (c1, c2) = pick(j);
            let v = m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
            c[i][j] = if (i + j) % 2 == 0 { v } else { -v };
        }
    }
    c
}

/// Completions (a2, c1, c3) giving the sum matrix over b = (1, -1, 1) the
/// spectrum {-1, eps, 1}: the trace condition eliminates c3, and the
/// remaining determinant and squared-norm conditions are solved by Newton
/// iteration from a 16x16 grid of starts over [-4, 4]^2. Converged roots
/// are kept when both residuals are at most 1e-9, deduplicated at 1e-7,
/// ordered, and capped at six.
pub fn spectrum_solve(a1: f64, a3: f64, c2: f64, eps: f64) -> Vec<(f64, f64, f64)> {
    // constant derivative patterns of the matrix in a2 and c1, with the
    // eliminated c3 contributing to the corner
    let da2 = [[0.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, 1.0, 1.0]];
    let dc1 = [[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, -1.0]];
    let target = 2.0 + eps * eps;
    let mut found: Vec<(f64, f64, f64)> = Vec::new();
    for si in 0..16 {
        for sj in 0..16 {
            let mut a2 = -4.0 + 8.0 * si as f64 / 15.0;
            let mut c1 = -4.0 + 8.0 * sj as f64 / 15.0;
            let mut converged = false;
            for _ in 0..60 {
                let m = spectrum_matrix(a1, a3, c2, eps, a2, c1);
                let f1 = det3(&m) + eps;
                let f2 = frob2(&m) - target;
                if f1.abs() <= 1e-11 && f2.abs() <= 1e-11 {
                    converged = true;
                    break;
                }
                let cof = cof3(&m);
                let mut j = [[0.0; 2]; 2];
                for r in 0..3 {
                    for c in 0..3 {
                        j[0][0] += cof[r][c] * da2[r][c];
                        j[0][1] += cof[r][c] * dc1[r][c];
                        j[1][0] += 2.0 * m[r][c] * da2[r][c];
                        j[1][1] += 2.0 * m[r][c] * dc1[r][c];
                    }
                }
                let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det_j.abs() < 1e-14 {
                    break;
                }
                a2 -= (f1 * j[1][1] - f2 * j[0][1]) / det_j;
                c1 -= (f2 * j[0][0] - f1 * j[1][0]) / det_j;
                if !(a2.is_finite() && c1.is_finite()) {
                    break;
                }
            }
            if !converged {
                continue;
            }
            let m = spectrum_matrix(a1, a3, c2, eps, a2, c1);
            if (det3(&m) + eps).abs() > 1e-9 || (frob2(&m) - target).abs() > 1e-9 {
                continue;
            }
            let c3 = eps - a1 - c1 + a2 - c2 - a3;
            let dup = found.iter().any(|&(pa, pc, pg)| {
                (pa - a2).abs() <= 1e-7 && (pc - c1).abs() <= 1e-7 && (pg - c3).abs() <= 1e-7
            });
            if !dup {
                found.push((a2, c1, c3));
            }
        }
    }
    found.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.total_cmp(&r.1)));
    found.truncate(6);
    found
}

/// Aggregated grid-sweep statistics for one eps: MAE of the semi-closed
/// form against the 3x3 adjugate baseline, and of QR against the same.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eps: f64,
    pub grid_step: f64,
    pub solved: usize,
    pub failures: usize,
    pub algo_vs_cramer: SummaryStats,
    pub qr_vs_cramer: SummaryStats,
}

/// Sweeps a1, a3, c2 over [-1, 1] with the given step, solves every cell
/// for spectrum completions, inverts every solved matrix three ways, and
/// aggregates the method-pair errors. Cells are processed in parallel;
/// the sample is assembled in grid order so results do not depend on
/// scheduling.
pub fn spectrum_experiment(eps: f64, grid_step: f64) -> Result<SpectrumReport> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidArgument {
            reason: "grid step must be positive".into(),
        });
    }
    let steps = 2.0 / grid_step;
    if (steps - steps.round()).abs() > 1e-9 {
        return Err(Error::InvalidArgument {
            reason: "grid step must divide the range [-1, 1]".into(),
        });
    }
    let count = steps.round() as usize + 1;
    let axis: Vec<f64> = (0..count).map(|i| -1.0 + grid_step * i as f64).collect();
    let mut cells = Vec::with_capacity(count * count * count);
    for &a1 in &axis {
        for &a3 in &axis {
            for &c2 in &axis {
                cells.push((a1, a3, c2));
            }
        }
    }
    let per_cell: Vec<(Vec<(f64, f64)>, usize)> = cells
        .par_iter()
        .map(|&(a1, a3, c2)| {
            let mut pairs = Vec::new();
            let mut fails = 0usize;
            for (a2, c1, c3) in spectrum_solve(a1, a3, c2, eps) {
                match evaluate_solution(a1, a2, a3, c1, c2, c3) {
                    Some(p) => pairs.push(p),
                    None => fails += 1,
                }
            }
            (pairs, fails)
        })
        .collect();
    let mut algo = Vec::new();
    let mut qr = Vec::new();
    let mut failures = 0;
    for (pairs, fails) in per_cell {
        failures += fails;
        for (ma, mq) in pairs {
            algo.push(ma);
            qr.push(mq);
        }
    }
    Ok(SpectrumReport {
        eps,
        grid_step,
        solved: algo.len(),
        failures,
        algo_vs_cramer: SummaryStats::from_sample(algo),
        qr_vs_cramer: SummaryStats::from_sample(qr),
    })
}

fn evaluate_solution(a1: f64, a2: f64, a3: f64, c1: f64, c2: f64, c3: f64) -> Option<(f64, f64)> {
    let s = SpSum::with_defaults(vec![a1, a2, a3], vec![1.0, -1.0, 1.0], vec![c1, c2, c3]).ok()?;
    let dense = spsum_materialize(&s);
    let cramer = cramer3_invert(dense.mat(), 1e-13).ok()?;
    let packed = sp_sum_inverse(&s).result?;
    let algo = mae(unpack(&packed).mat(), &cramer).ok()?;
    let qr = mae(&qr_invert(dense.mat(), 1e-13).ok()?, &cramer).ok()?;
    Some((algo, qr))
}

/// CSV rows `epsilon,method,count,avg,std,min,median,p99,max` with 17
/// significant digits.
pub fn spectrum_csv(reports: &[SpectrumReport]) -> String {
    let mut out = String::from("epsilon,method,count,avg,std,min,median,p99,max\n");
    for r in reports {
        for (tag, s) in [("algo-cramer", &r.algo_vs_cramer), ("qr-cramer", &r.qr_vs_cramer)] {
            out.push_str(&format!(
                "{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.eps, tag, s.count, s.avg, s.std, s.min, s.median, s.p99, s.max
            ));
        }
    }
    out
}
