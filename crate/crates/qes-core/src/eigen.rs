//! Dense eigensolver for small real or complex square matrices: Householder
//! reduction to upper Hessenberg form followed by shifted QR iteration with
//! Givens rotations, all in complex arithmetic.
//!
//! Matrices in this crate stay below ~130x130, so clarity wins over blocking
//! and the whole solve is a few microseconds.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QesError, Result};

const MAX_SWEEPS_PER_BLOCK: usize = 60;
const EXCEPTIONAL_EVERY: usize = 12;

/// Eigenvalues of a complex square matrix, unordered.
pub fn eigenvalues_complex(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QesError::InvalidInput(format!(
            "matrix must be square, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.is_finite()) {
        return Err(QesError::InvalidInput(
            "matrix entries must be finite".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    reduce_to_hessenberg(&mut h);
    qr_hessenberg_eigenvalues(h)
}

/// Eigenvalues of a real square matrix, unordered and not yet symmetrized.
pub fn eigenvalues_real(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let c = a.map(|x| Complex64::new(x, 0.0));
    eigenvalues_complex(&c)
}

/// In-place unitary similarity to upper Hessenberg form.
fn reduce_to_hessenberg(h: &mut DMatrix<Complex64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal.
        let mut v: Vec<Complex64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            Complex64::ONE
        };
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Left: rows k+1..n over all columns.
        for c in 0..n {
            let mut s = Complex64::ZERO;
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, c)];
            }
            s *= 2.0;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= s * vi;
            }
        }
        // Right: columns k+1..n over all rows.
        for r in 0..n {
            let mut s = Complex64::ZERO;
            for (i, vi) in v.iter().enumerate() {
                s += h[(r, k + 1 + i)] * vi;
            }
            s *= 2.0;
            for (i, vi) in v.iter().enumerate() {
                h[(r, k + 1 + i)] -= s * vi.conj();
            }
        }
        for r in k + 2..n {
            h[(r, k)] = Complex64::ZERO;
        }
        h[(k + 1, k)] = Complex64::new(-phase.re * norm, -phase.im * norm);
    }
}

/// Rotation G = [[c, s], [-conj(s), c]] with real c such that G [x; y] has a
/// zero second component.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let xn = x.norm();
    let yn = y.norm();
    if yn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if xn == 0.0 {
        return (0.0, y.conj() / yn);
    }
    let h = xn.hypot(yn);
    (xn / h, (x / xn) * (y.conj() / h))
}

fn eigenvalues_2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    // Recover the smaller eigenvalue from the determinant when possible.
    let det = a * d - b * c;
    if l1.norm() >= l2.norm() && l1.norm() > 0.0 {
        (l1, det / l1)
    } else if l2.norm() > 0.0 {
        (det / l2, l2)
    } else {
        (l1, l2)
    }
}

fn qr_hessenberg_eigenvalues(mut h: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let scale = h.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut eigs = vec![Complex64::ZERO; n];
    let mut m = n; // active block is h[0..m, 0..m]
    let mut sweeps = 0usize;
    while m > 0 {
        // Deflation scan from the bottom of the active block.
        let mut l = m - 1;
        while l > 0 {
            let off = h[(l, l - 1)].norm();
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                tst = scale;
            }
            if off <= f64::EPSILON * tst {
                h[(l, l - 1)] = Complex64::ZERO;
                break;
            }
            l -= 1;
        }
        if l == m - 1 {
            eigs[m - 1] = h[(m - 1, m - 1)];
            m -= 1;
            sweeps = 0;
            continue;
        }
        if l == m - 2 {
            let (l1, l2) = eigenvalues_2x2(
                h[(m - 2, m - 2)],
                h[(m - 2, m - 1)],
                h[(m - 1, m - 2)],
                h[(m - 1, m - 1)],
            );
            eigs[m - 2] = l1;
            eigs[m - 1] = l2;
            m -= 2;
            sweeps = 0;
            continue;
        }
        if sweeps >= MAX_SWEEPS_PER_BLOCK {
            return Err(QesError::EigenNonConvergence { index: m - 1, dim: n });
        }
        sweeps += 1;
        let shift = if sweeps.is_multiple_of(EXCEPTIONAL_EVERY) {
            h[(m - 1, m - 1)] + 0.75 * Complex64::new(h[(m - 1, m - 2)].norm(), 0.0)
        } else {
            let (l1, l2) = eigenvalues_2x2(
                h[(m - 2, m - 2)],
                h[(m - 2, m - 1)],
                h[(m - 1, m - 2)],
                h[(m - 1, m - 1)],
            );
            let target = h[(m - 1, m - 1)];
            if (l1 - target).norm() <= (l2 - target).norm() {
                l1
            } else {
                l2
            }
        };
        single_shift_sweep(&mut h, l, m - 1, shift);
        if h.iter().any(|z| !z.is_finite()) {
            return Err(QesError::EigenNonConvergence { index: m - 1, dim: n });
        }
    }
    Ok(eigs)
}

/// One implicit single-shift QR sweep on the Hessenberg window [l, e].
fn single_shift_sweep(h: &mut DMatrix<Complex64>, l: usize, e: usize, shift: Complex64) {
    let n = h.nrows();
    let mut x = h[(l, l)] - shift;
    let mut y = h[(l + 1, l)];
    for k in l..e {
        if k > l {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (c, s) = givens(x, y);
        let col_start = if k > l { k - 1 } else { l };
        for col in col_start..n {
            let t1 = h[(k, col)];
            let t2 = h[(k + 1, col)];
            h[(k, col)] = c * t1 + s * t2;
            h[(k + 1, col)] = -s.conj() * t1 + c * t2;
        }
        let row_end = (k + 2).min(e);
        for row in 0..=row_end {
            let t1 = h[(row, k)];
            let t2 = h[(row, k + 1)];
            h[(row, k)] = c * t1 + s.conj() * t2;
            h[(row, k + 1)] = -s * t1 + c * t2;
        }
    }
}
