//! Cyclic Jacobi eigenvalues for small dense Hermitian matrices.
//!
//! Each pivot `(p, q)` is first made real by a diagonal phase on `q`, then
//! annihilated by a real plane rotation. Sweeps stop once the off-diagonal
//! Frobenius norm drops below `1e-12 · max(1, ‖A‖_F)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::hermitian_deviation;

const OFF_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;

/// All eigenvalues, ascending.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::Dimension {
            expected: n,
            got: h.ncols(),
        });
    }
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    // symmetrize away the tolerated asymmetry
    let mut a: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (h[(i, j)] + h[(j, i)].conj()) * 0.5
        })
        .collect();
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) < OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

pub fn max_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64> {
    Ok(*hermitian_eigenvalues(h)?.last().expect("non-empty matrix"))
}

pub fn min_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?[0])
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // D = diag(1, e^{-iφ}) on q makes the pivot real: a'_pq = |a_pq|
    let phase = apq / mag;
    for k in 0..n {
        a[k * n + q] *= phase.conj();
    }
    for k in 0..n {
        a[q * n + k] *= phase;
    }
    a[p * n + q] = Complex64::new(mag, 0.0);
    a[q * n + p] = Complex64::new(mag, 0.0);

    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * s;
        a[k * n + q] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * s;
        a[q * n + k] = apk * s + aqk * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
}
