//! Dense symmetric / Hermitian eigenvalues by the cyclic Jacobi method.
//!
//! Only eigenvalues are needed (for positive-semidefiniteness certificates),
//! and the matrices are small (tens to a few hundred rows), so Jacobi's
//! accuracy on small eigenvalues matters more than asymptotic speed.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric `n x n` matrix stored row-major, sorted
/// ascending. Only the upper triangle is read.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if libm::sqrt(off) <= f64::EPSILON * scale * 1e-3 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix, sorted ascending.
///
/// Real matrices go straight to the symmetric solver; otherwise the
/// `2n x 2n` real embedding `[[A, -B], [B, A]]` is used, whose spectrum is
/// that of `A + iB` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(matrix: &[Complex64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let real = matrix.iter().all(|z| z.im == 0.0);
    if real {
        let re: Vec<f64> = matrix.iter().map(|z| z.re).collect();
        return symmetric_eigenvalues(&re, n);
    }
    let m = 2 * n;
    let mut emb = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = matrix[i * n + j];
            emb[i * m + j] = z.re;
            emb[(i + n) * m + (j + n)] = z.re;
            emb[i * m + (j + n)] = -z.im;
            emb[(i + n) * m + j] = z.im;
        }
    }
    let all = symmetric_eigenvalues(&emb, m);
    all.into_iter().step_by(2).collect()
}
