//! Small dense eigensolvers used by the mixer kernel and the density-matrix
//! positivity checks. Cyclic Jacobi is plenty for the <= 60x60 symmetric
//! problems that arise here and keeps eigenvector orthogonality at machine
//! precision, which is what makes the per-block mixer exponentials exactly
//! unitary.

use num_complex::Complex64;

/// Diagonalize a real symmetric matrix (row-major, `n x n`).
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored column-wise
/// in a row-major `n x n` buffer: column `k` is the eigenvector of
/// `eigenvalues[k]`.
pub(crate) fn symmetric_eigen(n: usize, matrix: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return (vec![a[0]], v);
    }

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
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
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}

/// Eigenvalues of a complex Hermitian matrix (row-major, `n x n`).
///
/// Uses the real embedding `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is
/// that of `H` with every eigenvalue doubled in multiplicity.
pub(crate) fn hermitian_eigenvalues(n: usize, matrix: &[Complex64]) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n);
    let m = 2 * n;
    let mut real = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let h = matrix[i * n + j];
            real[i * m + j] = h.re;
            real[i * m + (n + j)] = -h.im;
            real[(n + i) * m + j] = h.im;
            real[(n + i) * m + (n + j)] = h.re;
        }
    }
    let (mut eig, _) = symmetric_eigen(m, &real);
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Each eigenvalue appears twice; keep one copy of each pair.
    (0..n).map(|k| 0.5 * (eig[2 * k] + eig[2 * k + 1])).collect()
}
