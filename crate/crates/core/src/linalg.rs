//! Thin layer over LAPACK (through `ndarray-linalg`) for the dense kernels the
//! rest of the crate needs.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Eig, EigVals, Eigh, EigValsh, Factorize, Solve, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

extern "C" {
    fn openblas_set_num_threads(num_threads: std::os::raw::c_int);
}

/// Pins the BLAS backend to a single thread. All parallelism in this crate
/// lives above the BLAS calls, which keeps results schedule-independent.
pub fn pin_blas_threads() {
    unsafe { openblas_set_num_threads(1) };
}

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

pub fn ensure_square(a: ArrayView2<'_, C64>) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::NotSquare { rows: r, cols: c });
    }
    Ok(r)
}

/// Conjugate transpose.
pub fn adjoint(a: ArrayView2<'_, C64>) -> CMatrix {
    a.t().mapv(|x| x.conj())
}

/// Largest absolute entry of `a − a*`.
pub fn hermitian_defect(a: ArrayView2<'_, C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((a[[j, k]] - a[[k, j]].conj()).norm());
        }
    }
    worst
}

/// Induced infinity norm (maximum absolute row sum).
pub fn inf_norm(a: ArrayView2<'_, C64>) -> f64 {
    a.axis_iter(Axis(0))
        .map(|row| row.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: ArrayView2<'_, C64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(a: ArrayView2<'_, C64>) -> Result<Vec<f64>> {
    let (_, s, _) = a.to_owned().svd(false, false)?;
    Ok(s.to_vec())
}

/// Uniform operator norm (largest singular value).
pub fn spectral_norm(a: ArrayView2<'_, C64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(singular_values(a)?[0])
}

/// Smallest singular triplet `(σ, u, v)` with `A v = σ u`.
pub fn smallest_singular_triplet(a: ArrayView2<'_, C64>) -> Result<(f64, Array1<C64>, Array1<C64>)> {
    let n = ensure_square(a)?;
    let (u, s, vt) = a.to_owned().svd(true, true)?;
    let u = u.ok_or_else(|| Error::Linalg("SVD returned no left vectors".into()))?;
    let vt = vt.ok_or_else(|| Error::Linalg("SVD returned no right vectors".into()))?;
    let last = n - 1;
    let left = u.column(last).to_owned();
    let right = vt.row(last).mapv(|x| x.conj());
    Ok((s[last], left, right))
}

/// Smallest singular value by inverse iteration on `A*A`, using one LU
/// factorisation. Falls back to a full SVD when the iteration stalls.
pub fn smallest_singular_value_iterative(a: ArrayView2<'_, C64>) -> Result<f64> {
    let n = ensure_square(a)?;
    let owned = a.to_owned();
    let lu = match owned.factorize() {
        Ok(lu) => lu,
        // exactly singular pivot
        Err(_) => return Ok(0.0),
    };
    let mut x = Array1::from_shape_fn(n, |i| C64::new(1.0 + (i as f64 * 0.7548776662).fract(), 0.0));
    let norm = |v: &Array1<C64>| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nx = norm(&x);
    x.mapv_inplace(|c| c / nx);
    let mut estimate = f64::INFINITY;
    for _ in 0..300 {
        // y = A^{-*} x, then w = A^{-1} y, so w = (A*A)^{-1} x
        let y = lu.solve_h(&x)?;
        let w = lu.solve(&y)?;
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return Ok(0.0);
        }
        let next = 1.0 / nw.sqrt();
        x = w.mapv(|c| c / nw);
        if (next - estimate).abs() <= 1e-14 * next.max(f64::MIN_POSITIVE) {
            let ax = owned.dot(&x);
            return Ok(norm(&ax));
        }
        estimate = next;
    }
    let s = singular_values(a)?;
    Ok(*s.last().unwrap_or(&0.0))
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(a: ArrayView2<'_, C64>) -> Result<Vec<C64>> {
    let n = ensure_square(a)?;
    a.to_owned()
        .eigvals()
        .map(|v| v.to_vec())
        .map_err(|e| Error::EigenSolver {
            dim: n,
            reason: e.to_string(),
        })
}

/// Eigenvalues and right eigenvectors (as columns) of a general matrix.
pub fn eig(a: ArrayView2<'_, C64>) -> Result<(Vec<C64>, CMatrix)> {
    let n = ensure_square(a)?;
    a.to_owned()
        .eig()
        .map(|(w, v)| (w.to_vec(), v))
        .map_err(|e| Error::EigenSolver {
            dim: n,
            reason: e.to_string(),
        })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(a: ArrayView2<'_, C64>) -> Result<Vec<f64>> {
    let n = ensure_square(a)?;
    a.to_owned()
        .eigvalsh(UPLO::Upper)
        .map(|v| v.to_vec())
        .map_err(|e| Error::EigenSolver {
            dim: n,
            reason: e.to_string(),
        })
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
pub fn eigh(a: ArrayView2<'_, C64>) -> Result<(Vec<f64>, CMatrix)> {
    let n = ensure_square(a)?;
    a.to_owned()
        .eigh(UPLO::Upper)
        .map(|(w, v)| (w.to_vec(), v))
        .map_err(|e| Error::EigenSolver {
            dim: n,
            reason: e.to_string(),
        })
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn eigvalsh_real(a: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    a.to_owned()
        .eigvalsh(UPLO::Upper)
        .map(|v| v.to_vec())
        .map_err(|e| Error::EigenSolver {
            dim: n,
            reason: e.to_string(),
        })
}

/// Number of eigenvalues strictly below `x` of the real symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e` (Sturm count).
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues with indices `first..first + count` (ascending order) of a real
/// symmetric tridiagonal matrix, each located by bisection to full precision.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64], first: usize, count: usize) -> Result<Vec<f64>> {
    let n = d.len();
    if e.len() + 1 != n.max(1) || first + count > n {
        return Err(Error::InvalidArgument(format!(
            "tridiagonal of order {n} with {} off-diagonal entries; requested {first}..{}",
            e.len(),
            first + count
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    Ok((first..first + count)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(d, e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect())
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
