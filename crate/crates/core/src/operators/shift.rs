use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::matpoly::{HermitianMatrix, QuadraticPencil};

/// Lower shift on `C^n`: ones on the subdiagonal.
pub fn lower_shift(n: usize) -> CMatrix {
    CMatrix::from_shape_fn((n, n), |(i, j)| if i == j + 1 { ONE } else { ZERO })
}

/// `R_n(z) = (z − S)(z − S*) = z² − (S + S*) z + S S*` with `S` the lower
/// shift. Its spectrum is `{0}` for every `n` although `σ_{R_n}(z) ≤ |z|^{n+1}`
/// stays tiny on the whole unit disc; it exercises the spectral-function
/// machinery on a maximally non-normal example.
pub fn build_shift_fixture(n: usize) -> Result<QuadraticPencil> {
    if n == 0 {
        return Err(Error::InvalidArgument("shift fixture needs n >= 1".into()));
    }
    let s = lower_shift(n);
    let sum = &s + &s.t().mapv(|x| x.conj());
    // S S* = diag(0, 1, …, 1)
    let mut ss = vec![1.0; n];
    ss[0] = 0.0;
    QuadraticPencil::new(HermitianMatrix::new(sum)?, HermitianMatrix::from_real_diagonal(&ss)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::matpoly::MatrixPolynomial;

    #[test]
    fn shift_gram_matrix_is_diagonal() {
        let s = lower_shift(5);
        let g = s.dot(&s.t().mapv(|x: C64| x.conj()));
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j && i > 0 { 1.0 } else { 0.0 };
                assert_eq!(g[[i, j]], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn fixture_factorises() {
        let n = 4;
        let p = build_shift_fixture(n).unwrap();
        let z = C64::new(0.3, -0.2);
        let s = lower_shift(n);
        let id = crate::linalg::identity(n);
        let a = &id * z - &s;
        let b = &id * z - &s.t().mapv(|x| x.conj());
        let diff = (&p.evaluate(z) - &a.dot(&b)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-15);
        assert!(build_shift_fixture(0).is_err());
    }

    #[test]
    fn eigenvalues_cluster_at_zero() {
        // a 2n-fold eigenvalue is only resolved to about eps^(1/2n)
        for n in 1..=8 {
            let p = build_shift_fixture(n).unwrap();
            let z = crate::matpoly::eigenvalues(&p).unwrap();
            assert_eq!(z.len(), 2 * n);
            let spread = 10.0 * f64::EPSILON.powf(1.0 / (2 * n) as f64);
            assert!(z.eigenvalues.iter().all(|w| w.norm() <= spread), "n={n}: {:?}", z.eigenvalues);
            let mean = z.eigenvalues.iter().sum::<C64>() / (2 * n) as f64;
            assert!(mean.norm() < 1e-10, "n={n}: mean {mean}");
            assert!(z.max_residual() < 1e-8);
        }
    }
}
