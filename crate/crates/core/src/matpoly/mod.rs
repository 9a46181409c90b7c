//! Matrix polynomials with Hermitian coefficients.
//!
//! The central object is the monic quadratic pencil
//! `P(z) = z² I − B z + C` with `B = 2 M_n` and `C = [M²]_n`. Degree-general
//! pencils are supported for the spectral function and pseudospectra only.

mod pseudo;
mod spectrum;

pub use pseudo::{
    grid_sample, pseudospectrum_member, pseudospectrum_threshold, rank_one_distance_witness, spectral_function, Grid, Rect,
    DENSE_SVD_LIMIT,
};
pub use spectrum::{
    companion_linearize, companion_of_monic, conjugate_pairing_defect, eigenvalues,
    eigenvalues_only, monic_quadratic_eigenvalues, SpectrumResult,
};

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Relative tolerance on the Hermitian defect accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative tolerance for residuals at computed eigenvalues.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative tolerance for the positive-semidefiniteness checks.
pub const PSD_TOL: f64 = 1e-10;

/// Dense Hermitian matrix. Inputs are symmetrised on construction and the
/// original defect `max |a − a*|` is kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
    defect: f64,
}

impl HermitianMatrix {
    pub fn new(a: CMatrix) -> Result<Self> {
        let n = linalg::ensure_square(a.view())?;
        if n == 0 {
            return Err(Error::InvalidArgument("Hermitian matrix must have dim >= 1".into()));
        }
        let scale = linalg::inf_norm(a.view()).max(1.0);
        let defect = linalg::hermitian_defect(a.view());
        let tolerance = HERMITIAN_TOL * scale;
        if !(defect <= tolerance) {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        let adj = linalg::adjoint(a.view());
        let data = (&a + &adj).mapv(|x| x * 0.5);
        Ok(Self { data, defect })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(Array2::from_diag(&ndarray::Array1::from(d)))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.data.view()
    }

    pub fn as_array(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_array(self) -> CMatrix {
        self.data
    }

    /// Hermitian defect of the matrix as it was supplied.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn inf_norm(&self) -> f64 {
        linalg::inf_norm(self.data.view())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let w = linalg::eigvalsh(self.data.view())?;
        Ok(w[0])
    }
}

/// Anything that can be evaluated as a square matrix polynomial.
pub trait MatrixPolynomial: Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn evaluate(&self, z: C64) -> CMatrix;
    /// `max(1, ‖A_k‖_∞)` over the coefficients.
    fn coefficient_scale(&self) -> f64;
}

/// Monic Hermitian quadratic pencil `z² I − B z + C`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPencil {
    linear: HermitianMatrix,
    constant: HermitianMatrix,
}

impl QuadraticPencil {
    /// Builds the pencil from `B` (the linear coefficient, `2 M_n` for a
    /// truncation pair) and `C`. `C` must be positive semidefinite.
    pub fn new(linear: HermitianMatrix, constant: HermitianMatrix) -> Result<Self> {
        if linear.dim() != constant.dim() {
            return Err(Error::DimensionMismatch {
                expected: linear.dim(),
                found: constant.dim(),
            });
        }
        let scale = constant.inf_norm().max(1.0);
        let min_eig = constant.min_eigenvalue()?;
        if min_eig < -PSD_TOL * scale {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        Ok(Self { linear, constant })
    }

    /// `z² − 2 M z + M2`.
    pub fn from_truncation(m: &HermitianMatrix, m2: &HermitianMatrix) -> Result<Self> {
        let linear = HermitianMatrix::new(m.as_array().mapv(|x| x * 2.0))?;
        Self::new(linear, m2.clone())
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    /// The stored linear coefficient `B` (so `P(z) = z² − B z + C`).
    pub fn linear_coeff(&self) -> &HermitianMatrix {
        &self.linear
    }

    pub fn constant_coeff(&self) -> &HermitianMatrix {
        &self.constant
    }

    /// `B / 2`, i.e. `M_n` for pencils built from a truncation pair.
    pub fn half_linear(&self) -> CMatrix {
        self.linear.as_array().mapv(|x| x * 0.5)
    }

    /// `C − (B/2)²`, which equals `[M²]_n − M_n²` for a truncation pair.
    pub fn schur_complement(&self) -> CMatrix {
        let m = self.half_linear();
        self.constant.as_array() - &m.dot(&m)
    }

    pub fn scale(&self) -> f64 {
        self.linear.inf_norm().max(self.constant.inf_norm()).max(1.0)
    }
}

impl MatrixPolynomial for QuadraticPencil {
    fn dim(&self) -> usize {
        self.linear.dim()
    }

    fn degree(&self) -> usize {
        2
    }

    fn evaluate(&self, z: C64) -> CMatrix {
        let mut out = self.constant.as_array() - &self.linear.as_array().mapv(|b| b * z);
        let z2 = z * z;
        for i in 0..out.nrows() {
            out[[i, i]] += z2;
        }
        out
    }

    fn coefficient_scale(&self) -> f64 {
        self.scale()
    }
}

/// `P(z) = Σ A_k z^k` with a nonsingular leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPencil {
    coeffs: Vec<CMatrix>,
}

impl GeneralPencil {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("pencil needs at least one coefficient".into()))?;
        let n = linalg::ensure_square(first.view())?;
        if n == 0 {
            return Err(Error::InvalidArgument("pencil dimension must be >= 1".into()));
        }
        for a in &coeffs {
            let k = linalg::ensure_square(a.view())?;
            if k != n {
                return Err(Error::DimensionMismatch { expected: n, found: k });
            }
        }
        let lead = coeffs.last().expect("nonempty");
        let sigma_min = *linalg::singular_values(lead.view())?.last().unwrap_or(&0.0);
        if !(sigma_min > 1e-12) {
            return Err(Error::SingularLeadingCoefficient { sigma_min });
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }
}

impl From<&QuadraticPencil> for GeneralPencil {
    fn from(p: &QuadraticPencil) -> Self {
        let n = p.dim();
        Self {
            coeffs: vec![
                p.constant.as_array().clone(),
                p.linear.as_array().mapv(|b| -b),
                linalg::identity(n),
            ],
        }
    }
}

impl MatrixPolynomial for GeneralPencil {
    fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn evaluate(&self, z: C64) -> CMatrix {
        // Horner
        let n = self.dim();
        let mut acc = CMatrix::from_elem((n, n), ZERO);
        for a in self.coeffs.iter().rev() {
            acc = acc.mapv(|x| x * z) + a;
        }
        acc
    }

    fn coefficient_scale(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|a| linalg::inf_norm(a.view()))
            .fold(1.0, f64::max)
    }
}

/// Weight vector `(w_0, …, w_m)` for weighted pseudospectra.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudospectraWeights(Vec<f64>);

impl PseudospectraWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("weights must not be empty".into()));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn all_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// `w_0 + w_1 |z| + … + w_m |z|^m`.
    pub fn radius_factor(&self, z: C64) -> f64 {
        let r = z.norm();
        self.0.iter().rev().fold(0.0, |acc, &w| acc * r + w)
    }
}
