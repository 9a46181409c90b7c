use std::cmp::Ordering;

use ndarray::{s, ArrayView2};

use super::{MatrixPolynomial, QuadraticPencil};
use crate::error::Result;
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Spec P of a quadratic pencil: `2·dim` eigenvalues with multiplicity,
/// sorted by real part then imaginary part.
///
/// `residuals[i]` is `‖P(z_i) x_i‖ / ‖x_i‖` for the eigenvector `x_i`
/// recovered from the linearisation. It bounds the spectral function from
/// above, so a small residual certifies `σ_P(z_i) ≈ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    pub residuals: Vec<f64>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn conjugate_pairing_defect(&self) -> f64 {
        conjugate_pairing_defect(&self.eigenvalues)
    }
}

/// Block companion `[[0, I], [−C, B]]` of `z² − B z + C`.
pub fn companion_of_monic(linear: ArrayView2<'_, C64>, constant: ArrayView2<'_, C64>) -> CMatrix {
    let n = linear.nrows();
    let mut l = CMatrix::from_elem((2 * n, 2 * n), ZERO);
    for i in 0..n {
        l[[i, n + i]] = C64::new(1.0, 0.0);
    }
    l.slice_mut(s![n.., ..n]).assign(&constant.mapv(|x| -x));
    l.slice_mut(s![n.., n..]).assign(&linear);
    l
}

/// Block companion linearisation of a Hermitian quadratic pencil; its
/// eigenvalues are exactly Spec P.
pub fn companion_linearize(pencil: &QuadraticPencil) -> CMatrix {
    companion_of_monic(pencil.linear_coeff().view(), pencil.constant_coeff().view())
}

/// Eigenvalues of the (not necessarily Hermitian) monic pencil
/// `z² − B z + C`, unsorted.
pub fn monic_quadratic_eigenvalues(linear: ArrayView2<'_, C64>, constant: ArrayView2<'_, C64>) -> Result<Vec<C64>> {
    linalg::eigvals(companion_of_monic(linear, constant).view())
}

/// When `[M²]_n = M_n²` the pencil is the perfect square `(z − M_n)²`, the
/// subspace is invariant, and the spectrum is that of the Hermitian `M_n`
/// with each eigenvalue doubled. The companion route would lose half the
/// digits on those double roots.
fn is_exact_square(pencil: &QuadraticPencil) -> bool {
    let scale = pencil.scale();
    linalg::max_abs(pencil.schur_complement().view()) <= 64.0 * f64::EPSILON * scale * scale
}

fn sort_spectrum(z: &mut [C64]) {
    z.sort_by(|a, b| cmp_complex(a, b));
}

pub(crate) fn cmp_complex(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues only, sorted. Used by sweeps where per-eigenvalue residuals
/// would dominate the cost.
pub fn eigenvalues_only(pencil: &QuadraticPencil) -> Result<Vec<C64>> {
    let mut z = if is_exact_square(pencil) {
        let m = pencil.half_linear();
        let w = linalg::eigvalsh(m.view())?;
        w.iter().flat_map(|&x| [C64::new(x, 0.0); 2]).collect()
    } else {
        linalg::eigvals(companion_linearize(pencil).view())?
    };
    sort_spectrum(&mut z);
    Ok(z)
}

/// Full spectrum with residuals.
pub fn eigenvalues(pencil: &QuadraticPencil) -> Result<SpectrumResult> {
    let n = pencil.dim();
    let mut pairs: Vec<(C64, f64)> = if is_exact_square(pencil) {
        let m = pencil.half_linear();
        let (w, v) = linalg::eigh(m.view())?;
        let mut out = Vec::with_capacity(2 * n);
        for (k, &lam) in w.iter().enumerate() {
            let z = C64::new(lam, 0.0);
            let r = residual(pencil, z, v.column(k).to_vec());
            out.push((z, r));
            out.push((z, r));
        }
        out
    } else {
        let (w, vecs) = linalg::eig(companion_linearize(pencil).view())?;
        w.iter()
            .enumerate()
            .map(|(k, &z)| {
                let col = vecs.column(k);
                let top: Vec<C64> = col.slice(s![..n]).to_vec();
                let bottom: Vec<C64> = col.slice(s![n..]).to_vec();
                // the eigenvector is [x; z x]; keep the better-scaled half
                let x = if linalg::vector_norm(&top) >= linalg::vector_norm(&bottom) {
                    top
                } else {
                    bottom
                };
                (z, residual(pencil, z, x))
            })
            .collect()
    };
    pairs.sort_by(|a, b| cmp_complex(&a.0, &b.0));
    let (eigenvalues, residuals) = pairs.into_iter().unzip();
    Ok(SpectrumResult {
        eigenvalues,
        residuals,
    })
}

fn residual(pencil: &QuadraticPencil, z: C64, x: Vec<C64>) -> f64 {
    let nx = linalg::vector_norm(&x);
    if nx == 0.0 {
        return f64::INFINITY;
    }
    let x = ndarray::Array1::from(x);
    let px = pencil.evaluate(z).dot(&x);
    linalg::vector_norm(px.as_slice().expect("contiguous")) / nx
}

/// Largest normalised distance `|w − conj(z)| / (1 + |z|)` over a greedy
/// nearest-match pairing of the multiset with its conjugate. Matching visits
/// eigenvalues by ascending real part; ties go to the smaller real part.
pub fn conjugate_pairing_defect(z: &[C64]) -> f64 {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| cmp_complex(&z[a], &z[b]));
    let mut used = vec![false; z.len()];
    let mut worst = 0.0f64;
    for &i in &order {
        if used[i] {
            continue;
        }
        let target = z[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for &j in &order {
            if used[j] {
                continue;
            }
            let d = (z[j] - target).norm();
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((j, d)),
            }
        }
        let (j, d) = best.expect("i itself is unused");
        used[i] = true;
        used[j] = true;
        worst = worst.max(d / (1.0 + z[i].norm()));
    }
    worst
}
