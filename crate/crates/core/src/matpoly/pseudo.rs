use ndarray::Array1;
use rayon::prelude::*;

use super::{MatrixPolynomial, PseudospectraWeights, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Dimension up to which σ_P uses a full SVD; larger pencils use inverse
/// iteration on `P(z)* P(z)`.
pub const DENSE_SVD_LIMIT: usize = 512;

/// Spectral function: the smallest singular value of `P(z)`.
pub fn spectral_function<P: MatrixPolynomial + ?Sized>(pencil: &P, z: C64) -> Result<f64> {
    let pz = pencil.evaluate(z);
    if pencil.dim() <= DENSE_SVD_LIMIT {
        let s = linalg::singular_values(pz.view())?;
        Ok(*s.last().unwrap_or(&0.0))
    } else {
        linalg::smallest_singular_value_iterative(pz.view())
    }
}

/// Membership in the weighted ε-pseudospectrum
/// `{z : σ_P(z) ≤ ε (w_0 + w_1|z| + … + w_m|z|^m)}`.
///
/// The right-hand side is floored at the residual tolerance so that ε = 0
/// reproduces Spec P up to rounding.
pub fn pseudospectrum_member<P: MatrixPolynomial + ?Sized>(
    pencil: &P,
    z: C64,
    eps: f64,
    weights: &PseudospectraWeights,
) -> Result<bool> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be finite and >= 0, got {eps}")));
    }
    if weights.as_slice().len() != pencil.degree() + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} weights for a degree-{} pencil, got {}",
            pencil.degree() + 1,
            pencil.degree(),
            weights.as_slice().len()
        )));
    }
    if eps > 0.0 && weights.all_zero() {
        return Err(Error::InvalidArgument("weights must not all vanish when eps > 0".into()));
    }
    Ok(spectral_function(pencil, z)? <= pseudospectrum_threshold(pencil, z, eps, weights))
}

/// Right-hand side of the membership test at `z`, floored at the residual
/// tolerance.
pub fn pseudospectrum_threshold<P: MatrixPolynomial + ?Sized>(
    pencil: &P,
    z: C64,
    eps: f64,
    weights: &PseudospectraWeights,
) -> f64 {
    (eps * weights.radius_factor(z)).max(RESIDUAL_TOL * pencil.coefficient_scale())
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }
}

/// σ_P sampled at cell centres, row-major from `(re_min, im_min)`: the value
/// for column `i` (real axis) and row `j` (imaginary axis) is at `j·nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn re_at(&self, i: usize) -> f64 {
        cell_centre(self.rect.re_min, self.rect.re_max, self.nx, i)
    }

    pub fn im_at(&self, j: usize) -> f64 {
        cell_centre(self.rect.im_min, self.rect.im_max, self.ny, j)
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.re_at(i), self.im_at(j))
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Cells whose value does not exceed any of their (up to eight)
    /// neighbours.
    pub fn local_minima(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                let v = self.value(i, j);
                let mut is_min = true;
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
                            continue;
                        }
                        if self.value(ii as usize, jj as usize) < v {
                            is_min = false;
                        }
                    }
                }
                if is_min {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn cell_centre(lo: f64, hi: f64, count: usize, idx: usize) -> f64 {
    lo + ((2 * idx + 1) as f64) * (hi - lo) / ((2 * count) as f64)
}

pub fn grid_sample<P: MatrixPolynomial + ?Sized>(pencil: &P, rect: Rect, nx: usize, ny: usize) -> Result<Grid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!("grid resolution must be >= 2, got {nx}x{ny}")));
    }
    let values = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let z = C64::new(
                cell_centre(rect.re_min, rect.re_max, nx, i),
                cell_centre(rect.im_min, rect.im_max, ny, j),
            );
            spectral_function(pencil, z)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Grid { rect, nx, ny, values })
}

/// Rank-one `E` of norm σ_P(z) with `P(z) + E` singular, built from the
/// smallest singular triplet `P(z) v = σ u` as `E = −σ u v*`.
pub fn rank_one_distance_witness<P: MatrixPolynomial + ?Sized>(pencil: &P, z: C64) -> Result<CMatrix> {
    let pz = pencil.evaluate(z);
    let (sigma, u, v) = linalg::smallest_singular_triplet(pz.view())?;
    if sigma <= 1e-14 * pencil.coefficient_scale() * (1.0 + z.norm_sqr()) {
        return Err(Error::InSpectrum { sigma });
    }
    let u = u.into_shape_with_order((pz.nrows(), 1)).expect("column");
    let vh: Array1<C64> = v.mapv(|x| x.conj());
    let vh = vh.into_shape_with_order((1, pz.nrows())).expect("row");
    Ok(u.dot(&vh).mapv(|x| x * (-sigma)))
}
