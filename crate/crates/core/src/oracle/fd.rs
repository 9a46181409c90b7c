use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Largest change tolerated between the base grid and the refined grid.
pub const FD_GATE: f64 = 1e-6;

/// Lowest eigenvalues of `−∂² + V` from three-point finite differences with
/// Dirichlet ends, plus the same on a refined grid (`1.5·L`, `2·N`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSpectrum {
    pub half_width: f64,
    pub grid_points: usize,
    pub eigenvalues: Vec<f64>,
    pub refined: Vec<f64>,
    pub max_change: f64,
    pub converged: bool,
}

/// `count` lowest eigenvalues of the `N`-point discretisation on `[−L, L]`
/// with spacing `2L/(N+1)`.
pub fn fd_eigenvalues(v: &dyn Fn(f64) -> f64, half_width: f64, grid_points: usize, count: usize) -> Result<Vec<f64>> {
    let h = 2.0 * half_width / (grid_points + 1) as f64;
    let inv = 1.0 / (h * h);
    let diag: Vec<f64> = (1..=grid_points).map(|i| 2.0 * inv + v(-half_width + i as f64 * h)).collect();
    let off = vec![-inv; grid_points - 1];
    linalg::tridiagonal_eigenvalues(&diag, &off, 0, count)
}

/// Reference eigenvalues with the convergence gate applied. A failed gate is
/// reported through `converged`, not as an error.
pub fn schrodinger_fd(v: &dyn Fn(f64) -> f64, half_width: f64, grid_points: usize, count: usize) -> Result<FdSpectrum> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidArgument(format!("half width must be positive, got {half_width}")));
    }
    if grid_points < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 grid points, got {grid_points}")));
    }
    if count == 0 || count > grid_points {
        return Err(Error::InvalidArgument(format!("count must be in 1..={grid_points}")));
    }
    let eigenvalues = fd_eigenvalues(v, half_width, grid_points, count)?;
    let refined = fd_eigenvalues(v, 1.5 * half_width, 2 * grid_points, count)?;
    let max_change = eigenvalues
        .iter()
        .zip(&refined)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(FdSpectrum {
        half_width,
        grid_points,
        eigenvalues,
        refined,
        max_change,
        converged: max_change < FD_GATE,
    })
}

/// Bottom of the spectrum of `−∂² + a cos(ωx)`, from the periodic ground
/// state in the Fourier basis `e^{imωx}`, `|m| ≤ 40`.
pub fn periodic_band_bottom(amplitude: f64, frequency: f64) -> Result<f64> {
    let modes = 40i64;
    let dim = (2 * modes + 1) as usize;
    let mut a = ndarray::Array2::<C64>::zeros((dim, dim));
    for r in 0..dim {
        let m = r as i64 - modes;
        a[[r, r]] = C64::new((m as f64 * frequency).powi(2), 0.0);
        if r + 1 < dim {
            a[[r, r + 1]] = C64::new(amplitude / 2.0, 0.0);
            a[[r + 1, r]] = C64::new(amplitude / 2.0, 0.0);
        }
    }
    Ok(linalg::eigvalsh(a.view())?[0])
}
