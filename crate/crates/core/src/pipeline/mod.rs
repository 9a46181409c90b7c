//! End-to-end drivers: eigenvalue selection, enclosures, convergence studies
//! and perturbation experiments.

mod perturb;

pub use perturb::{
    disk_and_annulus, perturbation_experiment, perturbed_eigenvalues, tolerance_bound, PerturbationReport,
    PerturbationSpec, TrialOutcome, DEFAULT_EPS_FRACTION,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::matpoly::{self, spectral_function, QuadraticPencil, SpectrumResult};
use crate::operators::OperatorModel;

/// Relative distance under which two candidates count as tied.
const TIE_TOL: f64 = 1e-12;

/// Eigenvalue closest to `target`. Ties prefer `Im z ≥ 0`, then the smaller
/// real part.
pub fn nearest_eigenvalue(eigenvalues: &[C64], target: f64) -> Result<C64> {
    let t = C64::new(target, 0.0);
    let best = eigenvalues
        .iter()
        .map(|z| (z - t).norm())
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::InvalidArgument("nearest eigenvalue of an empty spectrum".into()));
    }
    let limit = best * (1.0 + TIE_TOL);
    eigenvalues
        .iter()
        .copied()
        .filter(|z| (z - t).norm() <= limit)
        .min_by(|a, b| {
            (a.im < 0.0)
                .cmp(&(b.im < 0.0))
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        })
        .ok_or_else(|| Error::InvalidArgument("nearest eigenvalue of an empty spectrum".into()))
}

/// Real interval `[Re z − |Im z|, Re z + |Im z|]` guaranteed to meet the
/// spectrum of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub witness: C64,
}

impl Enclosure {
    pub fn from_eigenvalue(z: C64) -> Self {
        Self {
            lo: z.re - z.im.abs(),
            hi: z.re + z.im.abs(),
            witness: z,
        }
    }

    /// Enclosure for an approximate eigenvalue with residual
    /// `r = ‖P(z)x‖/‖x‖`. Since `Re x*P(z)x = ‖(M − Re z)x‖² − (Im z)²‖x‖²`,
    /// the half-width `√((Im z)² + r)` still meets the spectrum. Near-double
    /// real roots are only resolved to about `√ε`, which this absorbs.
    pub fn with_residual(z: C64, residual: f64) -> Self {
        let half = (z.im * z.im + residual.max(0.0)).sqrt();
        Self {
            lo: z.re - half,
            hi: z.re + half,
            witness: z,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// One enclosure per eigenvalue with `|Im z| ≤ imag_cut`, sorted by `lo`.
pub fn enclosures(eigenvalues: &[C64], imag_cut: f64) -> Result<Vec<Enclosure>> {
    if !(imag_cut >= 0.0) {
        return Err(Error::InvalidArgument(format!("imag_cut must be >= 0, got {imag_cut}")));
    }
    let mut out: Vec<Enclosure> = eigenvalues
        .iter()
        .filter(|z| z.im.abs() <= imag_cut)
        .map(|&z| Enclosure::from_eigenvalue(z))
        .collect();
    out.sort_by(|a, b| {
        a.lo.total_cmp(&b.lo)
            .then(a.hi.total_cmp(&b.hi))
            .then(a.witness.im.total_cmp(&b.witness.im))
    });
    Ok(out)
}

/// One row of a convergence table. `err = |z_n − λ|` stands in for the
/// (uncomputable) eigenvector approximation error; `slope` is the forward
/// log-log difference to the next row and is absent on the last row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub z: C64,
    pub err: f64,
    pub log_err: f64,
    pub log_n: f64,
    pub slope: Option<f64>,
    /// Spectral function at `z`, a certificate that `z` is an eigenvalue.
    pub residual: f64,
}

/// Convergence study for a model. Errors carry the failing `n`.
pub fn convergence_study(model: &OperatorModel, lambda_ref: f64, ns: &[usize]) -> Result<Vec<ConvergenceRecord>> {
    convergence_study_with(|n| model.pencil(n), lambda_ref, ns)
}

/// Convergence study over an arbitrary family of pencils.
pub fn convergence_study_with<F>(build: F, lambda_ref: f64, ns: &[usize]) -> Result<Vec<ConvergenceRecord>>
where
    F: Fn(usize) -> Result<QuadraticPencil> + Sync,
{
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty list of truncations".into()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "truncations must be positive and strictly increasing, got {ns:?}"
        )));
    }
    if !lambda_ref.is_finite() {
        return Err(Error::InvalidArgument(format!("reference value must be finite, got {lambda_ref}")));
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let run = || -> Result<(C64, f64)> {
                let pencil = build(n)?;
                let z = nearest_eigenvalue(&matpoly::eigenvalues_only(&pencil)?, lambda_ref)?;
                Ok((z, spectral_function(&pencil, z)?))
            };
            run().map_err(|e| Error::at(n, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<ConvergenceRecord> = ns
        .iter()
        .zip(rows)
        .map(|(&n, (z, residual))| {
            let err = (z - C64::new(lambda_ref, 0.0)).norm();
            ConvergenceRecord {
                n,
                z,
                err,
                log_err: err.ln(),
                log_n: (n as f64).ln(),
                slope: None,
                residual,
            }
        })
        .collect();
    for i in 0..out.len().saturating_sub(1) {
        let (a, b) = (&out[i], &out[i + 1]);
        out[i].slope = Some((b.log_err - a.log_err) / (b.log_n - a.log_n));
    }
    Ok(out)
}

/// Nearest eigenvalue to one requested target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearestHit {
    pub target: f64,
    pub z: C64,
    pub err: f64,
}

#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub spectrum: SpectrumResult,
    pub enclosures: Vec<Enclosure>,
    pub nearest: Vec<NearestHit>,
}

/// Build, solve, enclose and pick the eigenvalues nearest to `targets`.
pub fn method_pipeline(model: &OperatorModel, n: usize, targets: &[f64], imag_cut: f64) -> Result<MethodOutput> {
    let pencil = model.pencil(n).map_err(|e| Error::at(n, e))?;
    let spectrum = matpoly::eigenvalues(&pencil).map_err(|e| Error::at(n, e))?;
    let encl = enclosures(&spectrum.eigenvalues, imag_cut)?;
    let nearest = targets
        .iter()
        .map(|&t| {
            let z = nearest_eigenvalue(&spectrum.eigenvalues, t)?;
            Ok(NearestHit {
                target: t,
                z,
                err: (z - C64::new(t, 0.0)).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MethodOutput {
        spectrum,
        enclosures: encl,
        nearest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_basic_and_ties() {
        let spec = [C64::new(2.0, 1.0), C64::new(5.0, 0.0)];
        assert_eq!(nearest_eigenvalue(&spec, 4.9).unwrap(), C64::new(5.0, 0.0));
        let pair = [C64::new(1.0, -1.0), C64::new(1.0, 1.0)];
        assert_eq!(nearest_eigenvalue(&pair, 1.0).unwrap(), C64::new(1.0, 1.0));
        let mirrored = [C64::new(2.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(nearest_eigenvalue(&mirrored, 1.0).unwrap(), C64::new(0.0, 0.0));
        assert!(nearest_eigenvalue(&[], 1.0).is_err());
    }

    #[test]
    fn enclosure_formula() {
        let e = enclosures(&[C64::new(1.0, 0.5), C64::new(3.0, 0.0), C64::new(0.0, 9.0)], 1.0).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].lo, e[0].hi), (0.5, 1.5));
        assert_eq!((e[1].lo, e[1].hi), (3.0, 3.0));
        assert!(enclosures(&[], -1.0).is_err());
        assert_eq!(enclosures(&[C64::new(0.0, 9.0)], f64::INFINITY).unwrap().len(), 1);
    }

    #[test]
    fn harmonic_study_is_exact() {
        let recs = convergence_study(&OperatorModel::HarmonicSanity, 3.0, &[1, 2, 5, 30]).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.err < 1e-10));
        assert!(recs[3].slope.is_none() && recs[0].slope.is_some());
        assert!(convergence_study(&OperatorModel::HarmonicSanity, 3.0, &[2, 2]).is_err());
        assert!(convergence_study(&OperatorModel::HarmonicSanity, 3.0, &[]).is_err());
    }
}
