use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::matpoly;
use crate::operators::{OperatorModel, TruncationPair};

pub const DEFAULT_EPS_FRACTION: f64 = 0.9;

fn check_radii(delta: f64, mu: f64) -> Result<()> {
    if !(delta > 0.0 && mu.is_finite() && delta < mu / 4.0) {
        return Err(Error::Config(format!("need 0 < delta < mu/4, got delta = {delta}, mu = {mu}")));
    }
    Ok(())
}

/// Perturbation size below which the eigenvalue count near an isolated
/// eigenvalue `λ` (gap distance `μ`) is stable:
/// `δ²μ² / (2(2δ² + 3μ²)[w₀ + w₁(μ/4 + |λ|)])`.
pub fn tolerance_bound(delta: f64, mu: f64, lambda: f64, w0: f64, w1: f64) -> Result<f64> {
    check_radii(delta, mu)?;
    if !(w0 >= 0.0 && w1 >= 0.0) || (w0 == 0.0 && w1 == 0.0) || !lambda.is_finite() {
        return Err(Error::Config(format!(
            "weights must be nonnegative and not both zero, got w0 = {w0}, w1 = {w1}"
        )));
    }
    let (d2, m2) = (delta * delta, mu * mu);
    Ok(d2 * m2 / (2.0 * (2.0 * d2 + 3.0 * m2) * (w0 + w1 * (mu / 4.0 + lambda.abs()))))
}

/// Inputs of a perturbation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub w0: f64,
    pub w1: f64,
    pub trials: usize,
    pub seed: u64,
    /// ε as a fraction of the tolerance bound, in `[0, 1)`.
    pub eps_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub count_in_disk: usize,
    pub counts_match: bool,
    pub annulus_clear: bool,
}

/// Outcome of random perturbations `Q(z) = F z − G` with `‖F‖ = w₁ε`,
/// `‖G‖ = w₀ε`. The stability guarantee is asymptotic (it holds beyond an
/// unknown truncation), so failing trials are data rather than errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub model: String,
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub mu: f64,
    pub w0: f64,
    pub w1: f64,
    pub eps_bound: f64,
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub unperturbed_count: usize,
    pub unperturbed_annulus_clear: bool,
    pub counts_match: Vec<bool>,
    pub annulus_clear: Vec<bool>,
    pub outcomes: Vec<TrialOutcome>,
    pub asymptotic_guarantee_only: bool,
}

impl PerturbationReport {
    pub fn all_counts_match(&self) -> bool {
        self.counts_match.iter().all(|&b| b)
    }

    pub fn all_annulus_clear(&self) -> bool {
        self.annulus_clear.iter().all(|&b| b)
    }
}

/// Eigenvalues of `P + Q = z² − (2M − F) z + ([M²] − G)`.
pub fn perturbed_eigenvalues(pair: &TruncationPair, f: &CMatrix, g: &CMatrix) -> Result<Vec<C64>> {
    let linear = pair.m.as_array().mapv(|x| x * 2.0) - f;
    let constant = pair.m2.as_array() - g;
    matpoly::monic_quadratic_eigenvalues(linear.view(), constant.view())
}

/// `(#{|z − λ| < δ}, whether {δ ≤ |z − λ| ≤ μ/4} is empty)`.
pub fn disk_and_annulus(eigenvalues: &[C64], lambda: f64, delta: f64, mu: f64) -> (usize, bool) {
    let l = C64::new(lambda, 0.0);
    let mut inside = 0;
    let mut clear = true;
    for z in eigenvalues {
        let d = (z - l).norm();
        if d < delta {
            inside += 1;
        } else if d <= mu / 4.0 {
            clear = false;
        }
    }
    (inside, clear)
}

/// Complex Gaussian matrix rescaled to spectral norm exactly `norm`.
fn random_with_norm(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> Result<CMatrix> {
    let mut draw = || -> f64 { StandardNormal.sample(rng) };
    let x = CMatrix::from_shape_fn((dim, dim), |_| C64::new(draw(), draw()));
    if norm == 0.0 {
        return Ok(CMatrix::zeros((dim, dim)));
    }
    let s = linalg::spectral_norm(x.view())?;
    Ok(x.mapv(|c| c * (norm / s)))
}

pub fn perturbation_experiment(model: &OperatorModel, spec: &PerturbationSpec) -> Result<PerturbationReport> {
    if spec.trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&spec.eps_fraction) {
        return Err(Error::Config(format!("eps_fraction must lie in [0, 1), got {}", spec.eps_fraction)));
    }
    let mu = model.spectrum_info()?.gap_distance(spec.lambda);
    let eps_bound = tolerance_bound(spec.delta, mu, spec.lambda, spec.w0, spec.w1)?;
    let eps = spec.eps_fraction * eps_bound;
    let pair = model.truncation(spec.n).map_err(|e| Error::at(spec.n, e))?;
    let zero = CMatrix::zeros((pair.dim, pair.dim));
    let base = perturbed_eigenvalues(&pair, &zero, &zero)?;
    let (unperturbed_count, unperturbed_annulus_clear) = disk_and_annulus(&base, spec.lambda, spec.delta, mu);
    let outcomes = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(t as u64);
            let f = random_with_norm(&mut rng, pair.dim, spec.w1 * eps)?;
            let g = random_with_norm(&mut rng, pair.dim, spec.w0 * eps)?;
            let z = perturbed_eigenvalues(&pair, &f, &g)?;
            let (count, clear) = disk_and_annulus(&z, spec.lambda, spec.delta, mu);
            Ok(TrialOutcome {
                count_in_disk: count,
                counts_match: count == unperturbed_count,
                annulus_clear: clear,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::at(spec.n, e))?;
    Ok(PerturbationReport {
        model: model.name().to_string(),
        n: spec.n,
        lambda: spec.lambda,
        delta: spec.delta,
        mu,
        w0: spec.w0,
        w1: spec.w1,
        eps_bound,
        eps,
        trials: spec.trials,
        seed: spec.seed,
        unperturbed_count,
        unperturbed_annulus_clear,
        counts_match: outcomes.iter().map(|o| o.counts_match).collect(),
        annulus_clear: outcomes.iter().map(|o| o.annulus_clear).collect(),
        outcomes,
        asymptotic_guarantee_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_hand_values() {
        let b = tolerance_bound(0.25, 2.0, 123.0, 1.0, 0.0).unwrap();
        assert!((b - 0.25 / 24.25).abs() < 1e-15);
        assert_eq!(b, tolerance_bound(0.25, 2.0, -7.0, 1.0, 0.0).unwrap());
        let half = tolerance_bound(0.25, 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((half - b / 2.0).abs() < 1e-16);
        assert!(tolerance_bound(0.5, 2.0, 0.0, 1.0, 0.0).is_err());
        assert!(tolerance_bound(0.1, 2.0, 0.0, 0.0, 0.0).is_err());
        assert!(tolerance_bound(0.1, 2.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn zero_fraction_reproduces_unperturbed_spectrum() {
        let spec = PerturbationSpec {
            n: 10,
            lambda: -0.7673578960380898,
            delta: 0.05,
            w0: 1.0,
            w1: 1.0,
            trials: 3,
            seed: 1,
            eps_fraction: 0.0,
        };
        let r = perturbation_experiment(&OperatorModel::FourierB1, &spec).unwrap();
        assert!(r.all_counts_match());
        assert!(r.annulus_clear.iter().all(|&c| c == r.unperturbed_annulus_clear));
        assert_eq!(r.eps, 0.0);
    }

    #[test]
    fn zero_matrices_leave_spectrum_unchanged() {
        let pair = crate::operators::build_b1(6).unwrap();
        let zero = CMatrix::zeros((13, 13));
        let a = perturbed_eigenvalues(&pair, &zero, &zero).unwrap();
        let b = perturbed_eigenvalues(&pair, &zero, &zero).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rescaled_draw_has_exact_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_with_norm(&mut rng, 7, 0.125).unwrap();
        assert!((linalg::spectral_norm(x.view()).unwrap() - 0.125).abs() < 1e-15);
    }
}
