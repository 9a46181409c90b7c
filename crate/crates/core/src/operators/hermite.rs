//! Schrödinger operators `−∂² + V` on `L²(ℝ)` in the Hermite-function basis.
//!
//! The kinetic part is assembled exactly from the ladder relations; only the
//! potential goes through Gauss–Hermite quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use ndarray::Array2;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use super::TruncationPair;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::matpoly::HermitianMatrix;

/// Entry change allowed when the node count doubles.
pub const QUADRATURE_GATE: f64 = 1e-8;
/// Refuse rules larger than this.
pub const MAX_NODES: usize = 4096;

/// Potentials with pointwise evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", from = "PotentialRepr")]
pub enum Potential {
    Zero,
    Harmonic,
    /// `−depth·exp(−(x/width)²) + amplitude·cos(frequency·x)`.
    WellPlusPeriodic {
        depth: f64,
        width: f64,
        amplitude: f64,
        frequency: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum PotentialRepr {
    Zero {},
    Harmonic {},
    WellPlusPeriodic {
        depth: f64,
        width: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl From<PotentialRepr> for Potential {
    fn from(r: PotentialRepr) -> Self {
        match r {
            PotentialRepr::Zero {} => Potential::Zero,
            PotentialRepr::Harmonic {} => Potential::Harmonic,
            PotentialRepr::WellPlusPeriodic {
                depth,
                width,
                amplitude,
                frequency,
            } => Potential::WellPlusPeriodic {
                depth,
                width,
                amplitude,
                frequency,
            },
        }
    }
}

impl Potential {
    /// `−8e^{−x²} + cos x`: a decaying well on top of a periodic background.
    pub const DEMO: Potential = Potential::WellPlusPeriodic {
        depth: 8.0,
        width: 1.0,
        amplitude: 1.0,
        frequency: 1.0,
    };

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Harmonic => x * x,
            Potential::WellPlusPeriodic {
                depth,
                width,
                amplitude,
                frequency,
            } => -depth * (-(x / width).powi(2)).exp() + amplitude * (frequency * x).cos(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Potential::WellPlusPeriodic {
            depth,
            width,
            amplitude,
            frequency,
        } = *self
        {
            let finite = [depth, width, amplitude, frequency].iter().all(|v| v.is_finite());
            if !finite || width <= 0.0 {
                return Err(Error::Config(format!("invalid potential parameters {self:?}")));
            }
        }
        Ok(())
    }
}

/// Values `φ_0(x), …, φ_{count−1}(x)` of the normalised Hermite functions.
///
/// The three-term recurrence runs on rescaled values with the Gaussian factor
/// kept as a separate logarithm, so large `|x|` underflows cleanly to zero
/// instead of producing `0·∞`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    scaled_recurrence(x, count, |_, psi, log_scale| out.push(psi * log_scale.exp()));
    out
}

/// Runs the recurrence and reports `(k, ψ_k, L)` with `φ_k = ψ_k e^L`.
fn scaled_recurrence(x: f64, count: usize, mut visit: impl FnMut(usize, f64, f64)) {
    if count == 0 {
        return;
    }
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    visit(0, cur, log_scale);
    for k in 0..count - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev /= 1e150;
            cur /= 1e150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
        visit(k + 1, cur, log_scale);
    }
}

/// Gauss–Hermite rule in the form `∫ f ≈ Σ w_i f(x_i)` for integrands that
/// already carry the Gaussian decay (products of Hermite functions).
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Nodes from the Jacobi matrix by bisection, polished with Newton on
    /// `φ_q`; weights `1 / Σ_k φ_k(x_i)²` (Christoffel numbers with the
    /// Gaussian folded in).
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 || q > MAX_NODES {
            return Err(Error::Quadrature(format!("node count {q} outside 1..={MAX_NODES}")));
        }
        let diag = vec![0.0; q];
        let off: Vec<f64> = (1..q).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let mut nodes = linalg::tridiagonal_eigenvalues(&diag, &off, 0, q)?;
        let qf = q as f64;
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (mut last, mut before) = ((0.0, 0.0), (0.0, 0.0));
                scaled_recurrence(*x, q + 1, |k, psi, log_scale| {
                    if k == q {
                        last = (psi, log_scale);
                    } else if k == q - 1 {
                        before = (psi, log_scale);
                    }
                });
                let (last, before) = (last.0, before.0 * (before.1 - last.1).exp());
                // φ_q' = √(2q) φ_{q−1} − x φ_q, on a common scale
                let deriv = (2.0 * qf).sqrt() * before - *x * last;
                if deriv != 0.0 {
                    *x -= last / deriv;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let mut terms = Vec::with_capacity(q);
                scaled_recurrence(x, q, |_, psi, log_scale| {
                    if psi != 0.0 {
                        terms.push(2.0 * (psi.abs().ln() + log_scale));
                    }
                });
                let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
                (-lse).exp()
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

static RULES: Lazy<Mutex<HashMap<usize, Arc<HermiteRule>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached rule with `q` nodes.
pub fn hermite_rule(q: usize) -> Result<Arc<HermiteRule>> {
    if let Some(r) = RULES.lock().expect("rule cache").get(&q) {
        return Ok(r.clone());
    }
    let rule = Arc::new(HermiteRule::new(q)?);
    Ok(RULES.lock().expect("rule cache").entry(q).or_insert(rule).clone())
}

pub fn default_nodes(n: usize) -> usize {
    4 * (n + 1) + 64
}

/// Kinetic matrix `⟨−φ_k″, φ_l⟩ = (2k+1)δ_{lk} − ⟨x²φ_k, φ_l⟩` for
/// `l < rows`, `k < cols`.
pub fn kinetic_matrix(rows: usize, cols: usize) -> Array2<f64> {
    let mut t = Array2::zeros((rows, cols));
    for k in 0..cols {
        let kf = k as f64;
        if k < rows {
            // ⟨x²φ_k, φ_k⟩ = k + ½
            t[[k, k]] = 2.0 * kf + 1.0 - (kf + 0.5);
        }
        if k + 2 < rows {
            t[[k + 2, k]] = -((kf + 1.0) * (kf + 2.0)).sqrt() / 2.0;
        }
        if k >= 2 && k - 2 < rows {
            t[[k - 2, k]] = -((kf - 1.0) * kf).sqrt() / 2.0;
        }
    }
    t
}

/// Potential moments `⟨Vφ_k, φ_l⟩` (l < n+3, k < n+1) and `⟨Vφ_k, Vφ_j⟩`
/// (j, k < n+1) from a `q`-node rule.
fn potential_moments(v: &Potential, n: usize, q: usize) -> Result<(Array2<f64>, Array2<f64>)> {
    let rule = hermite_rule(q)?;
    let ext = n + 3;
    let mut phi = Array2::<f64>::zeros((rule.len(), ext));
    let mut wv = Array2::<f64>::zeros((rule.len(), ext));
    let mut wvv = Array2::<f64>::zeros((rule.len(), n + 1));
    for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let vx = v.eval(x);
        for (k, f) in hermite_functions(x, ext).into_iter().enumerate() {
            phi[[i, k]] = f;
            wv[[i, k]] = w * vx * f;
            if k <= n {
                wvv[[i, k]] = w * vx * vx * f;
            }
        }
    }
    let first = phi.t().dot(&wv.slice(ndarray::s![.., ..n + 1]));
    let second = phi.slice(ndarray::s![.., ..n + 1]).t().dot(&wvv);
    Ok((first, second))
}

fn max_change(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Truncation of `−∂² + V` to `span{φ_0, …, φ_n}`.
///
/// `[M²]_n` is `⟨Mφ_k, Mφ_j⟩`, where `Mφ_k` has exact kinetic components on
/// `φ_0..φ_{k+2}`. The potential moments use `nodes` points (default
/// [`default_nodes`]) and are recomputed with doubled node counts until no
/// entry moves by more than [`QUADRATURE_GATE`].
pub fn build_schrodinger(v: &Potential, n: usize, nodes: Option<usize>) -> Result<TruncationPair> {
    v.validate()?;
    let mut q = nodes.unwrap_or_else(|| default_nodes(n));
    let mut coarse = potential_moments(v, n, q)?;
    let mut change = f64::NAN;
    let (vm, vv) = loop {
        if 2 * q > MAX_NODES {
            return Err(Error::QuadratureNotConverged { change, nodes: q });
        }
        let fine = potential_moments(v, n, 2 * q)?;
        change = max_change(&coarse.0, &fine.0).max(max_change(&coarse.1, &fine.1));
        q *= 2;
        if change <= QUADRATURE_GATE {
            break fine;
        }
        coarse = fine;
    };
    let t = kinetic_matrix(n + 3, n + 1);
    let m = &t.slice(ndarray::s![..n + 1, ..]) + &vm.slice(ndarray::s![..n + 1, ..]);
    let tv = t.t().dot(&vm);
    let m2 = t.t().dot(&t) + &tv + &tv.t() + &vv;
    TruncationPair::new(n, real_hermitian(m)?, real_hermitian(m2)?)
}

/// `V = x²`: the Hermite functions are eigenfunctions with eigenvalues
/// `2k + 1`, so both truncations are diagonal.
pub fn build_harmonic(n: usize) -> Result<TruncationPair> {
    let diag: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let sq: Vec<f64> = diag.iter().map(|d| d * d).collect();
    TruncationPair::new(
        n,
        HermitianMatrix::from_real_diagonal(&diag)?,
        HermitianMatrix::from_real_diagonal(&sq)?,
    )
}

fn real_hermitian(a: Array2<f64>) -> Result<HermitianMatrix> {
    HermitianMatrix::new(a.mapv(|x| C64::new(x, 0.0)))
}
