//! Truncation matrices `M_n` and `[M²]_n` for the model operators.

mod fourier;
mod hermite;
mod shift;

pub use fourier::{
    b2_compact_window, build_b1, build_b2, build_b2_window, direct_sum_coeff, direct_sum_coeff_squared,
    fourier_coeff_s, fourier_coeff_s_squared, FourierCoeffTable, DIRECT_SUM_COUPLING,
};
pub use hermite::{
    build_harmonic, build_schrodinger, default_nodes, hermite_functions, hermite_rule, kinetic_matrix,
    HermiteRule, Potential, MAX_NODES, QUADRATURE_GATE,
};
pub use shift::{build_shift_fixture, lower_shift};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matpoly::{HermitianMatrix, QuadraticPencil};
use crate::oracle;

/// Relative tolerance for `[M²]_n − M_n² ⪰ 0`.
pub const TRUNCATION_PSD_TOL: f64 = 1e-9;

/// Compressions `M_n = Π M Π` and `[M²]_n = Π M² Π` on a finite basis block.
#[derive(Debug, Clone)]
pub struct TruncationPair {
    pub n_index: usize,
    pub dim: usize,
    pub m: HermitianMatrix,
    pub m2: HermitianMatrix,
}

impl TruncationPair {
    /// Checks dimensions and that `[M²]_n − M_n²` (which equals
    /// `Π M (I − Π) M Π`) is positive semidefinite.
    pub fn new(n_index: usize, m: HermitianMatrix, m2: HermitianMatrix) -> Result<Self> {
        if m.dim() != m2.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: m2.dim(),
            });
        }
        let pair = Self {
            n_index,
            dim: m.dim(),
            m,
            m2,
        };
        let min_eig = pair.compression_gap_min_eigenvalue()?;
        if min_eig < -TRUNCATION_PSD_TOL * pair.scale() {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        Ok(pair)
    }

    /// `max(1, ‖[M²]_n‖_∞, ‖M_n‖_∞²)`.
    pub fn scale(&self) -> f64 {
        let m = self.m.inf_norm();
        self.m2.inf_norm().max(m * m).max(1.0)
    }

    /// Smallest eigenvalue of `[M²]_n − M_n²`.
    pub fn compression_gap_min_eigenvalue(&self) -> Result<f64> {
        let m = self.m.as_array();
        let gap = self.m2.as_array() - &m.dot(m);
        let w = linalg::eigvalsh(gap.view())?;
        Ok(w[0])
    }

    pub fn pencil(&self) -> Result<QuadraticPencil> {
        QuadraticPencil::from_truncation(&self.m, &self.m2)
    }
}

/// Discrete part of a model's spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteSpectrum {
    Known(Vec<f64>),
    /// Only available from a numerical reference solver.
    OracleDeferred,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumInfo {
    /// Sorted, pairwise disjoint closed intervals.
    pub essential_bands: Vec<(f64, f64)>,
    pub discrete: DiscreteSpectrum,
}

impl SpectrumInfo {
    pub fn new(mut bands: Vec<(f64, f64)>, discrete: DiscreteSpectrum) -> Result<Self> {
        bands.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in bands.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidArgument(format!("overlapping bands {:?} and {:?}", w[0], w[1])));
            }
        }
        if bands.iter().any(|b| !(b.0 <= b.1)) {
            return Err(Error::InvalidArgument("band with lo > hi".into()));
        }
        Ok(Self {
            essential_bands: bands,
            discrete,
        })
    }

    fn known_points(&self) -> &[f64] {
        match &self.discrete {
            DiscreteSpectrum::Known(v) => v,
            DiscreteSpectrum::OracleDeferred => &[],
        }
    }

    /// `dist(λ, Spec M \ {λ})` over the known part of the spectrum.
    pub fn gap_distance(&self, lambda: f64) -> f64 {
        let bands = self.essential_bands.iter().map(|&(lo, hi)| {
            if lambda < lo {
                lo - lambda
            } else if lambda > hi {
                lambda - hi
            } else {
                0.0
            }
        });
        let points = self
            .known_points()
            .iter()
            .filter(|&&p| (p - lambda).abs() > 1e-12 * (1.0 + lambda.abs()))
            .map(|p| (p - lambda).abs());
        bands.chain(points).fold(f64::INFINITY, f64::min)
    }

    /// Whether `[lo − fatten, hi + fatten]` meets the known spectrum.
    pub fn intersects(&self, lo: f64, hi: f64, fatten: f64) -> bool {
        let (a, b) = (lo - fatten, hi + fatten);
        self.essential_bands.iter().any(|&(l, h)| a <= h && l <= b)
            || self.known_points().iter().any(|&p| a <= p && p <= b)
    }
}

/// The operators the library knows how to truncate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", from = "ModelRepr")]
pub enum OperatorModel {
    /// Multiplication by the gapped symbol plus a rank-one term, scalar
    /// Fourier basis.
    FourierB1,
    /// The same operator conjugated to a direct sum of two smooth symbols.
    DirectSumB2,
    SchrodingerHermite {
        potential: Potential,
        /// Initial Gauss–Hermite node count; defaults to `4(n+1) + 64`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quadrature_nodes: Option<usize>,
    },
    /// Nilpotent-shift pencil; has no underlying operator.
    ShiftFixture,
    /// `−∂² + x²` in its own eigenbasis.
    HarmonicSanity,
}

// serde ignores unknown keys on unit variants of internally tagged enums, so
// parsing goes through empty struct variants.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ModelRepr {
    FourierB1 {},
    DirectSumB2 {},
    SchrodingerHermite {
        potential: Potential,
        #[serde(default)]
        quadrature_nodes: Option<usize>,
    },
    ShiftFixture {},
    HarmonicSanity {},
}

impl From<ModelRepr> for OperatorModel {
    fn from(r: ModelRepr) -> Self {
        match r {
            ModelRepr::FourierB1 {} => OperatorModel::FourierB1,
            ModelRepr::DirectSumB2 {} => OperatorModel::DirectSumB2,
            ModelRepr::SchrodingerHermite {
                potential,
                quadrature_nodes,
            } => OperatorModel::SchrodingerHermite {
                potential,
                quadrature_nodes,
            },
            ModelRepr::ShiftFixture {} => OperatorModel::ShiftFixture,
            ModelRepr::HarmonicSanity {} => OperatorModel::HarmonicSanity,
        }
    }
}

impl OperatorModel {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorModel::FourierB1 => "fourier-b1",
            OperatorModel::DirectSumB2 => "direct-sum-b2",
            OperatorModel::SchrodingerHermite { .. } => "schrodinger-hermite",
            OperatorModel::ShiftFixture => "shift-fixture",
            OperatorModel::HarmonicSanity => "harmonic-sanity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let OperatorModel::SchrodingerHermite {
            potential,
            quadrature_nodes,
        } = self
        {
            potential.validate()?;
            if let Some(q) = quadrature_nodes {
                if *q == 0 || 2 * q > MAX_NODES {
                    return Err(Error::Config(format!("quadrature_nodes must be in 1..={}", MAX_NODES / 2)));
                }
            }
        }
        Ok(())
    }

    /// Smallest admissible truncation parameter.
    pub fn min_n(&self) -> usize {
        match self {
            OperatorModel::ShiftFixture => 1,
            _ => 0,
        }
    }

    /// Basis size at truncation `n`.
    pub fn dim(&self, n: usize) -> usize {
        match self {
            OperatorModel::FourierB1 => 2 * n + 1,
            OperatorModel::DirectSumB2 => 2 * (2 * n + 1),
            OperatorModel::SchrodingerHermite { .. } | OperatorModel::HarmonicSanity => n + 1,
            OperatorModel::ShiftFixture => n,
        }
    }

    pub fn truncation(&self, n: usize) -> Result<TruncationPair> {
        match self {
            OperatorModel::FourierB1 => build_b1(n),
            OperatorModel::DirectSumB2 => build_b2(n),
            OperatorModel::SchrodingerHermite {
                potential,
                quadrature_nodes,
            } => build_schrodinger(potential, n, *quadrature_nodes),
            OperatorModel::HarmonicSanity => build_harmonic(n),
            OperatorModel::ShiftFixture => Err(Error::InvalidArgument(
                "the shift fixture is a bare pencil without a truncation pair".into(),
            )),
        }
    }

    pub fn pencil(&self, n: usize) -> Result<QuadraticPencil> {
        match self {
            OperatorModel::ShiftFixture => build_shift_fixture(n),
            _ => self.truncation(n)?.pencil(),
        }
    }

    /// Spectrum of the underlying operator as far as it is known in closed
    /// form (discrete eigenvalues of the gapped models come from the secular
    /// equation).
    pub fn spectrum_info(&self) -> Result<SpectrumInfo> {
        match self {
            OperatorModel::FourierB1 | OperatorModel::DirectSumB2 => {
                let roots = oracle::secular_roots()?;
                SpectrumInfo::new(
                    vec![(-3.0, -1.0), (1.0, 3.0)],
                    DiscreteSpectrum::Known(vec![roots.lambda_minus, roots.lambda_plus]),
                )
            }
            OperatorModel::SchrodingerHermite { .. } => SpectrumInfo::new(vec![], DiscreteSpectrum::OracleDeferred),
            OperatorModel::HarmonicSanity => SpectrumInfo::new(
                vec![],
                // lowest 64 of the odd integers
                DiscreteSpectrum::Known((0..64).map(|k| 2.0 * k as f64 + 1.0).collect()),
            ),
            OperatorModel::ShiftFixture => SpectrumInfo::new(vec![], DiscreteSpectrum::Known(vec![0.0])),
        }
    }
}
