//! Versioned TOML run configuration. Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorModel;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub model: OperatorModel,
    pub solve: Option<SolveSection>,
    pub converge: Option<ConvergeSection>,
    pub pseudospec: Option<PseudospecSection>,
    pub perturb: Option<PerturbSection>,
    pub oracle: Option<OracleSection>,
}

/// A real reference point: a literal value, `"lambda-minus"`,
/// `"lambda-plus"` (secular roots of the gapped models) or `"fd-<k>"` (the
/// k-th finite-difference eigenvalue of a Schrödinger model).
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Reference {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedReference {
    LambdaMinus,
    LambdaPlus,
    FiniteDifference(usize),
}

impl Reference {
    pub fn parse(&self) -> Result<Option<NamedReference>> {
        match self {
            Reference::Value(v) if v.is_finite() => Ok(None),
            Reference::Value(v) => Err(Error::Config(format!("reference must be finite, got {v}"))),
            Reference::Named(s) => match s.as_str() {
                "lambda-minus" => Ok(Some(NamedReference::LambdaMinus)),
                "lambda-plus" => Ok(Some(NamedReference::LambdaPlus)),
                other => other
                    .strip_prefix("fd-")
                    .and_then(|k| k.parse::<usize>().ok())
                    .map(|k| Some(NamedReference::FiniteDifference(k)))
                    .ok_or_else(|| Error::Config(format!("unknown reference {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub n: usize,
    #[serde(default)]
    pub targets: Vec<Reference>,
    /// Keep enclosures with `|Im z| ≤ imag_cut`; unlimited when absent.
    pub imag_cut: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
    pub reference: Reference,
}

impl ConvergeSection {
    /// `start, start + step, …` up to and including `stop`.
    pub fn ns(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudospecSection {
    pub n: usize,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub eps: Option<f64>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    pub n: usize,
    pub reference: Reference,
    pub delta: f64,
    pub w0: f64,
    pub w1: f64,
    pub trials: usize,
    pub eps_fraction: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", from = "OracleRepr")]
pub enum OracleSection {
    Secular,
    FiniteDifference {
        half_width: f64,
        grid_points: usize,
        count: usize,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum OracleRepr {
    Secular {},
    FiniteDifference {
        half_width: f64,
        grid_points: usize,
        count: usize,
    },
}

impl From<OracleRepr> for OracleSection {
    fn from(r: OracleRepr) -> Self {
        match r {
            OracleRepr::Secular {} => OracleSection::Secular,
            OracleRepr::FiniteDifference {
                half_width,
                grid_points,
                count,
            } => OracleSection::FiniteDifference {
                half_width,
                grid_points,
                count,
            },
        }
    }
}

/// Default finite-difference settings for resolving `fd-<k>` references.
pub const DEFAULT_FD_HALF_WIDTH: f64 = 20.0;
pub const DEFAULT_FD_GRID_POINTS: usize = 200_000;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        cfg.model.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n < self.model.min_n() {
            return Err(Error::Config(format!(
                "n = {n} is below the minimum {} for {}",
                self.model.min_n(),
                self.model.name()
            )));
        }
        Ok(())
    }

    fn check_references<'a>(&self, refs: impl IntoIterator<Item = &'a Reference>) -> Result<()> {
        for r in refs {
            match r.parse()? {
                Some(NamedReference::LambdaMinus | NamedReference::LambdaPlus) => {
                    if !matches!(self.model, OperatorModel::FourierB1 | OperatorModel::DirectSumB2) {
                        return Err(Error::Config(format!(
                            "secular references need a gapped Fourier model, not {}",
                            self.model.name()
                        )));
                    }
                }
                Some(NamedReference::FiniteDifference(_)) => {
                    if !matches!(
                        self.model,
                        OperatorModel::SchrodingerHermite { .. } | OperatorModel::HarmonicSanity
                    ) {
                        return Err(Error::Config(format!(
                            "finite-difference references need a Schrödinger model, not {}",
                            self.model.name()
                        )));
                    }
                }
                None => {}
            }
        }
        Ok(())
    }

    pub fn solve_section(&self) -> Result<&SolveSection> {
        let s = self.solve.as_ref().ok_or_else(|| Error::Config("missing [solve] section".into()))?;
        self.check_n(s.n)?;
        self.check_references(&s.targets)?;
        if let Some(c) = s.imag_cut {
            if !(c >= 0.0) {
                return Err(Error::Config(format!("imag_cut must be >= 0, got {c}")));
            }
        }
        Ok(s)
    }

    pub fn converge_section(&self) -> Result<&ConvergeSection> {
        let s = self
            .converge
            .as_ref()
            .ok_or_else(|| Error::Config("missing [converge] section".into()))?;
        if s.step == 0 || s.start == 0 || s.start > s.stop {
            return Err(Error::Config(format!(
                "sweep needs 1 <= start <= stop and step >= 1, got {}:{}:{}",
                s.start, s.step, s.stop
            )));
        }
        self.check_n(s.start)?;
        self.check_references([&s.reference])?;
        Ok(s)
    }

    pub fn pseudospec_section(&self) -> Result<&PseudospecSection> {
        let s = self
            .pseudospec
            .as_ref()
            .ok_or_else(|| Error::Config("missing [pseudospec] section".into()))?;
        self.check_n(s.n)?;
        crate::matpoly::Rect::new(s.re_min, s.re_max, s.im_min, s.im_max).map_err(|e| Error::Config(e.to_string()))?;
        if s.nx < 2 || s.ny < 2 {
            return Err(Error::Config(format!("grid resolution must be >= 2, got {}x{}", s.nx, s.ny)));
        }
        match (&s.eps, &s.weights) {
            (None, None) => {}
            (Some(eps), Some(w)) => {
                if !(*eps >= 0.0) || !eps.is_finite() {
                    return Err(Error::Config(format!("eps must be finite and >= 0, got {eps}")));
                }
                if w.len() != 3 {
                    return Err(Error::Config(format!("a quadratic pencil needs 3 weights, got {}", w.len())));
                }
                let weights =
                    crate::matpoly::PseudospectraWeights::new(w.clone()).map_err(|e| Error::Config(e.to_string()))?;
                if *eps > 0.0 && weights.all_zero() {
                    return Err(Error::Config("weights must not all vanish when eps > 0".into()));
                }
            }
            _ => return Err(Error::Config("eps and weights must be given together".into())),
        }
        Ok(s)
    }

    pub fn perturb_section(&self) -> Result<&PerturbSection> {
        let s = self
            .perturb
            .as_ref()
            .ok_or_else(|| Error::Config("missing [perturb] section".into()))?;
        self.check_n(s.n)?;
        self.check_references([&s.reference])?;
        if matches!(self.model, OperatorModel::ShiftFixture) {
            return Err(Error::Config("perturbation experiments need an operator model".into()));
        }
        if s.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if let Some(f) = s.eps_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::Config(format!("eps_fraction must lie in [0, 1), got {f}")));
            }
        }
        Ok(s)
    }

    pub fn oracle_section(&self) -> Result<OracleSection> {
        let s = self.oracle.clone().unwrap_or(OracleSection::Secular);
        match &s {
            OracleSection::Secular => {
                if !matches!(self.model, OperatorModel::FourierB1 | OperatorModel::DirectSumB2) {
                    return Err(Error::Config(format!("no secular equation for {}", self.model.name())));
                }
            }
            OracleSection::FiniteDifference {
                half_width,
                grid_points,
                count,
            } => {
                if !matches!(
                    self.model,
                    OperatorModel::SchrodingerHermite { .. } | OperatorModel::HarmonicSanity
                ) {
                    return Err(Error::Config(format!("no finite-difference oracle for {}", self.model.name())));
                }
                if !(*half_width > 0.0) || !half_width.is_finite() || *grid_points < 100 || *count == 0 || count > grid_points {
                    return Err(Error::Config(format!(
                        "finite-difference oracle needs half_width > 0, grid_points >= 100, 1 <= count <= grid_points; got {s:?}"
                    )));
                }
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B1: &str = r#"
version = 1
[model]
kind = "fourier-b1"
[converge]
start = 10
stop = 30
step = 10
reference = "lambda-minus"
[solve]
n = 4
targets = ["lambda-plus", 0.5, 2]
"#;

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::from_toml(B1).unwrap();
        assert_eq!(cfg.converge_section().unwrap().ns(), vec![10, 20, 30]);
        let s = cfg.solve_section().unwrap();
        assert_eq!(s.targets[1], Reference::Value(0.5));
        assert_eq!(s.targets[2], Reference::Value(2.0));
        assert!(cfg.perturb_section().is_err());
    }

    #[test]
    fn nested_unit_variants_reject_unknown_keys() {
        let base = "version = 1\n[model]\nkind = \"schrodinger-hermite\"\n[model.potential]\nkind = \"harmonic\"\n";
        assert!(RunConfig::from_toml(base).is_ok());
        assert!(RunConfig::from_toml(&format!("{base}depth = 1.0\n")).is_err());
        let oracle = "version = 1\n[model]\nkind = \"fourier-b1\"\n[oracle]\nkind = \"secular\"\n";
        assert!(RunConfig::from_toml(oracle).is_ok());
        assert!(RunConfig::from_toml(&format!("{oracle}count = 3\n")).is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(RunConfig::from_toml(&B1.replace("step = 10", "step = 10\nstpe = 3")).is_err());
        assert!(RunConfig::from_toml(&B1.replace("version = 1", "version = 2")).is_err());
        assert!(RunConfig::from_toml(&B1.replace("kind = \"fourier-b1\"", "kind = \"fourier-b1\"\ncolour = 1")).is_err());
    }

    #[test]
    fn reference_names() {
        assert_eq!(Reference::Named("fd-2".into()).parse().unwrap(), Some(NamedReference::FiniteDifference(2)));
        assert!(Reference::Named("lambda".into()).parse().is_err());
        let cfg = RunConfig::from_toml(&B1.replace("\"lambda-minus\"", "\"fd-0\"")).unwrap();
        assert!(cfg.converge_section().is_err());
    }
}
