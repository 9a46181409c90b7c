use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{
    NamedReference, OracleSection, Reference, RunConfig, DEFAULT_FD_GRID_POINTS, DEFAULT_FD_HALF_WIDTH,
};
use super::output::{csv_bytes, fmt_f64, fmt_opt, json_bytes, OutputSet};
use crate::error::{Error, Result};
use crate::matpoly::{grid_sample, pseudospectrum_threshold, PseudospectraWeights, Rect};
use crate::operators::{OperatorModel, Potential};
use crate::oracle::{schrodinger_fd, secular_roots, FdSpectrum, SecularSolution};
use crate::pipeline::{
    convergence_study, method_pipeline, perturbation_experiment, tolerance_bound, PerturbationSpec,
    DEFAULT_EPS_FRACTION,
};

#[derive(Debug, Clone, Serialize)]
struct OracleDocument {
    model: OperatorModel,
    oracle: OracleSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    secular: Option<SecularSolution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite_difference: Option<FdSpectrum>,
}

/// Oracle results are cached under `oracle-cache/<sha256>.json` in the output
/// directory, keyed by the model and oracle settings.
struct OracleCache<'a> {
    dir: &'a Path,
}

impl OracleCache<'_> {
    fn key(model: &OperatorModel, section: &OracleSection) -> Result<String> {
        #[derive(Serialize)]
        struct Key<'k> {
            model: &'k OperatorModel,
            oracle: &'k OracleSection,
        }
        let bytes = json_bytes(&Key { model, oracle: section })?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }

    fn relative_path(model: &OperatorModel, section: &OracleSection) -> Result<PathBuf> {
        Ok(PathBuf::from("oracle-cache").join(format!("{}.json", Self::key(model, section)?)))
    }

    /// Oracle document bytes, from the cache when present. Fresh results are
    /// queued on `outputs` so the cache is only written on success.
    fn fetch(&self, model: &OperatorModel, section: &OracleSection, outputs: &mut OutputSet) -> Result<Vec<u8>> {
        let rel = Self::relative_path(model, section)?;
        let path = self.dir.join(&rel);
        if path.is_file() {
            return Ok(std::fs::read(path)?);
        }
        let doc = compute_oracle(model, section)?;
        let bytes = json_bytes(&doc)?;
        if !outputs.paths().any(|p| p == rel.as_path()) {
            outputs.add(rel, bytes.clone());
        }
        Ok(bytes)
    }
}

fn potential_of(model: &OperatorModel) -> Result<Potential> {
    match model {
        OperatorModel::SchrodingerHermite { potential, .. } => Ok(*potential),
        OperatorModel::HarmonicSanity => Ok(Potential::Harmonic),
        other => Err(Error::Config(format!("{} has no potential", other.name()))),
    }
}

fn compute_oracle(model: &OperatorModel, section: &OracleSection) -> Result<OracleDocument> {
    let mut doc = OracleDocument {
        model: model.clone(),
        oracle: section.clone(),
        secular: None,
        finite_difference: None,
    };
    match section {
        OracleSection::Secular => doc.secular = Some(secular_roots()?),
        OracleSection::FiniteDifference {
            half_width,
            grid_points,
            count,
        } => {
            let v = potential_of(model)?;
            doc.finite_difference = Some(schrodinger_fd(&|x| v.eval(x), *half_width, *grid_points, *count)?);
        }
    }
    Ok(doc)
}

/// Resolves a configured reference to a number, consulting the oracle cache.
fn resolve(cfg: &RunConfig, r: &Reference, cache: &OracleCache, outputs: &mut OutputSet) -> Result<f64> {
    let named = match (r, r.parse()?) {
        (Reference::Value(v), _) => return Ok(*v),
        (_, Some(named)) => named,
        (Reference::Named(s), None) => return Err(Error::Config(format!("unknown reference {s:?}"))),
    };
    let (section, pointer) = match named {
        NamedReference::LambdaMinus => (OracleSection::Secular, "/secular/lambda_minus".to_string()),
        NamedReference::LambdaPlus => (OracleSection::Secular, "/secular/lambda_plus".to_string()),
        NamedReference::FiniteDifference(k) => {
            let section = match &cfg.oracle {
                Some(s @ OracleSection::FiniteDifference { count, .. }) if *count > k => s.clone(),
                _ => OracleSection::FiniteDifference {
                    half_width: DEFAULT_FD_HALF_WIDTH,
                    grid_points: DEFAULT_FD_GRID_POINTS,
                    count: k + 1,
                },
            };
            (section, format!("/finite_difference/refined/{k}"))
        }
    };
    let bytes = cache.fetch(&cfg.model, &section, outputs)?;
    let doc: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| Error::Config(format!("corrupt oracle cache: {e}")))?;
    if matches!(named, NamedReference::FiniteDifference(_))
        && doc.pointer("/finite_difference/converged") != Some(&serde_json::Value::Bool(true))
    {
        return Err(Error::Quadrature("finite-difference reference failed its convergence gate".into()));
    }
    doc.pointer(&pointer)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Config(format!("oracle cache entry lacks a number at {pointer}")))
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let s = cfg.solve_section()?;
    let cache = OracleCache { dir: out };
    let mut outputs = OutputSet::default();
    let targets = s
        .targets
        .iter()
        .map(|t| resolve(cfg, t, &cache, &mut outputs))
        .collect::<Result<Vec<_>>>()?;
    let result = method_pipeline(&cfg.model, s.n, &targets, s.imag_cut.unwrap_or(f64::INFINITY))?;
    let spectrum: Vec<Vec<String>> = result
        .spectrum
        .eigenvalues
        .iter()
        .zip(&result.spectrum.residuals)
        .map(|(z, r)| vec![fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*r)])
        .collect();
    let encl: Vec<Vec<String>> = result
        .enclosures
        .iter()
        .map(|e| vec![fmt_f64(e.lo), fmt_f64(e.hi), fmt_f64(e.witness.re), fmt_f64(e.witness.im)])
        .collect();
    let nearest: Vec<Vec<String>> = result
        .nearest
        .iter()
        .map(|h| vec![fmt_f64(h.target), fmt_f64(h.z.re), fmt_f64(h.z.im), fmt_f64(h.err)])
        .collect();
    outputs.add("spectrum.csv", csv_bytes(&["re", "im", "residual"], &spectrum)?);
    outputs.add("enclosures.csv", csv_bytes(&["lo", "hi", "witness_re", "witness_im"], &encl)?);
    outputs.add("nearest.csv", csv_bytes(&["target", "re", "im", "err"], &nearest)?);
    outputs.commit(out)
}

pub fn cmd_converge(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let s = cfg.converge_section()?;
    let cache = OracleCache { dir: out };
    let mut outputs = OutputSet::default();
    let lambda = resolve(cfg, &s.reference, &cache, &mut outputs)?;
    let records = convergence_study(&cfg.model, lambda, &s.ns())?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.err),
                fmt_f64(r.log_err),
                fmt_f64(r.log_n),
                fmt_opt(r.slope),
            ]
        })
        .collect();
    outputs.add("convergence.csv", csv_bytes(&["n", "err", "log_err", "log_n", "slope"], &rows)?);
    outputs.commit(out)
}

#[derive(Serialize)]
struct PseudospecMeta<'a> {
    model: &'a OperatorModel,
    n: usize,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    nx: usize,
    ny: usize,
    eps: Option<f64>,
    weights: Option<Vec<f64>>,
    layout: &'static str,
}

pub fn cmd_pseudospec(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let s = cfg.pseudospec_section()?;
    let rect = Rect::new(s.re_min, s.re_max, s.im_min, s.im_max)?;
    let weights = s.weights.clone().map(PseudospectraWeights::new).transpose()?;
    let pencil = cfg.model.pencil(s.n).map_err(|e| Error::at(s.n, e))?;
    let grid = grid_sample(&pencil, rect, s.nx, s.ny)?;
    let mut header = vec!["i", "j", "re", "im", "sigma"];
    if weights.is_some() {
        header.push("member");
    }
    let mut rows = Vec::with_capacity(s.nx * s.ny);
    for j in 0..s.ny {
        for i in 0..s.nx {
            let z = grid.point(i, j);
            let sigma = grid.value(i, j);
            let mut row = vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im), fmt_f64(sigma)];
            if let (Some(w), Some(eps)) = (&weights, s.eps) {
                row.push((sigma <= pseudospectrum_threshold(&pencil, z, eps, w)).to_string());
            }
            rows.push(row);
        }
    }
    let meta = PseudospecMeta {
        model: &cfg.model,
        n: s.n,
        re_min: s.re_min,
        re_max: s.re_max,
        im_min: s.im_min,
        im_max: s.im_max,
        nx: s.nx,
        ny: s.ny,
        eps: s.eps,
        weights: s.weights.clone(),
        layout: "cell centres, row-major from (re_min, im_min); value index j*nx + i",
    };
    let mut outputs = OutputSet::default();
    outputs.add("pseudospec.csv", csv_bytes(&header, &rows)?);
    outputs.add("pseudospec_meta.json", json_bytes(&meta)?);
    outputs.commit(out)
}

pub fn cmd_perturb(cfg: &RunConfig, out: &Path, seed_flag: Option<u64>) -> Result<Vec<PathBuf>> {
    let s = cfg.perturb_section()?;
    let cache = OracleCache { dir: out };
    let mut outputs = OutputSet::default();
    let lambda = resolve(cfg, &s.reference, &cache, &mut outputs)?;
    let mu = cfg.model.spectrum_info()?.gap_distance(lambda);
    tolerance_bound(s.delta, mu, lambda, s.w0, s.w1)?;
    let spec = PerturbationSpec {
        n: s.n,
        lambda,
        delta: s.delta,
        w0: s.w0,
        w1: s.w1,
        trials: s.trials,
        seed: seed_flag.or(s.seed).unwrap_or(0),
        eps_fraction: s.eps_fraction.unwrap_or(DEFAULT_EPS_FRACTION),
    };
    let report = perturbation_experiment(&cfg.model, &spec)?;
    outputs.add("perturbation.json", json_bytes(&report)?);
    outputs.commit(out)
}

pub fn cmd_oracle(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = cfg.oracle_section()?;
    let cache = OracleCache { dir: out };
    let mut outputs = OutputSet::default();
    let bytes = cache.fetch(&cfg.model, &section, &mut outputs)?;
    if let Ok(doc) = serde_json::from_slice::<serde_json::Value>(&bytes) {
        if doc.pointer("/finite_difference/converged") == Some(&serde_json::Value::Bool(false)) {
            eprintln!("warning: finite-difference eigenvalues did not pass the convergence gate");
        }
    }
    outputs.add("oracle.json", bytes);
    outputs.commit(out)
}
