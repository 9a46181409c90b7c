use std::f64::consts::PI;

use roots::{find_root_brent, SimpleConvergency};
use serde::Serialize;

use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Allowed disagreement between the closed form and quadrature.
pub const SECULAR_AGREEMENT: f64 = 1e-10;
/// Required `|g(λ)|` at an accepted root.
pub const ROOT_RESIDUAL: f64 = 1e-12;

const BRACKET_OFFSET: f64 = 1e-3;

/// Essential spectrum of the gapped model.
pub const BANDS: [(f64, f64); 2] = [(-3.0, -1.0), (1.0, 3.0)];

fn in_band(lambda: f64) -> bool {
    BANDS.iter().any(|&(lo, hi)| lo <= lambda && lambda <= hi)
}

/// `∫_{−π}^{0} dx/(a − sin 2x) = π sgn(a)/√(a² − 1)` for `|a| > 1`, since the
/// integrand has period π.
fn half_period_integral(a: f64) -> f64 {
    a.signum() * PI / (a * a - 1.0).sqrt()
}

/// Closed form of the secular function
/// `g(λ) = ∫_{−π}^{0} dx/((λ+2) − sin 2x) + ∫_{0}^{π} dx/((λ−2) − sin 2x) − π`.
pub fn secular_closed_form(lambda: f64) -> f64 {
    half_period_integral(lambda + 2.0) + half_period_integral(lambda - 2.0) - PI
}

/// The same function by adaptive quadrature of the defining integrals.
pub fn secular_quadrature(lambda: f64) -> Result<f64> {
    let tol = 1e-14;
    let (left, _) = integrate(|x| 1.0 / ((lambda + 2.0) - (2.0 * x).sin()), -PI, 0.0, tol, tol)?;
    let (right, _) = integrate(|x| 1.0 / ((lambda - 2.0) - (2.0 * x).sin()), 0.0, PI, tol, tol)?;
    Ok(left + right - PI)
}

/// Secular function, evaluated both ways and cross-checked.
/// `λ` is an eigenvalue of the gapped model iff this vanishes.
pub fn secular_function(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || in_band(lambda) {
        return Err(Error::InvalidArgument(format!(
            "secular function undefined at {lambda}: inside the essential spectrum"
        )));
    }
    let closed = secular_closed_form(lambda);
    let quadrature = secular_quadrature(lambda)?;
    if (closed - quadrature).abs() > SECULAR_AGREEMENT * closed.abs().max(1.0) {
        return Err(Error::OracleDisagreement {
            lambda,
            closed,
            quadrature,
        });
    }
    Ok(closed)
}

/// Sign-change certificate for a root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularSolution {
    /// Eigenvalue in the gap `(−1, 1)`.
    pub lambda_minus: f64,
    /// Eigenvalue above the bands.
    pub lambda_plus: f64,
    pub residual_minus: f64,
    pub residual_plus: f64,
    pub bracket_minus: Bracket,
    pub bracket_plus: Bracket,
}

fn root_in(lo: f64, hi: f64) -> Result<(f64, f64, Bracket)> {
    let (g_lo, g_hi) = (secular_function(lo)?, secular_function(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut conv = SimpleConvergency {
        eps: 1e-15f64,
        max_iter: 200,
    };
    let root = find_root_brent(lo, hi, secular_closed_form, &mut conv)
        .map_err(|e| Error::Quadrature(format!("root search on [{lo}, {hi}] failed: {e}")))?;
    let residual = secular_function(root)?.abs();
    if residual >= ROOT_RESIDUAL {
        return Err(Error::Quadrature(format!("root {root} has residual {residual:e}")));
    }
    Ok((
        root,
        residual,
        Bracket {
            lo,
            hi,
            value_lo: g_lo,
            value_hi: g_hi,
        },
    ))
}

/// The two discrete eigenvalues: one in the gap `(−1, 1)`, one above `3`.
pub fn secular_roots() -> Result<SecularSolution> {
    // g → +∞ at the lower edge of each gap and → −∞ at the upper edge; the
    // offset keeps the quadrature cross-check away from the singularity.
    let (lambda_minus, residual_minus, bracket_minus) = root_in(-1.0 + BRACKET_OFFSET, 1.0 - BRACKET_OFFSET)?;
    let (lambda_plus, residual_plus, bracket_plus) = root_in(3.0 + BRACKET_OFFSET, 20.0)?;
    Ok(SecularSolution {
        lambda_minus,
        lambda_plus,
        residual_minus,
        residual_plus,
        bracket_minus,
        bracket_plus,
    })
}

/// Grid points `lo + i·step` outside the bands where the closed form changes
/// sign, as `(left, right)` pairs of consecutive points.
pub fn sign_changes(lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let count = ((hi - lo) / step).floor() as usize;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=count {
        let x = lo + i as f64 * step;
        if in_band(x) {
            prev = None;
            continue;
        }
        let g = secular_closed_form(x);
        if let Some((px, pg)) = prev {
            if pg.signum() != g.signum() {
                out.push((px, x));
            }
        }
        prev = Some((x, g));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert!(secular_function(3.5796).unwrap().abs() < 1e-3 * PI);
        assert!(secular_function(-0.7674).unwrap().abs() < 1e-3 * PI);
        assert!((secular_function(1e6).unwrap() + PI).abs() < 1e-5);
        assert!((secular_function(-1e6).unwrap() + PI).abs() < 1e-5);
        assert!(secular_function(2.0).is_err());
        assert!(secular_function(-1.0).is_err());
    }

    #[test]
    fn roots_and_certificates() {
        let s = secular_roots().unwrap();
        assert!((s.lambda_minus + 0.7674).abs() < 5e-5);
        assert!((s.lambda_plus - 3.5796).abs() < 5e-5);
        assert!(s.residual_minus < ROOT_RESIDUAL && s.residual_plus < ROOT_RESIDUAL);
        for b in [s.bracket_minus, s.bracket_plus] {
            assert!(b.value_lo * b.value_hi < 0.0);
        }
    }
}
