//! Matrix entries straight from the operator definitions, by dense adaptive
//! quadrature. Slow on purpose; used only to validate the fast builders.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::quadrature::integrate_pieces;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::operators::{OperatorModel, Potential};

/// Largest truncation the entry oracle accepts.
pub const ENTRY_ORACLE_MAX_N: usize = 16;

const TOL: f64 = 1e-13;

fn symbol(x: f64) -> f64 {
    let base = if x <= 0.0 { -2.0 } else { 2.0 };
    base + (2.0 * x).sin()
}

fn cexp(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// `(1/2π)∫_{−π}^{π} f`, split at the symbol's jump and at a few interior
/// points to help the adaptive rule with oscillation.
fn circle_mean(f: impl Fn(f64) -> C64 + Sync) -> Result<C64> {
    let breaks: Vec<f64> = (0..=8).map(|i| -PI + i as f64 * PI / 4.0).collect();
    let re = integrate_pieces(|x| f(x).re, &breaks, TOL, TOL)?;
    let im = integrate_pieces(|x| f(x).im, &breaks, TOL, TOL)?;
    Ok(C64::new(re, im) / (2.0 * PI))
}

fn b1_entry(n: usize, j: usize, k: usize) -> Result<(C64, C64)> {
    let (mj, mk) = (j as f64 - n as f64, k as f64 - n as f64);
    // K f = 2 f̂(0): the constant 2 when acting on e_0
    let apply = |m: f64, x: f64| symbol(x) * cexp(m * x) + if m == 0.0 { C64::new(2.0, 0.0) } else { ZERO };
    let m_entry = circle_mean(|x| apply(mk, x) * cexp(-mj * x))?;
    let m2_entry = circle_mean(|x| apply(mk, x) * apply(mj, x).conj())?;
    Ok((m_entry, m2_entry))
}

fn b2_entry(n: usize, j: usize, k: usize) -> Result<(C64, C64)> {
    let label = |r: usize| (r % 2, (r / 2) as f64 - n as f64);
    let (a, mj) = label(j);
    let (b, mk) = label(k);
    let sym = |c: usize, x: f64| if c == 0 { -2.0 } else { 2.0 } + x.sin();
    // M applied to the basis vector supported on component c with mode m;
    // the coupling maps f to (f̂_1(0) + f̂_2(0))·(1, 1)
    let apply = |c: usize, m: f64, x: f64| -> [C64; 2] {
        let mut out = [ZERO; 2];
        out[c] = sym(c, x) * cexp(m * x);
        if m == 0.0 {
            out[0] += 1.0;
            out[1] += 1.0;
        }
        out
    };
    let basis = |c: usize, m: f64, x: f64| -> [C64; 2] {
        let mut out = [ZERO; 2];
        out[c] = cexp(m * x);
        out
    };
    let dot = |u: [C64; 2], v: [C64; 2]| u[0] * v[0].conj() + u[1] * v[1].conj();
    let m_entry = circle_mean(|x| dot(apply(b, mk, x), basis(a, mj, x)))?;
    let m2_entry = circle_mean(|x| dot(apply(b, mk, x), apply(a, mj, x)))?;
    Ok((m_entry, m2_entry))
}

/// Physicists' Hermite polynomials `H_0(x), …, H_k(x)`.
fn hermite_polynomials(k: usize, x: f64) -> Vec<f64> {
    let mut h = vec![1.0, 2.0 * x];
    for i in 1..k {
        h.push(2.0 * x * h[i] - 2.0 * i as f64 * h[i - 1]);
    }
    h.truncate(k + 1);
    h
}

/// `1/√(2^k k! √π)`.
fn hermite_norm(k: usize) -> f64 {
    let mut norm = PI.sqrt();
    for i in 1..=k {
        norm *= 2.0 * i as f64;
    }
    1.0 / norm.sqrt()
}

/// `φ_k(x)` from the explicit Hermite polynomial `H_k`.
fn hermite_function_direct(k: usize, x: f64) -> f64 {
    hermite_polynomials(k, x)[k] * (-x * x / 2.0).exp() * hermite_norm(k)
}

/// `φ_k''(x)` by differentiating `H_k(x) e^{−x²/2}` term by term with
/// `H_k' = 2k H_{k−1}`.
fn hermite_function_second_derivative(k: usize, x: f64) -> f64 {
    let h = hermite_polynomials(k, x);
    let kf = k as f64;
    let d1 = if k >= 1 { 2.0 * kf * h[k - 1] } else { 0.0 };
    let d2 = if k >= 2 { 4.0 * kf * (kf - 1.0) * h[k - 2] } else { 0.0 };
    (d2 - 2.0 * x * d1 + (x * x - 1.0) * h[k]) * (-x * x / 2.0).exp() * hermite_norm(k)
}

fn hermite_entry(v: &Potential, j: usize, k: usize, n: usize) -> Result<(C64, C64)> {
    let apply = |m: usize, x: f64| -hermite_function_second_derivative(m, x) + v.eval(x) * hermite_function_direct(m, x);
    let l = (2.0 * n as f64 + 1.0).sqrt() + 10.0;
    let breaks: Vec<f64> = (0..=16).map(|i| -l + i as f64 * l / 8.0).collect();
    let m_entry = integrate_pieces(|x| apply(k, x) * hermite_function_direct(j, x), &breaks, TOL, TOL)?;
    let m2_entry = integrate_pieces(|x| apply(k, x) * apply(j, x), &breaks, TOL, TOL)?;
    Ok((C64::new(m_entry, 0.0), C64::new(m2_entry, 0.0)))
}

/// `(⟨Mφ_k, φ_j⟩, ⟨Mφ_k, Mφ_j⟩)` for basis positions `j`, `k` in the order
/// used by the builders.
pub fn entry_quadrature_oracle(model: &OperatorModel, n: usize, j: usize, k: usize) -> Result<(C64, C64)> {
    if n > ENTRY_ORACLE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "entry oracle is limited to n <= {ENTRY_ORACLE_MAX_N}, got {n}"
        )));
    }
    let dim = model.dim(n);
    if j >= dim || k >= dim {
        return Err(Error::InvalidArgument(format!("entry ({j}, {k}) outside dimension {dim}")));
    }
    match model {
        OperatorModel::FourierB1 => b1_entry(n, j, k),
        OperatorModel::DirectSumB2 => b2_entry(n, j, k),
        OperatorModel::SchrodingerHermite { potential, .. } => hermite_entry(potential, j, k, n),
        OperatorModel::HarmonicSanity => hermite_entry(&Potential::Harmonic, j, k, n),
        OperatorModel::ShiftFixture => Err(Error::InvalidArgument(
            "the shift fixture has no underlying operator".into(),
        )),
    }
}

/// All entries of both truncation matrices, evaluated in parallel.
pub fn entry_oracle_matrices(model: &OperatorModel, n: usize) -> Result<(CMatrix, CMatrix)> {
    let dim = model.dim(n);
    let vals = (0..dim * dim)
        .into_par_iter()
        .map(|idx| entry_quadrature_oracle(model, n, idx / dim, idx % dim))
        .collect::<Result<Vec<_>>>()?;
    let m = CMatrix::from_shape_fn((dim, dim), |(j, k)| vals[j * dim + k].0);
    let m2 = CMatrix::from_shape_fn((dim, dim), |(j, k)| vals[j * dim + k].1);
    Ok((m, m2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_hermite_functions_agree_with_recurrence() {
        for x in [-3.0, -0.4, 0.0, 1.3, 5.0] {
            let rec = crate::operators::hermite_functions(x, 12);
            for (k, r) in rec.iter().enumerate() {
                assert!((hermite_function_direct(k, x) - r).abs() < 1e-13);
                let h = 1e-4;
                let fd = (hermite_function_direct(k, x + h) - 2.0 * r + hermite_function_direct(k, x - h)) / (h * h);
                assert!((hermite_function_second_derivative(k, x) - fd).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn rejects_large_n() {
        assert!(entry_quadrature_oracle(&OperatorModel::FourierB1, 17, 0, 0).is_err());
        assert!(entry_quadrature_oracle(&OperatorModel::FourierB1, 2, 5, 0).is_err());
    }
}
