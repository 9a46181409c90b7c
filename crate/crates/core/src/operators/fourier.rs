//! Multiplication-plus-rank-one operators in Fourier bases.
//!
//! Inner products carry the normalisation `(1/2π)∫_{−π}^{π}`, so
//! `e_j(x) = e^{ijx}` is orthonormal and the matrix of multiplication by `s`
//! is the Toeplitz matrix `ŝ(j − k)`.

use std::f64::consts::PI;

use super::TruncationPair;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::matpoly::HermitianMatrix;

/// Fourier coefficient of the gapped symbol `s(x) = ∓2 + sin 2x`, with the
/// minus sign on `(−π, 0]` and the plus sign on `(0, π]`.
pub fn fourier_coeff_s(j: i64) -> C64 {
    if j % 2 != 0 {
        // 4 / (i j π)
        return C64::new(0.0, -4.0 / (j as f64 * PI));
    }
    match j {
        2 => C64::new(0.0, -0.5),
        -2 => C64::new(0.0, 0.5),
        _ => ZERO,
    }
}

/// Fourier coefficient of `s(x)²`, from the decomposition
/// `s² = 4 + 4 sgn(x) sin 2x + (1 − cos 4x)/2`.
pub fn fourier_coeff_s_squared(j: i64) -> C64 {
    let mut v = 0.0;
    if j == 0 {
        v += 4.5;
    }
    if j.abs() == 4 {
        v -= 0.25;
    }
    if j % 2 != 0 {
        // sgn(x) sin 2x contributes 4/(π(4 − j²)) at odd j
        v += 16.0 / (PI * (4 - j * j) as f64);
    }
    C64::new(v, 0.0)
}

/// Tabulated `ŝ(j)` and `ŝ²(j)` for `|j| ≤ half_width`.
#[derive(Debug, Clone)]
pub struct FourierCoeffTable {
    half_width: usize,
    s: Vec<C64>,
    s2: Vec<C64>,
}

impl FourierCoeffTable {
    pub fn new(half_width: usize) -> Self {
        let j = half_width as i64;
        Self {
            half_width,
            s: (-j..=j).map(fourier_coeff_s).collect(),
            s2: (-j..=j).map(fourier_coeff_s_squared).collect(),
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    fn slot(&self, j: i64) -> usize {
        assert!(j.unsigned_abs() as usize <= self.half_width, "index {j} outside table");
        (j + self.half_width as i64) as usize
    }

    pub fn s(&self, j: i64) -> C64 {
        self.s[self.slot(j)]
    }

    pub fn s_squared(&self, j: i64) -> C64 {
        self.s2[self.slot(j)]
    }

    /// Largest `|c(−j) − conj(c(j))|` over both sequences.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let h = self.half_width as i64;
        (0..=h)
            .map(|j| {
                let a = (self.s(-j) - self.s(j).conj()).norm();
                let b = (self.s_squared(-j) - self.s_squared(j).conj()).norm();
                a.max(b)
            })
            .fold(0.0, f64::max)
    }
}

/// Scalar model on `L²(−π, π)`: multiplication by `s` plus `K f = 2 f̂(0)`,
/// truncated to the modes `−n..=n` (rows in that order).
pub fn build_b1(n: usize) -> Result<TruncationPair> {
    let dim = 2 * n + 1;
    let table = FourierCoeffTable::new(2 * n);
    let idx = |r: usize| r as i64 - n as i64;
    let mut m = CMatrix::from_shape_fn((dim, dim), |(r, q)| table.s(idx(r) - idx(q)));
    let mut m2 = CMatrix::from_shape_fn((dim, dim), |(r, q)| table.s_squared(idx(r) - idx(q)));
    let c = n;
    m[[c, c]] += C64::new(2.0, 0.0);
    // (S + K)² = S² + SK + KS + K²
    for r in 0..dim {
        let sj = table.s(idx(r));
        m2[[r, c]] += sj * 2.0;
        m2[[c, r]] += sj.conj() * 2.0;
    }
    m2[[c, c]] += C64::new(4.0, 0.0);
    TruncationPair::new(n, HermitianMatrix::new(m)?, HermitianMatrix::new(m2)?)
}

/// Fourier coefficients of the two-component symbols `s_1 = −2 + sin x` and
/// `s_2 = 2 + sin x`.
pub fn direct_sum_coeff(component: usize, j: i64) -> C64 {
    match j {
        0 => C64::new(if component == 0 { -2.0 } else { 2.0 }, 0.0),
        1 => C64::new(0.0, -0.5),
        -1 => C64::new(0.0, 0.5),
        _ => ZERO,
    }
}

/// Coefficients of `s_a²` by exact finite convolution.
pub fn direct_sum_coeff_squared(component: usize, j: i64) -> C64 {
    (-1..=1)
        .map(|p| direct_sum_coeff(component, p) * direct_sum_coeff(component, j - p))
        .sum()
}

/// Weight of the rank-one coupling between zero modes. With `G = (1, 1)` and
/// the unitary inner product `½ Σ_a (1/2π)∫ f_a ḡ_a`, the operator
/// `2⟨f, G⟩G` acts as `f ↦ (f̂_1(0) + f̂_2(0)) G`, i.e. unit entries at the
/// four zero-mode positions.
pub const DIRECT_SUM_COUPLING: f64 = 1.0;

/// Two-component model truncated to the modes `−n..=n` of each component,
/// interleaved as `e_{−n}, h_{−n}, …, e_n, h_n`.
pub fn build_b2(n: usize) -> Result<TruncationPair> {
    let pair = build_b2_window(-(n as i64), n as i64)?;
    Ok(TruncationPair { n_index: n, ..pair })
}

/// Two-component model on an arbitrary window `lo..=hi` of modes (which must
/// contain 0), interleaved as in [`build_b2`]. `n_index` records `hi`.
pub fn build_b2_window(lo: i64, hi: i64) -> Result<TruncationPair> {
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidArgument(format!("mode window {lo}..={hi} must contain 0")));
    }
    let modes = (hi - lo + 1) as usize;
    let dim = 2 * modes;
    let label = |r: usize| (r % 2, lo + (r / 2) as i64);
    let mut s = CMatrix::from_elem((dim, dim), ZERO);
    let mut s2 = CMatrix::from_elem((dim, dim), ZERO);
    for r in 0..dim {
        let (a, j) = label(r);
        for q in 0..dim {
            let (b, k) = label(q);
            if a == b {
                s[[r, q]] = direct_sum_coeff(a, j - k);
                s2[[r, q]] = direct_sum_coeff_squared(a, j - k);
            }
        }
    }
    // g = G restricted to the window; sg = Π S G
    let zero = |a: usize| 2 * (-lo) as usize + a;
    let mut g = vec![ZERO; dim];
    g[zero(0)] = C64::new(1.0, 0.0);
    g[zero(1)] = C64::new(1.0, 0.0);
    let sg: Vec<C64> = (0..dim).map(|r| direct_sum_coeff(label(r).0, label(r).1)).collect();
    let kappa = DIRECT_SUM_COUPLING;
    let gg = 2.0;
    let mut m = s;
    let mut m2 = s2;
    for r in 0..dim {
        for q in 0..dim {
            let k = g[r] * g[q].conj();
            m[[r, q]] += k * kappa;
            m2[[r, q]] += (sg[r] * g[q].conj() + g[r] * sg[q].conj()) * kappa + k * (kappa * kappa * gg);
        }
    }
    TruncationPair::new(hi.max(0) as usize, HermitianMatrix::new(m)?, HermitianMatrix::new(m2)?)
}

/// Mode window for the two-component model in compact labelling: label `n`
/// (even) keeps `n/2 + 2` consecutive modes per component, as centred as
/// possible with the extra mode on the positive side.
pub fn b2_compact_window(label: usize) -> Result<(i64, i64)> {
    if label % 2 != 0 {
        return Err(Error::InvalidArgument(format!("compact label must be even, got {label}")));
    }
    let c = (label / 2 + 2) as i64;
    Ok((-((c - 1) / 2), (c - 1) - (c - 1) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values() {
        assert!((fourier_coeff_s(1) - C64::new(0.0, -4.0 / PI)).norm() < 1e-15);
        assert!((fourier_coeff_s(1).im + 1.27324).abs() < 1e-5);
        assert_eq!(fourier_coeff_s(2), C64::new(0.0, -0.5));
        assert_eq!(fourier_coeff_s(-2), C64::new(0.0, 0.5));
        assert_eq!(fourier_coeff_s(4), ZERO);
        assert_eq!(fourier_coeff_s(0), ZERO);
        assert_eq!(fourier_coeff_s_squared(0), C64::new(4.5, 0.0));
    }

    #[test]
    fn table_is_conjugate_symmetric() {
        let t = FourierCoeffTable::new(40);
        assert!(t.conjugate_symmetry_defect() < 1e-12);
        assert_eq!(t.s(3), fourier_coeff_s(3));
    }

    #[test]
    fn s_squared_matches_long_self_convolution() {
        // Σ_{|m|≤M} ŝ(m) ŝ(j − m). For odd j one factor is an even-index
        // coefficient, so the sum is finite; for even j the tail is about
        // 16/(π² M).
        let big = 10_000i64;
        for j in [0i64, 1, 2, 3, 4, -3, 5, -6] {
            let conv: C64 = (-big..=big).map(|m| fourier_coeff_s(m) * fourier_coeff_s(j - m)).sum();
            let tol = if j % 2 != 0 { 1e-12 } else { 2.0 * 16.0 / (PI * PI * big as f64) };
            assert!((conv - fourier_coeff_s_squared(j)).norm() < tol, "j={j}: {conv}");
        }
    }

    #[test]
    fn b1_smallest_truncation() {
        let p = build_b1(0).unwrap();
        assert_eq!(p.dim, 1);
        assert_eq!(p.m.as_array()[[0, 0]], C64::new(2.0, 0.0));
        // ŝ²(0) + 4
        assert_eq!(p.m2.as_array()[[0, 0]], C64::new(8.5, 0.0));
    }

    #[test]
    fn b1_is_toeplitz_away_from_zero_mode() {
        let n = 6;
        let p = build_b1(n).unwrap();
        let (m, m2) = (p.m.as_array(), p.m2.as_array());
        for r in 1..2 * n + 1 {
            for q in 1..2 * n + 1 {
                if r == n || q == n || r - 1 == n || q - 1 == n {
                    continue;
                }
                assert_eq!(m[[r, q]], m[[r - 1, q - 1]]);
                assert_eq!(m2[[r, q]], m2[[r - 1, q - 1]]);
            }
        }
    }

    #[test]
    fn b2_blocks_are_tridiagonal() {
        let p = build_b2(4).unwrap();
        assert_eq!(p.dim, 18);
        let m = p.m.as_array();
        for r in 0..18 {
            for q in 0..18 {
                let (a, j) = (r % 2, r as i64 / 2 - 4);
                let (b, k) = (q % 2, q as i64 / 2 - 4);
                let coupling = j == 0 && k == 0;
                if (a != b || (j - k).abs() > 1) && !coupling {
                    assert_eq!(m[[r, q]], ZERO, "({r},{q})");
                }
            }
        }
        let c = 8;
        assert_eq!(m[[c, c + 1]], C64::new(1.0, 0.0));
        assert_eq!(m[[c, c]], C64::new(-1.0, 0.0));
        assert_eq!(m[[c + 1, c + 1]], C64::new(3.0, 0.0));
    }

    #[test]
    fn direct_sum_squares() {
        assert_eq!(direct_sum_coeff_squared(0, 0), C64::new(4.5, 0.0));
        assert_eq!(direct_sum_coeff_squared(1, 2), C64::new(-0.25, 0.0));
        assert_eq!(direct_sum_coeff_squared(0, 1), C64::new(0.0, 2.0));
        assert_eq!(direct_sum_coeff_squared(1, 1), C64::new(0.0, -2.0));
    }

    #[test]
    fn compact_windows() {
        assert_eq!(b2_compact_window(12).unwrap(), (-3, 4));
        assert_eq!(b2_compact_window(18).unwrap(), (-5, 5));
        assert_eq!(b2_compact_window(24).unwrap(), (-6, 7));
        assert_eq!(b2_compact_window(78).unwrap(), (-20, 20));
        assert!(b2_compact_window(13).is_err());
        assert!(build_b2_window(1, 3).is_err());
    }
}
