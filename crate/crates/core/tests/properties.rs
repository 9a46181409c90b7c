//! Randomised invariants of pencils built from compressions of random
//! Hermitian matrices, where the full spectrum is known exactly.

use gapspec::linalg::{self, CMatrix, C64};
use gapspec::matpoly::{
    conjugate_pairing_defect, eigenvalues, eigenvalues_only, pseudospectrum_member, rank_one_distance_witness,
    spectral_function, HermitianMatrix, MatrixPolynomial, PseudospectraWeights, QuadraticPencil,
};
use gapspec::operators::{build_shift_fixture, TruncationPair};
use gapspec::pipeline::{nearest_eigenvalue, tolerance_bound, Enclosure};
use ndarray::s;
use ndarray_linalg::Inverse;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A random Hermitian `H` on `C^full` and its compression to the first `n`
/// coordinates.
struct Compression {
    spectrum: Vec<f64>,
    pair: TruncationPair,
}

fn random_hermitian(seed: u64, full: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
    let a = CMatrix::from_shape_fn((full, full), |_| C64::new(g(), g()));
    (&a + &linalg::adjoint(a.view())).mapv(|x| x * 0.5)
}

fn compression(seed: u64, full: usize, n: usize) -> Compression {
    let h = random_hermitian(seed, full);
    let h2 = h.dot(&h);
    let m = HermitianMatrix::new(h.slice(s![..n, ..n]).to_owned()).unwrap();
    let m2 = HermitianMatrix::new(h2.slice(s![..n, ..n]).to_owned()).unwrap();
    Compression {
        spectrum: linalg::eigvalsh(h.view()).unwrap(),
        pair: TruncationPair::new(n, m, m2).unwrap(),
    }
}

fn point(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enclosures_meet_the_full_spectrum(seed in any::<u64>(), full in 4usize..14, frac in 0.2f64..0.9) {
        let n = ((full as f64 * frac) as usize).max(1);
        let c = compression(seed, full, n);
        let s = eigenvalues(&c.pair.pencil().unwrap()).unwrap();
        prop_assert_eq!(s.len(), 2 * n);
        for (z, r) in s.eigenvalues.iter().zip(&s.residuals) {
            let e = Enclosure::with_residual(*z, *r);
            prop_assert!(c.spectrum.iter().any(|&l| e.lo <= l && l <= e.hi), "{:?} misses {:?}", e, c.spectrum);
        }
    }

    #[test]
    fn compression_gap_is_positive_semidefinite(seed in any::<u64>(), full in 2usize..14, n in 1usize..14) {
        let n = n.min(full);
        let c = compression(seed, full, n);
        prop_assert!(c.pair.compression_gap_min_eigenvalue().unwrap() >= -1e-9 * c.pair.scale());
    }

    #[test]
    fn spectrum_is_conjugate_symmetric(seed in any::<u64>(), full in 3usize..14, n in 1usize..10) {
        let n = n.min(full - 1);
        let c = compression(seed, full, n);
        let z = eigenvalues_only(&c.pair.pencil().unwrap()).unwrap();
        prop_assert!(conjugate_pairing_defect(&z) < 1e-8);
    }

    #[test]
    fn spectral_function_is_lipschitz(
        seed in any::<u64>(),
        a in (-4.0f64..4.0, -2.0f64..2.0),
        b in (-4.0f64..4.0, -2.0f64..2.0),
    ) {
        let c = compression(seed, 9, 5);
        let p = c.pair.pencil().unwrap();
        let (z, w) = (point(a.0, a.1), point(b.0, b.1));
        let lhs = (spectral_function(&p, z).unwrap() - spectral_function(&p, w).unwrap()).abs();
        let diff = p.evaluate(z) - p.evaluate(w);
        prop_assert!(lhs <= linalg::spectral_norm(diff.view()).unwrap() + 1e-12 * p.coefficient_scale());
    }

    #[test]
    fn spectral_function_is_reciprocal_resolvent_norm(seed in any::<u64>(), re in -4.0f64..4.0, im in 0.05f64..2.0) {
        let c = compression(seed, 9, 5);
        let p = c.pair.pencil().unwrap();
        let z = point(re, im);
        let inv = p.evaluate(z).inv().unwrap();
        let product = spectral_function(&p, z).unwrap() * linalg::spectral_norm(inv.view()).unwrap();
        prop_assert!((product - 1.0).abs() < 1e-8, "{}", product);
    }

    #[test]
    fn witness_is_rank_one_and_minimal(seed in any::<u64>(), re in -4.0f64..4.0, im in 0.05f64..2.0) {
        let c = compression(seed, 8, 4);
        let p = c.pair.pencil().unwrap();
        let z = point(re, im);
        let sigma = spectral_function(&p, z).unwrap();
        let e = rank_one_distance_witness(&p, z).unwrap();
        let sv = linalg::singular_values(e.view()).unwrap();
        prop_assert!((sv[0] - sigma).abs() <= 1e-10 * sigma);
        prop_assert!(sv[1] < 1e-12 * sv[0]);
        let pz = p.evaluate(z);
        let sum = &pz + &e;
        let smallest = *linalg::singular_values(sum.view()).unwrap().last().unwrap();
        prop_assert!(smallest < 1e-9 * linalg::spectral_norm(pz.view()).unwrap());
    }

    #[test]
    fn eigenvalues_zero_the_spectral_function(seed in any::<u64>(), full in 3usize..12) {
        let c = compression(seed, full, full - 1);
        let p = c.pair.pencil().unwrap();
        for z in eigenvalues_only(&p).unwrap() {
            prop_assert!(spectral_function(&p, z).unwrap() < 1e-8 * p.scale());
        }
    }

    #[test]
    fn shift_fixture_bound(n in 1usize..10, r in 0.0f64..1.0, arg in 0.0f64..std::f64::consts::TAU) {
        let p = build_shift_fixture(n).unwrap();
        let z = C64::from_polar(r, arg);
        prop_assert!(spectral_function(&p, z).unwrap() <= r.powi(n as i32 + 1) + 1e-14);
    }

    #[test]
    fn eigenvalues_are_members_of_every_pseudospectrum(seed in any::<u64>(), eps in 1e-6f64..1.0) {
        let c = compression(seed, 7, 4);
        let p = c.pair.pencil().unwrap();
        let w = PseudospectraWeights::new(vec![1.0, 1.0, 1.0]).unwrap();
        for z in eigenvalues_only(&p).unwrap() {
            prop_assert!(pseudospectrum_member(&p, z, eps, &w).unwrap());
        }
    }

    #[test]
    fn nearest_eigenvalue_minimises_distance(
        pts in prop::collection::vec((-5.0f64..5.0, -2.0f64..2.0), 1..30),
        target in -5.0f64..5.0,
    ) {
        let z: Vec<C64> = pts.iter().map(|&(a, b)| point(a, b)).collect();
        let best = nearest_eigenvalue(&z, target).unwrap();
        let d = (best - target).norm();
        prop_assert!(z.contains(&best));
        prop_assert!(z.iter().all(|w| (w - target).norm() >= d * (1.0 - 1e-12)));
    }

    #[test]
    fn tolerance_bound_grows_with_the_disk(
        mu in 0.1f64..3.0,
        d1 in 0.01f64..0.2,
        lambda in -5.0f64..5.0,
        w0 in 0.1f64..2.0,
        w1 in 0.0f64..2.0,
    ) {
        let d1 = d1 * mu;
        let d2 = (1.5 * d1).min(0.249 * mu);
        let a = tolerance_bound(d1, mu, lambda, w0, w1).unwrap();
        let b = tolerance_bound(d2, mu, lambda, w0, w1).unwrap();
        prop_assert!(a > 0.0 && a <= b);
    }
}

#[test]
fn scalar_pencil_witness_and_spectrum() {
    // (z - 1)^2
    let p = QuadraticPencil::new(
        HermitianMatrix::from_real_diagonal(&[2.0]).unwrap(),
        HermitianMatrix::from_real_diagonal(&[1.0]).unwrap(),
    )
    .unwrap();
    let e = rank_one_distance_witness(&p, point(3.0, 0.0)).unwrap();
    assert!((e[[0, 0]] - point(-4.0, 0.0)).norm() < 1e-14);
    assert!(rank_one_distance_witness(&p, point(1.0, 0.0)).is_err());
    let z = eigenvalues_only(&p).unwrap();
    assert!(z.iter().all(|z| (z - point(1.0, 0.0)).norm() < 1e-7));
}
