mod common;

use std::f64::consts::{PI, TAU};

use lax_density::exact::omega_of_phi;
use lax_density::lax::{
    build_asymptotic_lax, build_lax, circulant_eigenvalues, circulant_spectrum, distance_to_exact,
    eigenvalues_hermitian, empirical_density, jacobi_eigenpairs, jacobi_eigenvalues, lax_spectrum,
    sign_matrix_eigenvalues, two_sample_distance, Boundary, HermitianMatrix, LaxMatrixSpec,
};
use lax_density::{modulus_from_a, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn dense(m: &HermitianMatrix) -> Vec<Vec<Complex64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

fn shifted(m: &HermitianMatrix, z: Complex64) -> Vec<Vec<Complex64>> {
    let mut d = dense(m);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] -= z;
    }
    d
}

#[test]
fn asymptotic_determinant_identity() {
    let k = [0.37, -1.2, 2.05];
    let lambda = 0.8;
    let l = build_asymptotic_lax(&k, lambda).unwrap();
    let il = Complex64::new(0.0, lambda);
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.3, 0.0),
        Complex64::new(-0.4, 0.7),
        Complex64::new(2.2, -1.1),
        Complex64::new(-3.0, 0.2),
    ] {
        let det = common::complex_det(shifted(&l, z));
        let plus: Complex64 = k.iter().map(|&kj| kj - z + il).product();
        let minus: Complex64 = k.iter().map(|&kj| kj - z - il).product();
        let expected = 0.5 * (plus + minus);
        assert!((det - expected).norm() < 1e-12 * expected.norm().max(1.0), "z={z}");
    }
}

#[test]
fn sign_matrix_spectrum_is_cotangent() {
    let n = 8;
    let lambda = 1.0;
    let spectrum = eigenvalues_hermitian(&build_asymptotic_lax(&vec![0.0; n], lambda).unwrap()).unwrap();
    let expected = sign_matrix_eigenvalues(n, lambda);
    for (mu, e) in spectrum.eigenvalues.iter().zip(&expected) {
        assert!((mu - e).abs() < 1e-10);
    }
    // spot-check the closed form itself
    let mut direct: Vec<f64> = (0..n)
        .map(|s| lambda / ((2 * s + 1) as f64 * PI / (2 * n) as f64).tan())
        .collect();
    direct.sort_by(f64::total_cmp);
    assert_eq!(direct, expected);
}

#[test]
fn small_open_matrix_matches_characteristic_polynomial() {
    let spec = LaxMatrixSpec::new(5, 1.0, 1.0, Boundary::Open).unwrap();
    let l = build_lax(&spec).unwrap();
    let coeffs = common::characteristic_polynomial(&dense(&l));
    assert!(coeffs.iter().all(|c| c.im.abs() < 1e-12));
    let real: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    let roots = common::real_roots(&real, l.frobenius_norm() + 1.0);
    assert_eq!(roots.len(), 5);
    let ours = eigenvalues_hermitian(&l).unwrap();
    for (mu, r) in ours.eigenvalues.iter().zip(&roots) {
        assert!((mu - r).abs() < 1e-9, "{mu} vs {r}");
    }
}

#[test]
fn skew_route_agrees_with_jacobi() {
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let spec = LaxMatrixSpec::new(100, 0.7, 1.3, boundary).unwrap();
        let fast = lax_spectrum(&spec).unwrap();
        let reference = jacobi_eigenvalues(&build_lax(&spec).unwrap()).unwrap();
        let scale = reference.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (x, y) in fast.eigenvalues.iter().zip(&reference) {
            assert!((x - y).abs() < 1e-12 * scale, "{boundary:?}");
        }
    }
}

#[test]
fn trace_identities() {
    for n in [64, 512, 2000] {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let spec = LaxMatrixSpec::new(n, 1.0, 1.0, boundary).unwrap();
            let s = lax_spectrum(&spec).unwrap();
            assert!(s.sum().abs() < 1e-10 * n as f64, "N={n}: {}", s.sum());
            let expected = spec.trace_of_square();
            assert!((s.sum_of_squares() - expected).abs() < 1e-8 * expected, "N={n}");
            let scale = s.eigenvalues[n - 1].abs();
            assert!(s.symmetry_defect() < 1e-10 * scale);
        }
    }
}

#[test]
fn eigenpairs_pass_backward_check() {
    let spec = LaxMatrixSpec::new(40, 0.9, 1.0, Boundary::Open).unwrap();
    let l = build_lax(&spec).unwrap();
    let pairs = jacobi_eigenpairs(&l).unwrap();
    let norm = l.frobenius_norm();
    for idx in [0, 7, 19, 26, 39] {
        let (mu, v) = &pairs[idx];
        let lv = l.mul_vec(v);
        let residual: f64 = lv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * mu).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual <= 1e-9 * norm, "pair {idx}: {residual}");
    }
}

#[test]
fn circulant_matches_eigensolver() {
    let spec = LaxMatrixSpec::new(64, 1.0, 1.0, Boundary::Periodic).unwrap();
    let fourier = circulant_spectrum(&spec).unwrap();
    let dense = jacobi_eigenvalues(&build_lax(&spec).unwrap()).unwrap();
    for (x, y) in fourier.eigenvalues.iter().zip(&dense) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(circulant_eigenvalues(&spec).unwrap()[0].abs() < 1e-14);
}

/// `max |μ_s/2λ − ω(2πs/N)|` over the central band `N/8 ≤ s ≤ 7N/8`.
fn circulant_curve_gap(n: usize, a: f64) -> f64 {
    let lambda = 1.0;
    let spec = LaxMatrixSpec::new(n, a, lambda, Boundary::Periodic).unwrap();
    let p = modulus_from_a(a).unwrap();
    let mu = circulant_eigenvalues(&spec).unwrap();
    (n / 8..=7 * n / 8)
        .map(|s| {
            let phi = TAU * s as f64 / n as f64;
            let w = omega_of_phi(Complex64::new(phi, 0.0), &p).unwrap().re;
            (mu[s] / (2.0 * lambda) - w).abs()
        })
        .fold(0.0, f64::max)
}

// Pinned from the N = 2048 run (gap ≈ 3e-11, rounding-dominated).
const CIRCULANT_CURVE_TOLERANCE: f64 = 1e-9;

#[test]
fn circulant_converges_to_spectral_curve() {
    let coarse = circulant_curve_gap(512, 1.0);
    let fine = circulant_curve_gap(2048, 1.0);
    assert!(coarse <= CIRCULANT_CURVE_TOLERANCE, "{coarse}");
    assert!(fine <= CIRCULANT_CURVE_TOLERANCE, "{fine}");
    assert!(circulant_curve_gap(256, 0.5) <= CIRCULANT_CURVE_TOLERANCE);
}

#[test]
fn empirical_distance_shrinks_with_size() {
    let p = modulus_from_a(1.0).unwrap();
    let distances: Vec<f64> = [250, 500, 1000, 2000]
        .iter()
        .map(|&n| {
            let spec = LaxMatrixSpec::new(n, 1.0, 1.0, Boundary::Open).unwrap();
            distance_to_exact(&lax_spectrum(&spec).unwrap(), 1.0, &p).unwrap()
        })
        .collect();
    assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
}

#[test]
fn open_and_periodic_distributions_merge() {
    let gap = |n: usize| {
        let open = lax_spectrum(&LaxMatrixSpec::new(n, 1.0, 1.0, Boundary::Open).unwrap()).unwrap();
        let periodic = lax_spectrum(&LaxMatrixSpec::new(n, 1.0, 1.0, Boundary::Periodic).unwrap()).unwrap();
        two_sample_distance(&open.eigenvalues, &periodic.eigenvalues)
    };
    let (g1, g2, g3) = (gap(200), gap(400), gap(800));
    assert!(g1 > g2 && g2 > g3, "{g1} {g2} {g3}");
}

#[test]
fn histogram_is_normalised_and_symmetric() {
    let spec = LaxMatrixSpec::new(600, 1.0, 1.0, Boundary::Open).unwrap();
    let s = lax_spectrum(&spec).unwrap();
    let h = empirical_density(&s, 1.0, 41, Some(4.0)).unwrap();
    let kept = h.samples.iter().filter(|x| x.abs() <= 4.0).count() as f64 / 600.0;
    assert!((h.total_mass() - kept).abs() < 1e-12);
    let b = h.heights.len();
    for i in 0..b {
        assert!((h.heights[i] - h.heights[b - 1 - i]).abs() <= 2.0 / (600.0 * 8.0 / 41.0));
    }
    assert!(matches!(empirical_density(&s, 1.0, 1, None), Err(Error::Domain(_))));
}

#[test]
fn rejects_invalid_matrices() {
    assert!(matches!(LaxMatrixSpec::new(1, 1.0, 1.0, Boundary::Open), Err(Error::Domain(_))));
    let skewed = HermitianMatrix::from_fn(3, |i, j| Complex64::new(0.0, (i as f64) - 2.0 * j as f64));
    assert!(matches!(eigenvalues_hermitian(&skewed), Err(Error::Domain(_))));
    assert!(build_asymptotic_lax(&[], 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_identities_for_random_specs(n in 2usize..90, a in 0.2f64..4.0, lambda in 0.1f64..3.0, periodic in any::<bool>()) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
        let spec = LaxMatrixSpec::new(n, a, lambda, boundary).unwrap();
        let l = build_lax(&spec).unwrap();
        prop_assert_eq!(l.hermiticity_defect(), 0.0);
        let s = lax_spectrum(&spec).unwrap();
        let expected = spec.trace_of_square();
        prop_assert!(s.sum().abs() <= 1e-10 * n as f64 * lambda.max(1.0));
        prop_assert!((s.sum_of_squares() - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn periodic_coefficients_antisymmetric(n in 2usize..500, a in 0.1f64..5.0) {
        let spec = LaxMatrixSpec::new(n, a, 1.0, Boundary::Periodic).unwrap();
        for m in 1..n {
            prop_assert_eq!(spec.periodic_coefficient(n - m), -spec.periodic_coefficient(m));
        }
    }

    #[test]
    fn histogram_has_unit_mass(n in 2usize..200, bins in 2usize..60) {
        let spec = LaxMatrixSpec::new(n, 1.0, 1.0, Boundary::Open).unwrap();
        let s = lax_spectrum(&spec).unwrap();
        let h = empirical_density(&s, 1.0, bins, None).unwrap();
        prop_assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }
}
