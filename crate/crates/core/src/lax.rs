//! Finite-N Lax matrices, their spectra and empirical densities.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::NomeParameters;
use crate::error::{Error, Result};
use crate::exact::cdf_exact;
use crate::linalg::{jacobi_eigen, skew_tridiagonalize, tridiagonal_eigenvalues, SquareMatrix};

/// Matrices up to this size go through Jacobi even when the skew route
/// would apply.
pub const JACOBI_LIMIT: usize = 64;
const JACOBI_TOLERANCE: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 60;
const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::domain(format!("unknown boundary '{other}'"))),
        }
    }
}

/// The classical Lax matrix `L_jk = iλ c(j − k)` for particles at `x_j = ja`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxMatrixSpec {
    pub n: usize,
    pub a: f64,
    pub lambda: f64,
    pub boundary: Boundary,
}

impl LaxMatrixSpec {
    pub fn new(n: usize, a: f64, lambda: f64, boundary: Boundary) -> Result<Self> {
        let spec = LaxMatrixSpec {
            n,
            a,
            lambda,
            boundary,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("need N >= 2 particles, got {}", self.n)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::domain(format!("lattice constant {} must be positive", self.a)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(format!("coupling {} must be positive", self.lambda)));
        }
        Ok(())
    }

    /// Real coefficient `c(m)` of the off-diagonal entry at offset `m`,
    /// `1 ≤ m ≤ N − 1` counted modulo N for the periodic variant.
    ///
    /// Periodic: `coth(am) − coth(a(N − m)) + (1 − 2m/N)`. The first two
    /// terms are the nearest images of the coth kernel; the sawtooth is the
    /// zeta-regularised sum of the images of its `sgn` tail, which the two
    /// images alone cancel.
    pub fn periodic_coefficient(&self, m: usize) -> f64 {
        let n = self.n;
        let coth = |x: f64| 1.0 / x.tanh();
        let images = coth(self.a * m as f64) - coth(self.a * (n - m) as f64);
        let sawtooth = (n as f64 - 2.0 * m as f64) / n as f64;
        images + sawtooth
    }

    /// `c(j − k)` of the open matrix (`coth(a(j − k))`), for `j ≠ k`.
    pub fn open_coefficient(&self, offset: isize) -> f64 {
        1.0 / (self.a * offset as f64).tanh()
    }

    /// Real skew-symmetric `C` with `L = iλC`, as its strict lower triangle.
    fn skew_lower(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        match self.boundary {
            Boundary::Open => {
                let c: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { self.open_coefficient(d as isize) }).collect();
                (0..n).map(|i| (0..i).map(|j| self.lambda * c[i - j]).collect()).collect()
            }
            Boundary::Periodic => {
                let c: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { self.periodic_coefficient(d) }).collect();
                (0..n).map(|i| (0..i).map(|j| self.lambda * c[i - j]).collect()).collect()
            }
        }
    }

    /// `Tr L² = Σ_jk |L_jk|²`.
    pub fn trace_of_square(&self) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for d in 1..n {
            let c = match self.boundary {
                Boundary::Open => self.open_coefficient(d as isize),
                Boundary::Periodic => self.periodic_coefficient(d),
            };
            total += (n - d) as f64 * c * c;
        }
        2.0 * self.lambda * self.lambda * total
    }
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// `max |L − L†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    fn is_purely_imaginary(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0)
    }

    /// `[[Re L, −Im L], [Im L, Re L]]`.
    fn real_embedding(&self) -> SquareMatrix {
        let n = self.n;
        SquareMatrix::from_fn(2 * n, |i, j| {
            let z = self.get(i % n, j % n);
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    }

    fn check_hermitian(&self) -> Result<()> {
        let scale = self.frobenius_norm().max(1.0);
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOLERANCE * scale {
            return Err(Error::domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(())
    }
}

/// Open (Toeplitz) or periodic (circulant) classical Lax matrix.
pub fn build_lax(spec: &LaxMatrixSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let n = spec.n;
    let coefficient = |j: usize, k: usize| -> f64 {
        if j == k {
            return 0.0;
        }
        match spec.boundary {
            Boundary::Open => spec.open_coefficient(j as isize - k as isize),
            Boundary::Periodic => spec.periodic_coefficient((j + n - k) % n),
        }
    };
    Ok(HermitianMatrix::from_fn(n, |j, k| {
        Complex64::new(0.0, spec.lambda * coefficient(j, k))
    }))
}

/// Asymptotic matrix `k_j δ_jk + iλ sgn(j − k)`.
pub fn build_asymptotic_lax(momenta: &[f64], lambda: f64) -> Result<HermitianMatrix> {
    if momenta.is_empty() {
        return Err(Error::domain("need at least one momentum"));
    }
    Ok(HermitianMatrix::from_fn(momenta.len(), |j, k| match j.cmp(&k) {
        std::cmp::Ordering::Equal => Complex64::new(momenta[j], 0.0),
        std::cmp::Ordering::Greater => Complex64::new(0.0, lambda),
        std::cmp::Ordering::Less => Complex64::new(0.0, -lambda),
    }))
}

/// Sorted real eigenvalues, optionally tagged with the generating spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub spec: Option<LaxMatrixSpec>,
}

impl Spectrum {
    fn new(mut eigenvalues: Vec<f64>, spec: Option<LaxMatrixSpec>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Spectrum { eigenvalues, spec }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x * x).sum()
    }

    /// Largest `|μ_i + μ_{N−1−i}|` of the sorted list.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| (self.eigenvalues[i] + self.eigenvalues[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues divided by `2λ`, the scale of the spectral curve.
    pub fn rescaled(&self, lambda: f64) -> Vec<f64> {
        self.eigenvalues.iter().map(|x| x / (2.0 * lambda)).collect()
    }
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi on its real
/// symmetric embedding (every eigenvalue appears twice there).
pub fn jacobi_eigenvalues(matrix: &HermitianMatrix) -> Result<Vec<f64>> {
    matrix.check_hermitian()?;
    let (mut doubled, _) = jacobi_eigen(
        &matrix.real_embedding(),
        JACOBI_TOLERANCE,
        JACOBI_MAX_SWEEPS,
        false,
    )?;
    doubled.sort_by(f64::total_cmp);
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Eigenpairs from the same Jacobi route; vectors are unit-norm.
pub fn jacobi_eigenpairs(matrix: &HermitianMatrix) -> Result<Vec<(f64, Vec<Complex64>)>> {
    matrix.check_hermitian()?;
    let n = matrix.dim();
    let (values, vectors) = jacobi_eigen(
        &matrix.real_embedding(),
        JACOBI_TOLERANCE,
        JACOBI_MAX_SWEEPS,
        true,
    )?;
    let vectors = vectors.expect("vectors requested");
    let mut pairs: Vec<(f64, Vec<Complex64>)> = values
        .iter()
        .enumerate()
        .map(|(col, &mu)| {
            // (u; w) ↦ u + iw
            let z: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(vectors.get(i, col), vectors.get(i + n, col)))
                .collect();
            let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            (mu, z.into_iter().map(|c| c / norm).collect())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().step_by(2).collect())
}

/// Eigenvalues of `L = iC` with `C` real skew-symmetric: Householder
/// reduction of `C` to skew tridiagonal form, whose image under `i` is
/// unitarily similar to the real symmetric tridiagonal matrix with zero
/// diagonal and the same off-diagonal.
fn skew_eigenvalues(lower: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = lower.len();
    let off = skew_tridiagonalize(lower);
    tridiagonal_eigenvalues(&vec![0.0; n], &off)
}

/// Eigenvalues of any Hermitian matrix. Purely imaginary matrices larger
/// than [`JACOBI_LIMIT`] take the skew Householder route; everything else
/// goes through Jacobi.
pub fn eigenvalues_hermitian(matrix: &HermitianMatrix) -> Result<Spectrum> {
    matrix.check_hermitian()?;
    let values = if matrix.dim() > JACOBI_LIMIT && matrix.is_purely_imaginary() {
        let n = matrix.dim();
        let lower = (0..n).map(|i| (0..i).map(|j| matrix.get(i, j).im).collect()).collect();
        skew_eigenvalues(lower)?
    } else {
        jacobi_eigenvalues(matrix)?
    };
    Ok(Spectrum::new(values, None))
}

/// Spectrum of the classical Lax matrix without materialising it as a
/// complex matrix.
pub fn lax_spectrum(spec: &LaxMatrixSpec) -> Result<Spectrum> {
    spec.validate()?;
    let values = if spec.n > JACOBI_LIMIT {
        skew_eigenvalues(spec.skew_lower())?
    } else {
        jacobi_eigenvalues(&build_lax(spec)?)?
    };
    Ok(Spectrum::new(values, Some(*spec)))
}

/// Circulant eigenvalues indexed by the plane-wave number s:
/// `μ_s = −2λ Σ_{m=1}^{⌊(N−1)/2⌋} c(m) sin(2πsm/N)`.
pub fn circulant_eigenvalues(spec: &LaxMatrixSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if spec.boundary != Boundary::Periodic {
        return Err(Error::domain("circulant spectrum needs the periodic boundary"));
    }
    let n = spec.n;
    let half = (n - 1) / 2;
    let coefficients: Vec<f64> = (1..=half).map(|m| spec.periodic_coefficient(m)).collect();
    let sines: Vec<f64> = (0..n).map(|r| (TAU * r as f64 / n as f64).sin()).collect();
    Ok((0..n)
        .map(|s| {
            let acc: f64 = coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| c * sines[(s * (i + 1)) % n])
                .sum();
            -2.0 * spec.lambda * acc
        })
        .collect())
}

pub fn circulant_spectrum(spec: &LaxMatrixSpec) -> Result<Spectrum> {
    Ok(Spectrum::new(circulant_eigenvalues(spec)?, Some(*spec)))
}

/// Normalised histogram plus empirical distribution of rescaled eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDensity {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    /// Histogram heights; `Σ height·width = 1`.
    pub heights: Vec<f64>,
    /// Sorted rescaled eigenvalues; the ECDF jumps by `1/N` at each.
    pub samples: Vec<f64>,
}

impl EmpiricalDensity {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.heights
            .iter()
            .zip(self.edges.windows(2))
            .map(|(h, w)| h * (w[1] - w[0]))
            .sum()
    }

    pub fn ecdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }
}

/// Histogram over `[−R, R]` of the eigenvalues rescaled by `1/(2λ)`, where
/// R is `half_width` or, if `None`, the largest rescaled magnitude. Samples
/// outside the window are dropped from the histogram but kept in the ECDF.
pub fn empirical_density(
    spectrum: &Spectrum,
    lambda: f64,
    bins: usize,
    half_width: Option<f64>,
) -> Result<EmpiricalDensity> {
    if bins < 2 {
        return Err(Error::domain(format!("need at least 2 bins, got {bins}")));
    }
    if spectrum.len() < 2 {
        return Err(Error::domain("need at least two eigenvalues"));
    }
    let samples = spectrum.rescaled(lambda);
    let r = half_width.unwrap_or_else(|| samples.iter().map(|x| x.abs()).fold(0.0, f64::max));
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("histogram half-width {r} must be positive")));
    }
    let width = 2.0 * r / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| -r + b as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &x in &samples {
        if x.abs() <= r {
            let b = (((x + r) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let total = samples.len() as f64;
    let heights = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    Ok(EmpiricalDensity {
        edges,
        heights,
        samples,
    })
}

/// Kolmogorov distance between the empirical law of sorted `samples` and a
/// continuous distribution function.
pub fn kolmogorov_distance(
    samples: &[f64],
    mut cdf: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let n = samples.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        worst = worst.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(worst)
}

/// Two-sample Kolmogorov distance of two sorted samples.
pub fn two_sample_distance(first: &[f64], second: &[f64]) -> f64 {
    let (n, m) = (first.len() as f64, second.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < first.len() && j < second.len() {
        let x = first[i].min(second[j]);
        while i < first.len() && first[i] <= x {
            i += 1;
        }
        while j < second.len() && second[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / n - j as f64 / m).abs());
    }
    worst
}

/// Kolmogorov distance of the rescaled spectrum to the exact law `φ(ω)/2π`.
pub fn distance_to_exact(spectrum: &Spectrum, lambda: f64, params: &NomeParameters) -> Result<f64> {
    kolmogorov_distance(&spectrum.rescaled(lambda), |w| cdf_exact(w, params))
}

/// `λ cot((2s + 1)π/(2N))`, s = 0..N−1: the asymptotic matrix with all
/// momenta zero.
pub fn sign_matrix_eigenvalues(n: usize, lambda: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|s| lambda / ((2 * s + 1) as f64 * PI / (2 * n) as f64).tan())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_matrix_is_hermitian_and_traceless() {
        let spec = LaxMatrixSpec::new(9, 0.8, 1.3, Boundary::Open).unwrap();
        let l = build_lax(&spec).unwrap();
        assert_eq!(l.hermiticity_defect(), 0.0);
        assert_eq!(l.trace(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn periodic_coefficients_antisymmetric() {
        for n in [2, 7, 16, 33] {
            let spec = LaxMatrixSpec::new(n, 1.1, 1.0, Boundary::Periodic).unwrap();
            for m in 1..n {
                assert_eq!(spec.periodic_coefficient(n - m), -spec.periodic_coefficient(m));
            }
            assert_eq!(build_lax(&spec).unwrap().hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(LaxMatrixSpec::new(1, 1.0, 1.0, Boundary::Open).is_err());
        assert!(LaxMatrixSpec::new(4, 0.0, 1.0, Boundary::Open).is_err());
        assert!(LaxMatrixSpec::new(4, 1.0, -1.0, Boundary::Open).is_err());
        assert!("closed".parse::<Boundary>().is_err());
        assert_eq!("periodic".parse::<Boundary>().unwrap(), Boundary::Periodic);
    }

    #[test]
    fn two_by_two_sign_matrix() {
        let l = build_asymptotic_lax(&[0.0, 0.0], 1.0).unwrap();
        let s = eigenvalues_hermitian(&l).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_sorted() {
        let d = [2.0, -3.0, 0.5];
        let l = HermitianMatrix::from_fn(3, |i, j| Complex64::new(if i == j { d[i] } else { 0.0 }, 0.0));
        assert_eq!(eigenvalues_hermitian(&l).unwrap().eigenvalues, vec![-3.0, 0.5, 2.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let l = HermitianMatrix::from_fn(2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        assert!(matches!(eigenvalues_hermitian(&l), Err(Error::Domain(_))));
    }

    #[test]
    fn circulant_zero_mode() {
        let spec = LaxMatrixSpec::new(40, 1.0, 1.0, Boundary::Periodic).unwrap();
        let mu = circulant_eigenvalues(&spec).unwrap();
        assert!(mu[0].abs() < 1e-14);
        let open = LaxMatrixSpec::new(40, 1.0, 1.0, Boundary::Open).unwrap();
        assert!(circulant_eigenvalues(&open).is_err());
    }

    #[test]
    fn histogram_mass_and_bins() {
        let spec = LaxMatrixSpec::new(50, 1.0, 1.0, Boundary::Open).unwrap();
        let s = lax_spectrum(&spec).unwrap();
        let h = empirical_density(&s, 1.0, 21, None).unwrap();
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.ecdf(f64::INFINITY), 1.0);
        assert!(empirical_density(&s, 1.0, 1, None).is_err());
    }

    #[test]
    fn two_sample_distance_basics() {
        let a = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(two_sample_distance(&a, &a), 0.0);
        let b = [10.0, 11.0, 12.0, 13.0];
        assert_eq!(two_sample_distance(&a, &b), 1.0);
    }
}
