//! End-to-end comparison of the Bethe-ansatz density with the exact
//! theta-function density, plus the intermediate identities linking them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{lorentz_transform, sigma_bethe, solve_for_a, LogPotential};
use crate::elliptic::{modulus_from_a, NomeParameters, DEFAULT_SERIES_EPSILON};
use crate::error::{Error, Result};
use crate::exact::{
    find_band_edge, omega_of_phi, rho0_at, rho0_extract_with_edge, sigma_exact, BandEdge,
};
use crate::lax::{distance_to_exact, lax_spectrum, Boundary, LaxMatrixSpec};
use crate::quadrature::DensityOnGrid;

/// Points of the uniform grids used for sup-norms.
pub const SUP_GRID_POINTS: usize = 801;
/// Points of the interior grid for the cut equation.
pub const CUT_GRID_POINTS: usize = 201;
/// Real test angles for the inverse map.
pub const INVERSE_TEST_POINTS: usize = 20;

/// `φ(ω) = ∫ρ₀(x)(1/i)[Ln(ω − x − i/2) − Ln(ω − x + i/2)] dx`.
///
/// Principal logarithms are taken separately, which keeps the map
/// continuous across the real axis; it jumps on the lines `Im ω = ±½` for
/// `Re ω ≤ Ω₀`, where an `OnCut` error is returned. For real ω the result is
/// the curve's inverse shifted by `−2π`.
pub fn phi_of_omega(omega: Complex64, rho0: &DensityOnGrid) -> Result<Complex64> {
    if !(omega.re.is_finite() && omega.im.is_finite()) {
        return Err(Error::domain(format!("omega = {omega} must be finite")));
    }
    let s = rho0.support();
    if (omega.im.abs() - 0.5).abs() <= 1e-12 && omega.re <= s {
        return Err(Error::OnCut(format!("omega = {omega} lies on a cut")));
    }
    let half = Complex64::new(0.0, 0.5);
    let mut acc = Complex64::new(0.0, 0.0);
    let w = rho0.grid().angular_weight();
    for ((x, e), v) in rho0
        .nodes()
        .iter()
        .zip(rho0.grid().edge_factors())
        .zip(rho0.values())
    {
        let z = omega - x;
        acc += w * e * v * ((z - half).ln() - (z + half).ln());
    }
    Ok(acc / Complex64::new(0.0, 1.0))
}

/// Distance of `x` to `y` on the circle of circumference 2π.
pub fn angle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `max |a − ½∫ρ(x)γ(ω − x)dx|` over a uniform grid strictly inside the
/// support.
pub fn residual_cut_equation(rho: &DensityOnGrid, a: f64) -> Result<f64> {
    let potential = LogPotential::new(rho);
    let s = rho.support();
    let m = CUT_GRID_POINTS;
    (0..m)
        .map(|i| {
            let omega = s * (-1.0 + 2.0 * (i as f64 + 0.5) / m as f64);
            potential.eval(omega).map(|v| (a - 0.5 * v).abs())
        })
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
}

/// `max |1/ω′(φ(ω)) − ∫ρ₀(x)/((ω − x)² + ¼)dx|` over a uniform real grid on
/// `[−2Ω₀ − 2, 2Ω₀ + 2]`, with `Ω₀` taken as the support of `rho0`.
pub fn residual_derivative_representation(
    params: &NomeParameters,
    rho0: &DensityOnGrid,
) -> Result<f64> {
    let reach = 2.0 * rho0.support() + 2.0;
    uniform_grid(reach, SUP_GRID_POINTS)
        .into_iter()
        .map(|omega| {
            let exact = TAU * sigma_exact(omega, params)?;
            Ok((exact - lorentz_transform(omega, rho0)).abs())
        })
        .try_fold(0.0f64, |acc, r: Result<f64>| r.map(|r| acc.max(r)))
}

/// `max_k |φ(ω(λ_k)) − λ_k|` modulo 2π at `λ_k = π(2k + 1)/20`.
pub fn inverse_map_residual(params: &NomeParameters, rho0: &DensityOnGrid) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..INVERSE_TEST_POINTS {
        let lambda = PI * (2 * k + 1) as f64 / INVERSE_TEST_POINTS as f64;
        let omega = omega_of_phi(Complex64::new(lambda, 0.0), params)?;
        let phi = phi_of_omega(omega, rho0)?;
        worst = worst.max(angle_distance(phi.re, lambda)).max(phi.im.abs());
    }
    Ok(worst)
}

fn uniform_grid(reach: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| -reach + 2.0 * reach * i as f64 / (points - 1) as f64)
        .collect()
}

/// Pass thresholds, one per reported quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on `|bigA − omega0|`.
    pub band_edge_gap: f64,
    pub sup_sigma_diff: f64,
    pub sup_rho_diff: f64,
    #[serde(rename = "residual_eq12")]
    pub cut_equation: f64,
    #[serde(rename = "residual_eq13")]
    pub derivative_representation: f64,
    pub inverse_map_residual: f64,
    pub ks_distance_finite_n: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            band_edge_gap: 1e-6,
            sup_sigma_diff: 1e-5,
            sup_rho_diff: 1e-5,
            cut_equation: 1e-6,
            derivative_representation: 1e-6,
            inverse_map_residual: 1e-5,
            ks_distance_finite_n: 2e-3,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 7] = [
        "band_edge_gap",
        "sup_sigma_diff",
        "sup_rho_diff",
        "residual_eq12",
        "residual_eq13",
        "inverse_map_residual",
        "ks_distance_finite_n",
    ];

    /// Overrides one threshold by its report key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::domain(format!("tolerance {key}={value} must be a finite non-negative number")));
        }
        let slot = match key {
            "band_edge_gap" => &mut self.band_edge_gap,
            "sup_sigma_diff" => &mut self.sup_sigma_diff,
            "sup_rho_diff" => &mut self.sup_rho_diff,
            "residual_eq12" => &mut self.cut_equation,
            "residual_eq13" => &mut self.derivative_representation,
            "inverse_map_residual" => &mut self.inverse_map_residual,
            "ks_distance_finite_n" => &mut self.ks_distance_finite_n,
            other => {
                return Err(Error::domain(format!(
                    "unknown tolerance '{other}', expected one of {}",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Parses `key=value`.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected key=value, got '{assignment}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("'{value}' is not a number")))?;
        self.set(key.trim(), value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Chebyshev nodes for both densities.
    pub nodes: usize,
    /// Size of the open Lax matrix for the finite-N distance.
    pub matrix_n: usize,
    pub lambda: f64,
    pub series_epsilon: f64,
    pub tolerances: Tolerances,
    /// Solve the Bethe side at `a·(1 + perturb_a)` while the exact side
    /// keeps `a`.
    pub perturb_a: f64,
    /// Feed the cut equation a ρ₀ squeezed onto `[−Ω₀/2, Ω₀/2]`.
    pub halve_rho0_support: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            nodes: 400,
            matrix_n: 1000,
            lambda: 1.0,
            series_epsilon: DEFAULT_SERIES_EPSILON,
            tolerances: Tolerances::default(),
            perturb_a: 0.0,
            halve_rho0_support: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: f64,
    #[serde(rename = "bigA")]
    pub big_a: f64,
    pub omega0: f64,
    pub sup_sigma_diff: f64,
    pub sup_rho_diff: f64,
    #[serde(rename = "residual_eq12")]
    pub cut_equation_residual: f64,
    #[serde(rename = "residual_eq13")]
    pub derivative_representation_residual: f64,
    pub inverse_map_residual: f64,
    pub ks_distance_finite_n: f64,
    pub tolerances: Tolerances,
    pub pass: bool,
}

impl ComparisonReport {
    /// Names of the checks that exceed their threshold (non-finite values
    /// always fail).
    pub fn failures(&self) -> Vec<&'static str> {
        let t = &self.tolerances;
        let checks = [
            ("band_edge_gap", (self.big_a - self.omega0).abs(), t.band_edge_gap),
            ("sup_sigma_diff", self.sup_sigma_diff, t.sup_sigma_diff),
            ("sup_rho_diff", self.sup_rho_diff, t.sup_rho_diff),
            ("residual_eq12", self.cut_equation_residual, t.cut_equation),
            ("residual_eq13", self.derivative_representation_residual, t.derivative_representation),
            ("inverse_map_residual", self.inverse_map_residual, t.inverse_map_residual),
            ("ks_distance_finite_n", self.ks_distance_finite_n, t.ks_distance_finite_n),
        ];
        checks
            .iter()
            .filter(|(_, value, bound)| !(value <= bound))
            .map(|(name, _, _)| *name)
            .collect()
    }

    fn judged(mut self) -> Self {
        self.pass = self.failures().is_empty();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialise")
    }
}

/// Runs every stage for lattice constant `a` and collects the report.
pub fn run_verification(a: f64, config: &VerifyConfig) -> Result<ComparisonReport> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("lattice constant a = {a} must be positive")));
    }
    if !(config.perturb_a > -1.0 && config.perturb_a.is_finite()) {
        return Err(Error::domain(format!("perturbation {} must exceed -1", config.perturb_a)));
    }
    let params = modulus_from_a(a)?.with_series_epsilon(config.series_epsilon)?;
    let edge = find_band_edge(&params)?;
    let bethe = solve_for_a(a * (1.0 + config.perturb_a), config.nodes)?;
    let rho0 = rho0_extract_with_edge(&params, &edge, config.nodes)?;

    let reach = 2.0 * edge.omega0 + 2.0;
    let mut sup_sigma_diff = 0.0f64;
    for omega in uniform_grid(reach, SUP_GRID_POINTS) {
        sup_sigma_diff = sup_sigma_diff.max((sigma_bethe(omega, &bethe) - sigma_exact(omega, &params)?).abs());
    }

    let sup_rho_diff = sup_rho_difference(&bethe.rho, &params, &edge)?;

    let cut_input = if config.halve_rho0_support {
        rho0.rescaled(0.5 * rho0.support())?
    } else {
        rho0.clone()
    };
    let cut_equation_residual = residual_cut_equation(&cut_input, a)?;
    let derivative_representation_residual = residual_derivative_representation(&params, &rho0)?;
    let inverse_map_residual = inverse_map_residual(&params, &rho0)?;

    let spec = LaxMatrixSpec::new(config.matrix_n, a, config.lambda, Boundary::Open)?;
    let ks_distance_finite_n = distance_to_exact(&lax_spectrum(&spec)?, config.lambda, &params)?;

    Ok(ComparisonReport {
        a,
        big_a: bethe.big_a,
        omega0: edge.omega0,
        sup_sigma_diff,
        sup_rho_diff,
        cut_equation_residual,
        derivative_representation_residual,
        inverse_map_residual,
        ks_distance_finite_n,
        tolerances: config.tolerances,
        pass: false,
    }
    .judged())
}

/// `max |ρ(x_j) − ρ₀(x_j)|` over the Bethe nodes inside the cut, with ρ₀
/// evaluated pointwise. A node outside the cut counts as `ρ(x_j)` itself.
fn sup_rho_difference(rho: &DensityOnGrid, params: &NomeParameters, edge: &BandEdge) -> Result<f64> {
    let mut worst = 0.0f64;
    for (&x, &value) in rho.nodes().iter().zip(rho.values()) {
        let reference = if x.abs() < edge.omega0 {
            rho0_at(x, params, edge)?
        } else {
            0.0
        };
        worst = worst.max((value - reference).abs());
    }
    Ok(worst)
}
