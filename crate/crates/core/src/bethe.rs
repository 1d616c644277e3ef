//! The Bethe-ansatz side: the first-kind equation
//! `∫_{−A}^{A} γ(x − x′) ρ(x′) dx′ = 2a` with `γ(x) = ln(1 + x⁻²)`,
//! normalised by `∫ρ = 1`, and the Lorentzian transform of ρ.
//!
//! The kernel is split as `γ(u) = ln(1 + u²) − 2 ln|u|`. The solution has
//! inverse square-root edges, so ρ is written as `g(x)/√(A² − x²)` and `g`
//! is expanded in Chebyshev polynomials. The logarithm then integrates in
//! closed form against each `T_m`:
//!
//! ```text
//! ∫₀^π ln|y − cos θ| cos(mθ) dθ = −π ln 2     (m = 0)
//!                                = −(π/m) T_m(y)   (m ≥ 1)
//! ```
//!
//! and the smooth part `ln(1 + u²)` is handled by Gauss–Chebyshev. Both
//! pieces give symmetric matrices, so the Nyström system is symmetric and,
//! like the continuous kernel, positive definite.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::quadrature::{chebyshev_sum, ChebyshevGrid, DensityOnGrid};

pub const MIN_NODES: usize = 16;

/// Default stopping tolerance on the lattice constant in [`solve_for_a`].
pub const DEFAULT_A_TOLERANCE: f64 = 1e-14;

const MAX_BRACKET_STEPS: usize = 200;
const MAX_BISECTION_STEPS: usize = 200;

/// `γ(x) = ln(1 + 1/x²)`.
pub fn kernel_gamma(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::pole("kernel is singular at x = 0"));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("x = {x} must be finite")));
    }
    let ax = x.abs();
    if ax < 1.0 {
        Ok((ax * ax).ln_1p() - 2.0 * ax.ln())
    } else {
        Ok((1.0 / (ax * ax)).ln_1p())
    }
}

/// `H[m] = Σ_{l=1}^{n−1} cos(lmπ/n)/l` for `m = 0..2n`.
fn cosine_harmonic_table(n: usize) -> Vec<f64> {
    let period = 2 * n;
    let cosines: Vec<f64> = (0..period)
        .map(|r| (r as f64 * PI / n as f64).cos())
        .collect();
    (0..=period)
        .map(|m| {
            (1..n)
                .map(|l| cosines[(l * m) % period] / l as f64)
                .sum()
        })
        .collect()
}

/// Nyström matrix acting on the regular part `g_j = ρ(x_j)√(A² − x_j²)`:
///
/// `M_ij = (π/n)[ln(1 + (x_i − x_j)²) − 2 ln(A/2) + 4 Σ_m T_m(y_i)T_m(y_j)/m]`
///
/// so that `Σ_j M_ij g_j ≈ ∫ γ(x_i − x′) ρ(x′) dx′`.
pub fn assemble_kernel(grid: &ChebyshevGrid) -> Result<SquareMatrix> {
    let n = grid.len();
    if n < MIN_NODES {
        return Err(Error::domain(format!(
            "kernel needs at least {MIN_NODES} nodes, got {n}"
        )));
    }
    let x = grid.nodes();
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid nodes must be distinct"));
    }
    let w = grid.angular_weight();
    let constant = -2.0 * (grid.support() / 2.0).ln();
    let harmonic = cosine_harmonic_table(n);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let u = x[i] - x[j];
            let log_part = 2.0 * (harmonic[i - j] + harmonic[i + j + 1]);
            let v = w * ((u * u).ln_1p() + constant + log_part);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    Ok(m)
}

/// Evaluates `V(x) = ∫ γ(x − x′) ρ(x′) dx′` anywhere inside the support of a
/// Chebyshev-tabulated density.
#[derive(Debug, Clone)]
pub struct LogPotential {
    support: f64,
    nodes: Vec<f64>,
    weighted_regular: Vec<f64>,
    singular_coefficients: Vec<f64>,
    constant: f64,
}

impl LogPotential {
    pub fn new(density: &DensityOnGrid) -> Self {
        let grid = density.grid();
        let s = grid.support();
        let w = grid.angular_weight();
        let regular = density.regular_part();
        let c = grid.coefficients(&regular);
        // −2∫ln|x − x′| g dθ′ = −2π ln(s/2) c₀ + 2π Σ_{m≥1} c_m T_m(y)/m
        let mut singular_coefficients = vec![0.0; c.len()];
        for (m, cm) in c.iter().enumerate().skip(1) {
            singular_coefficients[m] = TAU * cm / m as f64;
        }
        LogPotential {
            support: s,
            nodes: grid.nodes().to_vec(),
            weighted_regular: regular.iter().map(|g| w * g).collect(),
            singular_coefficients,
            constant: -TAU * (s / 2.0).ln() * c[0],
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let s = self.support;
        if !(x.abs() <= s) {
            return Err(Error::domain(format!("x = {x} outside [-{s}, {s}]")));
        }
        let smooth: f64 = self
            .nodes
            .iter()
            .zip(&self.weighted_regular)
            .map(|(xj, wg)| wg * ((x - xj) * (x - xj)).ln_1p())
            .sum();
        Ok(smooth + self.constant + chebyshev_sum(&self.singular_coefficients, x / s))
    }
}

/// A solved instance of the integral equation.
#[derive(Debug, Clone)]
pub struct BetheSolution {
    /// Support half-width A.
    pub big_a: f64,
    /// Lattice constant for which ρ solves the equation with right side 2a.
    pub a: f64,
    pub rho: DensityOnGrid,
    pub nodes_n: usize,
    /// Smallest Cholesky pivot of the Nyström matrix.
    pub min_pivot: f64,
}

impl BetheSolution {
    /// `max_j |2a − V(x_j)|` over the collocation nodes.
    pub fn collocation_residual(&self) -> Result<f64> {
        let potential = LogPotential::new(&self.rho);
        self.rho
            .nodes()
            .iter()
            .map(|&x| potential.eval(x).map(|v| (v - 2.0 * self.a).abs()))
            .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
    }
}

/// Solves on `[−A, A]` and returns the lattice constant the solution
/// corresponds to.
///
/// The right side `2a` is constant in x, so the problem is linear in the
/// pair (ρ, a): solve `∫γ ρ̃ = 1` once, then `a = 1/(2∫ρ̃)` and `ρ = 2aρ̃`
/// satisfy both the equation and the normalisation.
pub fn solve_for_big_a(big_a: f64, n: usize) -> Result<BetheSolution> {
    let grid = ChebyshevGrid::new(big_a, n)?;
    let kernel = assemble_kernel(&grid)?;
    let chol = kernel.cholesky()?;
    let unit = chol.solve(&vec![1.0; n]);
    let mass = grid.angular_weight() * unit.iter().sum::<f64>();
    if !(mass > 0.0) {
        return Err(Error::structure(format!("unit solution has mass {mass}")));
    }
    let a = 1.0 / (2.0 * mass);
    let regular: Vec<f64> = unit.iter().map(|g| 2.0 * a * g).collect();
    Ok(BetheSolution {
        big_a,
        a,
        rho: DensityOnGrid::from_regular_part(grid, &regular)?,
        nodes_n: n,
        min_pivot: chol.min_pivot(),
    })
}

/// Finds the support A for which the normalised solution has lattice
/// constant `a`, using [`DEFAULT_A_TOLERANCE`].
pub fn solve_for_a(a: f64, n: usize) -> Result<BetheSolution> {
    solve_for_a_with_tolerance(a, n, DEFAULT_A_TOLERANCE)
}

/// Bisection in `ln A` on the decreasing map `A ↦ a(A)`. The bracket grows
/// geometrically from `A = 1`; every interior evaluation is checked against
/// the bracket values so a non-monotone map is reported, not skipped.
pub fn solve_for_a_with_tolerance(a: f64, n: usize, tolerance: f64) -> Result<BetheSolution> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("lattice constant a = {a} must be positive")));
    }
    if n < MIN_NODES {
        return Err(Error::domain(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    let mut lo = solve_for_big_a(1.0, n)?;
    let mut hi = lo.clone();
    let mut steps = 0;
    while lo.a < a {
        lo = solve_for_big_a(lo.big_a / 2.0, n)?;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::convergence(format!("could not bracket A for a = {a}")));
        }
    }
    while hi.a > a {
        hi = solve_for_big_a(hi.big_a * 2.0, n)?;
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::convergence(format!("could not bracket A for a = {a}")));
        }
    }
    if (lo.a - a).abs() <= tolerance {
        return Ok(lo);
    }
    if (hi.a - a).abs() <= tolerance {
        return Ok(hi);
    }

    for _ in 0..MAX_BISECTION_STEPS {
        let mid_a = (0.5 * (lo.big_a.ln() + hi.big_a.ln())).exp();
        if mid_a <= lo.big_a || mid_a >= hi.big_a {
            break;
        }
        let mid = solve_for_big_a(mid_a, n)?;
        if !(mid.a <= lo.a && mid.a >= hi.a) {
            return Err(Error::structure(format!(
                "A -> a(A) is not monotone near A = {mid_a}"
            )));
        }
        if (mid.a - a).abs() <= tolerance {
            return Ok(mid);
        }
        if mid.a > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (lo.a - a).abs() <= (hi.a - a).abs() { lo } else { hi })
}

/// `σ(ω) = (1/2π) ∫ ρ(x) / ((x − ω)² + 1/4) dx`.
pub fn sigma_bethe(omega: f64, solution: &BetheSolution) -> f64 {
    lorentz_transform(omega, &solution.rho) / TAU
}

/// `∫ ρ(x) / ((ω − x)² + 1/4) dx` for any tabulated density.
pub fn lorentz_transform(omega: f64, rho: &DensityOnGrid) -> f64 {
    rho.integrate(|x| 1.0 / ((x - omega) * (x - omega) + 0.25))
}
