//! Chebyshev grids for densities with inverse square-root edges.
//!
//! Both densities in this crate behave like `g(x)/√(s² − x²)` on `[-s, s]`
//! with `g` analytic, so every density is stored on the first-kind
//! Chebyshev nodes `x_j = −s cos θ_j`, `θ_j = (j + ½)π/n`. With the weights
//! `w_j = (π/n)·√(s² − x_j²)` the rule `Σ w_j ρ_j f(x_j)` is Gauss–Chebyshev
//! for `∫ g f dθ` and converges geometrically for analytic `f`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    support: f64,
    angles: Vec<f64>,
    nodes: Vec<f64>,
    edge_factors: Vec<f64>,
}

impl ChebyshevGrid {
    pub fn new(support: f64, n: usize) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(Error::domain(format!("support {support} must be positive")));
        }
        if n < 2 {
            return Err(Error::domain(format!("grid needs at least 2 nodes, got {n}")));
        }
        let angles: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * PI / n as f64).collect();
        // Mirror the left half so the grid is exactly symmetric.
        let mut nodes: Vec<f64> = angles.iter().map(|t| -support * t.cos()).collect();
        let mut edge_factors: Vec<f64> = angles.iter().map(|t| support * t.sin()).collect();
        for j in 0..n / 2 {
            nodes[n - 1 - j] = -nodes[j];
            edge_factors[n - 1 - j] = edge_factors[j];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            edge_factors[n / 2] = support;
        }
        Ok(ChebyshevGrid {
            support,
            angles,
            nodes,
            edge_factors,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `√(s² − x_j²)` at each node.
    pub fn edge_factors(&self) -> &[f64] {
        &self.edge_factors
    }

    /// Common angular weight `π/n`.
    pub fn angular_weight(&self) -> f64 {
        PI / self.len() as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        let w = self.angular_weight();
        self.edge_factors.iter().map(|e| w * e).collect()
    }

    /// Chebyshev coefficients `c_m` of the interpolant of nodal values
    /// `values[j] = g(x_j)`, so that `g(x) ≈ Σ c_m T_m(x/s)`.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(values.len(), n, "one value per node");
        // T_m(x_j/s) = (−1)^m cos(mθ_j); cos(mθ_j) = cos(m(2j+1)π/(2n)),
        // looked up by the residue of m(2j+1) modulo 4n.
        let period = 4 * n;
        let table: Vec<f64> = (0..period)
            .map(|r| (r as f64 * PI / (2 * n) as f64).cos())
            .collect();
        (0..n)
            .map(|m| {
                let mut acc = 0.0;
                for (j, v) in values.iter().enumerate() {
                    acc += v * table[(m * (2 * j + 1)) % period];
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let scale = if m == 0 { 1.0 } else { 2.0 };
                sign * scale * acc / n as f64
            })
            .collect()
    }
}

/// Sums `Σ c_m T_m(y)` by Clenshaw's recurrence.
pub fn chebyshev_sum(coefficients: &[f64], y: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in coefficients.iter().skip(1).rev() {
        let b0 = c + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coefficients.first().copied().unwrap_or(0.0) + y * b1 - b2
}

/// A density tabulated on a [`ChebyshevGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOnGrid {
    grid: ChebyshevGrid,
    values: Vec<f64>,
}

impl DensityOnGrid {
    pub fn new(grid: ChebyshevGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("density values must be finite"));
        }
        Ok(DensityOnGrid { grid, values })
    }

    /// Builds the density from the regular part `g = ρ·√(s² − x²)`.
    pub fn from_regular_part(grid: ChebyshevGrid, regular: &[f64]) -> Result<Self> {
        let values = regular
            .iter()
            .zip(grid.edge_factors())
            .map(|(g, e)| g / e)
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &ChebyshevGrid {
        &self.grid
    }

    pub fn support(&self) -> f64 {
        self.grid.support()
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.grid.weights()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn regular_part(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(self.grid.edge_factors())
            .map(|(v, e)| v * e)
            .collect()
    }

    /// `∫ ρ f` by the weighted Gauss–Chebyshev rule.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let w = self.grid.angular_weight();
        self.values
            .iter()
            .zip(self.grid.nodes())
            .zip(self.grid.edge_factors())
            .map(|((v, x), e)| w * e * v * f(*x))
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Largest `|ρ(x_j) − ρ(x_{n−1−j})|`.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|j| (self.values[j] - self.values[n - 1 - j]).abs())
            .fold(0.0, f64::max)
    }

    /// Interpolated value at any interior point.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let s = self.support();
        if !(x.abs() < s) {
            return Err(Error::domain(format!("x = {x} outside (-{s}, {s})")));
        }
        let coefficients = self.grid.coefficients(&self.regular_part());
        Ok(chebyshev_sum(&coefficients, x / s) / ((s - x) * (s + x)).sqrt())
    }

    /// Same regular part, stretched onto a different support. Mass is kept.
    pub fn rescaled(&self, support: f64) -> Result<Self> {
        let grid = ChebyshevGrid::new(support, self.grid.len())?;
        Self::from_regular_part(grid, &self.regular_part())
    }
}
