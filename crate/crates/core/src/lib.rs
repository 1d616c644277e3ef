//! Numerical comparison of two descriptions of the eigenvalue density of the
//! classical hyperbolic Calogero–Sutherland Lax matrix at equilibrium: the
//! asymptotic Bethe-ansatz integral equation and the closed theta-function
//! spectral curve.
//!
//! Pipeline: [`elliptic`] supplies θ₁, K, E and the nome; [`exact`] builds
//! the curve ω(φ), its band edge and the cut density ρ₀; [`bethe`] solves
//! the integral equation for ρ; [`lax`] diagonalises finite matrices; and
//! [`verify`] ties everything into a [`verify::ComparisonReport`].

pub mod bethe;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod lax;
pub mod linalg;
pub mod quadrature;
pub mod verify;

pub use bethe::{sigma_bethe, solve_for_a, solve_for_big_a, BetheSolution};
pub use elliptic::{modulus_from_a, NomeParameters};
pub use error::{Error, Result};
pub use exact::{find_band_edge, omega_of_phi, rho0_extract, sigma_exact, BandEdge};
pub use lax::{build_asymptotic_lax, build_lax, eigenvalues_hermitian, Boundary, LaxMatrixSpec, Spectrum};
pub use quadrature::{ChebyshevGrid, DensityOnGrid};
pub use verify::{run_verification, ComparisonReport, Tolerances, VerifyConfig};
