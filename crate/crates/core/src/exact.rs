//! The exact side: the spectral curve `ω(φ) = −θ₁′(φ/2) / (2θ₁(φ/2))`.
//!
//! On the real axis ω increases monotonically from −∞ to +∞ as φ runs over
//! (0, 2π). On the shifted line `Im φ = a` the curve has `Im ω = 1/2` and
//! its real part oscillates between `−Ω₀` and `Ω₀`; that band edge is the
//! support of the cut density ρ₀.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::elliptic::NomeParameters;
use crate::error::{Error, Result};
use crate::quadrature::{ChebyshevGrid, DensityOnGrid};

/// Distance from the poles φ ∈ {0, 2π} below which the curve is replaced
/// by its two-term pole expansion.
pub const POLE_GUARD: f64 = 1e-6;

const MAX_BISECTION_STEPS: usize = 200;

/// `ω(φ)` at complex φ.
pub fn omega_of_phi(phi: Complex64, params: &NomeParameters) -> Result<Complex64> {
    let ld = params
        .theta()
        .log_derivative(phi * 0.5)
        .map_err(|_| Error::pole(format!("spectral curve has a pole at phi = {phi}")))?;
    Ok(-ld * 0.5)
}

/// `dω/dφ` from the term-wise differentiated theta series.
pub fn domega_dphi(phi: Complex64, params: &NomeParameters) -> Result<Complex64> {
    let d = params
        .theta()
        .log_derivative_prime(phi * 0.5)
        .map_err(|_| Error::pole(format!("spectral curve has a pole at phi = {phi}")))?;
    Ok(-d * 0.25)
}

/// `dω/dφ = −(K²/π²)[(K − E)/K − 1/sn²(Kφ/π)]` for real φ.
pub fn domega_dphi_sn(phi: f64, params: &NomeParameters) -> Result<f64> {
    let k = params.big_k;
    let sn = params.sn(k * phi / PI)?;
    if sn == 0.0 {
        return Err(Error::pole(format!("spectral curve has a pole at phi = {phi}")));
    }
    Ok(-(k * k / (PI * PI)) * ((k - params.big_e) / k - 1.0 / (sn * sn)))
}

fn omega_real(phi: f64, params: &NomeParameters) -> Result<f64> {
    Ok(omega_of_phi(Complex64::new(phi, 0.0), params)?.re)
}

fn slope_real(phi: f64, params: &NomeParameters) -> Result<f64> {
    Ok(domega_dphi(Complex64::new(phi, 0.0), params)?.re)
}

/// Coefficient `c` in `ω(φ) = −1/φ + cφ + O(φ³)` near the pole at zero,
/// read off from the Laurent expansion `1/sn²(u) = 1/u² + (1 + k²)/3 + …`.
fn pole_coefficient(params: &NomeParameters) -> f64 {
    let NomeParameters { k, big_k, big_e, .. } = *params;
    big_k * big_k / (PI * PI) * ((1.0 + k * k) / 3.0 - 1.0 + big_e / big_k)
}

/// The curve sampled at a uniform interior grid of φ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub params: NomeParameters,
    pub samples: Vec<(f64, f64)>,
}

impl SpectralCurve {
    /// Samples at `φ_i = 2π(i + ½)/count`. Fails if the samples are not
    /// strictly increasing in ω.
    pub fn sample(params: &NomeParameters, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain("need at least two curve samples"));
        }
        let samples = (0..count)
            .map(|i| {
                let phi = TAU * (i as f64 + 0.5) / count as f64;
                omega_real(phi, params).map(|w| (phi, w))
            })
            .collect::<Result<Vec<_>>>()?;
        if samples.windows(2).any(|w| w[1].1 <= w[0].1) {
            return Err(Error::structure("spectral curve is not increasing"));
        }
        Ok(SpectralCurve {
            params: *params,
            samples,
        })
    }

    /// Largest `|ω(φ) + ω(2π − φ)|` over the sample pairs.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| (self.samples[i].1 + self.samples[n - 1 - i].1).abs())
            .fold(0.0, f64::max)
    }
}

/// Extremum data of `Re ω` on the line `Im φ = a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    /// Minimum of `Re ω(t + ia)` sits at `t = phi_min`, the maximum at
    /// `2π − phi_min`.
    pub phi_min: f64,
    /// `Ω₀ = Re ω(2π − φ_min + ia)`.
    pub omega0: f64,
}

fn on_shifted_line(t: f64, params: &NomeParameters) -> Complex64 {
    Complex64::new(t, params.a)
}

/// Locates the zero of `dω/dφ` on `Im φ = a`, `0 < Re φ < π`.
pub fn find_band_edge(params: &NomeParameters) -> Result<BandEdge> {
    let slope = |t: f64| -> Result<f64> {
        Ok(domega_dphi(on_shifted_line(t, params), params)?.re)
    };
    let mut lo = 0.0;
    let mut hi = PI;
    let (s_lo, s_hi) = (slope(lo)?, slope(hi)?);
    if !(s_lo < 0.0 && s_hi > 0.0) {
        return Err(Error::structure(format!(
            "no sign change of the slope on the shifted line: {s_lo:e} at 0, {s_hi:e} at pi"
        )));
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi_min = 0.5 * (lo + hi);
    let omega0 = omega_of_phi(on_shifted_line(TAU - phi_min, params), params)?.re;
    if !(omega0 > 0.0) {
        return Err(Error::structure(format!("band edge {omega0} is not positive")));
    }
    Ok(BandEdge { phi_min, omega0 })
}

/// The real inverse `φ(ω) ∈ (0, 2π)` of the curve.
pub fn phi_of_omega_real(omega: f64, params: &NomeParameters) -> Result<f64> {
    Ok(invert_real(omega, params)?.0)
}

/// Returns φ(ω) together with `dω/dφ` there.
fn invert_real(omega: f64, params: &NomeParameters) -> Result<(f64, f64)> {
    if !omega.is_finite() {
        return Err(Error::domain(format!("omega = {omega} must be finite")));
    }
    let mut lo = POLE_GUARD;
    let mut hi = TAU - POLE_GUARD;
    let w_lo = omega_real(lo, params)?;
    let w_hi = omega_real(hi, params)?;
    if omega <= w_lo || omega >= w_hi {
        // ω = ∓(1/δ − cδ) at distance δ from the pole
        let c = pole_coefficient(params);
        let delta = 2.0 / (omega.abs() + (omega * omega + 4.0 * c).sqrt());
        let phi = if omega < 0.0 { delta } else { TAU - delta };
        return Ok((phi, 1.0 / (delta * delta) + c));
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega_real(mid, params)? < omega {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    Ok((phi, slope_real(phi, params)?))
}

/// Exact eigenvalue density `σ(ω) = (1/2π) dφ/dω`.
///
/// σ is even, so it is evaluated at `|ω|` and comes out exactly symmetric.
pub fn sigma_exact(omega: f64, params: &NomeParameters) -> Result<f64> {
    let (_, slope) = invert_real(omega.abs(), params)?;
    if !(slope > 0.0) {
        return Err(Error::structure(format!(
            "curve slope {slope} at omega = {omega} is not positive"
        )));
    }
    Ok(1.0 / (TAU * slope))
}

/// Cumulative distribution of σ: `φ(ω)/2π`.
pub fn cdf_exact(omega: f64, params: &NomeParameters) -> Result<f64> {
    Ok(phi_of_omega_real(omega, params)? / TAU)
}

/// Bisects a monotone function of `t` on `[lo, hi]` for the value `target`.
fn invert_branch(
    params: &NomeParameters,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    increasing: bool,
) -> Result<f64> {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let w = omega_of_phi(on_shifted_line(mid, params), params)?.re;
        if (w < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pointwise cut density
/// `ρ₀(x) = (1/2π)[1/ω′(t₁) + 1/|ω′(t₂)|]`, where `t₁` and `t₂` are the two
/// preimages of `x` under `t ↦ Re ω(t + ia)` on the rising branch
/// `(φ_min, 2π − φ_min)` and the falling branch `(2π − φ_min, 2π + φ_min)`.
pub fn rho0_at(x: f64, params: &NomeParameters, edge: &BandEdge) -> Result<f64> {
    if !(x.abs() < edge.omega0) {
        return Err(Error::domain(format!(
            "x = {x} outside the cut (-{0}, {0})",
            edge.omega0
        )));
    }
    let rise = invert_branch(params, x, edge.phi_min, TAU - edge.phi_min, true)?;
    let fall = invert_branch(params, x, TAU - edge.phi_min, TAU + edge.phi_min, false)?;
    let slope_rise = domega_dphi(on_shifted_line(rise, params), params)?.re;
    let slope_fall = domega_dphi(on_shifted_line(fall, params), params)?.re;
    Ok((1.0 / slope_rise + 1.0 / slope_fall.abs()) / TAU)
}

fn check_branches(params: &NomeParameters, edge: &BandEdge) -> Result<()> {
    const PROBES: usize = 64;
    let probe = |from: f64, to: f64, increasing: bool| -> Result<()> {
        let mut previous = None;
        for i in 0..=PROBES {
            let t = from + (to - from) * i as f64 / PROBES as f64;
            let w = omega_of_phi(on_shifted_line(t, params), params)?.re;
            if let Some(p) = previous {
                if (w > p) != increasing {
                    return Err(Error::structure(format!(
                        "branch over ({from}, {to}) is not monotone near t = {t}"
                    )));
                }
            }
            previous = Some(w);
        }
        Ok(())
    };
    probe(edge.phi_min, TAU - edge.phi_min, true)?;
    probe(TAU - edge.phi_min, TAU + edge.phi_min, false)
}

/// ρ₀ on an `n`-node Chebyshev grid over the cut `[−Ω₀, Ω₀]`.
pub fn rho0_extract(params: &NomeParameters, n: usize) -> Result<DensityOnGrid> {
    let edge = find_band_edge(params)?;
    rho0_extract_with_edge(params, &edge, n)
}

pub fn rho0_extract_with_edge(
    params: &NomeParameters,
    edge: &BandEdge,
    n: usize,
) -> Result<DensityOnGrid> {
    if n < 16 {
        return Err(Error::domain(format!("need at least 16 nodes, got {n}")));
    }
    check_branches(params, edge)?;
    let grid = ChebyshevGrid::new(edge.omega0, n)?;
    let values = grid
        .nodes()
        .iter()
        .map(|&x| rho0_at(x, params, edge))
        .collect::<Result<Vec<_>>>()?;
    DensityOnGrid::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::modulus_from_a;

    fn params(a: f64) -> NomeParameters {
        modulus_from_a(a).unwrap()
    }

    #[test]
    fn curve_vanishes_at_half_period() {
        let w = omega_of_phi(Complex64::new(PI, 0.0), &params(1.0)).unwrap();
        assert!(w.norm() < 1e-15);
    }

    #[test]
    fn curve_pole_at_origin() {
        let p = params(1.0);
        for phi in [0.0, TAU, -TAU] {
            assert!(matches!(
                omega_of_phi(Complex64::new(phi, 0.0), &p),
                Err(Error::Pole(_))
            ));
        }
        assert!(domega_dphi_sn(0.0, &p).is_err());
    }

    #[test]
    fn dilute_limit_cotangent() {
        let w = omega_real(PI / 2.0, &params(6.0)).unwrap();
        assert!((w + 0.5).abs() < 1e-4);
        let d = slope_real(PI, &params(10.0)).unwrap();
        assert!((d - 0.25).abs() < 1e-6);
    }

    #[test]
    fn slope_at_half_period_closed_form() {
        for a in [0.5, 1.0, 2.0] {
            let p = params(a);
            let d = slope_real(PI, &p).unwrap();
            let closed = p.big_k * p.big_e / (PI * PI);
            assert!((d - closed).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn band_edge_sits_on_half_line() {
        let p = params(1.0);
        let edge = find_band_edge(&p).unwrap();
        assert!(edge.phi_min > 0.0 && edge.phi_min < PI);
        let at_min = omega_of_phi(on_shifted_line(edge.phi_min, &p), &p).unwrap();
        assert!((at_min.im - 0.5).abs() < 1e-12);
        assert!((at_min.re + edge.omega0).abs() < 1e-12);
        let slope = domega_dphi(on_shifted_line(edge.phi_min, &p), &p).unwrap();
        assert!(slope.norm() < 1e-10);
    }

    #[test]
    fn sigma_at_origin_closed_form() {
        let p = params(1.0);
        let expected = PI / (2.0 * p.big_k * p.big_e);
        assert!((sigma_exact(0.0, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn sigma_far_tail_uses_pole_form() {
        let p = params(1.0);
        let huge = 1e9;
        let s = sigma_exact(huge, &p).unwrap();
        let lorentz_tail = 1.0 / (TAU * huge * huge);
        assert!((s / lorentz_tail - 1.0).abs() < 1e-9);
        assert!(sigma_exact(f64::NAN, &p).is_err());
    }

    #[test]
    fn rho0_outside_cut_is_rejected() {
        let p = params(1.0);
        let edge = find_band_edge(&p).unwrap();
        assert!(rho0_at(edge.omega0, &p, &edge).is_err());
        assert!(rho0_extract(&p, 8).is_err());
    }
}
