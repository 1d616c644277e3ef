//! Theta series, complete elliptic integrals and the Jacobi sine.
//!
//! Everything here is self-contained: the odd theta function θ₁ is summed
//! directly from its sine series, K and E come from the arithmetic-geometric
//! mean, and `sn` from the descending Landen recursion that reuses the same
//! AGM sequence.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cutoff for the relative size of the last retained theta term.
pub const DEFAULT_SERIES_EPSILON: f64 = 1e-16;

const MAX_SERIES_TERMS: usize = 400;
const MAX_AGM_STEPS: usize = 64;
const MAX_BISECTION_STEPS: usize = 400;

/// θ₁ and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    /// Sum of the term magnitude bounds, used to recognise zeros of θ₁.
    pub scale: f64,
}

/// The series `θ₁(x) = 2 Σ (-1)ⁿ q^{(n+1/2)²} sin((2n+1)x)` for a fixed nome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSeries {
    q: f64,
    ln_q: f64,
    epsilon: f64,
}

impl ThetaSeries {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_epsilon(q, DEFAULT_SERIES_EPSILON)
    }

    pub fn with_epsilon(q: f64, epsilon: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("nome q = {q} must lie in (0, 1)")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::domain(format!(
                "series epsilon {epsilon} must lie in (0, 1)"
            )));
        }
        Ok(ThetaSeries {
            q,
            ln_q: q.ln(),
            epsilon,
        })
    }

    pub fn nome(&self) -> f64 {
        self.q
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Sums θ₁, θ₁′ and θ₁″ term by term.
    ///
    /// Each `sin((2n+1)x)` is split into its two exponentials and the nome
    /// power is folded into their exponents, so large `|Im x|` never
    /// overflows an intermediate. Summation stops once the term bound
    /// `q^{(n+1/2)²} e^{(2n+1)|Im x|}` (times `(2n+1)²` for θ₁″) has passed
    /// its peak and dropped below `epsilon` times the largest bound seen.
    pub fn jet(&self, x: Complex64) -> ThetaJet {
        let y = x.im;
        let mut value = Complex64::new(0.0, 0.0);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut peak = f64::NEG_INFINITY;
        let cutoff = self.epsilon.ln();
        let minus_half_i = Complex64::new(0.0, -0.5);

        for n in 0..MAX_SERIES_TERMS {
            let h = n as f64 + 0.5;
            let m = 2.0 * h;
            let base = self.ln_q * h * h;
            let bound = base + m * y.abs();
            peak = peak.max(bound);

            let up = (base - m * y).exp();
            let down = (base + m * y).exp();
            let (s, c) = (m * x.re).sin_cos();
            let forward = Complex64::new(up * c, up * s);
            let backward = Complex64::new(down * c, -down * s);
            let sin_term = (forward - backward) * minus_half_i;
            let cos_term = (forward + backward) * 0.5;

            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            value += sin_term * sign;
            d1 += cos_term * (sign * m);
            d2 -= sin_term * (sign * m * m);
            scale += bound.exp();

            let past_peak = h >= y.abs() / (-self.ln_q);
            if past_peak && bound + 2.0 * m.ln() < peak + cutoff {
                break;
            }
        }

        ThetaJet {
            value: value * 2.0,
            d1: d1 * 2.0,
            d2: d2 * 2.0,
            scale: scale * 2.0,
        }
    }

    pub fn value(&self, x: Complex64) -> Complex64 {
        self.jet(x).value
    }

    /// `θ₁′(x)/θ₁(x)`; fails at the zeros `x ≡ 0 (mod π)` of the lattice.
    pub fn log_derivative(&self, x: Complex64) -> Result<Complex64> {
        let jet = self.jet(x);
        check_nonzero(&jet, x)?;
        Ok(jet.d1 / jet.value)
    }

    /// `(θ₁′/θ₁)′ = θ₁″/θ₁ − (θ₁′/θ₁)²`.
    pub fn log_derivative_prime(&self, x: Complex64) -> Result<Complex64> {
        let jet = self.jet(x);
        check_nonzero(&jet, x)?;
        let ld = jet.d1 / jet.value;
        Ok(jet.d2 / jet.value - ld * ld)
    }
}

fn check_nonzero(jet: &ThetaJet, x: Complex64) -> Result<()> {
    let floor = 8.0 * f64::EPSILON * (1.0 + x.norm()) * jet.scale;
    if jet.value.norm() <= floor {
        return Err(Error::pole(format!("theta1 vanishes at x = {x}")));
    }
    Ok(())
}

/// θ₁(x) for nome `q` with the default truncation.
pub fn theta1(x: Complex64, q: f64) -> Result<Complex64> {
    Ok(ThetaSeries::new(q)?.value(x))
}

/// θ₁′(x)/θ₁(x) for nome `q` with the default truncation.
pub fn theta1_logderiv(x: Complex64, q: f64) -> Result<Complex64> {
    ThetaSeries::new(q)?.log_derivative(x)
}

/// AGM evaluation of (K, E) taking the complementary modulus explicitly so
/// that neither `k` nor `k′` suffers cancellation near the ends of (0, 1).
fn agm_ke(k: f64, kprime: f64) -> Result<(f64, f64)> {
    let mut a = 1.0;
    let mut b = kprime;
    let mut c = k;
    let mut weight = 0.5;
    let mut defect = weight * c * c;
    let mut steps = 0;
    while c.abs() > f64::EPSILON * a {
        if steps == MAX_AGM_STEPS {
            return Err(Error::convergence(format!(
                "AGM for k = {k} did not settle in {MAX_AGM_STEPS} steps"
            )));
        }
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = next_a;
        b = next_b;
        weight *= 2.0;
        defect += weight * c * c;
        steps += 1;
    }
    let big_k = PI / (2.0 * a);
    Ok((big_k, big_k * (1.0 - defect)))
}

/// Complete elliptic integrals `K(k)` and `E(k)` for `0 ≤ k < 1`.
pub fn elliptic_ke(k: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::domain(format!("modulus k = {k} must lie in [0, 1)")));
    }
    agm_ke(k, ((1.0 - k) * (1.0 + k)).sqrt())
}

/// Jacobi `sn(u | k)` for `0 ≤ k < 1`.
pub fn jacobi_sn(u: f64, k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::domain(format!("modulus k = {k} must lie in [0, 1)")));
    }
    sn_landen(u, k, ((1.0 - k) * (1.0 + k)).sqrt())
}

/// Descending Landen recursion: run the AGM forward, then unwind the
/// amplitude `φₙ₋₁ = (φₙ + asin((cₙ/aₙ) sin φₙ))/2` and return `sin φ₀`.
pub(crate) fn sn_landen(u: f64, k: f64, kprime: f64) -> Result<f64> {
    if k == 0.0 {
        return Ok(u.sin());
    }
    let mut a = vec![1.0];
    let mut c = vec![k];
    let mut b = kprime;
    while c[c.len() - 1].abs() > f64::EPSILON * a[a.len() - 1] {
        if a.len() > MAX_AGM_STEPS {
            return Err(Error::convergence(format!(
                "Landen sequence for k = {k} did not settle"
            )));
        }
        let last = a[a.len() - 1];
        a.push(0.5 * (last + b));
        c.push(0.5 * (last - b));
        b = (last * b).sqrt();
    }
    let depth = a.len() - 1;
    let mut phi = (1u64 << depth) as f64 * a[depth] * u;
    for n in (1..=depth).rev() {
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    Ok(phi.sin())
}

/// Lattice constant, nome and the elliptic data derived from them.
///
/// The modulus is tied to the lattice constant by `a = π K(k′)/K(k)`, which
/// is the same statement as `q = e^{-a}` being the Jacobi nome of `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomeParameters {
    pub a: f64,
    pub q: f64,
    pub k: f64,
    pub kprime: f64,
    pub big_k: f64,
    pub big_kprime: f64,
    pub big_e: f64,
    pub big_eprime: f64,
    pub series_epsilon: f64,
}

impl NomeParameters {
    /// Same as [`modulus_from_a`].
    pub fn from_lattice_constant(a: f64) -> Result<Self> {
        modulus_from_a(a)
    }

    pub fn with_series_epsilon(mut self, epsilon: f64) -> Result<Self> {
        ThetaSeries::with_epsilon(self.q, epsilon)?;
        self.series_epsilon = epsilon;
        Ok(self)
    }

    pub fn theta(&self) -> ThetaSeries {
        ThetaSeries {
            q: self.q,
            ln_q: -self.a,
            epsilon: self.series_epsilon,
        }
    }

    /// `π K′/K − a`; zero up to rounding for a consistent record.
    pub fn nome_residual(&self) -> f64 {
        PI * self.big_kprime / self.big_k - self.a
    }

    /// `E K′ + E′ K − K K′ − π/2`.
    pub fn legendre_residual(&self) -> f64 {
        self.big_e * self.big_kprime + self.big_eprime * self.big_k
            - self.big_k * self.big_kprime
            - FRAC_PI_2
    }

    /// Jacobi `sn(u | k)` using the stored complementary modulus.
    pub fn sn(&self, u: f64) -> Result<f64> {
        sn_landen(u, self.k, self.kprime)
    }
}

/// Finds the modulus whose nome is `e^{-a}` and fills every derived field.
///
/// The root of `π K(k′)/K(k) = a` is bracketed in the variable
/// `t = ln(k/k′)`, in which both `k` and `k′` stay representable to full
/// relative precision, and bisected until the bracket collapses.
pub fn modulus_from_a(a: f64) -> Result<NomeParameters> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("lattice constant a = {a} must be positive")));
    }
    let moduli = |t: f64| {
        let k = 1.0 / (1.0 + (-2.0 * t).exp()).sqrt();
        let kprime = 1.0 / (1.0 + (2.0 * t).exp()).sqrt();
        (k, kprime)
    };
    // π K′/K − a, strictly decreasing in t.
    let mismatch = |t: f64| -> Result<f64> {
        let (k, kprime) = moduli(t);
        let (big_k, _) = agm_ke(k, kprime)?;
        let (big_kprime, _) = agm_ke(kprime, k)?;
        Ok(PI * big_kprime / big_k - a)
    };

    let mut lo = -1.0;
    let mut hi = 1.0;
    while mismatch(lo)? < 0.0 {
        lo *= 2.0;
        if lo < -700.0 {
            return Err(Error::domain(format!("a = {a} is too small to bracket")));
        }
    }
    while mismatch(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::domain(format!("a = {a} is too large to bracket")));
        }
    }

    let mut steps = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if steps == MAX_BISECTION_STEPS {
            return Err(Error::convergence(format!(
                "modulus bisection for a = {a} exceeded {MAX_BISECTION_STEPS} steps"
            )));
        }
        if mismatch(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }

    let t = if mismatch(lo)?.abs() <= mismatch(hi)?.abs() {
        lo
    } else {
        hi
    };
    let (k, kprime) = moduli(t);
    let (big_k, big_e) = agm_ke(k, kprime)?;
    let (big_kprime, big_eprime) = agm_ke(kprime, k)?;
    Ok(NomeParameters {
        a,
        q: (-a).exp(),
        k,
        kprime,
        big_k,
        big_kprime,
        big_e,
        big_eprime,
        series_epsilon: DEFAULT_SERIES_EPSILON,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn theta1_vanishes_at_origin_and_is_odd() {
        assert_eq!(theta1(re(0.0), 0.3).unwrap(), re(0.0));
        let plus = theta1(re(0.7), 0.3).unwrap();
        let minus = theta1(re(-0.7), 0.3).unwrap();
        assert!((plus + minus).norm() < 1e-16);
    }

    #[test]
    fn theta1_rejects_bad_nome() {
        for q in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(theta1(re(0.1), q), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn log_derivative_zero_at_quarter_period() {
        for q in [0.01, 0.3, 0.7] {
            let ld = theta1_logderiv(re(FRAC_PI_2), q).unwrap();
            assert!(ld.norm() < 1e-15, "q = {q}: {ld}");
        }
    }

    #[test]
    fn log_derivative_reflects() {
        let q = 0.4;
        for x in [0.2, 0.9, 1.3] {
            let a = theta1_logderiv(re(PI - x), q).unwrap();
            let b = theta1_logderiv(re(x), q).unwrap();
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn log_derivative_pole_on_lattice() {
        for x in [0.0, PI, -PI, 2.0 * PI] {
            assert!(matches!(
                theta1_logderiv(re(x), 0.3),
                Err(Error::Pole(_))
            ));
        }
        // the lattice point x = ia (nome q = e^{-a})
        let a: f64 = 1.5;
        let z = Complex64::new(0.0, a);
        assert!(matches!(
            theta1_logderiv(z, (-a).exp()),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn elliptic_ke_degenerate_modulus() {
        let (k, e) = elliptic_ke(0.0).unwrap();
        assert_eq!(k, FRAC_PI_2);
        assert_eq!(e, FRAC_PI_2);
    }

    #[test]
    fn elliptic_ke_self_dual() {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let (big_k, _) = elliptic_ke(k).unwrap();
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        let (big_kp, _) = elliptic_ke(kp).unwrap();
        assert!((big_k - big_kp).abs() < 1e-14);
    }

    #[test]
    fn elliptic_ke_domain() {
        assert!(elliptic_ke(1.0).is_err());
        assert!(elliptic_ke(-0.1).is_err());
        assert!(jacobi_sn(0.3, 1.0).is_err());
    }

    #[test]
    fn modulus_self_dual_point() {
        let p = modulus_from_a(PI).unwrap();
        assert!((p.k * p.k - 0.5).abs() < 1e-12);
        assert!(p.nome_residual().abs() < 1e-12);
    }

    #[test]
    fn modulus_rejects_nonpositive_a() {
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(modulus_from_a(a), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn sn_special_values() {
        assert_eq!(jacobi_sn(0.0, 0.7).unwrap(), 0.0);
        let (big_k, _) = elliptic_ke(0.7).unwrap();
        assert!((jacobi_sn(big_k, 0.7).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(jacobi_sn(0.4, 0.0).unwrap(), 0.4f64.sin());
    }

    #[test]
    fn sn_reflection_about_quarter_period() {
        let k = 0.85;
        let (big_k, _) = elliptic_ke(k).unwrap();
        for i in 1..20 {
            let u = big_k * i as f64 / 20.0;
            let lhs = jacobi_sn(2.0 * big_k - u, k).unwrap();
            let rhs = jacobi_sn(u, k).unwrap();
            assert!((lhs - rhs).abs() < 1e-11, "u = {u}");
        }
    }

    #[test]
    fn bounds_on_complete_integrals() {
        for a in [0.3, 1.0, 4.0, 9.0] {
            let p = modulus_from_a(a).unwrap();
            assert!(p.k > 0.0 && p.k < 1.0);
            assert!(p.big_e < FRAC_PI_2 && FRAC_PI_2 < p.big_k);
            assert!(p.big_e > 0.0);
        }
    }
}
