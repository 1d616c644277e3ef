//! Independent reference implementations. Nothing here calls into the crate
//! beyond plain data types.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// θ₁ summed term by term with a fixed, generous number of terms.
pub fn theta1_direct(x: Complex64, q: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..400 {
        let h = n as f64 + 0.5;
        let weight = q.powf(h * h);
        if weight == 0.0 {
            break;
        }
        let term = weight * ((2 * n + 1) as f64 * x).sin();
        if n % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    2.0 * acc
}

/// K(k) and E(k) by the trapezoid rule on a full period of the integrand.
pub fn elliptic_ke_trapezoid(k: f64) -> (f64, f64) {
    let m = 4000;
    let h = PI / m as f64;
    let (mut kk, mut ee) = (0.0, 0.0);
    for i in 0..m {
        let s = (i as f64 * h).sin();
        let d = (1.0 - k * k * s * s).sqrt();
        kk += 1.0 / d;
        ee += d;
    }
    (0.5 * kk * h, 0.5 * ee * h)
}

/// Tanh-sinh quadrature on `[lo, hi]`; tolerates integrable endpoint
/// singularities. Halves the step until two successive levels agree.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let r = 0.5 * (hi - lo);
    let eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let u = s.tanh();
        let w = 0.5 * PI * t.cosh() / (s.cosh() * s.cosh());
        // distance to the nearer endpoint, computed without cancellation
        let gap = r / (s.abs().exp() * s.abs().cosh());
        let x = if u < 0.0 { lo + gap } else { hi - gap };
        if w == 0.0 || gap == 0.0 || !(x > lo && x < hi) {
            return 0.0;
        }
        r * w * f(x)
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut t = h;
    while t <= t_max {
        sum += eval(t) + eval(-t);
        t += h;
    }
    let mut previous = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            sum += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        let current = sum * h;
        if (current - previous).abs() <= 1e-15 * current.abs().max(1e-300) {
            return current;
        }
        previous = current;
    }
    previous
}

/// Central difference `(f(x + h) − f(x − h))/2h`.
pub fn central_difference(f: impl Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
        }
    }
    det
}

/// Coefficients `c_0..c_n` of `det(zI − M) = Σ c_k z^k` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = m.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1} I
        let mut next = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += m[i][l] * mk[l][j];
                }
                next[i][j] = acc;
            }
            next[i][i] += coeffs[n - k + 1];
        }
        mk = next;
        let mut trace = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for l in 0..n {
                trace += m[i][l] * mk[l][i];
            }
        }
        coeffs[n - k] = -trace / k as f64;
    }
    coeffs
}

/// Real roots of a polynomial with real coefficients by scanning for sign
/// changes on a fine grid over `[−r, r]` and bisecting each.
pub fn real_roots(coeffs: &[f64], r: f64) -> Vec<f64> {
    let p = |z: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c);
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut x0 = -r;
    let mut p0 = p(x0);
    for i in 1..=steps {
        let x1 = -r + 2.0 * r * i as f64 / steps as f64;
        let p1 = p(x1);
        if p0 == 0.0 {
            roots.push(x0);
        } else if p0 * p1 < 0.0 {
            let (mut lo, mut hi, mut plo) = (x0, x1, p0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let pm = p(mid);
                if pm * plo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    plo = pm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        p0 = p1;
    }
    roots
}

/// Incomplete elliptic integral `F(φ, k)` by tanh-sinh.
pub fn incomplete_f(phi: f64, k: f64) -> f64 {
    tanh_sinh(|t| 1.0 / (1.0 - k * k * t.sin() * t.sin()).sqrt(), 0.0, phi)
}
