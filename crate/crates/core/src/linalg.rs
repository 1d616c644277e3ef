//! Dense kernels: Cholesky, cyclic Jacobi, and a Householder reduction for
//! real skew-symmetric matrices followed by implicit QL.

use crate::error::{Error, Result};

/// Dense square matrix in row-major order. Symmetry is the caller's promise.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |M − Mᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }
}

/// Lower factor `L` with `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
    min_pivot: f64,
}

impl Cholesky {
    pub fn factor(m: &SquareMatrix) -> Result<Self> {
        let n = m.dim();
        let mut l = vec![0.0; n * n];
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let pivot_row = l[j * n..j * n + j].to_vec();
            let d = m.get(j, j) - pivot_row.iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { row: j, pivot: d });
            }
            let d = d.sqrt();
            min_pivot = min_pivot.min(d);
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let row_i = &l[i * n..i * n + j];
                let dot: f64 = row_i.iter().zip(&pivot_row).map(|(a, b)| a * b).sum();
                l[i * n + j] = (m.get(i, j) - dot) / d;
            }
        }
        Ok(Cholesky {
            n,
            lower: l,
            min_pivot,
        })
    }

    /// Smallest diagonal entry of `L`.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let dot: f64 = row.iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - dot) / self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= self.lower[k * n + i] * y[k];
            }
            y[i] = acc / self.lower[i * n + i];
        }
        y
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `rel_tol · ‖M‖_F`. Returns unsorted eigenvalues and, if requested, the
/// eigenvectors as columns of a row-major matrix.
pub fn jacobi_eigen(
    m: &SquareMatrix,
    rel_tol: f64,
    max_sweeps: usize,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<SquareMatrix>)> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = want_vectors.then(|| SquareMatrix::from_fn(n, |i, j| (i == j) as u8 as f64));
    let target = rel_tol * m.frobenius_norm();

    let off_norm = |a: &SquareMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j) * a.get(i, j);
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == max_sweeps {
            return Err(Error::convergence(format!(
                "Jacobi did not converge in {max_sweeps} sweeps"
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        sweeps += 1;
    }
    Ok(((0..n).map(|i| a.get(i, i)).collect(), v))
}

/// Reduces a real skew-symmetric matrix to skew tridiagonal form by
/// Householder reflections and returns the subdiagonal `e_k = T[k+1][k]`.
///
/// Only the strict lower triangle is read. The matrix-vector product for
/// the next reflection is accumulated in the same pass that applies the
/// rank-two update of the current one, so each step streams the trailing
/// triangle once.
pub fn skew_tridiagonalize(mut lower: Vec<Vec<f64>>) -> Vec<f64> {
    let n = lower.len();
    if n < 2 {
        return Vec::new();
    }
    debug_assert!(lower.iter().enumerate().all(|(i, r)| r.len() >= i));
    let mut sub = vec![0.0; n - 1];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    // Reflector for column `k`, acting on indices k+1..n. Writes v and
    // returns (alpha, beta).
    let reflect = |lower: &Vec<Vec<f64>>, k: usize, v: &mut [f64]| -> (f64, f64) {
        let x0 = lower[k + 1][k];
        let tail: f64 = ((k + 2)..n).map(|i| lower[i][k] * lower[i][k]).sum();
        v[..=k].iter_mut().for_each(|e| *e = 0.0);
        if tail == 0.0 {
            v[k + 1..].iter_mut().for_each(|e| *e = 0.0);
            return (x0, 0.0);
        }
        let norm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 > 0.0 { -norm } else { norm };
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = lower[i][k];
        }
        let vv = v[k + 1] * v[k + 1] + tail;
        (alpha, 2.0 / vv)
    };

    // Skew product q = S v over indices `from..n`, lower triangle only.
    let skew_matvec = |lower: &Vec<Vec<f64>>, from: usize, v: &[f64], q: &mut [f64]| {
        q.iter_mut().for_each(|e| *e = 0.0);
        for i in from..n {
            let row = &lower[i][from..i];
            let vi = v[i];
            let mut acc = 0.0;
            for (t, &s) in row.iter().enumerate() {
                acc += s * v[from + t];
                q[from + t] -= s * vi;
            }
            q[i] += acc;
        }
    };

    let (mut alpha, beta) = reflect(&lower, 0, &mut v);
    skew_matvec(&lower, 1, &v, &mut p);
    p.iter_mut().for_each(|e| *e *= beta);

    let mut next_v = vec![0.0; n];
    let mut q = vec![0.0; n];
    for k in 0..n - 1 {
        sub[k] = alpha;
        if k + 2 >= n {
            break;
        }
        // Column k+1 of the updated trailing block.
        for i in (k + 2)..n {
            lower[i][k + 1] += v[i] * p[k + 1] - p[i] * v[k + 1];
        }
        let (next_alpha, next_beta) = reflect(&lower, k + 1, &mut next_v);
        // Apply S += v pᵀ − p vᵀ to indices ≥ k+2 and accumulate S′ v′.
        q.iter_mut().for_each(|e| *e = 0.0);
        let from = k + 2;
        for i in from..n {
            let vi = v[i];
            let pi = p[i];
            let wi = next_v[i];
            let row = &mut lower[i][from..i];
            let vs = &v[from..i];
            let ps = &p[from..i];
            let ws = &next_v[from..i];
            let qs = &mut q[from..i];
            let mut acc = 0.0;
            for t in 0..row.len() {
                let s = row[t] + vi * ps[t] - pi * vs[t];
                row[t] = s;
                acc += s * ws[t];
                qs[t] -= s * wi;
            }
            q[i] += acc;
        }
        std::mem::swap(&mut v, &mut next_v);
        for i in 0..n {
            p[i] = next_beta * q[i];
        }
        alpha = next_alpha;
    }
    sub
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` by the implicit QL method with Wilkinson shifts.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert_eq!(off.len() + 1, n, "off-diagonal must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    const MAX_ITER: usize = 60;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_ITER {
                return Err(Error::convergence(format!(
                    "QL iteration stalled on eigenvalue {l}"
                )));
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}
