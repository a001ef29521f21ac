//! Eigenvalues of a dense real symmetric matrix.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-type shifts. Only eigenvalues are accumulated.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Row-major dense symmetric matrix of order `n`.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Builds the matrix from its lower triangle generator `f(i, j)`, `j <= i`.
    pub fn from_lower(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// All eigenvalues in ascending order. Consumes the matrix.
    pub fn eigenvalues(self) -> Result<Vec<f64>> {
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let (mut d, mut e) = tridiagonalize(self);
        tql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        Ok(d)
    }
}

/// Reduces to tridiagonal form; returns `(diagonal, subdiagonal)` with
/// `e[i]` coupling rows `i-1` and `i` (`e[0] = 0`).
///
/// Only the lower triangle is read and updated.
fn tridiagonalize(m: SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let row = i * n;
        if l == 0 {
            e[i] = a[row];
            continue;
        }
        let scale: f64 = a[row..=row + l].iter().map(|v| v.abs()).sum();
        if scale == 0.0 {
            e[i] = a[row + l];
            continue;
        }
        let mut h = 0.0;
        for v in &mut a[row..=row + l] {
            *v /= scale;
            h += *v * *v;
        }
        let f = a[row + l];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        a[row + l] = f - g;

        // p = A u / h using the lower triangle, row by row.
        let (head, tail) = a.split_at_mut(row);
        let u = &tail[..=l];
        p[..=l].iter_mut().for_each(|v| *v = 0.0);
        for j in 0..=l {
            let rj = &head[j * n..j * n + j + 1];
            let uj = u[j];
            let mut acc = rj[j] * uj;
            for k in 0..j {
                acc += rj[k] * u[k];
                p[k] += rj[k] * uj;
            }
            p[j] += acc;
        }
        let mut f_acc = 0.0;
        for j in 0..=l {
            p[j] /= h;
            f_acc += p[j] * u[j];
        }
        let hh = f_acc / (h + h);
        for j in 0..=l {
            p[j] -= hh * u[j];
        }
        for j in 0..=l {
            let (fj, gj) = (u[j], p[j]);
            let rj = &mut head[j * n..j * n + j + 1];
            for k in 0..=j {
                rj[k] -= fj * p[k] + gj * u[k];
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix. `d` is overwritten with the
/// (unsorted) eigenvalues.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut sweeps = 0;
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
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
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
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymMatrix::from_lower(n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn small_known() {
        let m = SymMatrix::from_lower(2, |i, j| [[2.0, 0.0], [1.0, 2.0]][i][j]);
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        let one = SymMatrix::from_lower(1, |_, _| 4.5);
        assert_eq!(one.eigenvalues().unwrap(), vec![4.5]);
        assert!(SymMatrix::zeros(0).eigenvalues().unwrap().is_empty());
    }

    #[test]
    fn diagonal_and_degenerate() {
        let m = SymMatrix::from_lower(5, |i, j| if i == j { (5 - i) as f64 } else { 0.0 });
        assert_eq!(m.eigenvalues().unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let ones = SymMatrix::from_lower(4, |_, _| 1.0);
        let ev = ones.eigenvalues().unwrap();
        for v in &ev[..3] {
            assert!(v.abs() < 1e-14);
        }
        assert!((ev[3] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn matches_nalgebra() {
        for (n, seed) in [(3, 1), (17, 2), (64, 3), (150, 4)] {
            let m = random(n, seed);
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
            let mut want: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            want.sort_by(f64::total_cmp);
            let got = m.eigenvalues().unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-11 * (1.0 + w.abs()), "n={n}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn trace_preserved() {
        let m = random(80, 9);
        let trace: f64 = (0..80).map(|i| m.get(i, i)).sum();
        let sum: f64 = m.eigenvalues().unwrap().iter().sum();
        assert!((trace - sum).abs() < 1e-11);
    }
}
