//! Symmetric tridiagonal eigensolvers.
//!
//! Eigenvalues come from the implicit QL iteration with Wilkinson-style
//! shifts; eigenvectors either from accumulating the same rotations (dense
//! `O(N³)`, small problems) or from inverse iteration on selected
//! eigenvalues (`O(N)` per vector).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// All eigenvalues in ascending order.
pub fn eigenvalues(diagonal: &[f64], off_diagonal: &[f64]) -> Result<Vec<f64>> {
    let mut d = diagonal.to_vec();
    let mut e = off_diagonal.to_vec();
    e.push(0.0);
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// All eigenpairs; eigenvectors are the columns of the returned matrix.
pub fn eigenpairs(diagonal: &[f64], off_diagonal: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = diagonal.len();
    let mut d = diagonal.to_vec();
    let mut e = off_diagonal.to_vec();
    e.push(0.0);
    let mut z = DMatrix::identity(n, n);
    implicit_ql(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| z[(r, order[c])]);
    Ok((values, vectors))
}

fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<f64>>) -> Result<()> {
    let n = d.len();
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
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::SolverFailure {
                    residual: e[l].abs(),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
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
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// LU factorization with partial pivoting of `T - σ I` for tridiagonal `T`.
struct ShiftedLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(diagonal: &[f64], off_diagonal: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diagonal.len();
        let mut lower = off_diagonal.to_vec();
        let mut diag: Vec<f64> = diagonal.iter().map(|d| d - shift).collect();
        let mut upper = off_diagonal.to_vec();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper[i];
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] = -fact * upper[i + 1];
                }
                swapped[i] = true;
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        for d in diag.iter_mut() {
            if d.abs() < tiny {
                *d = tiny.copysign(*d);
            }
        }
        Self {
            lower,
            diag,
            upper,
            upper2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i] - self.lower[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Eigenvectors for the given (accurate, ascending) eigenvalues by inverse
/// iteration. Vectors whose eigenvalues are closer than `1e-5 ‖T‖` are
/// re-orthogonalized against each other.
pub fn inverse_iteration(
    diagonal: &[f64],
    off_diagonal: &[f64],
    values: &[f64],
    norm: f64,
) -> DMatrix<f64> {
    let n = diagonal.len();
    let scale = norm.max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let cluster_gap = 1e-5 * scale;
    let mut out = DMatrix::zeros(n, values.len());
    let mut cluster_start = 0;
    for (j, &lambda) in values.iter().enumerate() {
        if j > 0 && (lambda - values[j - 1]).abs() > cluster_gap {
            cluster_start = j;
        }
        let lu = ShiftedLu::new(diagonal, off_diagonal, lambda + tiny, tiny);
        // Deterministic start vector with no special symmetry.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75 * (j as f64 + 1.0)).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..3 {
            lu.solve(&mut v);
            for k in cluster_start..j {
                let col = out.column(k);
                let dot: f64 = col.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(col.iter()).for_each(|(x, c)| *x -= dot * c);
            }
            normalize(&mut v);
        }
        out.column_mut(j).copy_from_slice(&v);
    }
    out
}
