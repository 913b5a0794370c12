//! Small dense kernels used by the chain solvers: complex LU with partial
//! pivoting (harmonic response systems, ~10x10) and eigenvalues of a
//! symmetric tridiagonal matrix (shear-chain modal analysis).

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Solve `A x = b` in place for a dense complex system, overwriting `a`
/// (row-major, n*n) and `b`. Partial pivoting; fails on a numerically zero
/// pivot.
pub fn solve_complex(a: &mut [Complex64], b: &mut [Complex64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut piv: Vec<usize> = (0..n).collect();
    // scale reference for the singularity test
    let mut scale = 0.0f64;
    for v in a.iter() {
        scale = scale.max(v.norm_sqr());
    }
    let tiny = scale.sqrt() * 1e-14 + f64::MIN_POSITIVE;

    for col in 0..n {
        let mut pivot_row = col;
        let mut best = a[piv[col] * n + col].norm_sqr();
        for row in col + 1..n {
            let mag = a[piv[row] * n + col].norm_sqr();
            if mag > best {
                best = mag;
                pivot_row = row;
            }
        }
        piv.swap(col, pivot_row);
        let p = a[piv[col] * n + col];
        if p.norm() <= tiny {
            return Err(Error::SingularSystem { freq_hz: f64::NAN });
        }
        for row in col + 1..n {
            let factor = a[piv[row] * n + col] / p;
            a[piv[row] * n + col] = factor;
            for k in col + 1..n {
                let sub = factor * a[piv[col] * n + k];
                a[piv[row] * n + k] -= sub;
            }
        }
    }
    // forward substitution on the permuted rows
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for row in 0..n {
        let mut acc = b[piv[row]];
        for k in 0..row {
            acc -= a[piv[row] * n + k] * y[k];
        }
        y[row] = acc;
    }
    // back substitution
    for row in (0..n).rev() {
        let mut acc = y[row];
        for k in row + 1..n {
            acc -= a[piv[row] * n + k] * b[k];
        }
        b[row] = acc / a[piv[row] * n + row];
    }
    Ok(())
}

/// Eigenvalues of a symmetric tridiagonal matrix (diagonal `d`, off-diagonal
/// `e`, `e.len() == d.len() - 1`), ascending. Implicit QL with Wilkinson
/// shifts.
pub fn sym_tridiag_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    debug_assert_eq!(e.len(), n.saturating_sub(1));
    let mut d = d.to_vec();
    // working off-diagonal padded with a trailing zero
    let mut e: Vec<f64> = e.iter().copied().chain(core::iter::once(0.0)).collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible off-diagonal element
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
            iter += 1;
            if iter > 50 {
                return Err(Error::EigenFailure);
            }
            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
    }
    d.sort_unstable_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}
