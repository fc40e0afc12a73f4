//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration, eigenvalues only. This is
//! the classic EISPACK tred/tql pair; orthogonal transforms are never
//! accumulated since no caller needs eigenvectors.

use crate::error::{Error, Result};

/// Iterations allowed per eigenvalue before declaring non-convergence.
const MAX_QL_ITER: usize = 50;

/// Computes all eigenvalues of a symmetric matrix given in row-major full
/// storage. Only the lower triangle is read. `a` is destroyed. Returns the
/// eigenvalues in ascending order.
pub(crate) fn symmetric_eigenvalues(n: usize, a: &mut [f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiag(n, a, &mut d, &mut e);
    ql_implicit(n, &mut d, &mut e)?;
    d.sort_unstable_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction to tridiagonal form. On exit `d` holds the
/// diagonal and `e[1..]` the subdiagonal (`e[0]` is zero).
fn householder_tridiag(n: usize, a: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                // Row already reduced.
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    // Form an element of A*u, reading only the lower triangle.
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g_acc += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let fj = a[i * n + j];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        a[j * n + k] -= fj * e[k] + gj * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
}

/// QL iteration with implicit shifts on a tridiagonal matrix.
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element to split the block.
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
            if iter > MAX_QL_ITER {
                return Err(Error::NonConvergence {
                    iterations: MAX_QL_ITER,
                });
            }

            // Wilkinson-style shift from the 2x2 at the top of the block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;

            let mut completed = true;
            let mut i = m - 1;
            loop {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Recover from underflow and rescan.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    completed = false;
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
                    break;
                }
                i -= 1;
            }
            if completed {
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(n: usize, rows: &[&[f64]]) -> Vec<f64> {
        let mut a: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        symmetric_eigenvalues(n, &mut a).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let vals = eig(3, &[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn exchange_2x2() {
        let vals = eig(2, &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn known_3x3() {
        // [[2,1,0],[1,2,1],[0,1,2]] has eigenvalues 2, 2 ± sqrt(2).
        let vals = eig(3, &[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (v, ex) in vals.iter().zip(expect) {
            assert!((v - ex).abs() < 1e-12, "{v} vs {ex}");
        }
    }

    #[test]
    fn zero_matrix() {
        let vals = eig(2, &[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(vals, vec![0.0, 0.0]);
    }

    #[test]
    fn empty_and_single() {
        assert!(symmetric_eigenvalues(0, &mut []).unwrap().is_empty());
        assert_eq!(symmetric_eigenvalues(1, &mut [7.5]).unwrap(), vec![7.5]);
    }
}
