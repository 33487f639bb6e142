//! Small dense linear-algebra helpers shared by the solver modules.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
///
/// Implicit QL with Wilkinson shifts, no eigenvectors, O(n²).
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "off-diagonal length {} does not match diagonal length {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

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
            iter += 1;
            if iter > 60 {
                return Err(Error::Eigensolver(
                    "tridiagonal QL did not converge".to_string(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
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
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Roots of `Σ coeffs[i] xⁱ` as eigenvalues of the companion matrix.
///
/// Trailing zero coefficients are dropped; a constant polynomial has no roots.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|&x| x == 0.0) {
        c.pop();
    }
    if c.len() < 2 {
        return Vec::new();
    }
    let deg = c.len() - 1;
    let lead = c[deg];
    if deg == 1 {
        return vec![Complex::new(-c[0] / lead, 0.0)];
    }
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -c[i] / lead;
    }
    companion.complex_eigenvalues().iter().copied().collect()
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector columns permuted to match.
pub fn sorted_symmetric_eigen(mat: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mat.nrows();
    if n != mat.ncols() {
        return Err(Error::InvalidArgument("matrix is not square".to_string()));
    }
    if mat.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("matrix has non-finite entries".to_string()));
    }
    let eig = SymmetricEigen::try_new(mat, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigensolver("symmetric eigensolver did not converge".to_string()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense_solver() {
        let diag = [2.0, -1.0, 0.5, 3.0, 1.5];
        let off = [0.3, -1.2, 0.7, 0.05];
        let fast = tridiagonal_eigenvalues(&diag, &off).unwrap();
        let dense = DMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        });
        let (slow, _) = sorted_symmetric_eigen(dense).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn companion_roots_of_known_cubic() {
        // (x - 1)(x - 2)(x + 3) = x³ - 7x + 6
        let mut roots: Vec<f64> = polynomial_roots(&[6.0, -7.0, 0.0, 1.0])
            .into_iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        for (r, e) in roots.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_polynomials() {
        assert!(polynomial_roots(&[3.0]).is_empty());
        assert!(polynomial_roots(&[3.0, 0.0]).is_empty());
        let r = polynomial_roots(&[4.0, 2.0, 0.0]);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].re, -2.0);
    }
}
