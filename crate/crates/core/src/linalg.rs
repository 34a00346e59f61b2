//! Spectral decomposition of real symmetric matrices and the operations
//! built on it: cutoff pseudoinverse, numerical rank, PSD checks.
//!
//! The solver is Householder tridiagonalization followed by implicit-shift
//! QL. It is fully deterministic: identical input bytes give identical
//! output bytes.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

fn check_square(a: &Array2<f64>) -> Result<usize> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::MatrixShape {
            rows,
            cols,
            expected: rows,
        });
    }
    Ok(rows)
}

/// `(A + A^T) / 2`; decompositions always run on the symmetric part.
pub fn symmetrize(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    s
}

pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sign_like(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Householder reduction of symmetric `z` to tridiagonal form; `z` becomes
/// the accumulated orthogonal transform, `d` the diagonal, `e` the
/// subdiagonal (e[0] unused).
fn tred2(z: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| z[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = z[(i, l)];
            } else {
                for k in 0..=l {
                    z[(i, k)] /= scale;
                    h += z[(i, k)] * z[(i, k)];
                }
                let f = z[(i, l)];
                let g = -sign_like(h.sqrt(), f);
                e[i] = scale * g;
                h -= f * g;
                z[(i, l)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z[(j, i)] = z[(i, j)] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += z[(j, k)] * z[(i, k)];
                    }
                    for k in j + 1..=l {
                        g_acc += z[(k, j)] * z[(i, k)];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[(j, k)] -= f * e[k] + g * z[(i, k)];
                    }
                }
            }
        } else {
            e[i] = z[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[(i, k)] * z[(k, j)];
                }
                for k in 0..i {
                    z[(k, j)] -= g * z[(k, i)];
                }
            }
        }
        d[i] = z[(i, i)];
        z[(i, i)] = 1.0;
        for j in 0..i {
            z[(j, i)] = 0.0;
            z[(i, j)] = 0.0;
        }
    }
}

/// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of `z`
/// along. On return `d` holds eigenvalues and column j of `z` the matching
/// eigenvector.
fn tqli(d: &mut [f64], e: &mut [f64], z: &mut Array2<f64>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
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
                return Err(Error::InvalidArgument(
                    "eigensolver failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
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
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
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

/// Full spectral decomposition of the symmetric part of `a`, eigenvalues
/// descending. Ties keep their post-solver order, so output is a pure
/// function of the input bytes.
pub fn eigh(a: &Array2<f64>) -> Result<SpectralDecomposition> {
    let n = check_square(a)?;
    if n == 0 {
        return Err(Error::MatrixShape {
            rows: 0,
            cols: 0,
            expected: 1,
        });
    }
    let mut z = symmetrize(a);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 1 {
        return Ok(SpectralDecomposition {
            eigenvalues: Array1::from(vec![z[(0, 0)]]),
            eigenvectors: Array2::eye(1),
        });
    }
    tred2(&mut z, &mut d, &mut e);
    tqli(&mut d, &mut e, &mut z)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap().then(i.cmp(&j)));
    let eigenvalues = Array1::from(order.iter().map(|&i| d[i]).collect::<Vec<_>>());
    let mut eigenvectors = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, new_col)] = z[(k, old_col)];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Moore-Penrose pseudoinverse with a hard eigenvalue cutoff: eigenvalues
/// with `|lambda| <= cutoff` are discarded, the rest inverted.
pub fn pinv_cutoff(a: &Array2<f64>, cutoff: f64) -> Result<Array2<f64>> {
    let decomp = eigh(a)?;
    let n = decomp.dim();
    let inv: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|&lam| if lam.abs() > cutoff { 1.0 / lam } else { 0.0 })
        .collect();
    let v = &decomp.eigenvectors;
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                if inv[k] != 0.0 {
                    acc += inv[k] * v[(i, k)] * v[(j, k)];
                }
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc;
        }
    }
    Ok(out)
}

/// Count of eigenvalues strictly above `tol`.
pub fn rank_tol(a: &Array2<f64>, tol: f64) -> Result<usize> {
    let decomp = eigh(a)?;
    Ok(decomp.eigenvalues.iter().filter(|&&lam| lam > tol).count())
}

/// True when the minimum eigenvalue of the symmetric part is `>= -tol`.
pub fn is_psd(a: &Array2<f64>, tol: f64) -> Result<bool> {
    let decomp = eigh(a)?;
    Ok(decomp.eigenvalues[decomp.dim() - 1] >= -tol)
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue(a: &Array2<f64>) -> Result<f64> {
    let decomp = eigh(a)?;
    Ok(decomp.eigenvalues[decomp.dim() - 1])
}
