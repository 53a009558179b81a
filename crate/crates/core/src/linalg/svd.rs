//! Singular values and null spaces via one-sided Jacobi.
//!
//! One-sided Jacobi computes small singular values to absolute accuracy
//! ~eps·σ_max without forming A†A, which is what the relative null-space
//! thresholds here rely on.

use crate::matrix::{Complex64, Matrix, ZERO};

/// Thin SVD data: singular values (descending) and right singular vectors.
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Columns are the right singular vectors, in the same order.
    pub right_vectors: Matrix,
}

/// One-sided Jacobi on the columns of `a` (any shape, rows ≥ 1).
pub fn svd(a: &Matrix) -> Svd {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let fro = w.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = f64::EPSILON * fro;

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut gpp = 0.0f64;
                let mut gqq = 0.0f64;
                let mut gpq = ZERO;
                for i in 0..w.rows() {
                    let x = w[(i, p)];
                    let y = w[(i, q)];
                    gpp += x.norm_sqr();
                    gqq += y.norm_sqr();
                    gpq += x.conj() * y;
                }
                let ngpq = gpq.norm();
                if ngpq <= tol * tol || ngpq <= f64::EPSILON * (gpp * gqq).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gpq / ngpq;
                let tau = (gqq - gpp) / (2.0 * ngpq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..w.rows() {
                    let x = w[(i, p)];
                    let y = w[(i, q)];
                    w[(i, p)] = x * c - y * s * phase.conj();
                    w[(i, q)] = x * s * phase + y * c;
                }
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * c - y * s * phase.conj();
                    v[(i, q)] = x * s * phase + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigmas: Vec<f64> = (0..n)
        .map(|j| {
            (0..w.rows())
                .map(|i| w[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigmas[y].partial_cmp(&sigmas[x]).unwrap());
    sigmas = order.iter().map(|&k| sigmas[k]).collect();
    let vsorted = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Svd {
        singular_values: sigmas,
        right_vectors: vsorted,
    }
}

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    svd(a).singular_values
}

/// Orthonormal basis of the numerical null space of `a`: right singular
/// vectors with σ ≤ rel_tol · σ_max.
pub fn null_space(a: &Matrix, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let s = svd(a);
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = if smax == 0.0 {
        f64::INFINITY
    } else {
        rel_tol * smax
    };
    let mut out = Vec::new();
    for (j, &sigma) in s.singular_values.iter().enumerate() {
        if sigma <= cutoff {
            out.push((0..a.cols()).map(|i| s.right_vectors[(i, j)]).collect());
        }
    }
    out
}
