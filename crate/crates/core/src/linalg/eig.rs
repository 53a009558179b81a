//! Eigendecompositions: complex Schur via Hessenberg QR iteration, and a
//! cyclic Jacobi solver for Hermitian matrices.

use crate::linalg::blocks;
use crate::linalg::lu::Lu;
use crate::matrix::{Complex64, Matrix, ONE, ZERO};

/// Complex Schur decomposition A = Q T Q† with T upper triangular.
pub struct Schur {
    pub q: Matrix,
    pub t: Matrix,
    /// False if the QR iteration hit its sweep limit before full deflation.
    pub converged: bool,
}

/// Spectral decomposition of a diagonalizable matrix, A = V diag(λ) V⁻¹.
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: Matrix,
    pub vectors_inv: Matrix,
    /// 1-norm condition number of the eigenvector matrix.
    pub condition: f64,
}

/// Eigendecomposition of a Hermitian matrix, A = V diag(λ) V†.
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Householder reduction to upper Hessenberg form, accumulating Q.
fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        // reflector zeroing h[k+2.., k]
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let alpha = -phase * norm_x;
        x[0] -= alpha;
        let vnorm2 = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // h <- P h with P = I - beta v v† acting on rows k+1..n
        for j in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v.conj() * h[(k + 1 + i, j)])
                .sum();
            let f = dot * beta;
            for (i, v) in x.iter().enumerate() {
                let delta = f * v;
                h[(k + 1 + i, j)] -= delta;
            }
        }
        // h <- h P on columns k+1..n
        for i in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| h[(i, k + 1 + j)] * v)
                .sum();
            let f = dot * beta;
            for (j, v) in x.iter().enumerate() {
                let delta = f * v.conj();
                h[(i, k + 1 + j)] -= delta;
            }
        }
        // q <- q P
        for i in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| q[(i, k + 1 + j)] * v)
                .sum();
            let f = dot * beta;
            for (j, v) in x.iter().enumerate() {
                let delta = f * v.conj();
                q[(i, k + 1 + j)] -= delta;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        h[(k + 1, k)] = alpha;
    }
    (h, q)
}

fn wilkinson_shift(h: &Matrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = tr_half + root;
    let l2 = tr_half - root;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition by explicit-shift QR on the Hessenberg form.
pub fn schur(a: &Matrix) -> Schur {
    let n = a.dim();
    if n == 0 {
        return Schur {
            q: Matrix::identity(0),
            t: Matrix::identity(0),
            converged: true,
        };
    }
    let (mut h, mut q) = hessenberg(a);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let negligible = |h: &Matrix, i: usize| -> bool {
        let v = h[(i, i - 1)].norm();
        v <= eps * (h[(i - 1, i - 1)].norm() + h[(i, i)].norm()).max(scale * eps)
    };

    let mut hi = n - 1;
    let mut iter_on_block = 0usize;
    let mut total_iters = 0usize;
    let max_total = 60 * n.max(4);
    let mut converged = true;

    while hi > 0 {
        if total_iters > max_total {
            converged = false;
            break;
        }
        // deflate trailing eigenvalues with negligible subdiagonals
        if negligible(&h, hi) {
            h[(hi, hi - 1)] = ZERO;
            hi -= 1;
            iter_on_block = 0;
            continue;
        }
        // active window [lo, hi]
        let mut lo = hi;
        while lo > 0 && !negligible(&h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = ZERO;
        }

        iter_on_block += 1;
        total_iters += 1;
        let mu = if iter_on_block % 16 == 0 {
            // exceptional shift to break symmetry stalls
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };

        // QR step on the window: R = (Π G_k)(H - μI), H <- R (Π G_k)† + μI
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rots.push((c, s));
            // rows k, k+1, columns k..=n-1
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = Complex64::new(c, 0.0) * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + Complex64::new(c, 0.0) * y;
            }
            h[(k + 1, k)] = ZERO;
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            // columns k, k+1, rows 0..=min(k+1, hi)
            for i in 0..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = Complex64::new(c, 0.0) * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + Complex64::new(c, 0.0) * y;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = Complex64::new(c, 0.0) * x + s.conj() * y;
                q[(i, k + 1)] = -s * x + Complex64::new(c, 0.0) * y;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }

    // clean the strict lower triangle
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Schur { q, t: h, converged }
}

/// Eigenvalues of a general square matrix, sorted by (re, im).
/// The sparsity pattern is split into decoupled blocks first.
pub fn eigenvalues(a: &Matrix) -> Vec<Complex64> {
    let mut vals = Vec::with_capacity(a.dim());
    for comp in blocks::components(a) {
        let sub = a.submatrix(&comp);
        if comp.len() == 1 {
            vals.push(sub[(0, 0)]);
            continue;
        }
        let s = schur(&sub);
        for i in 0..comp.len() {
            vals.push(s.t[(i, i)]);
        }
    }
    vals.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    vals
}

/// Eigenvectors of an upper-triangular matrix by back-substitution.
fn triangular_eigenvectors(t: &Matrix) -> Matrix {
    let n = t.dim();
    let scale = t.max_abs().max(f64::MIN_POSITIVE);
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut y = vec![ZERO; n];
        y[i] = ONE;
        for j in (0..i).rev() {
            let mut s = ZERO;
            for k in j + 1..=i {
                s += t[(j, k)] * y[k];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < f64::EPSILON * scale {
                den = Complex64::new(f64::EPSILON * scale, 0.0);
            }
            y[j] = -s / den;
        }
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (k, z) in y.iter().enumerate() {
            v[(k, i)] = z / norm;
        }
    }
    v
}

/// Try a full spectral decomposition A = V diag(λ) V⁻¹.
///
/// Returns `None` when the QR iteration fails or the eigenvector matrix is
/// numerically singular; callers fall back to Padé in that case.
pub fn eigen_decomposition(a: &Matrix) -> Option<EigenDecomposition> {
    let s = schur(a);
    if !s.converged {
        return None;
    }
    let w = triangular_eigenvectors(&s.t);
    let vectors = &s.q * &w;
    let lu = Lu::new(&vectors);
    if lu.is_singular() {
        return None;
    }
    let vectors_inv = lu.inverse();
    let condition = vectors.one_norm() * vectors_inv.one_norm();
    let values = (0..a.dim()).map(|i| s.t[(i, i)]).collect();
    Some(EigenDecomposition {
        values,
        vectors,
        vectors_inv,
        condition,
    })
}

/// Jacobi eigendecomposition of a Hermitian matrix (block-split first).
pub fn hermitian_eigen(a: &Matrix) -> HermitianEigen {
    let n = a.dim();
    let mut values = vec![0.0f64; n];
    let mut vectors = Matrix::zeros(n, n);
    for comp in blocks::components(a) {
        let sub = a.submatrix(&comp);
        let (vals, vecs) = jacobi_hermitian(&sub);
        for (bi, &i) in comp.iter().enumerate() {
            values[i] = vals[bi];
            for (bj, &j) in comp.iter().enumerate() {
                vectors[(i, j)] = vecs[(bi, bj)];
            }
        }
    }
    // sort ascending, carrying eigenvector columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].partial_cmp(&values[y]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = Matrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

fn jacobi_hermitian(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    if n <= 1 {
        return ((0..n).map(|i| m[(i, i)].re).collect(), v);
    }
    let fro = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = f64::EPSILON * fro;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let napq = apq.norm();
                if napq <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / napq;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * napq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // column update M <- M J, J_pq-plane rotation
                for i in 0..n {
                    let x = m[(i, p)];
                    let y = m[(i, q)];
                    m[(i, p)] = x * c - y * s * phase.conj();
                    m[(i, q)] = x * s * phase + y * c;
                }
                // row update M <- J† M
                for j in 0..n {
                    let x = m[(p, j)];
                    let y = m[(q, j)];
                    m[(p, j)] = x * c - y * s * phase;
                    m[(q, j)] = x * s * phase.conj() + y * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(app - t * napq, 0.0);
                m[(q, q)] = Complex64::new(aqq + t * napq, 0.0);
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * c - y * s * phase.conj();
                    v[(i, q)] = x * s * phase + y * c;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)].re).collect(), v)
}
