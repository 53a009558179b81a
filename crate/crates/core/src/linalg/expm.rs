//! Matrix exponential.
//!
//! The input is first split into exactly-decoupled index blocks. Each block
//! goes through a spectral fast path when it is diagonalizable with a
//! well-conditioned eigenvector matrix, and otherwise through
//! scaling-and-squaring with the [13/13] Padé approximant (Higham 2005).

use crate::linalg::blocks;
use crate::linalg::eig::eigen_decomposition;
use crate::linalg::lu::Lu;
use crate::matrix::{Complex64, Matrix, ZERO};

/// Condition ceiling on the eigenvector matrix for the spectral fast path.
const EIGEN_COND_MAX: f64 = 1e6;
/// Relative reconstruction residual accepted from the spectral fast path.
const EIGEN_RESIDUAL_MAX: f64 = 1e-12;

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// exp(A) for a square complex matrix.
pub fn expm(a: &Matrix) -> Matrix {
    blocks::map_blocks(a, expm_block)
}

fn expm_block(a: &Matrix) -> Matrix {
    let n = a.dim();
    if n == 1 {
        return Matrix::diag(&[a[(0, 0)].exp()]);
    }
    if is_diagonal(a) {
        let d: Vec<Complex64> = (0..n).map(|i| a[(i, i)].exp()).collect();
        return Matrix::diag(&d);
    }
    if let Some(e) = eigen_decomposition(a) {
        if e.condition < EIGEN_COND_MAX {
            let d = Matrix::diag(&e.values);
            let rec = &(&e.vectors * &d) * &e.vectors_inv;
            let scale = a.max_abs().max(f64::MIN_POSITIVE);
            if (&rec - a).max_abs() <= EIGEN_RESIDUAL_MAX * scale * e.condition {
                let ed = Matrix::diag(&e.values.iter().map(|z| z.exp()).collect::<Vec<_>>());
                return &(&e.vectors * &ed) * &e.vectors_inv;
            }
        }
    }
    expm_pade(a)
}

fn is_diagonal(a: &Matrix) -> bool {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] != ZERO {
                return false;
            }
        }
    }
    true
}

fn expm_pade(a: &Matrix) -> Matrix {
    let n = a.dim();
    let norm = a.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));

    let id = Matrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let b = &PADE_13;
    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let w1 = &(&a6.scale(b[13].into()) + &a4.scale(b[11].into())) + &a2.scale(b[9].into());
    let w2 = &(&(&a6.scale(b[7].into()) + &a4.scale(b[5].into())) + &a2.scale(b[3].into()))
        + &id.scale(b[1].into());
    let u = &scaled * &(&(&a6 * &w1) + &w2);
    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let z1 = &(&a6.scale(b[12].into()) + &a4.scale(b[10].into())) + &a2.scale(b[8].into());
    let v = &(&(&(&a6 * &z1) + &a6.scale(b[6].into())) + &a4.scale(b[4].into()))
        + &(&a2.scale(b[2].into()) + &id.scale(b[0].into()));

    // (v - u) r = (v + u)
    let num = &v + &u;
    let den = &v - &u;
    let mut r = Lu::new(&den).solve(&num);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_zero_is_identity() {
        let z = Matrix::zeros(4, 4);
        assert!((&expm(&z) - &Matrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn exp_diagonal_is_entrywise() {
        let a = Matrix::diag(&[c(-1.0, 0.0), c(0.0, 2.0), c(3.0, -1.0)]);
        let e = expm(&a);
        for i in 0..3 {
            assert!((e[(i, i)] - a[(i, i)].exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_of_pauli_x_rotation() {
        // exp(i θ σ1) = cos θ I + i sin θ σ1
        let theta = 0.7;
        let sx = Matrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        let e = expm(&sx.scale(I * theta));
        let expect = &Matrix::identity(2).scale(c(theta.cos(), 0.0)) + &sx.scale(I * theta.sin());
        assert!((&e - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn exp_nilpotent_exact() {
        // N = [[0,1],[0,0]] is defective: Padé path; exp = I + N
        let mut nmat = Matrix::zeros(2, 2);
        nmat[(0, 1)] = ONE;
        let e = expm(&nmat);
        assert!((e[(0, 0)] - ONE).norm() < 1e-15);
        assert!((e[(0, 1)] - ONE).norm() < 1e-15);
        assert!(e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn exp_large_norm_scaling() {
        // exp(-50 I + i 3 σ2-like block) via scaling and squaring stays accurate
        let a = Matrix::from_rows(&[
            vec![c(-20.0, 0.0), c(13.0, 0.0)],
            vec![c(-13.0, 0.0), c(-20.0, 0.0)],
        ]);
        // eigenvalues -20 ± 13i: exp = e^{-20}(cos13 ± i sin13) structure
        let e = expm(&a);
        let scale = (-20.0f64).exp();
        let expect = Matrix::from_rows(&[
            vec![c(scale * 13.0f64.cos(), 0.0), c(scale * 13.0f64.sin(), 0.0)],
            vec![
                c(-scale * 13.0f64.sin(), 0.0),
                c(scale * 13.0f64.cos(), 0.0),
            ],
        ]);
        assert!(
            (&e - &expect).max_abs() < 1e-18,
            "dev = {:e}",
            (&e - &expect).max_abs()
        );
    }

    #[test]
    fn exp_additivity_for_commuting_blocks() {
        let mut a = Matrix::zeros(3, 3);
        a[(0, 1)] = c(0.4, 0.1);
        a[(1, 0)] = c(-0.4, 0.1);
        a[(2, 2)] = c(0.0, 1.0);
        let e1 = expm(&a.scale(c(0.5, 0.0)));
        let e = expm(&a);
        assert!((&(&e1 * &e1) - &e).max_abs() < 1e-13);
    }
}
