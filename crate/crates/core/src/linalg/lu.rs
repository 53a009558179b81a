//! LU decomposition with partial pivoting.

use crate::matrix::{swap_rows, Complex64, Matrix, ONE, ZERO};

/// Packed LU factors of a square matrix, PA = LU.
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign_swaps: usize,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Self {
        assert!(a.is_square());
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            // pivot on the largest magnitude in column k
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                swap_rows(&mut lu, p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Lu {
            lu,
            perm,
            sign_swaps: swaps,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.dim();
        let mut d = if self.sign_swaps % 2 == 0 { ONE } else { -ONE };
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Solve A x = b for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution, unit lower triangle
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solve A X = B columnwise.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        let n = self.lu.dim();
        assert_eq!(b.rows(), n);
        let mut out = Matrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix {
        self.solve(&Matrix::identity(self.lu.dim()))
    }
}

/// 1-norm condition number via explicit inverse; fine at these sizes.
pub fn condition_1norm(a: &Matrix) -> f64 {
    let lu = Lu::new(a);
    if lu.is_singular() {
        return f64::INFINITY;
    }
    a.one_norm() * lu.inverse().one_norm()
}
