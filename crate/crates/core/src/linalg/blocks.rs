//! Decomposition of a square matrix into its exactly-decoupled index blocks.
//!
//! The superoperators assembled in this crate are sparse with exact zeros:
//! dephasing generators are diagonal in the matrix-unit basis and oscillator
//! generators couple only short chains of matrix units. Splitting on the
//! exact sparsity pattern turns an O(n³) exponential or eigensolve of the
//! full matrix into independent solves on blocks of a few dozen rows, with
//! bit-identical semantics.

use crate::matrix::{Matrix, ZERO};

/// Connected components of the symmetrized sparsity pattern of `a`.
/// Each component is a sorted list of indices.
pub fn components(a: &Matrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for i in 0..n {
        for j in 0..n {
            if i != j && (a[(i, j)] != ZERO || a[(j, i)] != ZERO) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort_by_key(|g| g[0]);
    groups
}

/// Apply `f` to each diagonal block of `a` and reassemble the results on the
/// original index set. Off-block entries of the output are zero.
pub fn map_blocks(a: &Matrix, mut f: impl FnMut(&Matrix) -> Matrix) -> Matrix {
    let n = a.dim();
    let comps = components(a);
    let mut out = Matrix::zeros(n, n);
    for comp in &comps {
        let sub = a.submatrix(comp);
        let res = f(&sub);
        assert_eq!(res.dim(), comp.len());
        for (bi, &i) in comp.iter().enumerate() {
            for (bj, &j) in comp.iter().enumerate() {
                out[(i, j)] = res[(bi, bj)];
            }
        }
    }
    out
}
