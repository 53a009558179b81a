//! Analysis of structure-constant tensors: Lie axioms, Killing form,
//! center, classification of the low-dimensional real algebras that appear
//! as contraction limits, and the kernel of the adjoint generator.

use serde_json::{json, Value};

use crate::deformed::StructureTensor;
use crate::linalg::{hermitian_eigen, null_space, singular_values, Lu};
use crate::lindblad::Superoperator;
use crate::matrix::{Complex64, Matrix, ZERO};
use crate::operator::{commutator, hs_inner, Operator};
use crate::{Result, Tolerances};

/// Names for the real Lie algebras the classifier can recognize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieAlgebraLabel {
    Abelian,
    Heisenberg,
    E2,
    Iso11,
    Su2So3,
    Sl2rSo21,
    SolvableOther,
    Unclassified,
}

impl LieAlgebraLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            LieAlgebraLabel::Abelian => "abelian",
            LieAlgebraLabel::Heisenberg => "heisenberg",
            LieAlgebraLabel::E2 => "e2",
            LieAlgebraLabel::Iso11 => "iso11",
            LieAlgebraLabel::Su2So3 => "su2_so3",
            LieAlgebraLabel::Sl2rSo21 => "sl2r_so21",
            LieAlgebraLabel::SolvableOther => "solvable_other",
            LieAlgebraLabel::Unclassified => "unclassified",
        }
    }
}

/// Classification result with the basis-independent invariants that decide it.
#[derive(Clone, Debug)]
pub struct LieClassification {
    pub label: LieAlgebraLabel,
    /// (positive, negative, zero) eigenvalue counts of the Killing form.
    pub killing_signature: (usize, usize, usize),
    pub center_dim: usize,
    pub derived_dim: usize,
    pub jacobi_residual: f64,
    /// True when a global phase made the tensor real.
    pub realifiable: bool,
    /// True when central directions were quotiented out before classifying.
    pub quotiented: bool,
}

impl LieClassification {
    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label.as_str(),
            "killing_signature": [self.killing_signature.0, self.killing_signature.1, self.killing_signature.2],
            "center_dim": self.center_dim,
            "derived_dim": self.derived_dim,
            "diagnostics": {
                "jacobi_residual": self.jacobi_residual,
                "realifiable": self.realifiable,
                "quotiented": self.quotiented,
            },
        })
    }
}

/// Max over basis triples (i,j,k) of the norm of the cyclic Jacobi sum
/// Σ_m (C^m_ij C^l_mk + C^m_jk C^l_mi + C^m_ki C^l_mj) over l.
pub fn jacobi_residual(c: &StructureTensor) -> f64 {
    let n = c.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut sq = 0.0;
                for l in 0..n {
                    let mut s = ZERO;
                    for m in 0..n {
                        s += c.get(m, i, j) * c.get(l, m, k)
                            + c.get(m, j, k) * c.get(l, m, i)
                            + c.get(m, k, i) * c.get(l, m, j);
                    }
                    sq += s.norm_sqr();
                }
                worst = worst.max(sq.sqrt());
            }
        }
    }
    worst
}

/// Try to make all entries real by one global phase (possible whenever the
/// basis is Hermitian, where constants are purely imaginary, or already real).
pub fn realified(c: &StructureTensor) -> Option<StructureTensor> {
    let n = c.n();
    let scale = c.max_abs();
    if scale == 0.0 {
        return Some(c.clone());
    }
    let mut largest = ZERO;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = c.get(k, i, j);
                if v.norm() > largest.norm() {
                    largest = v;
                }
            }
        }
    }
    let phase = largest.conj() / largest.norm();
    let rotated = c.scale(phase);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rotated.get(k, i, j).im.abs() > 1e-9 * scale {
                    return None;
                }
            }
        }
    }
    Some(rotated)
}

/// Killing form K_ij = Σ_{m,k} C^m_ik C^k_jm, computed on the realified
/// tensor when a global phase realifies it (so the signature reflects the
/// real form), otherwise on the raw entries.
pub fn killing_form(c: &StructureTensor) -> Matrix {
    let t = realified(c).unwrap_or_else(|| c.clone());
    let n = t.n();
    Matrix::from_fn(n, n, |i, j| {
        let mut s = ZERO;
        for m in 0..n {
            for k in 0..n {
                s += t.get(m, i, k) * t.get(k, j, m);
            }
        }
        s
    })
}

/// Coefficient vectors v with Σ_i v_i C^k_ij = 0 for all j, k: the center
/// of the algebra, as an orthonormal set.
pub fn center(c: &StructureTensor, tol: &Tolerances) -> Vec<Vec<Complex64>> {
    let n = c.n();
    // stack the adjoint maps: rows (k,j), columns i
    let mut m = Matrix::zeros(n * n, n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                m[(k * n + j, i)] = c.get(k, i, j);
            }
        }
    }
    null_space(&m, tol.kernel)
}

/// Dimension of the span of all brackets [e_i, e_j].
fn derived_dimension(c: &StructureTensor, tol: &Tolerances) -> usize {
    let n = c.n();
    let mut m = Matrix::zeros(n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m[(k, i * n + j)] = c.get(k, i, j);
            }
        }
    }
    rank(&m, tol)
}

fn rank(m: &Matrix, tol: &Tolerances) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.kernel * smax).count()
}

/// Quotient the algebra by its center: returns the (n−c)-dimensional tensor
/// on a complement of the central directions.
fn quotient_by_center(
    c: &StructureTensor,
    central: &[Vec<Complex64>],
    tol: &Tolerances,
) -> Option<StructureTensor> {
    let n = c.n();
    let czs = central.len();
    if czs == 0 || czs >= n {
        return None;
    }
    // complement = null space of the central projector rows
    let mut zmat = Matrix::zeros(czs, n);
    for (r, z) in central.iter().enumerate() {
        for i in 0..n {
            zmat[(r, i)] = z[i].conj();
        }
    }
    let complement = null_space(&zmat, tol.kernel);
    if complement.len() != n - czs {
        return None;
    }
    // change-of-basis matrix [W | Z]; quotient constants are the W-components
    // of brackets of complement vectors
    let mut b = Matrix::zeros(n, n);
    for (col, w) in complement.iter().enumerate() {
        for i in 0..n {
            b[(i, col)] = w[i];
        }
    }
    for (col, z) in central.iter().enumerate() {
        for i in 0..n {
            b[(i, col + complement.len())] = z[i];
        }
    }
    let lu = Lu::new(&b);
    if lu.is_singular() {
        return None;
    }
    let q = n - czs;
    let mut out = StructureTensor::zeros(q, c.time());
    for i in 0..q {
        for j in 0..q {
            // bracket of complement vectors in original coordinates
            let mut v = vec![ZERO; n];
            for a in 0..n {
                for bb in 0..n {
                    let w = complement[i][a] * complement[j][bb];
                    if w == ZERO {
                        continue;
                    }
                    for k in 0..n {
                        v[k] += w * c.get(k, a, bb);
                    }
                }
            }
            let x = lu.solve_vec(&v);
            for k in 0..q {
                out.set(k, i, j, x[k]);
            }
        }
    }
    Some(out)
}

/// Signature of the Killing form. `tensor_scale` sets an absolute floor
/// (relative to ‖C‖²) below which eigenvalues count as zero, so that
/// nilpotent algebras survive roundoff introduced by basis changes.
fn killing_signature(k: &Matrix, tensor_scale: f64, tol: &Tolerances) -> (usize, usize, usize) {
    let sym = (k + &k.dagger()).scale(Complex64::new(0.5, 0.0));
    let eig = hermitian_eigen(&sym);
    let scale = eig.values.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let floor = 1e-9 * tensor_scale * tensor_scale;
    let thresh = if scale == 0.0 {
        f64::INFINITY
    } else {
        (tol.kernel.sqrt() * scale).max(floor)
    };
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for &v in &eig.values {
        if v > thresh {
            pos += 1;
        } else if v < -thresh {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    (pos, neg, zero)
}

/// Is the span of `sub` (columns) closed and abelian under the bracket?
fn derived_is_abelian(c: &StructureTensor, tol: &Tolerances) -> bool {
    let n = c.n();
    // derived subalgebra basis: right singular vectors of the bracket span
    let mut m = Matrix::zeros(n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m[(k, i * n + j)] = c.get(k, i, j);
            }
        }
    }
    let svd = crate::linalg::svd::svd(&m.dagger());
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return true;
    }
    let span: Vec<Vec<Complex64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol.kernel * smax)
        .map(|(col, _)| (0..n).map(|r| svd.right_vectors[(r, col)]).collect())
        .collect();
    let scale = c.max_abs().max(f64::MIN_POSITIVE);
    for x in &span {
        for y in &span {
            for k in 0..n {
                let mut s = ZERO;
                for a in 0..n {
                    for b in 0..n {
                        s += x[a] * y[b] * c.get(k, a, b);
                    }
                }
                if s.norm() > 1e-7 * scale {
                    return false;
                }
            }
        }
    }
    true
}

/// Classify the real Lie algebra defined by the tensor.
pub fn classify(c: &StructureTensor, tol: &Tolerances) -> LieClassification {
    let jacobi = jacobi_residual(c);
    let real = realified(c);
    let realifiable = real.is_some();
    let scale = c.max_abs();

    let center_vectors = center(c, tol);
    let center_dim = center_vectors.len();
    let derived_dim = derived_dimension(c, tol);
    let killing = killing_form(c);
    let signature = killing_signature(&killing, scale, tol);

    let mut result = LieClassification {
        label: LieAlgebraLabel::Unclassified,
        killing_signature: signature,
        center_dim,
        derived_dim,
        jacobi_residual: jacobi,
        realifiable,
        quotiented: false,
    };

    // a structureless tensor is abelian regardless of reality conventions
    if scale <= tol.limit {
        result.label = LieAlgebraLabel::Abelian;
        return result;
    }
    if !realifiable {
        return result;
    }
    let real = real.unwrap();

    let mut work = real;
    if work.n() > 3 && center_dim > 0 && work.n() - center_dim <= 3 {
        if let Some(q) = quotient_by_center(&work, &center_vectors, tol) {
            work = q;
            result.quotiented = true;
        }
    }

    let n = work.n();
    let wscale = work.max_abs();
    if wscale <= tol.limit {
        result.label = LieAlgebraLabel::Abelian;
        return result;
    }
    if n != 3 {
        result.label = if n < 3 && solvable(&work, tol) {
            LieAlgebraLabel::SolvableOther
        } else {
            LieAlgebraLabel::Unclassified
        };
        return result;
    }

    // 3-dimensional real classification via Killing signature and the
    // derived/center dimensions of the (possibly quotiented) tensor
    let k3 = killing_form(&work);
    let sig = killing_signature(&k3, wscale, tol);
    let wcenter = center(&work, tol).len();
    let wderived = derived_dimension(&work, tol);
    result.label = match sig {
        (0, 3, 0) => LieAlgebraLabel::Su2So3,
        (2, 1, 0) => LieAlgebraLabel::Sl2rSo21,
        (0, 1, 2) if wderived == 2 && derived_is_abelian(&work, tol) => LieAlgebraLabel::E2,
        (1, 0, 2) if wderived == 2 && derived_is_abelian(&work, tol) => LieAlgebraLabel::Iso11,
        (0, 0, 3) => {
            if wderived == 0 {
                LieAlgebraLabel::Abelian
            } else if wderived == 1 && wcenter == 1 {
                LieAlgebraLabel::Heisenberg
            } else if solvable(&work, tol) {
                LieAlgebraLabel::SolvableOther
            } else {
                LieAlgebraLabel::Unclassified
            }
        }
        _ => {
            if solvable(&work, tol) {
                LieAlgebraLabel::SolvableOther
            } else {
                LieAlgebraLabel::Unclassified
            }
        }
    };
    result
}

/// Does the derived series reach zero?
fn solvable(c: &StructureTensor, tol: &Tolerances) -> bool {
    let n = c.n();
    // start with the full space
    let mut span: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let mut v = vec![ZERO; n];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    for _ in 0..=n {
        if span.is_empty() {
            return true;
        }
        // brackets of the current span
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for x in &span {
            for y in &span {
                let mut v = vec![ZERO; n];
                for a in 0..n {
                    for b in 0..n {
                        let w = x[a] * y[b];
                        if w == ZERO {
                            continue;
                        }
                        for k in 0..n {
                            v[k] += w * c.get(k, a, b);
                        }
                    }
                }
                cols.push(v);
            }
        }
        let mut m = Matrix::zeros(n, cols.len().max(1));
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        let svd = crate::linalg::svd::svd(&m);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        if smax <= tol.limit {
            return true;
        }
        let next: Vec<Vec<Complex64>> = {
            // orthonormal basis of the column span = left singular vectors,
            // recovered as m·v/σ
            svd.singular_values
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > tol.kernel * smax)
                .map(|(col, &s)| {
                    let v: Vec<Complex64> =
                        (0..m.cols()).map(|r| svd.right_vectors[(r, col)]).collect();
                    let mv = m.matvec(&v);
                    mv.iter().map(|z| z / s).collect()
                })
                .collect()
        };
        if next.len() >= span.len() {
            return false;
        }
        span = next;
    }
    false
}

/// Observables annihilated by the adjoint generator: fixed points of the
/// Heisenberg-picture evolution.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub kernel_dim: usize,
    pub kernel_basis: Vec<Operator>,
    pub closed_under_commutator: bool,
    pub commutant_is_abelian: bool,
}

pub fn kernel_of_adjoint(l_adj: &Superoperator, tol: &Tolerances) -> Result<KernelReport> {
    let d = l_adj.dim();
    let vectors = null_space(l_adj.matrix(), tol.kernel);
    let kernel_basis: Vec<Operator> = vectors.iter().map(|v| Matrix::unvectorize(d, v)).collect();
    let scale = kernel_basis
        .iter()
        .map(|k| k.max_abs())
        .fold(1.0f64, f64::max);
    let mut closed = true;
    let mut abelian = true;
    for a in &kernel_basis {
        for b in &kernel_basis {
            let comm = commutator(a, b)?;
            if comm.max_abs() > 1e-8 * scale * scale {
                abelian = false;
            }
            // project the commutator on the (orthonormal) kernel span
            let mut residual = comm.clone();
            for k in &kernel_basis {
                let coeff = hs_inner(k, &comm)? / hs_inner(k, k)?;
                residual = &residual - &k.scale(coeff);
            }
            if residual.max_abs() > 1e-8 * scale * scale {
                closed = false;
            }
        }
    }
    Ok(KernelReport {
        kernel_dim: kernel_basis.len(),
        kernel_basis,
        closed_under_commutator: closed,
        commutant_is_abelian: abelian,
    })
}

impl KernelReport {
    pub fn to_json(&self) -> Value {
        json!({
            "kernel_dim": self.kernel_dim,
            "closed_under_commutator": self.closed_under_commutator,
            "commutant_is_abelian": self.commutant_is_abelian,
        })
    }
}
