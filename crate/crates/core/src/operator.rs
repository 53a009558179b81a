//! Operators, Hilbert–Schmidt geometry, and the standard operator bases.

use crate::linalg::hermitian_eigen;
use crate::matrix::{Complex64, Matrix, ONE, ZERO};
use crate::{Error, Result, Tolerances};

/// A quantum observable or state: a square complex matrix.
pub type Operator = Matrix;

/// Hilbert–Schmidt inner product ⟨A, B⟩ = Tr(A† B).
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let n = a.dim();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)].conj() * b[(i, j)];
        }
    }
    Ok(s)
}

/// Commutator AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(&(a * b) - &(b * a))
}

/// Anticommutator AB + BA.
pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) + &(b * a)
}

pub fn sigma_x() -> Operator {
    Matrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
}

pub fn sigma_y() -> Operator {
    Matrix::from_rows(&[
        vec![ZERO, Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), ZERO],
    ])
}

pub fn sigma_z() -> Operator {
    Matrix::diag_real(&[1.0, -1.0])
}

/// Truncated Fock-space annihilation operator on `dim` levels:
/// a |n⟩ = √n |n−1⟩ for n = 1..dim−1.
pub fn annihilation(dim: usize) -> Operator {
    let mut a = Matrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Number operator diag(0, 1, ..., dim−1).
pub fn number(dim: usize) -> Operator {
    Matrix::diag_real(&(0..dim).map(|n| n as f64).collect::<Vec<_>>())
}

/// Clock-and-shift pair on a d-level system: U = Σ_m λ^m |m⟩⟨m| on the
/// position basis (kets 0-indexed, eigenvalues λ^1..λ^d) and V the cyclic
/// shift V|m⟩ = |m+1 mod d⟩, diagonal in the Fourier basis. They satisfy
/// U^k V^l = λ^{kl} V^l U^k with λ = e^{2πi/d}.
pub fn schwinger_pair(d: usize) -> (Operator, Operator) {
    assert!(d >= 2, "schwinger_pair needs d >= 2");
    let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU / d as f64);
    let u = Matrix::diag(
        &(0..d)
            .map(|m| lambda.powu(m as u32 + 1))
            .collect::<Vec<_>>(),
    );
    let mut v = Matrix::zeros(d, d);
    for m in 0..d {
        v[((m + 1) % d, m)] = ONE;
    }
    (u, v)
}

/// An ordered operator basis with its Gram matrix.
#[derive(Clone)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<Operator>,
    labels: Vec<String>,
    orthogonal: bool,
    gram: Matrix,
    gram_condition: f64,
}

impl OperatorBasis {
    /// Build a basis, verifying shared dimension and linear independence.
    pub fn new(elements: Vec<Operator>, labels: Vec<String>, tol: &Tolerances) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Basis("empty basis".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::Basis("label/element count mismatch".into()));
        }
        let dim = elements[0].dim();
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: e.dim(),
                });
            }
            if !e.is_finite() {
                return Err(Error::Basis("non-finite basis element".into()));
            }
        }
        let n = elements.len();
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = hs_inner(&elements[i], &elements[j])?;
            }
        }
        let eig = hermitian_eigen(&gram);
        let max = eig.values.last().copied().unwrap_or(0.0);
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min <= 1e-12 * max.max(f64::MIN_POSITIVE) {
            return Err(Error::Basis(format!(
                "linearly dependent basis: Gram eigenvalue range [{min:.3e}, {max:.3e}]"
            )));
        }
        let gram_condition = max / min;
        let scale = max;
        let mut orthogonal = true;
        'outer: for i in 0..n {
            for j in 0..n {
                if i != j && gram[(i, j)].norm() > tol.orth * scale {
                    orthogonal = false;
                    break 'outer;
                }
            }
        }
        Ok(OperatorBasis {
            dim,
            elements,
            labels,
            orthogonal,
            gram,
            gram_condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &Operator {
        &self.elements[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn by_label(&self, label: &str) -> Option<&Operator> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| &self.elements[k])
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// Expansion coefficients of `a` in this basis via the Gram solve,
    /// with a reconstruction-residual check.
    pub fn expand(&self, a: &Operator, tol: &Tolerances) -> Result<Vec<Complex64>> {
        let (coeffs, residual) = self.expand_with_residual(a)?;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        if residual > tol.expand * scale {
            return Err(Error::Expansion {
                residual,
                tol: tol.expand * scale,
            });
        }
        Ok(coeffs)
    }

    /// Least-squares expansion coefficients and the out-of-span residual
    /// ‖a − Σ c_k A_k‖_max.
    pub fn expand_with_residual(&self, a: &Operator) -> Result<(Vec<Complex64>, f64)> {
        if a.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: a.dim(),
            });
        }
        let n = self.elements.len();
        let rhs: Vec<Complex64> = self
            .elements
            .iter()
            .map(|e| hs_inner(e, a))
            .collect::<Result<_>>()?;
        let lu = crate::linalg::Lu::new(&self.gram);
        if lu.is_singular() {
            return Err(Error::Basis("singular Gram matrix".into()));
        }
        let coeffs = lu.solve_vec(&rhs);
        let mut rec = Matrix::zeros(self.dim, self.dim);
        for k in 0..n {
            rec = &rec + &self.elements[k].scale(coeffs[k]);
        }
        let residual = (a - &rec).max_abs();
        Ok((coeffs, residual))
    }

    /// Reconstruct Σ c_k A_k.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> Operator {
        assert_eq!(coeffs.len(), self.elements.len());
        let mut rec = Matrix::zeros(self.dim, self.dim);
        for (k, &c) in coeffs.iter().enumerate() {
            rec = &rec + &self.elements[k].scale(c);
        }
        rec
    }

    /// New basis with every element replaced by f(element).
    pub fn map(
        &self,
        f: impl Fn(&Operator) -> Operator,
        tol: &Tolerances,
    ) -> Result<OperatorBasis> {
        OperatorBasis::new(
            self.elements.iter().map(&f).collect(),
            self.labels.clone(),
            tol,
        )
    }
}

/// The Pauli basis {σ0 = 𝟙, σ1, σ2, σ3}, orthogonal with ⟨σ_i, σ_i⟩ = 2.
pub fn pauli_basis() -> OperatorBasis {
    OperatorBasis::new(
        vec![Matrix::identity(2), sigma_x(), sigma_y(), sigma_z()],
        vec![
            "sigma0".into(),
            "sigma1".into(),
            "sigma2".into(),
            "sigma3".into(),
        ],
        &Tolerances::default(),
    )
    .expect("Pauli basis is valid")
}

/// The traceless Pauli triple {σ1, σ2, σ3}.
pub fn pauli_triple() -> OperatorBasis {
    OperatorBasis::new(
        vec![sigma_x(), sigma_y(), sigma_z()],
        vec!["sigma1".into(), "sigma2".into(), "sigma3".into()],
        &Tolerances::default(),
    )
    .expect("Pauli triple is valid")
}

/// Matrix unit E_mn = |m⟩⟨n|.
pub fn matrix_unit(d: usize, m: usize, n: usize) -> Operator {
    let mut e = Matrix::zeros(d, d);
    e[(m, n)] = ONE;
    e
}

fn unit_label(d: usize, m: usize, n: usize) -> String {
    if d <= 10 {
        format!("E_{m}{n}")
    } else {
        format!("E_{m}_{n}")
    }
}

/// All d² matrix units in row-major (m, n) order; orthonormal under the
/// Hilbert–Schmidt inner product.
pub fn matrix_unit_basis(d: usize) -> OperatorBasis {
    assert!(d >= 1);
    let mut elements = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            elements.push(matrix_unit(d, m, n));
            labels.push(unit_label(d, m, n));
        }
    }
    OperatorBasis::new(elements, labels, &Tolerances::default()).expect("matrix units are valid")
}
