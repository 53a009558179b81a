//! Lindblad generators as superoperator matrices, their adjoints,
//! propagators, and channel diagnostics.
//!
//! Vectorization convention, fixed crate-wide: column stacking with
//! vec(AρB) = (Bᵀ ⊗ A) vec(ρ). Under the Hilbert–Schmidt pairing the
//! adjoint (Heisenberg-picture) generator is then the conjugate transpose
//! of the superoperator matrix.

use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::jsonio;
use crate::linalg::{eigenvalues, expm, hermitian_eigen};
use crate::matrix::{Complex64, Matrix, I, ONE};
use crate::operator::Operator;
use crate::{Error, Result, Tolerances};

/// Physical definition of a generator: Hamiltonian plus rated jump operators,
/// Lρ = −i[H,ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    pub dim: usize,
    pub hamiltonian: Operator,
    pub jumps: Vec<(Operator, f64)>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: Operator, jumps: Vec<(Operator, f64)>) -> Result<Self> {
        let spec = LindbladSpec {
            dim: hamiltonian.dim(),
            hamiltonian,
            jumps,
        };
        spec.validate(&Tolerances::default())?;
        Ok(spec)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Spec("dimension must be positive".into()));
        }
        if self.hamiltonian.dim() != self.dim {
            return Err(Error::Spec("Hamiltonian dimension mismatch".into()));
        }
        if !self.hamiltonian.is_finite() {
            return Err(Error::Spec("non-finite Hamiltonian".into()));
        }
        let scale = self.hamiltonian.max_abs().max(1.0);
        if !self.hamiltonian.is_hermitian(tol.herm * scale) {
            return Err(Error::Spec("Hamiltonian is not Hermitian".into()));
        }
        for (op, rate) in &self.jumps {
            if op.dim() != self.dim {
                return Err(Error::Spec("jump operator dimension mismatch".into()));
            }
            if !op.is_finite() {
                return Err(Error::Spec("non-finite jump operator".into()));
            }
            if !rate.is_finite() || *rate < 0.0 {
                return Err(Error::Spec(format!(
                    "jump rate must be finite and >= 0, got {rate}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "hamiltonian": jsonio::matrix_to_json(&self.hamiltonian),
            "jumps": self.jumps.iter().map(|(op, rate)| json!({
                "op": jsonio::matrix_to_json(op),
                "rate": rate,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v["dim"]
            .as_u64()
            .ok_or_else(|| Error::Spec("missing or invalid 'dim'".into()))?
            as usize;
        let hamiltonian = jsonio::matrix_from_json(&v["hamiltonian"])?;
        let jumps_json = v["jumps"]
            .as_array()
            .ok_or_else(|| Error::Spec("missing 'jumps' array".into()))?;
        let mut jumps = Vec::with_capacity(jumps_json.len());
        for jv in jumps_json {
            let op = jsonio::matrix_from_json(&jv["op"])?;
            let rate = jv["rate"]
                .as_f64()
                .ok_or_else(|| Error::Spec("missing jump 'rate'".into()))?;
            jumps.push((op, rate));
        }
        if hamiltonian.rows() != dim {
            return Err(Error::Spec(format!(
                "declared dim {dim} does not match Hamiltonian size {}",
                hamiltonian.rows()
            )));
        }
        Self::new(hamiltonian, jumps)
    }
}

/// A linear map on operators, stored as its d²×d² matrix on column-stacked
/// vectorizations.
pub struct Superoperator {
    dim: usize,
    matrix: Matrix,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Clone for Superoperator {
    fn clone(&self) -> Self {
        let s = Superoperator::from_matrix(self.dim, self.matrix.clone());
        if let Some(v) = self.spectrum.get() {
            let _ = s.spectrum.set(v.clone());
        }
        s
    }
}

impl std::fmt::Debug for Superoperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Superoperator(dim={}, {}x{})",
            self.dim,
            self.matrix.rows(),
            self.matrix.cols()
        )
    }
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: Matrix) -> Self {
        assert_eq!(matrix.rows(), dim * dim, "superoperator must be d²×d²");
        assert!(matrix.is_square());
        Superoperator {
            dim,
            matrix,
            spectrum: OnceLock::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator::from_matrix(dim, Matrix::identity(dim * dim))
    }

    /// Dimension d of the underlying operators (the matrix is d²×d²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Evaluate the map on an operator: unvec(M · vec(A)).
    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: a.dim(),
            });
        }
        let v = self.matrix.matvec(&a.vectorize());
        Ok(Matrix::unvectorize(self.dim, &v))
    }

    /// Hilbert–Schmidt adjoint: the conjugate transpose of the matrix.
    pub fn adjoint(&self) -> Superoperator {
        Superoperator::from_matrix(self.dim, self.matrix.dagger())
    }

    /// Composition self ∘ other.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, other.dim);
        Superoperator::from_matrix(self.dim, &self.matrix * &other.matrix)
    }

    /// Eigenvalues of the superoperator matrix (cached, sorted by (re, im)).
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| eigenvalues(&self.matrix))
    }

    /// Spread of eigenvalue real parts; governs how fast e^{tL} loses
    /// conditioning.
    pub fn spectral_range(&self) -> f64 {
        let spec = self.spectrum();
        let max = spec.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = spec.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        (max - min).max(0.0)
    }

    /// Condition-number estimate of e^{tL} from the spectral range.
    pub fn propagator_condition(&self, t: f64) -> f64 {
        (self.spectral_range() * t.abs()).exp()
    }

    /// Propagator e^{tL}. Negative times give the formal backward evolution.
    pub fn propagator(&self, t: f64) -> Superoperator {
        assert!(t.is_finite());
        let m = expm(&self.matrix.scale(Complex64::new(t, 0.0)));
        Superoperator::from_matrix(self.dim, m)
    }

    /// e^{−tL}, the exact inverse of `propagator(t)`, refused when the
    /// conditioning estimate exceeds `tol.cond_max`.
    pub fn inverse_propagator(&self, t: f64, tol: &Tolerances) -> Result<Superoperator> {
        let estimate = self.propagator_condition(t);
        if estimate > tol.cond_max {
            return Err(Error::IllConditioned {
                time: t,
                estimate,
                max: tol.cond_max,
            });
        }
        Ok(self.propagator(-t))
    }

    /// Choi matrix J = Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|); positive semidefinite iff
    /// the map is completely positive.
    pub fn choi_matrix(&self) -> Result<Matrix> {
        let d = self.dim;
        let mut j = Matrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                let e = crate::operator::matrix_unit(d, i, jj);
                let se = self.apply(&e)?;
                for a in 0..d {
                    for b in 0..d {
                        j[(i * d + a, jj * d + b)] = se[(a, b)];
                    }
                }
            }
        }
        Ok(j)
    }

    /// Trace-preservation, Hermiticity-preservation, complete-positivity and
    /// adjoint-unitality diagnostics.
    pub fn verify_cptp(&self, tol: &Tolerances) -> Result<CptpReport> {
        let d = self.dim;
        let mut trace_dev = 0.0f64;
        let mut herm_dev = 0.0f64;
        for m in 0..d {
            for n in 0..d {
                let e = crate::operator::matrix_unit(d, m, n);
                let se = self.apply(&e)?;
                let expected = if m == n {
                    ONE
                } else {
                    Complex64::new(0.0, 0.0)
                };
                trace_dev = trace_dev.max((se.trace() - expected).norm());
                // Hermiticity preservation: S(E_mn)† = S(E_nm)
                let sen = self.apply(&crate::operator::matrix_unit(d, n, m))?;
                herm_dev = herm_dev.max((&se.dagger() - &sen).max_abs());
            }
        }
        let choi = self.choi_matrix()?;
        let sym = &(&choi + &choi.dagger()).scale(Complex64::new(0.5, 0.0));
        let eig = hermitian_eigen(sym);
        let choi_min = eig.values.first().copied().unwrap_or(0.0);
        let unit = self.adjoint().apply(&Matrix::identity(d))?;
        let unital_dev = (&unit - &Matrix::identity(d)).max_abs();
        Ok(CptpReport {
            trace_preserving: trace_dev <= tol.herm,
            trace_deviation: trace_dev,
            hermiticity_preserving: herm_dev <= tol.herm,
            hermiticity_deviation: herm_dev,
            choi_min_eigenvalue: choi_min,
            completely_positive: choi_min >= -tol.herm,
            unital_adjoint: unital_dev <= tol.herm,
            unitality_deviation: unital_dev,
        })
    }
}

/// Diagnostics from [`Superoperator::verify_cptp`].
#[derive(Clone, Debug)]
pub struct CptpReport {
    pub trace_preserving: bool,
    pub trace_deviation: f64,
    pub hermiticity_preserving: bool,
    pub hermiticity_deviation: f64,
    pub choi_min_eigenvalue: f64,
    pub completely_positive: bool,
    pub unital_adjoint: bool,
    pub unitality_deviation: f64,
}

impl CptpReport {
    pub fn to_json(&self) -> Value {
        json!({
            "trace_preserving": self.trace_preserving,
            "trace_deviation": self.trace_deviation,
            "hermiticity_preserving": self.hermiticity_preserving,
            "hermiticity_deviation": self.hermiticity_deviation,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "completely_positive": self.completely_positive,
            "unital_adjoint": self.unital_adjoint,
            "unitality_deviation": self.unitality_deviation,
        })
    }
}

/// Assemble the GKSL generator of `spec` as a superoperator matrix.
pub fn build_generator(spec: &LindbladSpec) -> Result<Superoperator> {
    build_generator_with(spec, &Tolerances::default())
}

pub fn build_generator_with(spec: &LindbladSpec, tol: &Tolerances) -> Result<Superoperator> {
    spec.validate(tol)?;
    let d = spec.dim;
    let id = Matrix::identity(d);
    // -i (I ⊗ H - Hᵀ ⊗ I)
    let hpart = &id.kron(&spec.hamiltonian) - &spec.hamiltonian.transpose().kron(&id);
    let mut m = hpart.scale(-I);
    for (l, rate) in &spec.jumps {
        if *rate == 0.0 {
            continue;
        }
        let ldl = &l.dagger() * l;
        let sandwich = l.conj().kron(l);
        let left = id.kron(&ldl);
        let right = ldl.transpose().kron(&id);
        let diss = &sandwich - &(&left + &right).scale(Complex64::new(0.5, 0.0));
        m = &m + &diss.scale(Complex64::new(*rate, 0.0));
    }
    Ok(Superoperator::from_matrix(d, m))
}

/// The Heisenberg-picture generator L♯ as the Hilbert–Schmidt dual of L.
pub fn adjoint_generator(l: &Superoperator) -> Superoperator {
    l.adjoint()
}

/// Direct GKSL assembly of the adjoint generator,
/// L♯A = i[H,A] + Σ_k γ_k (L_k† A L_k − ½{L_k†L_k, A}).
/// Independent of [`adjoint_generator`]; used to cross-check conventions.
pub fn adjoint_generator_gksl(spec: &LindbladSpec) -> Result<Superoperator> {
    spec.validate(&Tolerances::default())?;
    let d = spec.dim;
    let id = Matrix::identity(d);
    let hpart = &id.kron(&spec.hamiltonian) - &spec.hamiltonian.transpose().kron(&id);
    let mut m = hpart.scale(I);
    for (l, rate) in &spec.jumps {
        if *rate == 0.0 {
            continue;
        }
        let ldl = &l.dagger() * l;
        // L† A L -> (Lᵀ ⊗ L†) vec(A)
        let sandwich = l.transpose().kron(&l.dagger());
        let left = id.kron(&ldl);
        let right = ldl.transpose().kron(&id);
        let diss = &sandwich - &(&left + &right).scale(Complex64::new(0.5, 0.0));
        m = &m + &diss.scale(Complex64::new(*rate, 0.0));
    }
    Ok(Superoperator::from_matrix(d, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZERO;
    use crate::operator::{annihilation, matrix_unit, number, sigma_x, sigma_y, sigma_z};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    /// Lρ = −(γ/2)(ρ − σ3 ρ σ3), encoded as jump σ3 with rate γ/2.
    fn dephasing(gamma: f64) -> LindbladSpec {
        LindbladSpec::new(Matrix::zeros(2, 2), vec![(sigma_z(), gamma / 2.0)]).unwrap()
    }

    fn random_op(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn dephasing_generator_action() {
        let gamma = 1.3;
        let l = build_generator(&dephasing(gamma)).unwrap();
        let out = l.apply(&sigma_x().scale(Complex64::new(0.5, 0.0))).unwrap();
        let expect = sigma_x().scale(Complex64::new(-gamma * 0.5, 0.0));
        assert!((&out - &expect).max_abs() < 1e-14);
        // invariant sector
        assert!(l.apply(&sigma_z()).unwrap().max_abs() < 1e-14);
        assert!(l.apply(&Matrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn trivial_spec_gives_zero_matrix() {
        let spec = LindbladSpec::new(Matrix::zeros(3, 3), vec![(annihilation(3), 0.0)]).unwrap();
        let l = build_generator(&spec).unwrap();
        assert!(l.matrix().max_abs() == 0.0);
    }

    #[test]
    fn generator_is_trace_annihilating() {
        let gamma = 0.7;
        let spec = LindbladSpec::new(
            sigma_x().scale(Complex64::new(0.4, 0.0)),
            vec![(annihilation(2), gamma)],
        )
        .unwrap();
        let l = build_generator(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_op(2, &mut rng);
            assert!(l.apply(&rho).unwrap().trace().norm() < 1e-13);
        }
    }

    #[test]
    fn double_commutator_spectrum_matches_position_differences() {
        // Lρ = −γ[X,[X,ρ]] as Hermitian jump X with rate 2γ
        let d = 3;
        let gamma = 1.0;
        let x = Matrix::diag_real(&(1..=d).map(|m| m as f64).collect::<Vec<_>>());
        let spec = LindbladSpec::new(Matrix::zeros(d, d), vec![(x, 2.0 * gamma)]).unwrap();
        let l = build_generator(&spec).unwrap();
        for m in 0..d {
            for n in 0..d {
                let e = matrix_unit(d, m, n);
                let le = l.apply(&e).unwrap();
                let rate = -gamma * ((m as f64) - (n as f64)).powi(2);
                assert!((&le - &e.scale(Complex64::new(rate, 0.0))).max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn adjoint_is_self_dual_for_dephasing() {
        let l = build_generator(&dephasing(0.9)).unwrap();
        let ladj = adjoint_generator(&l);
        assert!((ladj.matrix() - l.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn adjoint_matches_gksl_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dim = 3;
        let h0 = random_op(dim, &mut rng);
        let h = &(&h0 + &h0.dagger()).scale(Complex64::new(0.5, 0.0));
        let spec = LindbladSpec::new(
            h.clone(),
            vec![
                (random_op(dim, &mut rng), 0.8),
                (random_op(dim, &mut rng), 0.3),
            ],
        )
        .unwrap();
        let l = build_generator(&spec).unwrap();
        let via_dual = adjoint_generator(&l);
        let via_gksl = adjoint_generator_gksl(&spec).unwrap();
        assert!((via_dual.matrix() - via_gksl.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn damped_oscillator_adjoint_action() {
        let dim = 8;
        let gamma = 0.6;
        let spec =
            LindbladSpec::new(Matrix::zeros(dim, dim), vec![(annihilation(dim), gamma)]).unwrap();
        let ladj = adjoint_generator(&build_generator(&spec).unwrap());
        // L♯ N = −γ N exactly on the truncated space
        let out = ladj.apply(&number(dim)).unwrap();
        assert!((&out - &number(dim).scale(Complex64::new(-gamma, 0.0))).max_abs() < 1e-13);
        // L♯ a = −γ/2 a
        let a = annihilation(dim);
        let out = ladj.apply(&a).unwrap();
        assert!((&out - &a.scale(Complex64::new(-gamma / 2.0, 0.0))).max_abs() < 1e-13);
        // unital
        assert!(ladj.apply(&Matrix::identity(dim)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn duality_pairing_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = 3;
        let h0 = random_op(dim, &mut rng);
        let spec = LindbladSpec::new(
            (&h0 + &h0.dagger()).scale(Complex64::new(0.5, 0.0)),
            vec![(random_op(dim, &mut rng), 0.5)],
        )
        .unwrap();
        let l = build_generator(&spec).unwrap();
        let ladj = adjoint_generator(&l);
        for _ in 0..50 {
            let rho = random_op(dim, &mut rng);
            let a = random_op(dim, &mut rng);
            let lhs = (&l.apply(&rho).unwrap() * &a).trace();
            let rhs = (&rho * &ladj.apply(&a).unwrap()).trace();
            assert!(
                (lhs - rhs).norm() < 1e-10 * rho.max_abs() * a.max_abs(),
                "duality violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let l = build_generator(&dephasing(1.0)).unwrap();
        let p = l.propagator(0.0);
        assert!((p.matrix() - &Matrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn dephasing_decay_closed_form() {
        let gamma = 1.0;
        let l = build_generator(&dephasing(gamma)).unwrap();
        let ladj = adjoint_generator(&l);
        for gt in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let prop = ladj.propagator(gt / gamma);
            let out = prop.apply(&sigma_x()).unwrap();
            let expect = sigma_x().scale(Complex64::new((-gt).exp(), 0.0));
            assert!((&out - &expect).max_abs() < 1e-12);
            // σ3 and identity are frozen
            assert!((&prop.apply(&sigma_z()).unwrap() - &sigma_z()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup_property() {
        let dim = 4;
        let spec = LindbladSpec::new(
            number(dim).scale(Complex64::new(0.5, 0.0)),
            vec![(annihilation(dim), 0.8)],
        )
        .unwrap();
        let l = build_generator(&spec).unwrap();
        for (t, s) in [(0.3, 0.9), (1.0, 2.0), (2.5, 2.5)] {
            let pts = l.propagator(t + s);
            let comp = l.propagator(t).compose(&l.propagator(s));
            assert!((pts.matrix() - comp.matrix()).max_abs() < 1e-11);
        }
    }

    #[test]
    fn asymptotic_dephasing_state() {
        let l = build_generator(&dephasing(1.0)).unwrap();
        let x = [0.3, -0.5, 0.7];
        let rho0 = &(&Matrix::identity(2)
            + &(&(&sigma_x().scale(Complex64::new(x[0], 0.0))
                + &sigma_y().scale(Complex64::new(x[1], 0.0)))
                + &sigma_z().scale(Complex64::new(x[2], 0.0))))
            .scale(Complex64::new(0.5, 0.0));
        let rho_inf = l.propagator(40.0).apply(rho0).unwrap();
        let expect = &(&Matrix::identity(2) + &sigma_z().scale(Complex64::new(x[2], 0.0)))
            .scale(Complex64::new(0.5, 0.0));
        assert!((&rho_inf - expect).max_abs() < 1e-12);
    }

    #[test]
    fn cptp_report_for_physical_and_unphysical_maps() {
        let t = tols();
        let l = build_generator(&dephasing(1.0)).unwrap();
        for time in [0.0, 0.5, 2.0] {
            let rep = l.propagator(time).verify_cptp(&t).unwrap();
            assert!(rep.trace_preserving, "{rep:?}");
            assert!(rep.hermiticity_preserving);
            assert!(rep.unital_adjoint);
            assert!(rep.choi_min_eigenvalue >= -1e-10);
        }
        // backward dephasing at γt = 1 is not CP: min Choi eigenvalue = 1 − e
        let rep = l.propagator(-1.0).verify_cptp(&t).unwrap();
        assert!(!rep.completely_positive);
        assert!((rep.choi_min_eigenvalue - (1.0 - 1f64.exp())).abs() < 1e-9);
        // identity map: all deviations zero
        let rep = Superoperator::identity(3).verify_cptp(&t).unwrap();
        assert_eq!(rep.trace_deviation, 0.0);
        assert_eq!(rep.unitality_deviation, 0.0);
        assert!(rep.choi_min_eigenvalue >= -1e-12);
    }

    #[test]
    fn inverse_propagator_composes_to_identity() {
        let t = tols();
        let l = build_generator(&dephasing(1.0)).unwrap();
        for time in [0.0, 1.0, 5.0, 10.0] {
            let inv = l.inverse_propagator(time, &t).unwrap();
            let prod = inv.compose(&l.propagator(time));
            assert!(
                (prod.matrix() - &Matrix::identity(4)).max_abs() < 1e-8,
                "at t = {time}"
            );
        }
    }

    #[test]
    fn inverse_propagator_refuses_ill_conditioned() {
        let t = tols();
        let l = build_generator(&dephasing(1.0)).unwrap();
        // spectral range γ = 1, so the estimate at t = 40 is e^40 ≈ 2.4e17
        let est = l.propagator_condition(40.0);
        assert!((est.ln() - 40.0).abs() < 1e-6);
        match l.inverse_propagator(40.0, &t) {
            Err(Error::IllConditioned { estimate, .. }) => {
                assert!(estimate > 1e12);
            }
            other => panic!("expected IllConditionedError, got {other:?}"),
        }
    }

    #[test]
    fn dephasing_spectrum() {
        let l = build_generator(&dephasing(1.0)).unwrap();
        let spec = l.spectrum();
        let mut re: Vec<f64> = spec.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-1.0, -1.0, 0.0, 0.0];
        for (r, e) in re.iter().zip(&expect) {
            assert!((r - e).abs() < 1e-12);
        }
        assert!(spec.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn hermiticity_preservation_of_adjoint_propagator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dim = 3;
        let h0 = random_op(dim, &mut rng);
        let spec = LindbladSpec::new(
            (&h0 + &h0.dagger()).scale(Complex64::new(0.5, 0.0)),
            vec![(random_op(dim, &mut rng), 0.4)],
        )
        .unwrap();
        let ladj = adjoint_generator(&build_generator(&spec).unwrap());
        let prop = ladj.propagator(0.8);
        for _ in 0..10 {
            let a0 = random_op(dim, &mut rng);
            let a = &(&a0 + &a0.dagger()).scale(Complex64::new(0.5, 0.0));
            let at = prop.apply(a).unwrap();
            assert!(at.is_hermitian(1e-10 * at.max_abs().max(1.0)));
        }
    }

    #[test]
    fn spec_json_roundtrip_and_validation() {
        let spec = dephasing(0.5);
        let v = spec.to_json();
        let back = LindbladSpec::from_json(&v).unwrap();
        assert_eq!(back.dim, 2);
        assert!((&back.hamiltonian - &spec.hamiltonian).max_abs() == 0.0);
        assert_eq!(back.jumps.len(), 1);
        assert!((back.jumps[0].1 - 0.25).abs() < 1e-15);

        // negative rate rejected
        let bad = json!({
            "dim": 2,
            "hamiltonian": jsonio::matrix_to_json(&Matrix::zeros(2, 2)),
            "jumps": [{"op": jsonio::matrix_to_json(&sigma_z()), "rate": -1.0}],
        });
        assert!(matches!(LindbladSpec::from_json(&bad), Err(Error::Spec(_))));

        // non-Hermitian Hamiltonian rejected
        let mut h = Matrix::zeros(2, 2);
        h[(0, 1)] = ONE;
        let bad = json!({
            "dim": 2,
            "hamiltonian": jsonio::matrix_to_json(&h),
            "jumps": [],
        });
        assert!(matches!(LindbladSpec::from_json(&bad), Err(Error::Spec(_))));
    }

    #[test]
    fn apply_dimension_mismatch() {
        let l = build_generator(&dephasing(1.0)).unwrap();
        assert!(matches!(
            l.apply(&Matrix::identity(3)),
            Err(Error::Dimension { .. })
        ));
        let _ = ZERO;
    }
}
