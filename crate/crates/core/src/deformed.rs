//! The time-deformed product on observables and its t → ∞ contraction.
//!
//! At every finite t the adjoint propagator Λ♯_t is invertible, so
//!
//! ```text
//! A ·_t B = (Λ♯_t)⁻¹ ( Λ♯_t(A) · Λ♯_t(B) )
//! [A, B]_t = A ·_t B − B ·_t A = (Λ♯_t)⁻¹ [ Λ♯_t(A), Λ♯_t(B) ]
//! ```
//!
//! defines a product isomorphic to the ordinary one. Expanding the deformed
//! commutators of a basis gives time-dependent structure constants C(t);
//! their t → ∞ limit, when it exists, is in general a contraction of the
//! original Lie algebra: entries that decay drop out, entries that survive
//! define the contracted bracket.

use serde_json::{json, Value};

use crate::lindblad::Superoperator;
use crate::matrix::{Complex64, Matrix, ZERO};
use crate::operator::{commutator, Operator, OperatorBasis};
use crate::{Error, Result, Tolerances};

/// The deformed algebra at one fixed time: the adjoint propagator, its
/// inverse, and the analysis basis.
pub struct DeformedAlgebraContext<'a> {
    generator_adjoint: &'a Superoperator,
    basis: &'a OperatorBasis,
    time: f64,
    condition_estimate: f64,
    forward: Superoperator,
    backward: Superoperator,
    /// Interior dimension for truncated models: commutator results are
    /// projected onto indices < interior before expansion.
    interior: Option<usize>,
    interior_basis: Option<OperatorBasis>,
    tol: Tolerances,
}

impl<'a> DeformedAlgebraContext<'a> {
    pub fn new(
        generator_adjoint: &'a Superoperator,
        basis: &'a OperatorBasis,
        time: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        Self::with_interior(generator_adjoint, basis, time, None, tol)
    }

    pub fn with_interior(
        generator_adjoint: &'a Superoperator,
        basis: &'a OperatorBasis,
        time: f64,
        interior: Option<usize>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !(time >= 0.0) || !time.is_finite() {
            return Err(Error::Schedule(format!(
                "time must be finite and >= 0, got {time}"
            )));
        }
        if basis.dim() != generator_adjoint.dim() {
            return Err(Error::Dimension {
                expected: generator_adjoint.dim(),
                got: basis.dim(),
            });
        }
        let backward = generator_adjoint.inverse_propagator(time, tol)?;
        let forward = generator_adjoint.propagator(time);
        let interior_basis = match interior {
            Some(keep) => Some(basis.map(|e| e.project_leading(keep), tol)?),
            None => None,
        };
        Ok(DeformedAlgebraContext {
            generator_adjoint,
            basis,
            time,
            condition_estimate: generator_adjoint.propagator_condition(time),
            forward,
            backward,
            interior,
            interior_basis,
            tol: *tol,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn basis(&self) -> &OperatorBasis {
        self.basis
    }

    pub fn generator_adjoint(&self) -> &Superoperator {
        self.generator_adjoint
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// A ·_t B.
    pub fn deformed_product(&self, a: &Operator, b: &Operator) -> Result<Operator> {
        let fa = self.forward.apply(a)?;
        let fb = self.forward.apply(b)?;
        self.backward.apply(&(&fa * &fb))
    }

    /// [A, B]_t.
    pub fn deformed_commutator(&self, a: &Operator, b: &Operator) -> Result<Operator> {
        let fa = self.forward.apply(a)?;
        let fb = self.forward.apply(b)?;
        self.backward.apply(&commutator(&fa, &fb)?)
    }

    /// Structure constants C^k_ij(t) of the deformed bracket in the basis.
    pub fn structure_constants(&self) -> Result<StructureTensor> {
        let n = self.basis.len();
        let expansion_basis = self.interior_basis.as_ref().unwrap_or(self.basis);
        let mut tensor = StructureTensor::zeros(n, self.time);
        for i in 0..n {
            for j in i + 1..n {
                let mut d =
                    self.deformed_commutator(self.basis.element(i), self.basis.element(j))?;
                if let Some(keep) = self.interior {
                    d = d.project_leading(keep);
                }
                let (coeffs, residual) = expansion_basis.expand_with_residual(&d)?;
                let allowed = self.tol.closure * (1.0 + d.max_abs());
                if residual > allowed {
                    return Err(Error::Closure {
                        i,
                        j,
                        residual,
                        tol: allowed,
                    });
                }
                for k in 0..n {
                    tensor.set(k, i, j, coeffs[k]);
                    tensor.set(k, j, i, -coeffs[k]);
                }
            }
        }
        Ok(tensor)
    }
}

/// C^k_ij as a dense 3-index array; `time` is +∞ for contracted limits.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensor {
    n: usize,
    time: f64,
    values: Vec<Complex64>,
}

impl StructureTensor {
    pub fn zeros(n: usize, time: f64) -> Self {
        StructureTensor {
            n,
            time,
            values: vec![ZERO; n * n * n],
        }
    }

    pub fn from_entries(n: usize, time: f64, entries: &[(usize, usize, usize, Complex64)]) -> Self {
        let mut t = Self::zeros(n, time);
        for &(k, i, j, v) in entries {
            t.set(k, i, j, v);
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.values[(k * self.n + i) * self.n + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: Complex64) {
        self.values[(k * self.n + i) * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |C^k_ij + C^k_ji|.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    worst = worst.max((self.get(k, i, j) + self.get(k, j, i)).norm());
                }
            }
        }
        worst
    }

    /// Adjoint matrix of basis element i: (ad_i)_{k j} = C^k_ij.
    pub fn ad_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |k, j| self.get(k, i, j))
    }

    pub fn scale(&self, z: Complex64) -> StructureTensor {
        StructureTensor {
            n: self.n,
            time: self.time,
            values: self.values.iter().map(|&v| v * z).collect(),
        }
    }

    /// Rescale one basis slot e_m -> s·e_m (s ≠ 0):
    /// C^k_ij picks s_i s_j / s_k.
    pub fn rescale_basis(&self, scales: &[Complex64]) -> StructureTensor {
        assert_eq!(scales.len(), self.n);
        let mut out = Self::zeros(self.n, self.time);
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    out.set(
                        k,
                        i,
                        j,
                        self.get(k, i, j) * scales[i] * scales[j] / scales[k],
                    );
                }
            }
        }
        out
    }

    /// Change of basis e'_i = Σ_a B_{a i} e_a with B invertible.
    pub fn change_basis(&self, b: &Matrix, b_inv: &Matrix) -> StructureTensor {
        let n = self.n;
        assert_eq!(b.dim(), n);
        let mut out = Self::zeros(n, self.time);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = ZERO;
                    for a in 0..n {
                        for bb in 0..n {
                            for m in 0..n {
                                s += b[(a, i)] * b[(bb, j)] * b_inv[(k, m)] * self.get(m, a, bb);
                            }
                        }
                    }
                    out.set(k, i, j, s);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let time: Value = if self.time.is_infinite() {
            json!("inf")
        } else {
            json!(self.time)
        };
        let c: Vec<Vec<Vec<Value>>> = (0..self.n)
            .map(|k| {
                (0..self.n)
                    .map(|i| {
                        (0..self.n)
                            .map(|j| {
                                let z = self.get(k, i, j);
                                json!([z.re, z.im])
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        json!({ "n": self.n, "time": time, "C": c })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::Spec("structure tensor missing 'n'".into()))?
            as usize;
        let time = match &v["time"] {
            Value::String(s) if s == "inf" => f64::INFINITY,
            Value::Number(x) => x
                .as_f64()
                .ok_or_else(|| Error::Spec("bad 'time' value".into()))?,
            other => return Err(Error::Spec(format!("bad 'time' value: {other}"))),
        };
        let mut t = Self::zeros(n, time);
        let c = v["C"]
            .as_array()
            .ok_or_else(|| Error::Spec("structure tensor missing 'C'".into()))?;
        for (k, ci) in c.iter().enumerate() {
            let ci = ci
                .as_array()
                .ok_or_else(|| Error::Spec("bad 'C' nesting".into()))?;
            for (i, cij) in ci.iter().enumerate() {
                let cij = cij
                    .as_array()
                    .ok_or_else(|| Error::Spec("bad 'C' nesting".into()))?;
                for (j, z) in cij.iter().enumerate() {
                    t.set(k, i, j, crate::jsonio::complex_from_json(z)?);
                }
            }
        }
        Ok(t)
    }

    /// Long-form CSV: `k,i,j,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,i,j,re,im\n");
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    let z = self.get(k, i, j);
                    out.push_str(&format!("{k},{i},{j},{},{}\n", z.re, z.im));
                }
            }
        }
        out
    }
}

/// Outcome of evolving one observable along a time schedule.
#[derive(Clone, Debug)]
pub enum WeakLimit {
    /// Successive differences contracted below tolerance.
    Converged(Operator),
    /// The norm grows; carries the fitted exponential rate.
    Divergent { rate: f64 },
    /// Neither settled nor clearly growing on the given schedule.
    Undecided { final_delta: f64 },
}

fn validate_schedule(schedule: &[f64], min_len: usize) -> Result<()> {
    if schedule.len() < min_len {
        return Err(Error::Schedule(format!(
            "schedule needs at least {min_len} points, got {}",
            schedule.len()
        )));
    }
    for w in schedule.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Schedule(format!(
                "schedule must be strictly increasing, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    if schedule.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Schedule(
            "schedule times must be finite and >= 0".into(),
        ));
    }
    Ok(())
}

/// Λ♯_t(A) along the schedule; converged when the tail differences drop
/// below `tol`.
pub fn weak_limit_observable(
    l_adj: &Superoperator,
    a: &Operator,
    schedule: &[f64],
    tol: f64,
) -> Result<WeakLimit> {
    validate_schedule(schedule, 3)?;
    let values: Vec<Operator> = schedule
        .iter()
        .map(|&t| l_adj.propagator(t).apply(a))
        .collect::<Result<_>>()?;
    let deltas: Vec<f64> = values
        .windows(2)
        .map(|w| (&w[1] - &w[0]).max_abs())
        .collect();
    let final_delta = *deltas.last().unwrap();
    let not_growing = final_delta <= deltas[0] + tol;
    if final_delta <= tol && not_growing {
        return Ok(WeakLimit::Converged(values.last().unwrap().clone()));
    }
    // growth detection on log-norms
    let norms: Vec<f64> = values.iter().map(|v| v.max_abs()).collect();
    if let Some((slope, _resid)) = log_slope(schedule, &norms) {
        if slope > 0.0 && slope * (schedule[schedule.len() - 1] - schedule[0]) > (2.0f64).ln() {
            return Ok(WeakLimit::Divergent { rate: slope });
        }
    }
    Ok(WeakLimit::Undecided { final_delta })
}

/// Least-squares slope of ln(y) against t, with the max fit deviation.
/// None when fewer than two usable (positive, finite) samples exist.
fn log_slope(times: &[f64], norms: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .filter(|(_, &y)| y > 1e-300 && y.is_finite())
        .map(|(&t, &y)| (t, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let stt: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sty: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    let resid = pts
        .iter()
        .map(|&(t, y)| (y - slope * t - intercept).abs())
        .fold(0.0, f64::max);
    Some((slope, resid))
}

/// One flagged structure-constant entry that grows without bound.
#[derive(Clone, Debug)]
pub struct DivergentEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    /// Fitted exponential growth rate of |C^k_ij(t)|.
    pub rate: f64,
}

/// Result of the t → ∞ structure-constant extrapolation.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub converged: bool,
    pub limit: Option<StructureTensor>,
    pub divergent_entries: Vec<DivergentEntry>,
    pub times_used: Vec<f64>,
    pub final_delta: f64,
}

impl LimitReport {
    pub fn to_json(&self) -> Value {
        json!({
            "converged": self.converged,
            "limit": self.limit.as_ref().map(|t| t.to_json()),
            "divergent_entries": self.divergent_entries.iter().map(|d| json!({
                "k": d.k, "i": d.i, "j": d.j, "rate": d.rate,
            })).collect::<Vec<_>>(),
            "times_used": self.times_used,
            "final_delta": self.final_delta,
        })
    }
}

/// Per-entry decision rule for the limit: a Cauchy tail sticks to its last
/// value; a clean negative log-slope extrapolates to zero; a clean positive
/// slope is flagged divergent; anything else leaves the report unconverged.
fn classify_entry(times: &[f64], series: &[Complex64], tol: f64) -> EntryLimit {
    let last = *series.last().unwrap();
    let deltas: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let tail = deltas.len().min(2);
    let tail_delta = deltas[deltas.len() - tail..]
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    if tail_delta <= tol {
        return EntryLimit::Value(last, tail_delta);
    }
    let norms: Vec<f64> = series.iter().map(|z| z.norm()).collect();
    let span = times[times.len() - 1] - times[0];
    if let Some((slope, resid)) = log_slope(times, &norms) {
        let total = slope * span;
        let clean = resid <= 0.15 * total.abs() + 1e-9;
        if total <= -(2.0f64).ln() && clean {
            // clean exponential decay: the extrapolated change at the limit
            // vanishes, so the entry does not contribute to final_delta
            return EntryLimit::Value(ZERO, 0.0);
        }
        if total >= (2.0f64).ln() && clean {
            return EntryLimit::Divergent(slope);
        }
    }
    EntryLimit::Undecided(tail_delta)
}

enum EntryLimit {
    Value(Complex64, f64),
    Divergent(f64),
    Undecided(f64),
}

/// Evaluate C(t) along the schedule and extrapolate entrywise to t → ∞.
pub fn asymptotic_structure_constants(
    l_adj: &Superoperator,
    basis: &OperatorBasis,
    schedule: &[f64],
    interior: Option<usize>,
    tol: &Tolerances,
) -> Result<LimitReport> {
    let tensors = structure_constant_series(l_adj, basis, schedule, interior, tol)?;
    Ok(extrapolate_limit(schedule, &tensors, tol))
}

/// C(t) at every schedule point.
pub fn structure_constant_series(
    l_adj: &Superoperator,
    basis: &OperatorBasis,
    schedule: &[f64],
    interior: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<StructureTensor>> {
    validate_schedule(schedule, 3)?;
    let mut tensors = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let ctx = DeformedAlgebraContext::with_interior(l_adj, basis, t, interior, tol)?;
        tensors.push(ctx.structure_constants()?);
    }
    Ok(tensors)
}

/// Entrywise limit decision on an already-computed series.
pub fn extrapolate_limit(
    schedule: &[f64],
    tensors: &[StructureTensor],
    tol: &Tolerances,
) -> LimitReport {
    assert_eq!(schedule.len(), tensors.len());
    let n = tensors[0].n();
    let mut limit = StructureTensor::zeros(n, f64::INFINITY);
    let mut divergent = Vec::new();
    let mut converged = true;
    let mut final_delta = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let series: Vec<Complex64> = tensors.iter().map(|t| t.get(k, i, j)).collect();
                match classify_entry(schedule, &series, tol.limit) {
                    EntryLimit::Value(v, d) => {
                        limit.set(k, i, j, v);
                        final_delta = final_delta.max(d);
                    }
                    EntryLimit::Divergent(rate) => {
                        divergent.push(DivergentEntry { k, i, j, rate });
                        converged = false;
                    }
                    EntryLimit::Undecided(d) => {
                        converged = false;
                        final_delta = final_delta.max(d);
                    }
                }
            }
        }
    }
    LimitReport {
        converged,
        limit: if converged { Some(limit) } else { None },
        divergent_entries: divergent,
        times_used: schedule.to_vec(),
        final_delta,
    }
}

/// Default contraction schedule: γ_ref·t ∈ {2,4,6,8,10}, compressed to stay
/// under the conditioning ceiling of the generator.
pub fn default_schedule(l_adj: &Superoperator, gamma_ref: f64, tol: &Tolerances) -> Vec<f64> {
    let base: Vec<f64> = [2.0, 4.0, 6.0, 8.0, 10.0]
        .iter()
        .map(|x| x / gamma_ref.max(1e-12))
        .collect();
    let range = l_adj.spectral_range();
    if range <= 0.0 {
        return base;
    }
    let t_cut = 0.95 * tol.cond_max.ln() / range;
    if base[base.len() - 1] <= t_cut {
        return base;
    }
    (1..=5).map(|k| t_cut * k as f64 / 5.0).collect()
}

/// Long forward-only schedule for weak limits (no inversion involved).
pub fn weak_schedule(gamma_ref: f64) -> Vec<f64> {
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        .iter()
        .map(|x| x / gamma_ref.max(1e-12))
        .collect()
}
