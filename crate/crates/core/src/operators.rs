//! Density operators, projectors, partial traces and expectation values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{permute_axes, StateVector};
use crate::linalg::{c, column_projector, frobenius, hermitian_eigen, hermiticity_defect, kron, CMatrix, CVector, C64, ZERO};
use crate::tol::OPERATOR_TOL;

/// A Hermitian, positive operator with a declared trace (1 for reduced
/// states, `N` for one-body density matrices).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    trace: f64,
    values: Vec<f64>,
    vectors: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, trace_convention: f64) -> Result<Self> {
        let defect = hermiticity_defect(&matrix);
        if defect > OPERATOR_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = matrix.trace();
        let scale = trace_convention.abs().max(1.0);
        if (trace.re - trace_convention).abs() > OPERATOR_TOL * scale {
            return Err(Error::InvalidDensity(format!("trace {} but convention {trace_convention}", trace.re)));
        }
        let (values, vectors) = hermitian_eigen(&matrix)?;
        if let Some(&min) = values.last() {
            if min < -OPERATOR_TOL * scale {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { matrix, trace: trace_convention, values, vectors })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace_convention(&self) -> f64 {
        self.trace
    }

    /// Eigenvalues (descending) and eigenvectors as columns.
    pub fn spectrum(&self) -> (Vec<f64>, CMatrix) {
        (self.values.clone(), self.vectors.clone())
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }
}

/// An orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    rank: usize,
}

impl Projector {
    /// Validate Hermiticity and idempotence; the rank is the rounded trace.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let defect = hermiticity_defect(&matrix);
        if defect > OPERATOR_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let idem = frobenius(&(&matrix * &matrix - &matrix));
        if idem > OPERATOR_TOL * (matrix.nrows() as f64).max(1.0) {
            return Err(Error::InvalidProjector(format!("P² ≠ P (defect {idem:.3e})")));
        }
        let rank = matrix.trace().re.round() as usize;
        Ok(Self { matrix, rank })
    }

    /// `|v⟩⟨v|` for the normalized `v`.
    pub fn onto(v: &CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm("projector vector".into()));
        }
        let u = v / c(n);
        Ok(Self { matrix: &u * u.adjoint(), rank: 1 })
    }

    /// Projector onto the span of orthonormal columns.
    pub fn onto_columns(q: &CMatrix) -> Self {
        Self { matrix: column_projector(q), rank: q.ncols() }
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: CMatrix::identity(d, d), rank: d }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.dim()
    }

    /// The unit vector a rank-1 projector projects onto, with the canonical
    /// phase.
    pub fn vector(&self) -> Option<CVector> {
        if self.rank != 1 {
            return None;
        }
        let (_, vecs) = hermitian_eigen(&self.matrix).ok()?;
        let mut v: CVector = vecs.column(0).into_owned();
        crate::linalg::fix_phase(&mut v);
        Some(v)
    }
}

/// Apply a single-particle operator to one slot of an amplitude tensor.
pub(crate) fn apply_on_slot(amps: &[C64], dims: &[usize], slot: usize, op: &CMatrix) -> Vec<C64> {
    let d = dims[slot];
    let right: usize = dims[slot + 1..].iter().product();
    let left: usize = dims[..slot].iter().product();
    let mut out = vec![ZERO; amps.len()];
    for l in 0..left {
        let base = l * d * right;
        for i in 0..d {
            for j in 0..d {
                let m = op[(i, j)];
                if m == ZERO {
                    continue;
                }
                let src = base + j * right;
                let dst = base + i * right;
                for r in 0..right {
                    out[dst + r] += m * amps[src + r];
                }
            }
        }
    }
    out
}

fn check_slot_operator(state: &StateVector, slot: usize, op: &CMatrix) -> Result<()> {
    let dims = state.dims();
    if slot >= dims.len() {
        return Err(Error::InvalidArgument(format!("slot {slot} out of range for {} particles", dims.len())));
    }
    if op.nrows() != dims[slot] || op.ncols() != dims[slot] {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} operator on slot {slot} of dimension {}",
            op.nrows(),
            op.ncols(),
            dims[slot]
        )));
    }
    Ok(())
}

/// Reduced density operator of the kept slots (in ascending slot order).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityOperator> {
    let n = state.particles();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.len() != keep.len() || kept.iter().any(|&k| k >= n) {
        return Err(Error::InvalidArgument(format!("keep set {keep:?} must be a nonempty proper subset of 0..{n}")));
    }
    let order: Vec<usize> = kept.iter().copied().chain((0..n).filter(|k| !kept.contains(k))).collect();
    let mut perm = vec![0; n];
    for (pos, &slot) in order.iter().enumerate() {
        perm[slot] = pos;
    }
    let (amps, dims) = permute_axes(state.amplitudes(), &state.dims(), &perm);
    let rows: usize = dims[..kept.len()].iter().product();
    let cols = amps.len() / rows;
    let m = CMatrix::from_row_slice(rows, cols, &amps);
    let rho = &m * m.adjoint();
    let rho = (&rho + rho.adjoint()).scale(0.5);
    DensityOperator::new(rho, 1.0)
}

/// `⟨ψ|Ω|ψ⟩` for an operator on the full tensor space.
pub fn expectation(state: &StateVector, op: &CMatrix) -> Result<C64> {
    let n = state.amplitudes().len();
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::DimensionMismatch(format!("{}×{} operator on a {n}-dimensional space", op.nrows(), op.ncols())));
    }
    let psi = CVector::from_column_slice(state.amplitudes());
    Ok(psi.dotc(&(op * &psi)))
}

/// `⟨ψ|Ω_slot ⊗ I|ψ⟩`.
pub fn expectation_local(state: &StateVector, slot: usize, op: &CMatrix) -> Result<C64> {
    expectation_product(state, &[(slot, op)])
}

/// `⟨ψ|⊗_k Ω_k|ψ⟩` for single-slot factors on distinct slots (identity
/// elsewhere).
pub fn expectation_product(state: &StateVector, factors: &[(usize, &CMatrix)]) -> Result<C64> {
    let dims = state.dims();
    let mut seen = vec![false; dims.len()];
    let mut amps = state.amplitudes().to_vec();
    for &(slot, op) in factors {
        check_slot_operator(state, slot, op)?;
        if seen[slot] {
            return Err(Error::InvalidArgument(format!("slot {slot} appears twice")));
        }
        seen[slot] = true;
        amps = apply_on_slot(&amps, &dims, slot, op);
    }
    Ok(state.amplitudes().iter().zip(&amps).map(|(a, b)| a.conj() * b).sum())
}

/// Which terms of the two-particle "property P is present" projector to
/// build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExchangeProjectorForm {
    /// `P⊗(I−P) + (I−P)⊗P + P⊗P`: at least one particle has the property.
    #[default]
    AtLeastOne,
    /// Drop the `P⊗P` term: exactly one particle has the property.
    ExactlyOne,
}

/// The exchange-symmetric projector `E(1,2)` built from a rank-1
/// single-particle projector.
pub fn build_e(p: &Projector) -> Result<Projector> {
    build_e_with(p, ExchangeProjectorForm::AtLeastOne)
}

pub fn build_e_with(p: &Projector, form: ExchangeProjectorForm) -> Result<Projector> {
    if p.rank() != 1 {
        return Err(Error::InvalidProjector(format!("E(1,2) needs a rank-1 projector, got rank {}", p.rank())));
    }
    let d = p.dim();
    let id = CMatrix::identity(d, d);
    let q = &id - p.matrix();
    let mut e = kron(p.matrix(), &q) + kron(&q, p.matrix());
    if form == ExchangeProjectorForm::AtLeastOne {
        e += kron(p.matrix(), p.matrix());
    }
    let rank = match form {
        ExchangeProjectorForm::AtLeastOne => 2 * d - 1,
        ExchangeProjectorForm::ExactlyOne => 2 * d - 2,
    };
    Ok(Projector { matrix: e, rank })
}

/// The two-particle exchange operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = c(1.0);
        }
    }
    s
}

/// Projector onto the span of eigenvectors of `rho` with eigenvalue above
/// `tol`: the smallest projector carrying the whole weight of `rho`.
pub fn range_projector(rho: &DensityOperator, tol: f64) -> Projector {
    let (values, vectors) = rho.spectrum();
    let r = values.iter().filter(|&&v| v > tol).count();
    Projector::onto_columns(&vectors.columns(0, r).into_owned())
}

/// Orthonormal basis (columns) of the range of `rho`.
pub(crate) fn range_basis(rho: &DensityOperator, tol: f64) -> CMatrix {
    let (values, vectors) = rho.spectrum();
    let r = values.iter().filter(|&&v| v > tol).count();
    vectors.columns(0, r).into_owned()
}

/// Strength of an objective statement about an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatementKind {
    /// A single value is certain.
    Sharp,
    /// The value lies with certainty in a proper subset of the spectrum.
    Unsharp,
    /// The allowed set is the whole spectrum: nothing is learned.
    NoInformation,
}

/// "The value of the observable lies in `values` with certainty."
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyStatement {
    pub observable: CMatrix,
    /// The Borel set, as the distinct eigenvalues of the observable
    /// restricted to the range of the reduced state.
    pub values: Vec<f64>,
    pub kind: StatementKind,
}

impl fmt::Display for PropertyStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        match self.kind {
            StatementKind::Sharp => write!(f, "the observable has the value {} with certainty", vals[0]),
            StatementKind::Unsharp => write!(f, "the observable has a value in {{{}}} with certainty", vals.join(", ")),
            StatementKind::NoInformation => write!(f, "no information: the allowed set {{{}}} is the whole spectrum", vals.join(", ")),
        }
    }
}

fn distinct(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        match out.last() {
            Some(&last) if (v - last).abs() <= tol => {}
            _ => out.push(v),
        }
    }
    out
}

/// The objective (possibly unsharp) property a subsystem with reduced state
/// `rho1` has with respect to `omega`, available only when `omega` commutes
/// with the range projector of `rho1`.
pub fn unsharp_property_report(rho1: &DensityOperator, omega: &CMatrix, tol: f64) -> Result<Option<PropertyStatement>> {
    let defect = hermiticity_defect(omega);
    if defect > OPERATOR_TOL {
        return Err(Error::NotHermitian(defect));
    }
    if omega.nrows() != rho1.dim() {
        return Err(Error::DimensionMismatch(format!("{}×{} observable for a {}-dimensional subsystem", omega.nrows(), omega.ncols(), rho1.dim())));
    }
    let basis = range_basis(rho1, tol);
    let p = column_projector(&basis);
    let commutator = omega * &p - &p * omega;
    if frobenius(&commutator) >= tol.max(OPERATOR_TOL) {
        return Ok(None);
    }
    let scale = omega.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dedup_tol = 1e-9 * scale;
    let restricted = basis.adjoint() * omega * &basis;
    let values = distinct(hermitian_eigen(&restricted)?.0, dedup_tol);
    let spectrum = distinct(hermitian_eigen(omega)?.0, dedup_tol);
    let kind = if values.len() == spectrum.len() {
        StatementKind::NoInformation
    } else if values.len() == 1 {
        StatementKind::Sharp
    } else {
        StatementKind::Unsharp
    };
    Ok(Some(PropertyStatement { observable: omega.clone(), values, kind }))
}
