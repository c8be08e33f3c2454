//! Entanglement verdicts for two-particle pure states and the properties
//! their constituents objectively possess.
//!
//! - Distinguishable pairs: Schmidt rank 1, cross-checked against the rank
//!   of the reduced state and the best rank-1 projector expectation.
//! - Fermion pairs: Slater rank 1.
//! - Boson pairs: Takagi rank 1, or rank 2 with equal values.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomp::{canonical_vector, schmidt_above, slater_above, takagi_above};
use crate::error::{Error, Result};
use crate::hilbert::{antisymmetrize, make_factorized, symmetrize, ModeSpace, Statistics, StateVector};
use crate::linalg::{c, hermiticity_defect, CMatrix, CVector, C64};
use crate::operators::{build_e, expectation, expectation_local, expectation_product, partial_trace, range_projector, unsharp_property_report, Projector, PropertyStatement};
use crate::tol::{Tolerances, OPERATOR_TOL};

/// Second Schmidt coefficients up to this size may legitimately split the
/// three distinguishable-pair conditions, since each uses its own cutoff.
const AMBIGUOUS_BAND: f64 = 1e-4;

/// Which rule decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Distinguishable pair with Schmidt rank 1.
    SchmidtRank1,
    /// Entangled distinguishable pair whose reduced state still has a
    /// proper range.
    RangePartial,
    /// Entangled distinguishable pair whose reduced state has full range.
    RangeFull,
    SlaterRank1,
    SlaterRankGt1,
    /// Both bosons in the same state.
    BosonSameProduct,
    /// Symmetrized product of two orthogonal states.
    BosonOrthogonalSym,
    BosonEntangled,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Factor states explaining a non-entangled verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `|first⟩ ⊗ |second⟩`.
    Product { first: CVector, second: CVector },
    /// Antisymmetrized `|a⟩ ⊗ |b⟩`, `a ⊥ b`.
    Antisymmetrized { a: CVector, b: CVector },
    /// Symmetrized `|a⟩ ⊗ |b⟩`, `a ⊥ b`.
    SymmetrizedOrthogonal { a: CVector, b: CVector },
    /// `|a⟩ ⊗ |a⟩`.
    SameState { a: CVector },
}

impl Witness {
    /// The state the witness describes, rebuilt from its factors.
    pub fn reconstruct(&self) -> Result<StateVector> {
        match self {
            Witness::Product { first, second } => make_factorized(&[first.clone(), second.clone()]),
            Witness::Antisymmetrized { a, b } => antisymmetrize(&make_factorized(&[a.clone(), b.clone()])?)?
                .ok_or_else(|| Error::Consistency("antisymmetrized witness vanishes".into())),
            Witness::SymmetrizedOrthogonal { a, b } => symmetrize(&make_factorized(&[a.clone(), b.clone()])?),
            Witness::SameState { a } => make_factorized(&[a.clone(), a.clone()])?.with_statistics(Statistics::Boson),
        }
    }

    /// The vector whose rank-1 projector is the canonical witness property.
    pub fn property_vector(&self) -> &CVector {
        match self {
            Witness::Product { first, .. } => first,
            Witness::Antisymmetrized { a, .. } | Witness::SymmetrizedOrthogonal { a, .. } | Witness::SameState { a } => a,
        }
    }

    pub fn vectors(&self) -> Vec<&CVector> {
        match self {
            Witness::Product { first, second } => vec![first, second],
            Witness::Antisymmetrized { a, b } | Witness::SymmetrizedOrthogonal { a, b } => vec![a, b],
            Witness::SameState { a } => vec![a],
        }
    }
}

/// Outcome of an entanglement decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub entangled: bool,
    pub criterion: Criterion,
    /// Present exactly when `entangled` is false.
    pub witness: Option<Witness>,
    pub diagnostics: BTreeMap<String, f64>,
    /// Further vectors whose projectors serve as witness equally well.
    pub alternates: Vec<CVector>,
    /// Prose attributions of the properties the constituents possess.
    pub statements: Vec<String>,
}

impl Verdict {
    /// Rank-1 projector of the canonical witness vector.
    pub fn witness_projector(&self) -> Option<Projector> {
        self.witness.as_ref().and_then(|w| Projector::onto(w.property_vector()).ok())
    }
}

/// How much a subsystem objectively knows about itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyLevel {
    /// The reduced state is pure: a complete set of properties.
    Complete,
    /// Some, but not all, sharp or unsharp properties.
    Partial,
    /// The reduced state has full range.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub slot: usize,
    pub level: PropertyLevel,
    pub range_projector: Projector,
    pub statements: Vec<PropertyStatement>,
    /// Eigenvalues of the reduced state, descending.
    pub reduced_spectrum: Vec<f64>,
}

/// Result of comparing `⟨A⊗B⟩` with `⟨A⊗I⟩⟨I⊗B⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationCheck {
    pub joint: C64,
    pub product: C64,
    pub residual: f64,
    pub factorizes: bool,
}

/// A rank-1 projector `P` with `⟨E(1,2)⟩ = 1`, together with the partner
/// vector completing the (anti)symmetrized product.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyWitness {
    pub vector: CVector,
    pub partner: CVector,
    pub projector: Projector,
    pub e_expectation: f64,
}

/// Short human-readable form of a single-particle vector in terms of the
/// basis labels of `space`.
pub fn describe_vector(v: &CVector, space: &ModeSpace) -> String {
    let v = canonical_vector(v);
    let terms: Vec<(usize, C64)> = v.iter().copied().enumerate().filter(|(_, z)| z.norm() > 1e-9).collect();
    if terms.len() == 1 {
        return space.label(terms[0].0);
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|(i, z)| {
            let label = space.label(*i);
            if z.im.abs() <= 1e-9 {
                format!("{:.4}·{label}", z.re)
            } else if z.re.abs() <= 1e-9 {
                format!("{:.4}i·{label}", z.im)
            } else {
                format!("({:.4}{:+.4}i)·{label}", z.re, z.im)
            }
        })
        .collect();
    parts.join(" + ")
}

fn residual_to(state: &StateVector, rebuilt: &StateVector) -> f64 {
    state.amplitudes().iter().zip(rebuilt.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn verify_witness(state: &StateVector, witness: &Witness, tol: f64) -> Result<f64> {
    let rebuilt = witness.reconstruct()?;
    let residual = residual_to(state, &rebuilt);
    if residual > tol {
        return Err(Error::Consistency(format!("witness reconstructs the state only to {residual:.3e}")));
    }
    Ok(residual)
}

/// `⟨ψ|E(1,2)|ψ⟩` for the projector onto `v`.
pub fn e_expectation(state: &StateVector, v: &CVector) -> Result<f64> {
    let e = build_e(&Projector::onto(v)?)?;
    Ok(expectation(state, e.matrix())?.re)
}

fn check_unit_expectation(value: f64, tol: f64) -> Result<()> {
    if (1.0 - value).abs() > tol {
        return Err(Error::Consistency(format!("witness projector expectation {value} differs from 1")));
    }
    Ok(())
}

pub fn classify_distinguishable_pair(state: &StateVector) -> Result<Verdict> {
    classify_distinguishable_pair_with(state, &Tolerances::default())
}

/// Decide a distinguishable pair three ways: the best rank-1 projector on
/// slot 0 (top Schmidt vector), the rank of the reduced state, and the
/// Schmidt rank. Disagreement outside a narrow band near the thresholds is
/// an internal error.
pub fn classify_distinguishable_pair_with(state: &StateVector, tol: &Tolerances) -> Result<Verdict> {
    state.require_particles(2)?;
    state.require_statistics(Statistics::Distinguishable)?;
    let sd = schmidt_above(state, tol.rank)?;
    let rho = partial_trace(state, &[0])?;
    let (spectrum, _) = rho.spectrum();
    let reduced_rank = spectrum.iter().filter(|&&v| v > tol.rank).count();
    let u1 = sd.left_basis.first().ok_or_else(|| Error::Consistency("empty Schmidt decomposition".into()))?;
    let best = expectation_local(state, 0, Projector::onto(u1)?.matrix())?.re;

    let by_projector = 1.0 - best <= tol.witness;
    let by_range = reduced_rank == 1;
    let by_schmidt = sd.rank == 1;
    let second = sd.coefficients.get(1).copied().unwrap_or(0.0);
    let ambiguous = !(by_projector == by_range && by_range == by_schmidt);
    if ambiguous && second > AMBIGUOUS_BAND {
        return Err(Error::Consistency(format!(
            "product criteria disagree: projector {by_projector}, range {by_range}, Schmidt {by_schmidt}"
        )));
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("schmidt_rank".into(), sd.rank as f64);
    diagnostics.insert("reduced_rank".into(), reduced_rank as f64);
    diagnostics.insert("max_projector_expectation".into(), best);
    diagnostics.insert("top_reduced_eigenvalue".into(), spectrum[0]);
    diagnostics.insert("second_schmidt_coefficient".into(), second);
    diagnostics.insert("criteria_split_near_threshold".into(), if ambiguous { 1.0 } else { 0.0 });

    let space0 = &state.modes()[0];
    let space1 = &state.modes()[1];
    let d0 = space0.dim();
    if by_schmidt {
        let witness = Witness::Product { first: sd.left_basis[0].clone(), second: sd.right_basis[0].clone() };
        let residual = verify_witness(state, &witness, tol.witness)?;
        diagnostics.insert("reconstruction_residual".into(), residual);
        let statements = vec![
            format!("particle 0 has the property {}", describe_vector(&sd.left_basis[0], space0)),
            format!("particle 1 has the property {}", describe_vector(&sd.right_basis[0], space1)),
        ];
        return Ok(Verdict {
            entangled: false,
            criterion: Criterion::SchmidtRank1,
            witness: Some(witness),
            diagnostics,
            alternates: vec![],
            statements,
        });
    }
    let (criterion, statements) = if reduced_rank >= d0 {
        (Criterion::RangeFull, vec!["particle 0 possesses no sharp or unsharp property".to_string()])
    } else {
        (
            Criterion::RangePartial,
            vec![format!("particle 0 lies with certainty in a {reduced_rank}-dimensional subspace of its {d0}-dimensional space")],
        )
    };
    Ok(Verdict { entangled: true, criterion, witness: None, diagnostics, alternates: vec![], statements })
}

pub fn property_report(state: &StateVector, slot: usize) -> Result<PropertyReport> {
    property_report_with(state, slot, &[], &Tolerances::default())
}

/// Classify the properties of the particle in `slot` as complete, partial
/// or none. The range projector always yields a sharp statement (value 1);
/// each extra observable yields a statement when it commutes with it.
pub fn property_report_with(state: &StateVector, slot: usize, observables: &[CMatrix], tol: &Tolerances) -> Result<PropertyReport> {
    state.require_particles(2)?;
    if slot >= 2 {
        return Err(Error::InvalidArgument(format!("slot {slot} out of range for a pair")));
    }
    let rho = partial_trace(state, &[slot])?;
    let projector = range_projector(&rho, tol.rank);
    let level = if projector.rank() == 1 {
        PropertyLevel::Complete
    } else if projector.is_identity() {
        PropertyLevel::None
    } else {
        PropertyLevel::Partial
    };
    let mut statements = Vec::new();
    let check_tol = tol.rank.max(OPERATOR_TOL);
    for omega in std::iter::once(projector.matrix()).chain(observables.iter()) {
        if let Some(s) = unsharp_property_report(&rho, omega, check_tol)? {
            statements.push(s);
        }
    }
    Ok(PropertyReport { slot, level, range_projector: projector, statements, reduced_spectrum: rho.spectrum().0 })
}

/// Compare `⟨A⊗B⟩` with `⟨A⊗I⟩⟨I⊗B⟩`; `factorizes` when they differ by
/// less than `tol`.
pub fn correlation_factorizes(state: &StateVector, a: &CMatrix, b: &CMatrix, tol: f64) -> Result<CorrelationCheck> {
    state.require_particles(2)?;
    for m in [a, b] {
        let defect = hermiticity_defect(m);
        if defect > OPERATOR_TOL {
            return Err(Error::NotHermitian(defect));
        }
    }
    let joint = expectation_product(state, &[(0, a), (1, b)])?;
    let product = expectation_local(state, 0, a)? * expectation_local(state, 1, b)?;
    let residual = (joint - product).norm();
    Ok(CorrelationCheck { joint, product, residual, factorizes: residual < tol })
}

fn identical_statements(kind: &str, vectors: &[&CVector], space: &ModeSpace) -> Vec<String> {
    match vectors {
        [a] => vec![format!("both particles have the property {}", describe_vector(a, space))],
        _ => vectors
            .iter()
            .map(|v| format!("there is a {kind} with the property {}", describe_vector(v, space)))
            .collect(),
    }
}

pub fn classify_fermion_pair(state: &StateVector) -> Result<Verdict> {
    classify_fermion_pair_with(state, &Tolerances::default())
}

/// Non-entangled exactly when the Slater rank is 1; the witness pair is
/// cross-checked by a unit expectation of `E(1,2)`.
pub fn classify_fermion_pair_with(state: &StateVector, tol: &Tolerances) -> Result<Verdict> {
    state.require_particles(2)?;
    state.require_statistics(Statistics::Fermion)?;
    let sd = slater_above(state, tol.rank)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("slater_rank".into(), sd.slater_rank as f64);
    for (k, ck) in sd.coefficients.iter().enumerate() {
        diagnostics.insert(format!("slater_coefficient_{k}"), *ck);
    }
    let leading = sd.coefficients.first().copied().unwrap_or(0.0);
    diagnostics.insert("antisymmetrized_product_fidelity".into(), 2.0 * leading * leading);
    if sd.slater_rank != 1 {
        return Ok(Verdict {
            entangled: true,
            criterion: Criterion::SlaterRankGt1,
            witness: None,
            diagnostics,
            alternates: vec![],
            statements: vec!["no particle can be attributed a complete set of properties".into()],
        });
    }
    let (a, b) = sd.mode_pairs[0].clone();
    let witness = Witness::Antisymmetrized { a: a.clone(), b: b.clone() };
    diagnostics.insert("reconstruction_residual".into(), verify_witness(state, &witness, tol.witness)?);
    let e = e_expectation(state, &a)?;
    check_unit_expectation(e, tol.witness)?;
    diagnostics.insert("e_expectation".into(), e);
    let statements = identical_statements("particle", &[&a, &b], &state.modes()[0]);
    Ok(Verdict { entangled: false, criterion: Criterion::SlaterRank1, witness: Some(witness), diagnostics, alternates: vec![b], statements })
}

pub fn classify_boson_pair(state: &StateVector) -> Result<Verdict> {
    classify_boson_pair_with(state, &Tolerances::default())
}

/// Non-entangled when the Takagi rank is 1 (same state twice) or 2 with
/// equal values (symmetrized orthogonal pair). The equality test is a hard
/// threshold; its margin is reported.
pub fn classify_boson_pair_with(state: &StateVector, tol: &Tolerances) -> Result<Verdict> {
    state.require_particles(2)?;
    state.require_statistics(Statistics::Boson)?;
    let td = takagi_above(state, tol.rank)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("takagi_rank".into(), td.rank as f64);
    for (k, v) in td.values.iter().enumerate() {
        diagnostics.insert(format!("takagi_value_{k}"), *v);
    }
    if td.rank >= 2 {
        diagnostics.insert("takagi_margin".into(), (td.values[0] - td.values[1]).abs());
    }
    let (criterion, witness, alternates) = match td.rank {
        1 => (Criterion::BosonSameProduct, Some(Witness::SameState { a: td.modes[0].clone() }), vec![]),
        2 if (td.values[0] - td.values[1]).abs() < tol.boson_equal => {
            let s = 0.5f64.sqrt();
            let i = C64::new(0.0, 1.0);
            let a = (&td.modes[0] + &td.modes[1] * i) * c(s);
            let b = (&td.modes[0] - &td.modes[1] * i) * c(s);
            (Criterion::BosonOrthogonalSym, Some(Witness::SymmetrizedOrthogonal { a, b: b.clone() }), vec![b])
        }
        _ => (Criterion::BosonEntangled, None, vec![]),
    };
    let Some(witness) = witness else {
        return Ok(Verdict {
            entangled: true,
            criterion,
            witness: None,
            diagnostics,
            alternates,
            statements: vec!["the pair is not a symmetrized product of orthogonal or equal states".into()],
        });
    };
    diagnostics.insert("reconstruction_residual".into(), verify_witness(state, &witness, tol.witness)?);
    let e = e_expectation(state, witness.property_vector())?;
    check_unit_expectation(e, tol.witness)?;
    diagnostics.insert("e_expectation".into(), e);
    let statements = identical_statements("particle", &witness.vectors(), &state.modes()[0]);
    Ok(Verdict { entangled: false, criterion, witness: Some(witness), diagnostics, alternates, statements })
}

/// Dispatch on the statistics tag.
pub fn classify_pair(state: &StateVector, tol: &Tolerances) -> Result<Verdict> {
    match state.statistics() {
        Statistics::Distinguishable => classify_distinguishable_pair_with(state, tol),
        Statistics::Fermion => classify_fermion_pair_with(state, tol),
        Statistics::Boson => classify_boson_pair_with(state, tol),
    }
}

pub fn complete_property_witness(state: &StateVector) -> Result<Option<PropertyWitness>> {
    complete_property_witness_with(state, &Tolerances::default())
}

/// A rank-1 projector whose `E(1,2)` has unit expectation, if the pair is
/// an (anti)symmetrized product. For bosons the two factors need not be
/// orthogonal: a Takagi pair `v₁, v₂` gives the factors
/// `u₁ ± i√(v₂/v₁) u₂`.
pub fn complete_property_witness_with(state: &StateVector, tol: &Tolerances) -> Result<Option<PropertyWitness>> {
    state.require_particles(2)?;
    let (vector, partner) = match state.statistics() {
        Statistics::Fermion => {
            let sd = slater_above(state, tol.rank)?;
            if sd.slater_rank != 1 {
                return Ok(None);
            }
            sd.mode_pairs[0].clone()
        }
        Statistics::Boson => {
            let td = takagi_above(state, tol.rank)?;
            match td.rank {
                1 => (td.modes[0].clone(), td.modes[0].clone()),
                2 => {
                    let t = C64::new(0.0, (td.values[1] / td.values[0]).sqrt());
                    let phi = (&td.modes[0] + &td.modes[1] * t).normalize();
                    let xi = (&td.modes[0] - &td.modes[1] * t).normalize();
                    (phi, xi)
                }
                _ => return Ok(None),
            }
        }
        Statistics::Distinguishable => {
            return Err(Error::WrongStatistics { expected: "fermion or boson".into(), found: "distinguishable".into() })
        }
    };
    let projector = Projector::onto(&vector)?;
    let e = expectation(state, build_e(&projector)?.matrix())?.re;
    check_unit_expectation(e, tol.witness)?;
    Ok(Some(PropertyWitness { vector, partner, projector, e_expectation: e }))
}
