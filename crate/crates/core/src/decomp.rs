//! Canonical forms of two-particle amplitude matrices.
//!
//! - Schmidt: singular value decomposition of `a(i, j)`.
//! - Slater: for antisymmetric `A`, a unitary congruence to 2×2 blocks,
//!   `A = Σ_k c_k (a_k b_kᵀ − b_k a_kᵀ)`.
//! - Takagi: for symmetric `S`, `S = Σ_k v_k u_k u_kᵀ` with orthonormal `u_k`.
//!
//! All three start from the singular value decomposition; the left singular
//! subspaces are the eigenspaces of `A A†`. Inside a degenerate block the
//! basis is fixed by [`canonical_basis`](crate::linalg::canonical_basis), so
//! results do not depend on the solver's arbitrary choices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::linalg::{c, fix_phase, frobenius, orthogonalize, pivot_vector, singular_blocks, CMatrix, CVector, C64};
use crate::tol::{OPERATOR_TOL, RANK_TOL, WITNESS_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Descending, nonzero.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<CVector>,
    pub right_basis: Vec<CVector>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    /// `Σ_k s_k u_k v_kᵀ`.
    pub fn reconstruct(&self) -> CMatrix {
        let (d1, d2) = (self.left_basis.first().map_or(0, |v| v.len()), self.right_basis.first().map_or(0, |v| v.len()));
        let mut m = CMatrix::zeros(d1, d2);
        for ((s, u), v) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            m += u * v.transpose() * c(*s);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterDecomposition {
    /// One per 2×2 block, descending.
    pub coefficients: Vec<f64>,
    pub mode_pairs: Vec<(CVector, CVector)>,
    pub slater_rank: usize,
}

impl SlaterDecomposition {
    /// `Σ_k c_k (a_k b_kᵀ − b_k a_kᵀ)`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.mode_pairs.first().map_or(0, |(a, _)| a.len());
        let mut m = CMatrix::zeros(d, d);
        for (ck, (a, b)) in self.coefficients.iter().zip(&self.mode_pairs) {
            m += (a * b.transpose() - b * a.transpose()) * c(*ck);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TakagiDecomposition {
    /// Descending, nonzero.
    pub values: Vec<f64>,
    pub modes: Vec<CVector>,
    pub rank: usize,
}

impl TakagiDecomposition {
    /// `Σ_k v_k u_k u_kᵀ`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.modes.first().map_or(0, |u| u.len());
        let mut m = CMatrix::zeros(d, d);
        for (v, u) in self.values.iter().zip(&self.modes) {
            m += u * u.transpose() * c(*v);
        }
        m
    }
}

/// Summary of a decomposition for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub kind: String,
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Factor vectors as `[re, im]` pairs, grouped per term.
    pub vectors: Vec<Vec<Vec<[f64; 2]>>>,
}

pub(crate) fn vector_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl From<&SchmidtDecomposition> for DecompositionSummary {
    fn from(d: &SchmidtDecomposition) -> Self {
        Self {
            kind: "schmidt".into(),
            coefficients: d.coefficients.clone(),
            rank: d.rank,
            vectors: d.left_basis.iter().zip(&d.right_basis).map(|(u, v)| vec![vector_to_pairs(u), vector_to_pairs(v)]).collect(),
        }
    }
}

impl From<&SlaterDecomposition> for DecompositionSummary {
    fn from(d: &SlaterDecomposition) -> Self {
        Self {
            kind: "slater".into(),
            coefficients: d.coefficients.clone(),
            rank: d.slater_rank,
            vectors: d.mode_pairs.iter().map(|(a, b)| vec![vector_to_pairs(a), vector_to_pairs(b)]).collect(),
        }
    }
}

impl From<&TakagiDecomposition> for DecompositionSummary {
    fn from(d: &TakagiDecomposition) -> Self {
        Self {
            kind: "takagi".into(),
            coefficients: d.values.clone(),
            rank: d.rank,
            vectors: d.modes.iter().map(|u| vec![vector_to_pairs(u)]).collect(),
        }
    }
}

/// `Aᵀ conj(u)`: contraction of the first slot with `⟨u|`.
fn contract_first(a: &CMatrix, u: &CVector) -> CVector {
    a.transpose() * u.conjugate()
}

/// Dropped coefficients each contribute at most `floor` to the residual.
fn check_reconstruction(kind: &str, original: &CMatrix, rebuilt: &CMatrix, floor: f64) -> Result<()> {
    let residual = frobenius(&(original - rebuilt));
    let allowed = WITNESS_TOL.max(floor * (original.nrows() as f64).sqrt());
    if residual > allowed {
        return Err(Error::Consistency(format!("{kind} reconstruction residual {residual:.3e}")));
    }
    Ok(())
}

/// Schmidt decomposition of a two-particle state (any statistics tag).
pub fn schmidt(state: &StateVector) -> Result<SchmidtDecomposition> {
    schmidt_above(state, RANK_TOL)
}

/// Like [`schmidt`], dropping coefficients at or below `floor`.
pub fn schmidt_above(state: &StateVector, floor: f64) -> Result<SchmidtDecomposition> {
    let a = state.pair_matrix()?;
    let mut out = SchmidtDecomposition { coefficients: vec![], left_basis: vec![], right_basis: vec![], rank: 0 };
    for block in singular_blocks(&a, floor)? {
        for u in block.left.column_iter() {
            let u: CVector = u.into_owned();
            let v = contract_first(&a, &u) / c(block.value);
            out.coefficients.push(block.value);
            out.left_basis.push(u);
            out.right_basis.push(v);
        }
    }
    out.rank = out.coefficients.len();
    check_reconstruction("schmidt", &a, &out.reconstruct(), floor)?;
    Ok(out)
}

/// Slater decomposition of an antisymmetric two-particle amplitude matrix.
pub fn slater(state: &StateVector) -> Result<SlaterDecomposition> {
    slater_above(state, RANK_TOL)
}

/// Like [`slater`], dropping coefficients at or below `floor`.
pub fn slater_above(state: &StateVector, floor: f64) -> Result<SlaterDecomposition> {
    let a = state.pair_matrix()?;
    let defect = frobenius(&(&a + a.transpose()));
    if defect > OPERATOR_TOL {
        return Err(Error::SymmetryViolation(format!("amplitude matrix is not antisymmetric (defect {defect:.3e})")));
    }
    let mut out = SlaterDecomposition { coefficients: vec![], mode_pairs: vec![], slater_rank: 0 };
    for block in singular_blocks(&a, floor)? {
        let dim = block.left.ncols();
        if dim % 2 != 0 {
            return Err(Error::Consistency(format!("odd degenerate block of dimension {dim} in an antisymmetric matrix")));
        }
        let mut chosen: Vec<CVector> = Vec::with_capacity(dim);
        while chosen.len() < dim {
            let first = pivot_vector(&block.left, &chosen);
            let mut partner = contract_first(&a, &first);
            chosen.push(first.clone());
            orthogonalize(&mut partner, &chosen);
            let norm = partner.norm();
            if norm <= floor {
                return Err(Error::Consistency("vanishing Slater partner inside a nonzero block".into()));
            }
            partner /= c(norm);
            chosen.push(partner.clone());
            // c = ⟨b| Aᵀ conj(a)⟩ is real positive by construction
            let coefficient = partner.dotc(&contract_first(&a, &first)).re;
            out.coefficients.push(coefficient);
            out.mode_pairs.push((first, partner));
        }
    }
    out.slater_rank = out.coefficients.len();
    check_reconstruction("slater", &a, &out.reconstruct(), floor)?;
    Ok(out)
}

/// Takagi factorization of a symmetric two-particle amplitude matrix.
pub fn takagi(state: &StateVector) -> Result<TakagiDecomposition> {
    takagi_above(state, RANK_TOL)
}

/// Like [`takagi`], dropping coefficients at or below `floor`.
pub fn takagi_above(state: &StateVector, floor: f64) -> Result<TakagiDecomposition> {
    let s = state.pair_matrix()?;
    let defect = frobenius(&(&s - s.transpose()));
    if defect > OPERATOR_TOL {
        return Err(Error::SymmetryViolation(format!("amplitude matrix is not symmetric (defect {defect:.3e})")));
    }
    let mut out = TakagiDecomposition { values: vec![], modes: vec![], rank: 0 };
    for block in singular_blocks(&s, floor)? {
        let sigma = block.value;
        // u ↦ S conj(u)/σ is an antiunitary involution on the block; its
        // fixed points are Takagi vectors.
        let conj_map = |u: &CVector| -> CVector { &s * u.conjugate() / c(sigma) };
        let mut chosen: Vec<CVector> = Vec::with_capacity(block.left.ncols());
        while chosen.len() < block.left.ncols() {
            let u = pivot_vector(&block.left, &chosen);
            let ju = conj_map(&u);
            let plus = &u + &ju;
            let minus = (&u - &ju) * C64::new(0.0, 1.0);
            let mut x = if plus.norm() >= minus.norm() { plus } else { minus };
            orthogonalize(&mut x, &chosen);
            let n = x.norm();
            x /= c(n);
            // ±x are both fixed points; pick the sign with a positive leading real part
            if let Some(z) = x.iter().find(|z| z.norm() > 1e-8) {
                if z.re < 0.0 {
                    x = -x;
                }
            }
            out.values.push(sigma);
            out.modes.push(x.clone());
            chosen.push(x);
        }
    }
    out.rank = out.values.len();
    check_reconstruction("takagi", &s, &out.reconstruct(), floor)?;
    Ok(out)
}

/// Normalize `v` and apply the phase convention (first nonzero entry real
/// positive).
pub fn canonical_vector(v: &CVector) -> CVector {
    let mut v = v.normalize();
    fix_phase(&mut v);
    v
}
