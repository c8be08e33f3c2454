//! Dense complex linear-algebra helpers shared by the decision procedures.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::DEGENERACY_TOL;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entry of `|m - m†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn to_faer(m: &CMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted in
/// descending order with eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Consistency(format!("Hermitian eigensolver did not converge: {e:?}")))?;
    let raw = eig.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[b].re.total_cmp(&raw[a].re));
    let values = order.iter().map(|&i| raw[i].re).collect();
    let u = eig.U();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Full singular value decomposition `a = U diag(s) V†`, values descending.
pub fn svd(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let f = to_faer(a)
        .svd()
        .map_err(|e| Error::Consistency(format!("singular value decomposition did not converge: {e:?}")))?;
    let values = f.S().column_vector().iter().map(|z| z.re).collect();
    Ok((from_faer(f.U()), values, from_faer(f.V())))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|u⟩⟨v|`.
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Projector onto the span of the (orthonormal) columns of `q`.
pub fn column_projector(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Multiply `v` by a unit phase so that its first component of modulus
/// above `1e-10` is real and positive.
pub fn fix_phase(v: &mut CVector) -> C64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale.max(1.0)) {
        let phase = z.conj() / z.norm();
        *v *= phase;
        phase
    } else {
        ONE
    }
}

/// Pick the standard basis vector with the largest projection onto the part
/// of span(`q`) orthogonal to `chosen` (lowest index on ties), and return
/// that projection normalized. `q` must have orthonormal columns and
/// `chosen` must be orthonormal vectors inside span(`q`).
pub fn pivot_vector(q: &CMatrix, chosen: &[CVector]) -> CVector {
    let d = q.nrows();
    let mut best: Option<(f64, CVector)> = None;
    for j in 0..d {
        // P e_j = q q† e_j
        let coeffs: CVector = q.row(j).adjoint();
        let mut r = q * coeffs;
        orthogonalize(&mut r, chosen);
        let n = r.norm();
        let better = match &best {
            None => true,
            Some((bn, _)) => n > bn + 1e-9,
        };
        if better {
            best = Some((n, r));
        }
    }
    let (n, mut r) = best.expect("ambient dimension is at least 1");
    r /= c(n);
    orthogonalize(&mut r, chosen);
    let n = r.norm();
    r / c(n)
}

/// A deterministic orthonormal basis for the span of the orthonormal
/// columns of `q`, independent of which basis `q` happens to hold.
///
/// Standard basis vectors are projected into the subspace one at a time,
/// always taking the one with the largest remaining projection (see
/// [`pivot_vector`]). Each chosen vector has a real positive entry at its
/// pivot.
pub fn canonical_basis(q: &CMatrix) -> CMatrix {
    let (d, k) = q.shape();
    let mut chosen: Vec<CVector> = Vec::with_capacity(k);
    for _ in 0..k {
        let v = pivot_vector(q, &chosen);
        chosen.push(v);
    }
    let mut out = CMatrix::zeros(d, k);
    for (i, v) in chosen.iter().enumerate() {
        out.set_column(i, v);
    }
    out
}

/// One degenerate block of singular values with a canonical orthonormal
/// basis of the matching left singular subspace.
#[derive(Debug, Clone)]
pub struct SingularBlock {
    pub value: f64,
    pub left: CMatrix,
}

/// Singular values of `a` grouped into degenerate blocks (descending),
/// each with a canonical left basis. Values at or below `floor` are dropped.
pub fn singular_blocks(a: &CMatrix, floor: f64) -> Result<Vec<SingularBlock>> {
    let (u, values, _) = svd(a)?;
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < values.len() && values[i] > floor {
        let mut j = i + 1;
        while j < values.len() && values[j] > floor && (values[i] - values[j]).abs() <= DEGENERACY_TOL {
            j += 1;
        }
        let span = u.columns(i, j - i).into_owned();
        let mean = values[i..j].iter().sum::<f64>() / (j - i) as f64;
        blocks.push(SingularBlock { value: mean, left: canonical_basis(&span) });
        i = j;
    }
    Ok(blocks)
}

/// Remove from `v` its components along the given orthonormal vectors.
pub(crate) fn orthogonalize(v: &mut CVector, against: &[CVector]) {
    for w in against {
        let ov = w.dotc(v);
        *v -= w * ov;
    }
}
