//! Subgroups of fermions: one-particle orthogonality, the embedding of two
//! one-particle-orthogonal factors into an `N`-fermion state, the inverse
//! decision, and the reduced scalar product identities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{exchange_projection, inner, norm_sqr, ModeSpace, Statistics, StateVector};
use crate::linalg::{c, canonical_basis, column_projector, frobenius, svd, CMatrix, CVector, C64};
use crate::operators::{apply_on_slot, partial_trace, range_projector, DensityOperator};
use crate::random::haar_unitary;
use crate::tol::{OCCUPATION_CLUSTER_TOL, OCCUPATION_SUM_TOL, OPO_TOL, RANK_TOL, WITNESS_TOL};

/// Restarts of the randomized search inside degenerate occupation shells.
pub const FALLBACK_RESTARTS: usize = 100;
const FALLBACK_SEED: u64 = 0x6f70_6f5f_7365_6564;
/// Upper bound on Δ/Δ* candidates examined per pass.
const MAX_CANDIDATES: usize = 1 << 16;

/// Cardinalities `M + K = N` of the two subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    m: usize,
    k: usize,
}

impl PartitionSpec {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("both subgroups need at least one particle, got M={m}, K={k}")));
        }
        Ok(Self { m, k })
    }

    /// Split `n` particles as `m + (n − m)`.
    pub fn of(n: usize, m: usize) -> Result<Self> {
        if m >= n {
            return Err(Error::InvalidArgument(format!("M={m} must be smaller than N={n}")));
        }
        Self::new(m, n - m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.m + self.k
    }
}

/// Two one-particle-orthogonal factors whose embedding is the given state.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupFactorization {
    pub pi_m: StateVector,
    pub phi_k: StateVector,
    pub opo_residual: f64,
    /// `|⟨embedded|state⟩|²`.
    pub fidelity: f64,
    /// Orthonormal orbitals (columns) carrying the `M` group.
    pub delta: CMatrix,
    /// Orthonormal orbitals carrying the `K` group.
    pub delta_star: CMatrix,
}

/// A one-particle state is trivially antisymmetric whatever its tag.
fn require_antisymmetric(state: &StateVector) -> Result<()> {
    if state.particles() == 1 {
        return Ok(());
    }
    state.require_statistics(Statistics::Fermion)
}

fn common_dim(state: &StateVector) -> Result<usize> {
    state.common_dim().ok_or(Error::UnequalModeSpaces)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Norm of the contraction of the last slot of `sigma` with the last slot
/// of `conj(phi)`, a tensor over the remaining `M−1` and `K−1` slots. It
/// vanishes exactly when the two states are one-particle orthogonal.
pub fn opo_residual(sigma: &StateVector, phi: &StateVector) -> Result<f64> {
    let d = common_dim(sigma)?;
    let e = common_dim(phi)?;
    if d != e {
        return Err(Error::DimensionMismatch(format!("single-particle dimensions {d} and {e}")));
    }
    let s = sigma.matrix(sigma.particles() - 1);
    let f = phi.matrix(phi.particles() - 1);
    Ok(frobenius(&(s * f.adjoint())))
}

/// One-body density matrix with trace `N` (occupation convention).
pub fn one_rdm(state: &StateVector) -> Result<DensityOperator> {
    require_antisymmetric(state)?;
    let n = state.particles();
    if n == 1 {
        let v = CVector::from_column_slice(state.amplitudes());
        return DensityOperator::new(&v * v.adjoint(), 1.0);
    }
    let rho = partial_trace(state, &[0])?;
    DensityOperator::new(rho.matrix() * c(n as f64), n as f64)
}

/// `Tr[P_σ P_φ]` for the range projectors of the two one-body density
/// matrices: zero exactly when the single-particle supports are orthogonal.
pub fn support_overlap(sigma: &StateVector, phi: &StateVector) -> Result<f64> {
    let ps = range_projector(&one_rdm(sigma)?, RANK_TOL);
    let pf = range_projector(&one_rdm(phi)?, RANK_TOL);
    if ps.dim() != pf.dim() {
        return Err(Error::DimensionMismatch(format!("single-particle dimensions {} and {}", ps.dim(), pf.dim())));
    }
    Ok((ps.matrix() * pf.matrix()).trace().re)
}

/// `√C(N,K) P_A[Π ⊗ Φ]` without any checks or renormalization.
fn embed_raw(pi: &StateVector, phi: &StateVector) -> Result<Vec<C64>> {
    let d = common_dim(pi)?;
    let e = common_dim(phi)?;
    if d != e {
        return Err(Error::DimensionMismatch(format!("single-particle dimensions {d} and {e}")));
    }
    let n = pi.particles() + phi.particles();
    let mut amps = Vec::with_capacity(pi.amplitudes().len() * phi.amplitudes().len());
    for a in pi.amplitudes() {
        amps.extend(phi.amplitudes().iter().map(|b| a * b));
    }
    let projected = exchange_projection(&amps, &vec![d; n], true)?;
    let scale = binomial(n, phi.particles()).sqrt();
    Ok(projected.into_iter().map(|z| z * scale).collect())
}

/// The `N`-fermion state `√C(N,K) P_A[Π ⊗ Φ]`. The factors must be
/// antisymmetric and one-particle orthogonal; the norm of the result is then
/// 1 before any renormalization, which is asserted.
pub fn embed_partition(pi: &StateVector, phi: &StateVector) -> Result<StateVector> {
    require_antisymmetric(pi)?;
    require_antisymmetric(phi)?;
    let residual = opo_residual(pi, phi)?;
    if residual >= OPO_TOL {
        return Err(Error::NotOneParticleOrthogonal(residual));
    }
    let amps = embed_raw(pi, phi)?;
    let norm = norm_sqr(&amps).sqrt();
    if (norm - 1.0).abs() > WITNESS_TOL {
        return Err(Error::Consistency(format!("embedded norm {norm} differs from 1")));
    }
    let n = pi.particles() + phi.particles();
    StateVector::new(vec![pi.modes()[0].clone(); n], amps, Statistics::Fermion)
}

/// A group of natural orbitals sharing one occupation.
#[derive(Debug, Clone)]
struct Shell {
    occupation: f64,
    orbitals: CMatrix,
    /// Any subset of its orbitals may go to either side.
    splittable: bool,
}

/// Natural orbitals grouped by occupation, empty orbitals dropped. Fully
/// occupied shells are splittable: a filled orbital factors out of any
/// antisymmetric state.
fn occupation_shells(rho: &DensityOperator) -> Vec<Shell> {
    let (values, vectors) = rho.spectrum();
    let mut shells = Vec::new();
    let mut i = 0;
    while i < values.len() && values[i] > OCCUPATION_CLUSTER_TOL {
        let mut j = i + 1;
        while j < values.len() && (values[j - 1] - values[j]).abs() <= OCCUPATION_CLUSTER_TOL {
            j += 1;
        }
        let mean = values[i..j].iter().sum::<f64>() / (j - i) as f64;
        shells.push(Shell {
            occupation: mean,
            orbitals: canonical_basis(&vectors.columns(i, j - i).into_owned()),
            splittable: (mean - 1.0).abs() <= OCCUPATION_CLUSTER_TOL,
        });
        i = j;
    }
    shells
}

/// All ways to take orbitals from the shells (whole shells, or any count
/// from a splittable one) whose occupations sum to `m`. Earlier shells are
/// preferred for Δ, larger takes first.
fn candidates(shells: &[Shell], m: usize) -> Vec<Vec<usize>> {
    fn walk(shells: &[Shell], m: f64, i: usize, sum: f64, take: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if out.len() >= MAX_CANDIDATES {
            return;
        }
        if i == shells.len() {
            if (sum - m).abs() <= OCCUPATION_SUM_TOL {
                out.push(take.clone());
            }
            return;
        }
        let count = shells[i].orbitals.ncols();
        let options: Vec<usize> = if shells[i].splittable { (0..=count).rev().collect() } else { vec![count, 0] };
        for t in options {
            let next = sum + t as f64 * shells[i].occupation;
            if next > m + OCCUPATION_SUM_TOL {
                continue;
            }
            take.push(t);
            walk(shells, m, i + 1, next, take, out);
            take.pop();
        }
    }
    let mut out = Vec::new();
    walk(shells, m as f64, 0, 0.0, &mut Vec::new(), &mut out);
    out
}

fn split(shells: &[Shell], take: &[usize]) -> (CMatrix, CMatrix) {
    let mut left: Vec<CVector> = Vec::new();
    let mut right: Vec<CVector> = Vec::new();
    for (shell, &t) in shells.iter().zip(take) {
        for (j, col) in shell.orbitals.column_iter().enumerate() {
            if j < t {
                left.push(col.into_owned());
            } else {
                right.push(col.into_owned());
            }
        }
    }
    let d = shells[0].orbitals.nrows();
    let to_matrix = |v: &[CVector]| {
        let mut m = CMatrix::zeros(d, v.len());
        for (k, col) in v.iter().enumerate() {
            m.set_column(k, col);
        }
        m
    };
    (to_matrix(&left), to_matrix(&right))
}

/// Project the first `M` slots onto Δ and the rest onto Δ*; for a state of
/// the embedded form this leaves `Π ⊗ Φ / √C(N,K)`, whose leading singular
/// pair gives the factors.
fn try_split(state: &StateVector, m: usize, delta: &CMatrix, delta_star: &CMatrix) -> Result<Option<SubgroupFactorization>> {
    let n = state.particles();
    let d = state.modes()[0].dim();
    let dims = state.dims();
    let p_delta = column_projector(delta);
    let p_star = column_projector(delta_star);
    let mut amps = state.amplitudes().to_vec();
    for slot in 0..n {
        let p = if slot < m { &p_delta } else { &p_star };
        amps = apply_on_slot(&amps, &dims, slot, p);
    }
    if norm_sqr(&amps).sqrt() <= RANK_TOL {
        return Ok(None);
    }
    let rows = d.pow(m as u32);
    let x = CMatrix::from_row_slice(rows, amps.len() / rows, &amps);
    let (u, _, _) = svd(&x)?;
    let u1: CVector = u.column(0).into_owned();
    let phi_amps: CVector = x.transpose() * u1.conjugate();

    let clean = |v: &[C64], slots: usize| -> Result<Option<StateVector>> {
        let projected = if slots > 1 { exchange_projection(v, &vec![d; slots], true)? } else { v.to_vec() };
        if norm_sqr(&projected).sqrt() <= RANK_TOL {
            return Ok(None);
        }
        StateVector::new(vec![state.modes()[0].clone(); slots], projected, Statistics::Fermion).map(Some)
    };
    let (Some(pi), Some(phi)) = (clean(u1.as_slice(), m)?, clean(phi_amps.as_slice(), n - m)?) else {
        return Ok(None);
    };
    let opo = opo_residual(&pi, &phi)?;
    if opo >= OPO_TOL {
        return Ok(None);
    }
    let embedded = embed_partition(&pi, &phi)?;
    let overlap = inner(&embedded, state)?;
    let fidelity = overlap.norm_sqr();
    if fidelity <= 1.0 - WITNESS_TOL {
        return Ok(None);
    }
    let phase = overlap / overlap.norm();
    let pi = StateVector::new(pi.modes().to_vec(), pi.amplitudes().iter().map(|z| z * phase).collect(), Statistics::Fermion)?;
    Ok(Some(SubgroupFactorization {
        pi_m: pi,
        phi_k: phi,
        opo_residual: opo,
        fidelity,
        delta: delta.clone(),
        delta_star: delta_star.clone(),
    }))
}

fn search(state: &StateVector, m: usize, shells: &[Shell]) -> Result<Option<SubgroupFactorization>> {
    for take in candidates(shells, m) {
        let (delta, delta_star) = split(shells, &take);
        if delta.ncols() < m || delta_star.ncols() < state.particles() - m {
            continue;
        }
        if let Some(f) = try_split(state, m, &delta, &delta_star)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Find one-particle-orthogonal factors `Π` (`M` particles) and `Φ`
/// (`N−M`) whose embedding reproduces `state`, or `None`.
///
/// Natural orbitals are grouped into occupation shells and split between
/// Δ and Δ* without breaking a shell (filled shells excepted). If that
/// fails and some partially filled shell is degenerate, such shells are
/// rotated at random and split orbital by orbital, up to
/// [`FALLBACK_RESTARTS`] times. That last step is a best effort.
pub fn detect_partition(state: &StateVector, m: usize) -> Result<Option<SubgroupFactorization>> {
    state.require_statistics(Statistics::Fermion)?;
    PartitionSpec::of(state.particles(), m)?;
    common_dim(state)?;
    let shells = occupation_shells(&one_rdm(state)?);
    if shells.is_empty() {
        return Ok(None);
    }
    if let Some(f) = search(state, m, &shells)? {
        return Ok(Some(f));
    }
    if !shells.iter().any(|s| !s.splittable && s.orbitals.ncols() > 1) {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FALLBACK_SEED);
    for _ in 0..FALLBACK_RESTARTS {
        let mut atoms = Vec::new();
        for s in &shells {
            if s.splittable || s.orbitals.ncols() == 1 {
                atoms.push(s.clone());
                continue;
            }
            let rotated = &s.orbitals * haar_unitary(&mut rng, s.orbitals.ncols());
            for col in rotated.column_iter() {
                atoms.push(Shell { occupation: s.occupation, orbitals: CMatrix::from_columns(&[col.into_owned()]), splittable: false });
            }
        }
        if let Some(f) = search(state, m, &atoms)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// All Slater determinants of `n` of the given orthonormal orbitals
/// (columns), in lexicographic order of orbital choice: an orthonormal
/// basis of the `n`-fermion space over their span.
pub fn slater_basis(orbitals: &CMatrix, n: usize) -> Result<Vec<StateVector>> {
    let (d, k) = orbitals.shape();
    if n == 0 || n > k {
        return Err(Error::InvalidArgument(format!("cannot place {n} fermions in {k} orbitals")));
    }
    let space = ModeSpace::new(d)?;
    let mut out = Vec::new();
    let mut choice: Vec<usize> = (0..n).collect();
    loop {
        let mut amps = vec![c(1.0)];
        for &j in &choice {
            let col = orbitals.column(j);
            let mut next = Vec::with_capacity(amps.len() * d);
            for a in &amps {
                next.extend(col.iter().map(|x| a * x));
            }
            amps = next;
        }
        let projected = if n > 1 { exchange_projection(&amps, &vec![d; n], true)? } else { amps };
        out.push(StateVector::new(vec![space.clone(); n], projected, Statistics::Fermion)?);
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if choice[i] < k - n + i {
                choice[i] += 1;
                for j in i + 1..n {
                    choice[j] = choice[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Residuals of the two reduced scalar product identities,
///
/// `Σ_l |⟨E(χ, Ξ_l) | E(τ, ν)⟩|² = |⟨χ|τ⟩|²` and
/// `Σ_j |⟨E(Υ_j, μ) | E(τ, ν)⟩|² = |⟨μ|ν⟩|²`,
///
/// with `E(x, y) = √C(N,K) P_A[x ⊗ y]`, `Ξ_l` = `basis_k` and `Υ_j` =
/// `basis_m`. Every pairing of an `M`-side with a `K`-side state must be one-particle
/// orthogonal.
pub fn reduced_scalar_identity_residuals(
    chi: &StateVector,
    tau: &StateVector,
    mu: &StateVector,
    nu: &StateVector,
    basis_k: &[StateVector],
    basis_m: &[StateVector],
) -> Result<(f64, f64)> {
    let m_side: Vec<&StateVector> = [chi, tau].into_iter().chain(basis_m).collect();
    let k_side: Vec<&StateVector> = [mu, nu].into_iter().chain(basis_k).collect();
    for s in m_side.iter().chain(&k_side) {
        require_antisymmetric(s)?;
    }
    for a in &m_side {
        for b in &k_side {
            let r = opo_residual(a, b)?;
            if r >= OPO_TOL {
                return Err(Error::NotOneParticleOrthogonal(r));
            }
        }
    }
    reduced_scalar_identity_residuals_unchecked(chi, tau, mu, nu, basis_k, basis_m)
}

/// Same as [`reduced_scalar_identity_residuals`] without the
/// one-particle-orthogonality check, so the identities can be observed to
/// fail when it does not hold.
pub fn reduced_scalar_identity_residuals_unchecked(
    chi: &StateVector,
    tau: &StateVector,
    mu: &StateVector,
    nu: &StateVector,
    basis_k: &[StateVector],
    basis_m: &[StateVector],
) -> Result<(f64, f64)> {
    let target = embed_raw(tau, nu)?;
    let mut lhs1 = 0.0;
    for xi in basis_k {
        lhs1 += dot(&embed_raw(chi, xi)?, &target).norm_sqr();
    }
    let mut lhs2 = 0.0;
    for ups in basis_m {
        lhs2 += dot(&embed_raw(ups, mu)?, &target).norm_sqr();
    }
    let rhs1 = inner(chi, tau)?.norm_sqr();
    let rhs2 = inner(mu, nu)?.norm_sqr();
    Ok(((lhs1 - rhs1).abs(), (lhs2 - rhs2).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{antisymmetrize, make_factorized};
    use crate::linalg::ONE;

    fn basis(d: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[i] = ONE;
        v
    }

    fn single(d: usize, i: usize) -> StateVector {
        make_factorized(&[basis(d, i)]).unwrap()
    }

    fn det(d: usize, orbitals: &[usize]) -> StateVector {
        let factors: Vec<CVector> = orbitals.iter().map(|&i| basis(d, i)).collect();
        antisymmetrize(&make_factorized(&factors).unwrap()).unwrap().unwrap()
    }

    #[test]
    fn opo_examples() {
        assert!(opo_residual(&det(4, &[0, 1]), &det(4, &[2, 3])).unwrap() < 1e-15);
        // hand contraction: one surviving entry of modulus 1/2
        assert!((opo_residual(&det(4, &[0, 1]), &det(4, &[1, 2])).unwrap() - 0.5).abs() < 1e-14);
        assert!((opo_residual(&single(3, 0), &single(3, 0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(opo_residual(&single(3, 0), &single(4, 0)).is_err());
    }

    #[test]
    fn one_rdm_occupations() {
        let rho = one_rdm(&det(4, &[0, 1])).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| rho.matrix()[(i, i)].re).collect();
        assert!(diag.iter().zip([1.0, 1.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-14));
        let rho = one_rdm(&det(5, &[0, 2, 4])).unwrap();
        assert!((rho.matrix()[(4, 4)].re - 1.0).abs() < 1e-14);
        assert!(one_rdm(&make_factorized(&[basis(2, 0), basis(2, 1)]).unwrap()).is_err());
    }

    #[test]
    fn embed_two_singles_is_the_pair() {
        let e = embed_partition(&single(3, 0), &single(3, 1)).unwrap();
        assert!((inner(&e, &det(3, &[0, 1])).unwrap() - ONE).norm() < 1e-14);
        assert!(matches!(embed_partition(&single(3, 0), &single(3, 0)), Err(Error::NotOneParticleOrthogonal(_))));
    }

    #[test]
    fn embed_two_pairs_is_the_determinant() {
        let e = embed_partition(&det(4, &[0, 1]), &det(4, &[2, 3])).unwrap();
        assert!((inner(&e, &det(4, &[0, 1, 2, 3])).unwrap() - ONE).norm() < 1e-14);
    }

    #[test]
    fn detect_on_a_determinant_uses_lowest_orbitals() {
        let f = detect_partition(&det(4, &[0, 1, 2, 3]), 2).unwrap().unwrap();
        assert!(f.fidelity > 1.0 - 1e-12);
        assert!((inner(&f.pi_m, &det(4, &[0, 1])).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(detect_partition(&det(4, &[0, 1, 2, 3]), 4).is_err());
        assert!(detect_partition(&det(4, &[0, 1, 2, 3]), 0).is_err());
    }

    #[test]
    fn slater_basis_is_orthonormal() {
        let b = slater_basis(&CMatrix::identity(4, 4), 2).unwrap();
        assert_eq!(b.len(), 6);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((inner(x, y).unwrap().norm() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reduced_identities_trivial_case() {
        let orb_m = CMatrix::identity(8, 8).columns(0, 4).into_owned();
        let orb_k = CMatrix::identity(8, 8).columns(4, 4).into_owned();
        let bm = slater_basis(&orb_m, 2).unwrap();
        let bk = slater_basis(&orb_k, 2).unwrap();
        let (r1, r2) = reduced_scalar_identity_residuals(&bm[0], &bm[0], &bk[1], &bk[1], &bk, &bm).unwrap();
        assert!(r1 < 1e-12 && r2 < 1e-12);
        let (r1, _) = reduced_scalar_identity_residuals(&bm[0], &bm[1], &bk[1], &bk[1], &bk, &bm).unwrap();
        assert!(r1 < 1e-12);
    }
}
