//! Random states, unitaries and observables for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::hilbert::{antisymmetrize, make_factorized, symmetrize, ModeSpace, Statistics, StateVector};
use crate::linalg::{c, CMatrix, CVector, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unnormalized complex Gaussian vector; normalized, it is Haar-distributed.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    gaussian_vector(rng, d).normalize()
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-random pure state on the given slot dimensions.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<StateVector> {
    let total: usize = dims.iter().product();
    let amps: Vec<C64> = (0..total).map(|_| gaussian(rng)).collect();
    let modes = dims.iter().map(|&d| ModeSpace::new(d)).collect::<Result<Vec<_>>>()?;
    StateVector::new(modes, amps, Statistics::Distinguishable)
}

/// Product of independent Haar-random factors.
pub fn random_product<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<StateVector> {
    let factors: Vec<CVector> = dims.iter().map(|&d| gaussian_vector(rng, d)).collect();
    make_factorized(&factors)
}

/// Random `n`-fermion state on `d` modes: a Haar-random vector projected to
/// the antisymmetric subspace.
pub fn random_fermion_state<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<StateVector> {
    loop {
        let s = random_state(rng, &vec![d; n])?;
        if let Some(a) = antisymmetrize(&s)? {
            return Ok(a);
        }
    }
}

pub fn random_boson_state<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<StateVector> {
    symmetrize(&random_state(rng, &vec![d; n])?)
}

/// Random `n`-fermion state whose orbitals all lie in the span of the
/// given orthonormal columns of `support`.
pub fn random_fermion_on<R: Rng + ?Sized>(rng: &mut R, n: usize, support: &CMatrix) -> Result<StateVector> {
    let (d, k) = support.shape();
    let inner = random_fermion_state(rng, n, k)?;
    embed_orbitals(&inner, support, d)
}

/// Rewrite a state on `k` modes in the `d`-dimensional space spanned by the
/// columns of `orbitals` (mode `j` ↦ column `j`).
pub fn embed_orbitals(state: &StateVector, orbitals: &CMatrix, d: usize) -> Result<StateVector> {
    let n = state.particles();
    let mut amps = state.amplitudes().to_vec();
    let mut dims = state.dims();
    for slot in 0..n {
        let k = dims[slot];
        let left: usize = dims[..slot].iter().product();
        let right: usize = dims[slot + 1..].iter().product();
        let mut next = vec![C64::new(0.0, 0.0); left * d * right];
        for l in 0..left {
            for j in 0..k {
                for i in 0..d {
                    let w = orbitals[(i, j)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..right {
                        next[(l * d + i) * right + r] += w * amps[(l * k + j) * right + r];
                    }
                }
            }
        }
        amps = next;
        dims[slot] = d;
    }
    let modes = vec![ModeSpace::new(d)?; n];
    StateVector::new(modes, amps, state.statistics())
}
