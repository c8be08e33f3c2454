//! Pure states on tensor products of finite-dimensional single-particle
//! spaces, and the (anti)symmetrizers acting on them.
//!
//! Amplitudes are stored densely in row-major order: the multi-index
//! `(i_0, …, i_{N-1})` maps to `Σ_k i_k · stride_k`, the first slot being the
//! most significant. Slots are numbered from zero.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64, ZERO};
use crate::tol::{ANNIHILATION_TOL, MAX_ENTRIES, MAX_PERMUTATION_PARTICLES, STATE_TOL};

/// A single-particle Hilbert space of dimension `dim`, optionally with a
/// human-readable label per basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpace {
    dim: usize,
    labels: Option<Vec<String>>,
}

impl ModeSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("mode space dimension must be at least 1".into()));
        }
        Ok(Self { dim, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = Self::new(labels.len())?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of basis vector `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

/// Exchange statistics carried by a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Distinguishable,
    Fermion,
    Boson,
}

impl Statistics {
    pub fn is_identical(self) -> bool {
        !matches!(self, Statistics::Distinguishable)
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Statistics::Distinguishable => "distinguishable",
            Statistics::Fermion => "fermion",
            Statistics::Boson => "boson",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "distinguishable" => Ok(Statistics::Distinguishable),
            "fermion" | "fermions" => Ok(Statistics::Fermion),
            "boson" | "bosons" => Ok(Statistics::Boson),
            other => Err(Error::InvalidArgument(format!("unknown statistics '{other}'"))),
        }
    }
}

/// A permutation of particle slots: the particle in slot `k` moves to slot
/// `map[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || seen[m] {
                return Err(Error::InvalidPermutation(map));
            }
            seen[m] = true;
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Exchange of slots `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::InvalidArgument(format!("transposition ({a} {b}) out of range for {n} slots")));
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Ok(Self(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &m) in self.0.iter().enumerate() {
            inv[m] = k;
        }
        Self(inv)
    }

    /// +1 for even, −1 for odd permutations.
    pub fn sign(&self) -> f64 {
        let mut visited = vec![false; self.0.len()];
        let mut transpositions = 0;
        for start in 0..self.0.len() {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !visited[k] {
                visited[k] = true;
                k = self.0[k];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// All `n!` permutations, in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation(prefix.clone()));
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    prefix.push(i);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
        out
    }
}

/// A normalized pure state of `N` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: Vec<ModeSpace>,
    amplitudes: Vec<C64>,
    statistics: Statistics,
}

fn entries(dims: &[usize]) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_ENTRIES)
            .ok_or(Error::TooLarge { entries: usize::MAX, cap: MAX_ENTRIES })?;
    }
    Ok(total)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reorder tensor axes: the content of axis `k` moves to axis `perm[k]`.
pub(crate) fn permute_axes(amps: &[C64], dims: &[usize], perm: &[usize]) -> (Vec<C64>, Vec<usize>) {
    let n = dims.len();
    let in_strides = strides(dims);
    let mut out_dims = vec![0; n];
    let mut stride_of_out = vec![0; n];
    for k in 0..n {
        out_dims[perm[k]] = dims[k];
        stride_of_out[perm[k]] = in_strides[k];
    }
    let mut out = Vec::with_capacity(amps.len());
    let mut idx = vec![0usize; n];
    let mut src = 0usize;
    for _ in 0..amps.len() {
        out.push(amps[src]);
        // odometer over output multi-index, last axis fastest
        for j in (0..n).rev() {
            idx[j] += 1;
            src += stride_of_out[j];
            if idx[j] < out_dims[j] {
                break;
            }
            src -= stride_of_out[j] * out_dims[j];
            idx[j] = 0;
        }
    }
    (out, out_dims)
}

/// Unnormalized `(1/N!) Σ_σ s(σ) σ` applied to a tensor whose axes share
/// one dimension; `s` is the sign for fermions and 1 for bosons.
pub(crate) fn exchange_projection(amps: &[C64], dims: &[usize], antisymmetric: bool) -> Result<Vec<C64>> {
    let n = dims.len();
    if n > MAX_PERMUTATION_PARTICLES {
        return Err(Error::InvalidArgument(format!(
            "explicit permutation sums are limited to {MAX_PERMUTATION_PARTICLES} particles, got {n}"
        )));
    }
    let perms = Permutation::all(n);
    let weight = 1.0 / perms.len() as f64;
    let mut acc = vec![ZERO; amps.len()];
    for p in &perms {
        let (moved, _) = permute_axes(amps, dims, p.as_slice());
        let w = if antisymmetric { p.sign() * weight } else { weight };
        for (a, m) in acc.iter_mut().zip(moved) {
            *a += m * w;
        }
    }
    Ok(acc)
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

impl StateVector {
    /// Build a state from raw amplitudes. The amplitudes are normalized;
    /// identical-particle tags are checked against the exchange symmetry.
    pub fn new(modes: Vec<ModeSpace>, amplitudes: Vec<C64>, statistics: Statistics) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("a state needs at least one particle".into()));
        }
        let dims: Vec<usize> = modes.iter().map(ModeSpace::dim).collect();
        let expected = entries(&dims)?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes supplied for a tensor of {} entries",
                amplitudes.len(),
                expected
            )));
        }
        let ns = norm_sqr(&amplitudes);
        if ns.sqrt() < ANNIHILATION_TOL || !ns.is_finite() {
            return Err(Error::ZeroNorm("state amplitudes".into()));
        }
        let scale = 1.0 / ns.sqrt();
        let amplitudes = amplitudes.into_iter().map(|z| z * scale).collect();
        let state = Self { modes, amplitudes, statistics };
        state.check_symmetry()?;
        Ok(state)
    }

    /// `N` copies of one mode space.
    pub fn from_amplitudes(space: ModeSpace, particles: usize, amplitudes: Vec<C64>, statistics: Statistics) -> Result<Self> {
        Self::new(vec![space; particles], amplitudes, statistics)
    }

    fn check_symmetry(&self) -> Result<()> {
        if !self.statistics.is_identical() {
            return Ok(());
        }
        if self.modes.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::UnequalModeSpaces);
        }
        let sign = if self.statistics == Statistics::Fermion { -1.0 } else { 1.0 };
        let n = self.particles();
        let dims = self.dims();
        for k in 0..n.saturating_sub(1) {
            let swap = Permutation::transposition(n, k, k + 1)?;
            let (moved, _) = permute_axes(&self.amplitudes, &dims, swap.as_slice());
            let defect: f64 = moved
                .iter()
                .zip(&self.amplitudes)
                .map(|(m, a)| (m - a * sign).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if defect > STATE_TOL {
                return Err(Error::SymmetryViolation(format!(
                    "{} tag but exchanging slots {k} and {} leaves a defect of {defect:.3e}",
                    self.statistics,
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn particles(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeSpace] {
        &self.modes
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modes.iter().map(ModeSpace::dim).collect()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Single-particle dimension shared by all slots, if they agree.
    pub fn common_dim(&self) -> Option<usize> {
        let d = self.modes[0].dim();
        self.modes.iter().all(|m| m.dim() == d).then_some(d)
    }

    pub fn amplitude(&self, index: &[usize]) -> Result<C64> {
        let dims = self.dims();
        if index.len() != dims.len() || index.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::InvalidArgument(format!("index {index:?} out of range for shape {dims:?}")));
        }
        let flat: usize = index.iter().zip(strides(&dims)).map(|(i, s)| i * s).sum();
        Ok(self.amplitudes[flat])
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Same amplitudes under another statistics tag (validated).
    pub fn with_statistics(&self, statistics: Statistics) -> Result<Self> {
        let s = Self { statistics, ..self.clone() };
        s.check_symmetry()?;
        Ok(s)
    }

    /// Attach the same basis labels to every slot.
    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self> {
        let space = ModeSpace::with_labels(labels)?;
        if self.modes.iter().any(|m| m.dim() != space.dim()) {
            return Err(Error::DimensionMismatch("label count differs from a slot dimension".into()));
        }
        Ok(Self { modes: vec![space; self.particles()], ..self.clone() })
    }

    /// Amplitudes reshaped as a matrix whose rows run over the first
    /// `row_slots` slots and columns over the rest.
    pub fn matrix(&self, row_slots: usize) -> CMatrix {
        let dims = self.dims();
        let rows: usize = dims[..row_slots].iter().product();
        let cols: usize = dims[row_slots..].iter().product();
        DMatrix::from_row_slice(rows, cols, &self.amplitudes)
    }

    /// The two-particle amplitude matrix `a(i, j)`.
    pub fn pair_matrix(&self) -> Result<CMatrix> {
        self.require_particles(2)?;
        Ok(self.matrix(1))
    }

    pub(crate) fn require_particles(&self, n: usize) -> Result<()> {
        if self.particles() != n {
            return Err(Error::WrongParticleNumber { expected: n.to_string(), found: self.particles() });
        }
        Ok(())
    }

    pub(crate) fn require_statistics(&self, s: Statistics) -> Result<()> {
        if self.statistics != s {
            return Err(Error::WrongStatistics { expected: s.to_string(), found: self.statistics.to_string() });
        }
        Ok(())
    }

    /// Internal constructor for amplitudes already known to be normalized
    /// and of the right symmetry.
    pub(crate) fn from_parts_unchecked(modes: Vec<ModeSpace>, amplitudes: Vec<C64>, statistics: Statistics) -> Self {
        Self { modes, amplitudes, statistics }
    }
}

/// The normalized product state `|φ_0⟩ ⊗ … ⊗ |φ_{N-1}⟩`, tagged
/// distinguishable.
pub fn make_factorized(factors: &[CVector]) -> Result<StateVector> {
    let modes = factors.iter().map(|f| ModeSpace::new(f.len())).collect::<Result<Vec<_>>>()?;
    make_factorized_in(modes, factors)
}

/// Like [`make_factorized`] with explicit (possibly labelled) mode spaces.
pub fn make_factorized_in(modes: Vec<ModeSpace>, factors: &[CVector]) -> Result<StateVector> {
    if factors.is_empty() || factors.len() != modes.len() {
        return Err(Error::DimensionMismatch(format!("{} factors for {} mode spaces", factors.len(), modes.len())));
    }
    for (k, (f, m)) in factors.iter().zip(&modes).enumerate() {
        if f.len() != m.dim() {
            return Err(Error::DimensionMismatch(format!("factor {k} has length {} but its space has dimension {}", f.len(), m.dim())));
        }
        if f.norm() < ANNIHILATION_TOL {
            return Err(Error::ZeroNorm(format!("factor {k}")));
        }
    }
    let dims: Vec<usize> = modes.iter().map(ModeSpace::dim).collect();
    entries(&dims)?;
    let mut amps = vec![c(1.0)];
    for f in factors {
        let f = f.normalize();
        let mut next = Vec::with_capacity(amps.len() * f.len());
        for a in &amps {
            next.extend(f.iter().map(|x| a * x));
        }
        amps = next;
    }
    StateVector::new(modes, amps, Statistics::Distinguishable)
}

fn require_equal_modes(state: &StateVector) -> Result<()> {
    if state.modes.windows(2).any(|w| w[0].dim() != w[1].dim()) {
        return Err(Error::UnequalModeSpaces);
    }
    Ok(())
}

/// Apply the antisymmetrizer and renormalize. `None` when the state is
/// annihilated (for instance a product with a repeated factor).
pub fn antisymmetrize(state: &StateVector) -> Result<Option<StateVector>> {
    require_equal_modes(state)?;
    let projected = exchange_projection(&state.amplitudes, &state.dims(), true)?;
    if norm_sqr(&projected).sqrt() < ANNIHILATION_TOL {
        return Ok(None);
    }
    let modes = vec![state.modes[0].clone(); state.particles()];
    StateVector::new(modes, projected, Statistics::Fermion).map(Some)
}

/// Apply the symmetrizer and renormalize.
pub fn symmetrize(state: &StateVector) -> Result<StateVector> {
    require_equal_modes(state)?;
    let projected = exchange_projection(&state.amplitudes, &state.dims(), false)?;
    let modes = vec![state.modes[0].clone(); state.particles()];
    StateVector::new(modes, projected, Statistics::Boson)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!("shapes {:?} and {:?}", a.dims(), b.dims())));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// Reorder particle slots: the particle in slot `k` moves to slot `perm[k]`.
pub fn permute(state: &StateVector, perm: &Permutation) -> Result<StateVector> {
    if perm.len() != state.particles() {
        return Err(Error::InvalidPermutation(perm.as_slice().to_vec()));
    }
    let (amps, _) = permute_axes(&state.amplitudes, &state.dims(), perm.as_slice());
    let mut modes = state.modes.clone();
    for (k, &m) in perm.as_slice().iter().enumerate() {
        modes[m] = state.modes[k].clone();
    }
    Ok(StateVector::from_parts_unchecked(modes, amps, state.statistics))
}
