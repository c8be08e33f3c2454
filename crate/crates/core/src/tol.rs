//! Numerical thresholds.
//!
//! Every cutoff used by the decision procedures is declared here once.

/// Squared-norm tolerance for normalization and (anti)symmetry of state vectors.
pub const STATE_TOL: f64 = 1e-12;

/// A projected state whose norm falls below this is treated as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-12;

/// Numerical zero for spectra: eigenvalues and decomposition coefficients
/// above this count toward rank.
pub const RANK_TOL: f64 = 1e-10;

/// Hermiticity, idempotence and trace checks on operators.
pub const OPERATOR_TOL: f64 = 1e-10;

/// Agreement required when a witness is re-multiplied or re-symmetrized
/// into the state it explains.
pub const WITNESS_TOL: f64 = 1e-9;

/// Two singular values closer than this belong to one degenerate block of a
/// Schmidt, Slater or Takagi decomposition.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Threshold on the one-particle-orthogonality residual.
pub const OPO_TOL: f64 = 1e-9;

/// Eigenvalues of a one-body density matrix closer than this are grouped
/// into one natural-orbital shell.
pub const OCCUPATION_CLUSTER_TOL: f64 = 1e-8;

/// Occupation sums must hit the requested subgroup size within this.
pub const OCCUPATION_SUM_TOL: f64 = 1e-6;

/// Hard cap on the number of amplitude entries of a dense state.
pub const MAX_ENTRIES: usize = 10_000_000;

/// Largest particle number for which explicit permutation sums are used.
pub const MAX_PERMUTATION_PARTICLES: usize = 8;

/// Tunable subset of the thresholds, for callers that override defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Numerical zero for ranks.
    pub rank: f64,
    /// Reconstruction and unit-expectation agreement for witnesses.
    pub witness: f64,
    /// Equality of the two bosonic Takagi values.
    pub boson_equal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: RANK_TOL, witness: WITNESS_TOL, boson_equal: WITNESS_TOL }
    }
}

impl Tolerances {
    /// Use `rank` as the numerical zero and keep the other defaults.
    pub fn with_rank(rank: f64) -> Self {
        Self { rank, ..Self::default() }
    }
}
