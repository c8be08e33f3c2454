//! Randomized property suites, reproducible from a master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{log10_overlap, OrbitalModel};
use crate::error::Result;
use crate::hilbert::{antisymmetrize, inner, make_factorized, symmetrize, Statistics};
use crate::manybody::{detect_partition, embed_partition, opo_residual, reduced_scalar_identity_residuals, slater_basis, support_overlap};
use crate::random::{haar_unitary, random_fermion_on, random_hermitian, random_product, random_state, unit_vector};
use crate::verdicts::{classify_boson_pair, classify_distinguishable_pair, classify_fermion_pair, complete_property_witness, correlation_factorizes};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Independent generator for trial `trial` of suite `suite`.
pub fn trial_rng(master: u64, suite: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(suite);
    rng.set_word_pos(u128::from(trial) << 20);
    rng
}

type Trial = fn(&mut ChaCha8Rng, usize) -> Result<bool>;

fn run_suite(master: u64, index: u64, name: &str, trials: usize, check: Trial) -> SuiteResult {
    let mut failures = 0;
    let mut detail = String::new();
    for t in 0..trials {
        let mut rng = trial_rng(master, index, t as u64);
        match check(&mut rng, t) {
            Ok(true) => {}
            Ok(false) => failures += 1,
            Err(e) => {
                failures += 1;
                if detail.is_empty() {
                    detail = format!("trial {t}: {e}");
                }
            }
        }
    }
    SuiteResult { name: name.into(), trials, failures, detail }
}

fn product_criteria_agree(rng: &mut ChaCha8Rng, t: usize) -> Result<bool> {
    let d = 2 + t % 3;
    let (state, expect_entangled) =
        if t % 2 == 0 { (random_product(rng, &[d, d])?, false) } else { (random_state(rng, &[d, d])?, true) };
    Ok(classify_distinguishable_pair(&state)?.entangled == expect_entangled)
}

fn products_have_no_correlations(rng: &mut ChaCha8Rng, t: usize) -> Result<bool> {
    let d = 2 + t % 3;
    let state = random_product(rng, &[d, d])?;
    for _ in 0..10 {
        let a = random_hermitian(rng, d);
        let b = random_hermitian(rng, d);
        if correlation_factorizes(&state, &a, &b, 1e-10)?.residual >= 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn identical_products_have_witnesses(rng: &mut ChaCha8Rng, t: usize) -> Result<bool> {
    let d = 3 + t % 3;
    let product = make_factorized(&[unit_vector(rng, d), unit_vector(rng, d)])?;
    let fermions = antisymmetrize(&product)?.expect("generic product survives antisymmetrization");
    let bosons = symmetrize(&product)?;
    let fermion_ok = !classify_fermion_pair(&fermions)?.entangled && complete_property_witness(&fermions)?.is_some();
    let boson_ok = complete_property_witness(&bosons)?.is_some();
    let a = unit_vector(rng, d);
    let twin = make_factorized(&[a.clone(), a])?.with_statistics(Statistics::Boson)?;
    Ok(fermion_ok && boson_ok && !classify_boson_pair(&twin)?.entangled)
}

fn opo_matches_supports(rng: &mut ChaCha8Rng, t: usize) -> Result<bool> {
    let (m, k) = [(1, 1), (2, 1), (2, 2)][t % 3];
    let d = 6;
    let u = haar_unitary(rng, d);
    let shift = if t % 2 == 0 { 3 } else { 2 };
    let sigma = random_fermion_on(rng, m, &u.columns(0, 3).into_owned())?;
    let phi = random_fermion_on(rng, k, &u.columns(shift, 3.min(d - shift)).into_owned())?;
    Ok((opo_residual(&sigma, &phi)? < 1e-9) == (support_overlap(&sigma, &phi)? < 1e-8))
}

fn embed_detect_round_trip(rng: &mut ChaCha8Rng, _t: usize) -> Result<bool> {
    let u = haar_unitary(rng, 6);
    let pi = random_fermion_on(rng, 2, &u.columns(0, 3).into_owned())?;
    let phi = random_fermion_on(rng, 1, &u.columns(3, 3).into_owned())?;
    let state = embed_partition(&pi, &phi)?;
    let Some(f) = detect_partition(&state, 2)? else { return Ok(false) };
    let back = embed_partition(&f.pi_m, &f.phi_k)?;
    Ok(inner(&back, &state)?.norm_sqr() > 1.0 - 1e-9)
}

fn reduced_identities_hold(rng: &mut ChaCha8Rng, _t: usize) -> Result<bool> {
    let u = haar_unitary(rng, 8);
    let om = u.columns(0, 4).into_owned();
    let ok = u.columns(4, 4).into_owned();
    let chi = random_fermion_on(rng, 2, &om)?;
    let tau = random_fermion_on(rng, 2, &om)?;
    let mu = random_fermion_on(rng, 2, &ok)?;
    let nu = random_fermion_on(rng, 2, &ok)?;
    let (r1, r2) = reduced_scalar_identity_residuals(&chi, &tau, &mu, &nu, &slater_basis(&ok, 2)?, &slater_basis(&om, 2)?)?;
    Ok(r1 < 1e-9 && r2 < 1e-9)
}

fn overlap_decreases(rng: &mut ChaCha8Rng, _t: usize) -> Result<bool> {
    use rand::Rng;
    let a: f64 = rng.random_range(0.1..10.0);
    let x: f64 = rng.random_range(0.0..1e4);
    let lo = log10_overlap(&OrbitalModel::new(a, x * a)?)?;
    let hi = log10_overlap(&OrbitalModel::new(a, (x + 1.0) * a)?)?;
    let scaled = log10_overlap(&OrbitalModel::new(3.0 * a, 3.0 * x * a)?)?;
    Ok(hi < lo && (scaled - lo).abs() <= 1e-9 * lo.abs().max(1.0))
}

/// Run every suite with `trials` random instances each (fewer for the
/// costlier many-body suites).
pub fn run(seed: u64, trials: usize) -> SelftestReport {
    let heavy = (trials / 10).max(1);
    let suites = vec![
        run_suite(seed, 0, "distinguishable pair criteria agree", trials, product_criteria_agree),
        run_suite(seed, 1, "products show no correlations", trials, products_have_no_correlations),
        run_suite(seed, 2, "identical-particle products have witnesses", trials, identical_products_have_witnesses),
        run_suite(seed, 3, "one-particle orthogonality matches support orthogonality", trials, opo_matches_supports),
        run_suite(seed, 4, "embedding round trip", heavy, embed_detect_round_trip),
        run_suite(seed, 5, "reduced scalar product identities", heavy, reduced_identities_hold),
        run_suite(seed, 6, "overlap decreases with separation", trials, overlap_decreases),
    ];
    SelftestReport { seed, suites }
}
