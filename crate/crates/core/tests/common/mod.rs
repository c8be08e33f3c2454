//! Reference computations for tests, written independently of the library
//! routines they check.
#![allow(dead_code)]

use entangprops::{CMatrix, CVector, StateVector, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn cz(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn basis(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = cz(1.0);
    v
}

pub fn ket(v: &[f64]) -> CVector {
    CVector::from_vec(v.iter().map(|&x| cz(x)).collect())
}

/// Box–Muller complex Gaussian, so test data does not depend on the
/// library's own samplers.
pub fn gauss(rng: &mut ChaCha8Rng) -> C64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    C64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| gauss(rng)).normalize()
}

/// Random orthonormal columns via Gram–Schmidt.
pub fn orthonormal(rng: &mut ChaCha8Rng, d: usize, k: usize) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::new();
    while cols.len() < k {
        let mut v = unit(rng, d);
        for w in &cols {
            let p = w.dotc(&v);
            v -= w * p;
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v / cz(n));
        }
    }
    CMatrix::from_columns(&cols)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gauss(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// Two-particle amplitude matrix read directly off the flat amplitudes.
pub fn pair_amplitudes(state: &StateVector) -> CMatrix {
    let dims = state.dims();
    CMatrix::from_fn(dims[0], dims[1], |i, j| state.amplitudes()[i * dims[1] + j])
}

/// `ρ₁(i, k) = Σ_j ψ(i, j) conj(ψ(k, j))` by explicit summation.
pub fn reduced_first(psi: &CMatrix) -> CMatrix {
    let (d1, d2) = psi.shape();
    CMatrix::from_fn(d1, d1, |i, k| (0..d2).map(|j| psi[(i, j)] * psi[(k, j)].conj()).sum())
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            let mut inversions = 0;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for k in 0..left.len() {
            let x = left.remove(k);
            prefix.push(x);
            go(prefix, left, out);
            prefix.pop();
            left.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

fn digits(mut flat: usize, d: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in (0..n).rev() {
        idx[slot] = flat % d;
        flat /= d;
    }
    idx
}

fn undigits(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// `(1/N!) Σ_σ sgn(σ) ψ(i_σ(0), …)` by brute force.
pub fn antisymmetrizer(amps: &[C64], d: usize, n: usize) -> Vec<C64> {
    let perms = permutations(n);
    let w = 1.0 / perms.len() as f64;
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let idx = digits(flat, d, n);
        for (p, s) in &perms {
            let moved: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
            *o += amps[undigits(&moved, d)] * (s * w);
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `√C(N,K) P_A[π ⊗ φ]`, unnormalized.
pub fn embed_oracle(pi: &StateVector, phi: &StateVector) -> Vec<C64> {
    let d = pi.dims()[0];
    let n = pi.particles() + phi.particles();
    let mut amps = Vec::new();
    for a in pi.amplitudes() {
        for b in phi.amplitudes() {
            amps.push(a * b);
        }
    }
    let s = binomial(n, phi.particles()).sqrt();
    antisymmetrizer(&amps, d, n).into_iter().map(|z| z * s).collect()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨E(1,2)⟩ = 1 − ‖(Q⊗Q)ψ‖²` with `Q = I − |v⟩⟨v|`.
pub fn e_expectation_oracle(psi: &CMatrix, v: &CVector) -> f64 {
    let v = v.normalize();
    let d = v.len();
    let q = CMatrix::identity(d, d) - &v * v.adjoint();
    let rest = &q * psi * q.transpose();
    1.0 - rest.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Largest fidelity of a two-fermion state `Ψ` with a normalized
/// antisymmetrized product, by alternating maximization from random starts.
/// For `ξ ⊥ φ` the fidelity is `2|φᵀ conj(Ψ) ξ|²`.
pub fn fermion_oracle(psi: &CMatrix, rng: &mut ChaCha8Rng, restarts: usize, target: f64) -> f64 {
    let m = psi.map(|z| z.conj());
    let d = psi.nrows();
    let mut best = 0.0f64;
    for _ in 0..restarts {
        let mut phi = unit(rng, d);
        let mut prev = -1.0;
        for _ in 0..300 {
            let w = m.transpose() * &phi;
            if w.norm() < 1e-300 {
                break;
            }
            let xi = w.map(|z| z.conj()).normalize();
            let u = &m * &xi;
            phi = u.map(|z| z.conj()).normalize();
            let mut xi_perp = xi.clone();
            let p = phi.dotc(&xi_perp);
            xi_perp -= &phi * p;
            if xi_perp.norm() < 1e-12 {
                break;
            }
            let xi_perp = xi_perp.normalize();
            let val = 2.0 * (phi.transpose() * &m * &xi_perp)[(0, 0)].norm_sqr();
            best = best.max(val);
            if (val - prev).abs() < 1e-15 {
                break;
            }
            prev = val;
        }
        if best > target {
            break;
        }
    }
    best
}

/// Largest fidelity of a two-boson state `S` with `|φ⟩|φ⟩` or with a
/// normalized symmetrized product of orthogonal states.
///
/// With `M = conj(S)`, the same-state fidelity is `|φᵀMφ|²`; the best
/// orthogonal partner of a unit φ gives `g(φ) = 2(‖Mφ‖² − |φᵀMφ|²)`, which is
/// maximized by steepest ascent on the unit sphere.
pub fn boson_oracle(s: &CMatrix, rng: &mut ChaCha8Rng, restarts: usize, target: f64) -> f64 {
    let m = s.map(|z| z.conj());
    let a = m.adjoint() * &m;
    let d = s.nrows();
    let bilinear = |phi: &CVector| (phi.transpose() * &m * phi)[(0, 0)];
    let g = |phi: &CVector| 2.0 * ((&m * phi).norm_squared() - bilinear(phi).norm_sqr());
    let mut best = 0.0f64;
    for _ in 0..restarts {
        // same-state branch
        let mut phi = unit(rng, d);
        for _ in 0..500 {
            let next = (&m * &phi).map(|z| z.conj());
            if next.norm() < 1e-300 {
                break;
            }
            phi = next.normalize();
        }
        best = best.max(bilinear(&phi).norm_sqr());
        // orthogonal branch: steepest ascent with a line search along the
        // great circle through φ in the gradient direction
        let mut phi = unit(rng, d);
        let mut val = g(&phi);
        for _ in 0..2000 {
            let mut grad = (&a * &phi - m.map(|z| z.conj()) * phi.map(|z| z.conj()) * (bilinear(&phi) * 2.0)) * cz(2.0);
            let radial = phi.dotc(&grad);
            grad -= &phi * radial;
            if grad.norm() < 1e-14 {
                break;
            }
            let dir = grad.normalize();
            // along φ cos t + ψ sin t, g reduces to a few scalars
            let (mp, md) = (&m * &phi, &m * &dir);
            let (npp, ndd, npd) = (mp.norm_squared(), md.norm_squared(), mp.dotc(&md).re);
            let (p, q, r) = (bilinear(&phi), (phi.transpose() * &md)[(0, 0)], bilinear(&dir));
            let on_circle = |t: f64| {
                let (c, s) = (t.cos(), t.sin());
                2.0 * (c * c * npp + s * s * ndd + 2.0 * c * s * npd - (p * (c * c) + q * (2.0 * c * s) + r * (s * s)).norm_sqr())
            };
            let at = |t: f64| &phi * cz(t.cos()) + &dir * cz(t.sin());
            let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
            let mut best_t = 0.0;
            let mut best_v = val;
            for k in 1..=16 {
                let t = hi * k as f64 / 16.0;
                let v = on_circle(t);
                if v > best_v {
                    best_v = v;
                    best_t = t;
                }
            }
            lo = lo.max(best_t - hi / 16.0);
            hi = (best_t + hi / 16.0).min(hi);
            for _ in 0..40 {
                let t1 = lo + (hi - lo) * 0.382;
                let t2 = lo + (hi - lo) * 0.618;
                if on_circle(t1) > on_circle(t2) {
                    hi = t2;
                } else {
                    lo = t1;
                }
            }
            let t = 0.5 * (lo + hi);
            let v = on_circle(t);
            if v > best_v {
                best_v = v;
                best_t = t;
            }
            if best_v <= val + 1e-12 {
                break;
            }
            phi = at(best_t).normalize();
            val = g(&phi);
        }
        best = best.max(val);
        if best > target {
            break;
        }
    }
    best
}
