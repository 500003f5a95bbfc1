//! Brute-force verifier in the labeled tensor-product space.
//!
//! A no-label pair `|φ, χ⟩` is embedded as `(|φ⟩⊗|χ⟩ + η|χ⟩⊗|φ⟩)/√2`. With
//! this factor the plain tensor inner product of two embedded pairs is
//!
//! ```text
//! ½ (2⟨φ'|φ⟩⟨χ'|χ⟩ + 2η⟨φ'|χ⟩⟨χ'|φ⟩) = ⟨φ'|φ⟩⟨χ'|χ⟩ + η⟨φ'|χ⟩⟨χ'|φ⟩,
//! ```
//!
//! the no-label amplitude exactly, and contracting one slot gives the
//! dimension-reducing product up to `√2`. Everything here is recomputed from
//! raw coefficient arrays; nothing in this module calls into the no-label
//! algebra.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::TwoParticleState;
use crate::basis::{Alphabet, Region, Statistics};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::teleport::{BellState, Sector};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(|x⟩⊗|y⟩ + η|y⟩⊗|x⟩)/√2`.
fn symmetrized(eta: f64, x: &[Complex64], y: &[Complex64]) -> DVector<Complex64> {
    let n = x.len();
    DVector::from_fn(n * n, |k, _| {
        let (i, j) = (k / n, k % n);
        (x[i] * y[j] + y[i] * x[j] * eta) * FRAC_1_SQRT_2
    })
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![zero(); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedState {
    pub statistics: Statistics,
    /// One-particle dimension; the vector has `modes²` entries.
    pub modes: usize,
    pub vector: DVector<Complex64>,
}

impl EmbeddedState {
    /// Swaps the two tensor slots.
    pub fn swapped(&self) -> DVector<Complex64> {
        let n = self.modes;
        DVector::from_fn(n * n, |k, _| self.vector[(k % n) * n + k / n])
    }

    /// `max |P_swap v − η v|`.
    pub fn swap_defect(&self) -> f64 {
        let eta = self.statistics.eta();
        self.swapped()
            .iter()
            .zip(self.vector.iter())
            .map(|(s, v)| (s - v * eta).norm())
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|v⟩⟨v|`.
    pub fn density_operator(&self) -> DMatrix<Complex64> {
        &self.vector * self.vector.adjoint()
    }
}

pub fn embed(state: &TwoParticleState) -> EmbeddedState {
    let eta = state.statistics().eta();
    let n = state.alphabet().mode_count();
    let mut vector = DVector::from_element(n * n, zero());
    for t in state.terms() {
        vector += symmetrized(eta, t.first.coeffs(), t.second.coeffs()) * t.coeff;
    }
    EmbeddedState {
        statistics: state.statistics(),
        modes: n,
        vector,
    }
}

/// `⟨φ'₁, φ'₂|Ψ⟩` as a tensor inner product.
pub fn oracle_overlap(bra: (&[Complex64], &[Complex64]), ket: &EmbeddedState) -> Complex64 {
    symmetrized(ket.statistics.eta(), bra.0, bra.1).dotc(&ket.vector)
}

/// `⟨φ'|Ψ⟩ = √2 (⟨φ'| ⊗ 𝟙)|v⟩`.
pub fn oracle_partial_overlap(bra: &[Complex64], ket: &EmbeddedState) -> Vec<Complex64> {
    let n = ket.modes;
    (0..n)
        .map(|j| (0..n).map(|i| bra[i].conj() * ket.vector[i * n + j]).sum::<Complex64>() * SQRT_2)
        .collect()
}

/// Unnormalized one-particle matrix `2 Σ_σ (⟨rσ|⊗𝟙) ρ (|rσ⟩⊗𝟙)` built from
/// the full two-slot density operator.
pub fn oracle_localized_trace(ket: &EmbeddedState, alphabet: &Alphabet, region: &Region) -> Result<DensityMatrix> {
    let n = ket.modes;
    let rho = ket.density_operator();
    let r = alphabet.index_of(region)?;
    let mut out = DMatrix::from_element(n, n, zero());
    for s in 0..2 {
        let m = 2 * r + s;
        for j in 0..n {
            for k in 0..n {
                out[(j, k)] += rho[(m * n + j, m * n + k)] * 2.0;
            }
        }
    }
    let scale = 1.0 / ket.norm_sqr();
    let out = out.map(|z| z * scale);
    let basis = (0..n).map(|i| alphabet.mode_label(i)).collect();
    let trace = out.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(basis, out, trace)
}

/// Conditioned pseudospin matrix: trace over `trace_region`, keep the block
/// of `condition_region`, normalize.
pub fn oracle_reduced_matrix(ket: &EmbeddedState, alphabet: &Alphabet, trace_region: &Region, condition_region: &Region) -> Result<DensityMatrix> {
    let full = oracle_localized_trace(ket, alphabet, trace_region)?;
    let c = alphabet.index_of(condition_region)?;
    let block = DMatrix::from_fn(2, 2, |i, j| full.entry(2 * c + i, 2 * c + j));
    let weight = block[(0, 0)].re + block[(1, 1)].re;
    if weight <= crate::entanglement::ZERO_WEIGHT {
        return Err(Error::NoOperationalCorrelations { weight });
    }
    DensityMatrix::new(vec!["↓".into(), "↑".into()], block.map(|z| z / weight), weight)
}

/// Normalized amplitudes on `{|Lσ, Rτ⟩}` (order `↓↓, ↓↑, ↑↓, ↑↑`) and the
/// projection probability.
pub fn oracle_project_lr(ket: &EmbeddedState, alphabet: &Alphabet, left: &Region, right: &Region) -> Result<([Complex64; 4], f64)> {
    let n = ket.modes;
    let (l, r) = (alphabet.index_of(left)?, alphabet.index_of(right)?);
    let eta = ket.statistics.eta();
    let mut amps = [zero(); 4];
    for sl in 0..2 {
        for sr in 0..2 {
            let basis = symmetrized(eta, &unit(n, 2 * l + sl), &unit(n, 2 * r + sr));
            amps[2 * sl + sr] = basis.dotc(&ket.vector);
        }
    }
    let p: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if p <= crate::entanglement::ZERO_WEIGHT {
        return Err(Error::ProjectionFailure { probability: p });
    }
    Ok((amps.map(|z| z / p.sqrt()), p))
}

/// Entropy (bits) of a 2×2 density matrix from its determinant:
/// `λ± = (1 ± √(1 − 4 det ρ))/2`.
pub fn oracle_entropy(rho: &DensityMatrix) -> f64 {
    let det = (rho.entry(0, 0) * rho.entry(1, 1) - rho.entry(0, 1) * rho.entry(1, 0)).re;
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    [(1.0 + disc) / 2.0, (1.0 - disc) / 2.0]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Concurrence of a normalized two-qubit pure state as the spin-flip
/// overlap `|⟨ψ*|σy⊗σy|ψ⟩|`, with `σy⊗σy` applied as an explicit 4×4 matrix.
pub fn oracle_concurrence(amps: &[Complex64; 4]) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    // σy in the ↓, ↑ order
    let sy = [[zero(), i], [-i, zero()]];
    let mut flipped = [zero(); 4];
    for (row, out) in flipped.iter_mut().enumerate() {
        for (col, a) in amps.iter().enumerate() {
            *out += sy[row / 2][col / 2] * sy[row % 2][col % 2] * a;
        }
    }
    amps.iter().zip(flipped).map(|(a, f)| a * f).sum::<Complex64>().norm()
}

/// `⟨d s, L σ|B⟩` written out independently of the protocol module.
fn bell_vector(bell: BellState) -> [[f64; 2]; 2] {
    let h = FRAC_1_SQRT_2;
    // indices [d spin][particle spin], 0 = ↓, 1 = ↑
    match bell {
        BellState::PsiPlus => [[0.0, h], [h, 0.0]],
        BellState::PsiMinus => [[0.0, -h], [h, 0.0]],
        BellState::PhiPlus => [[h, 0.0], [0.0, h]],
        BellState::PhiMinus => [[-h, 0.0], [0.0, h]],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBranch {
    pub sector: Sector,
    pub bell: Option<BellState>,
    /// Residual one-particle amplitude over the `{L, R}` modes (norm² is the
    /// branch probability). For the zero-in-L sector this is empty and the
    /// probability is carried separately.
    pub amplitude: Vec<Complex64>,
    pub probability: f64,
}

/// Teleportation branches from the explicit three-slot vector
/// `d ⊗ slot₁ ⊗ slot₂` with the pair `|ψ₀↑, ψ₀↓⟩` embedded symmetrically.
///
/// Lucy's Bell projector acts on `d` and on whichever identical particle is
/// in L. Projecting slot 1 and multiplying by `√2` counts both slots; when
/// both particles sit in L that count is two, so the branch weight is
/// divided by the number of particles in L.
pub fn oracle_teleport_branches(a: Complex64, b: Complex64, statistics: Statistics) -> Vec<OracleBranch> {
    let eta = statistics.eta();
    let h = FRAC_1_SQRT_2;
    // one-particle modes over {L, R}: index 2·region + spin
    let up = [zero(), Complex64::new(h, 0.0), zero(), Complex64::new(h, 0.0)];
    let down = [Complex64::new(h, 0.0), zero(), Complex64::new(h, 0.0), zero()];
    let pair = symmetrized(eta, &up, &down);
    let d = [b, a]; // [↓, ↑]
    let n = 4;
    let v = |sd: usize, i: usize, j: usize| d[sd] * pair[i * n + j];

    let mut out = Vec::new();
    let left_modes = [0usize, 1];
    let right_modes = [2usize, 3];
    for (sector, slot2, count) in [(Sector::TwoInL, left_modes, 2.0f64), (Sector::OneInL, right_modes, 1.0)] {
        for bell in BellState::ALL {
            let bv = bell_vector(bell);
            let mut amp = vec![zero(); n];
            for &k in &slot2 {
                let mut acc = zero();
                for (sd, row) in bv.iter().enumerate() {
                    for (sp, &w) in row.iter().enumerate() {
                        acc += v(sd, left_modes[sp], k) * w;
                    }
                }
                amp[k] = acc * (2.0 / count).sqrt();
            }
            let probability = amp.iter().map(|z| z.norm_sqr()).sum();
            out.push(OracleBranch {
                sector,
                bell: Some(bell),
                amplitude: amp,
                probability,
            });
        }
    }
    let mut zero_in_l = 0.0;
    for sd in 0..2 {
        for &i in &right_modes {
            for &j in &right_modes {
                zero_in_l += v(sd, i, j).norm_sqr();
            }
        }
    }
    out.push(OracleBranch {
        sector: Sector::ZeroInL,
        bell: None,
        amplitude: Vec::new(),
        probability: zero_in_l,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Pseudospin, SingleParticleState, SpatialWavefunction};
    use crate::entanglement::ModeAmplitudes;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fermionic_double_occupation_embeds_to_zero() {
        let psi = SpatialWavefunction::new(Alphabet::lr(), vec![c(0.6), c(0.8)]).unwrap();
        let phi = SingleParticleState::with_spin(&psi, Pseudospin::Up);
        let x = symmetrized(-1.0, phi.coeffs(), phi.coeffs());
        assert!(x.iter().all(|z| z.norm() == 0.0));
        let st = TwoParticleState::pair(Statistics::Boson, phi.clone(), phi).unwrap();
        let e = embed(&st);
        assert!((e.norm_sqr() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn opposite_spins_embed_with_unit_norm() {
        for s in Statistics::both() {
            let e = embed(&ModeAmplitudes::mirrored(0.7).unwrap().state(s).unwrap());
            assert!((e.norm_sqr() - 1.0).abs() < 1e-15);
            assert!(e.swap_defect() < 1e-15);
        }
    }

    #[test]
    fn reduced_matrix_examples() {
        let a = Alphabet::lr();
        let (l, r) = (Region::new("L"), Region::new("R"));
        let e = embed(&ModeAmplitudes::mirrored(0.5).unwrap().state(Statistics::Boson).unwrap());
        let rho = oracle_reduced_matrix(&e, &a, &l, &r).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15 && (rho.entry(1, 1).re - 0.5).abs() < 1e-15);

        let e = embed(&ModeAmplitudes::mirrored(0.8).unwrap().state(Statistics::Fermion).unwrap());
        let rho = oracle_reduced_matrix(&e, &a, &l, &r).unwrap();
        assert!((rho.entry(0, 0).re - 16.0 / 17.0).abs() < 1e-15);
        assert!((rho.entry(1, 1).re - 1.0 / 17.0).abs() < 1e-15);

        let e = embed(&ModeAmplitudes::mirrored(1.0).unwrap().state(Statistics::Boson).unwrap());
        let rho = oracle_reduced_matrix(&e, &a, &l, &r).unwrap();
        assert_eq!(rho.entry(0, 0).re, 1.0);
        assert_eq!(rho.entry(1, 1).re, 0.0);
    }

    #[test]
    fn projection_probability_at_full_overlap() {
        let a = Alphabet::lr();
        let (l, r) = (Region::new("L"), Region::new("R"));
        let b = oracle_project_lr(&embed(&ModeAmplitudes::mirrored(0.5).unwrap().state(Statistics::Boson).unwrap()), &a, &l, &r).unwrap();
        let f = oracle_project_lr(&embed(&ModeAmplitudes::mirrored(0.5).unwrap().state(Statistics::Fermion).unwrap()), &a, &l, &r).unwrap();
        assert!((b.1 - 0.5).abs() < 1e-15 && (f.1 - 0.5).abs() < 1e-15);
        // antisymmetry flips the sign of |L↓, R↑⟩
        assert!((b.0[1] + f.0[1]).norm() < 1e-15);
        assert!((b.0[2] - f.0[2]).norm() < 1e-15);
    }

    #[test]
    fn teleport_branch_norms() {
        for s in Statistics::both() {
            let br = oracle_teleport_branches(c(0.6), Complex64::new(0.0, 0.8), s);
            let two: f64 = br.iter().filter(|b| b.sector == Sector::TwoInL).map(|b| b.probability).sum();
            let zero = br.iter().find(|b| b.sector == Sector::ZeroInL).unwrap().probability;
            assert!((two - 0.25).abs() < 1e-15);
            assert!((zero - 0.25).abs() < 1e-15);
            for b in br.iter().filter(|b| b.sector == Sector::OneInL) {
                assert!((b.probability - 0.125).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn concurrence_from_spin_flip() {
        let h = FRAC_1_SQRT_2;
        assert!((oracle_concurrence(&[c(0.0), c(h), c(h), c(0.0)]) - 1.0).abs() < 1e-15);
        assert_eq!(oracle_concurrence(&[c(0.0), c(0.0), c(1.0), c(0.0)]), 0.0);
    }
}
