//! Control case: an entangled pair of distinguishable particles A, B
//! measured in localized regions.
//!
//! Labeled particles are represented in the ordinary tensor product
//! `H_A ⊗ H_B`. Conditioning on where each particle is detected changes
//! only the probability of the branch, never its entanglement.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{Pseudospin, Region, SingleParticleState, SpatialWavefunction, Spinor};
use crate::entanglement::{concurrence_pure, ZERO_WEIGHT};
use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

/// `a |ψ↑⟩_A |ψ'↓⟩_B + b |ψ↓⟩_A |ψ'↑⟩_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPairState {
    pub a: Complex64,
    pub b: Complex64,
    pub psi: SpatialWavefunction,
    pub psi_prime: SpatialWavefunction,
}

impl LabeledPairState {
    pub fn new(a: Complex64, b: Complex64, psi: SpatialWavefunction, psi_prime: SpatialWavefunction) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::NotNormalized { what: "Bell-like coefficients", norm_sqr: n });
        }
        psi.alphabet().ensure_same(psi_prime.alphabet())?;
        Ok(LabeledPairState { a, b, psi, psi_prime })
    }

    /// Concurrence of the spin state, `2|ab|`.
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.a * self.b).norm()
    }

    /// Dense vector over `(region × spin)_A ⊗ (region × spin)_B`, row-major in A.
    pub fn tensor_vector(&self) -> Vec<Complex64> {
        let up_a = SingleParticleState::product(&self.psi, Spinor::up());
        let down_a = SingleParticleState::product(&self.psi, Spinor::down());
        let up_b = SingleParticleState::product(&self.psi_prime, Spinor::up());
        let down_b = SingleParticleState::product(&self.psi_prime, Spinor::down());
        let n = up_a.coeffs().len();
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = self.a * up_a.coeffs()[i] * down_b.coeffs()[j] + self.b * down_a.coeffs()[i] * up_b.coeffs()[j];
            }
        }
        v
    }
}

/// Detection of A in `mode_a` and B in `mode_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledBranch {
    pub mode_a: Region,
    pub mode_b: Region,
    pub probability: f64,
    /// Normalized conditional spin amplitudes in the order
    /// `|↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩` (A first); absent when the branch has zero
    /// probability.
    pub amplitudes: Option<[Complex64; 4]>,
    pub concurrence: Option<f64>,
}

/// The four branches `(X, Y) ∈ {left, right}²` in the order LL, LR, RL, RR.
pub fn decompose_outcomes(state: &LabeledPairState, left: &Region, right: &Region) -> Result<Vec<LabeledBranch>> {
    let alphabet = state.psi.alphabet();
    let n = alphabet.mode_count();
    let v = state.tensor_vector();
    let mut out = Vec::with_capacity(4);
    for x in [left, right] {
        for y in [left, right] {
            let mut amps = [Complex64::new(0.0, 0.0); 4];
            for sa in Pseudospin::ALL {
                for sb in Pseudospin::ALL {
                    let i = alphabet.mode_index(x, sa)?;
                    let j = alphabet.mode_index(y, sb)?;
                    amps[2 * sa.index() + sb.index()] = v[i * n + j];
                }
            }
            let probability: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            let (amplitudes, concurrence) = if probability > ZERO_WEIGHT {
                let s = 1.0 / probability.sqrt();
                let normed = amps.map(|z| z * s);
                (Some(normed), Some(concurrence_pure(&normed)?))
            } else {
                (None, None)
            };
            out.push(LabeledBranch {
                mode_a: x.clone(),
                mode_b: y.clone(),
                probability,
                amplitudes,
                concurrence,
            });
        }
    }
    Ok(out)
}

/// `max − min` of the branch concurrences that are defined.
pub fn concurrence_spread(branches: &[LabeledBranch]) -> f64 {
    let cs: Vec<f64> = branches.iter().filter_map(|b| b.concurrence).collect();
    if cs.is_empty() {
        return 0.0;
    }
    let max = cs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = cs.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}
