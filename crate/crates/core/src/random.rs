//! Seeded generators for randomized checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{normalized, TwoParticleState};
use crate::basis::{Alphabet, SingleParticleState, Statistics};
use crate::entanglement::ModeAmplitudes;
use crate::error::Result;
use crate::teleport::InputSpinor;

/// Independent generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(-PI..PI))
}

pub fn single_particle<R: Rng>(rng: &mut R, alphabet: &Alphabet) -> SingleParticleState {
    let coeffs = (0..alphabet.mode_count()).map(|_| complex(rng)).collect();
    SingleParticleState::from_coeffs(alphabet.clone(), coeffs).expect("dimension matches alphabet")
}

/// Normalized superposition of `terms` random pairs.
pub fn two_particle<R: Rng>(rng: &mut R, alphabet: &Alphabet, statistics: Statistics, terms: usize) -> Result<TwoParticleState> {
    let raw: Vec<_> = (0..terms)
        .map(|_| (complex(rng), single_particle(rng, alphabet), single_particle(rng, alphabet)))
        .collect();
    normalized(&TwoParticleState::from_terms(statistics, raw)?)
}

/// Moduli uniform on the quarter circle, independent uniform phases.
pub fn mode_amplitudes<R: Rng>(rng: &mut R) -> ModeAmplitudes {
    let t = rng.random_range(0.0..PI / 2.0);
    let tp = rng.random_range(0.0..PI / 2.0);
    ModeAmplitudes {
        l: phase(rng) * t.cos(),
        r: phase(rng) * t.sin(),
        l_prime: phase(rng) * tp.cos(),
        r_prime: phase(rng) * tp.sin(),
    }
}

pub fn input_spinor<R: Rng>(rng: &mut R) -> InputSpinor {
    let t = rng.random_range(0.0..PI / 2.0);
    let a = phase(rng) * t.cos();
    let b = phase(rng) * t.sin();
    InputSpinor::new(a, b).expect("unit spinor")
}

/// Haar-like 2×2 unitary, rows and columns ordered `↓, ↑`.
pub fn unitary2<R: Rng>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let t = rng.random_range(0.0..PI / 2.0);
    let a = phase(rng) * t.cos();
    let b = phase(rng) * t.sin();
    let g = phase(rng);
    [[g * a, -g * b.conj()], [g * b, g * a.conj()]]
}

/// `n × n` grid on the Bloch sphere, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
pub fn bloch_grid(n: usize) -> Vec<InputSpinor> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let theta = PI * i as f64 / (n - 1).max(1) as f64;
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let a = Complex64::new((theta / 2.0).cos(), 0.0);
            let b = Complex64::from_polar((theta / 2.0).sin(), phi);
            out.push(InputSpinor::new(a, b).expect("unit spinor"));
        }
    }
    out
}
