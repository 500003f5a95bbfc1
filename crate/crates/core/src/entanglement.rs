//! Operational entanglement under spatially localized measurements.
//!
//! The pipeline is: localized partial trace over a one-particle basis in
//! one region, projection of what is left onto the other region, then the
//! von Neumann entropy of the conditioned pseudospin state. The projected
//! two-particle state with one particle per region gives the same number
//! through its concurrence and entanglement of formation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{self, overlap_two, partial_overlap, TwoParticleState};
use crate::basis::{Alphabet, Pseudospin, Region, SingleParticleState, SpatialWavefunction, Spinor, Statistics};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

/// Conditional weights at or below this are treated as exactly zero.
pub const ZERO_WEIGHT: f64 = 1e-15;

const SPIN_BASIS: [&str; 2] = ["↓", "↑"];

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Detection amplitudes `l = ⟨L|ψ⟩`, `r = ⟨R|ψ⟩`, `l' = ⟨L|ψ'⟩`, `r' = ⟨R|ψ'⟩`
/// of two wavefunctions peaked on the two measurement regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitudes {
    pub l: Complex64,
    pub r: Complex64,
    pub l_prime: Complex64,
    pub r_prime: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionProbabilities {
    pub p_l: f64,
    pub p_l_prime: f64,
    pub p_r: f64,
    pub p_r_prime: f64,
}

impl RegionProbabilities {
    /// `P_L P'_R + P'_L P_R`.
    pub fn conditional_weight(&self) -> f64 {
        self.p_l * self.p_r_prime + self.p_l_prime * self.p_r
    }
}

impl ModeAmplitudes {
    pub fn new(l: Complex64, r: Complex64, l_prime: Complex64, r_prime: Complex64) -> Result<Self> {
        let m = ModeAmplitudes { l, r, l_prime, r_prime };
        for (what, n) in [
            ("ψ", l.norm_sqr() + r.norm_sqr()),
            ("ψ'", l_prime.norm_sqr() + r_prime.norm_sqr()),
        ] {
            if (n - 1.0).abs() > DEFAULT_TOLERANCE {
                return Err(Error::NotNormalized {
                    what: if what == "ψ" { "ψ mode amplitudes" } else { "ψ' mode amplitudes" },
                    norm_sqr: n,
                });
            }
        }
        Ok(m)
    }

    /// `l = cos θ`, `r = sin θ`, `l' = cos θ'`, `r' = sin θ'`.
    pub fn from_angles(theta: f64, theta_prime: f64) -> Self {
        let re = |x: f64| Complex64::new(x, 0.0);
        ModeAmplitudes {
            l: re(theta.cos()),
            r: re(theta.sin()),
            l_prime: re(theta_prime.cos()),
            r_prime: re(theta_prime.sin()),
        }
    }

    /// Mirrored real amplitudes with `P_L = P'_R = p` and `P'_L = P_R = 1 − p`.
    /// `p = 1` is the fully separated configuration and `p = 1/2` the
    /// complete overlap.
    pub fn mirrored(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("probability {p} outside [0, 1]")));
        }
        let re = |x: f64| Complex64::new(x, 0.0);
        Ok(ModeAmplitudes {
            l: re(p.sqrt()),
            r: re((1.0 - p).sqrt()),
            l_prime: re((1.0 - p).sqrt()),
            r_prime: re(p.sqrt()),
        })
    }

    pub fn from_wavefunctions(psi: &SpatialWavefunction, psi_prime: &SpatialWavefunction, left: &Region, right: &Region) -> Result<Self> {
        Ok(ModeAmplitudes {
            l: psi.amplitude(left)?,
            r: psi.amplitude(right)?,
            l_prime: psi_prime.amplitude(left)?,
            r_prime: psi_prime.amplitude(right)?,
        })
    }

    pub fn probabilities(&self) -> RegionProbabilities {
        RegionProbabilities {
            p_l: self.l.norm_sqr(),
            p_l_prime: self.l_prime.norm_sqr(),
            p_r: self.r.norm_sqr(),
            p_r_prime: self.r_prime.norm_sqr(),
        }
    }

    pub fn wavefunctions(&self) -> Result<(SpatialWavefunction, SpatialWavefunction)> {
        let a = Alphabet::lr();
        Ok((
            SpatialWavefunction::new(a.clone(), vec![self.l, self.r])?,
            SpatialWavefunction::new(a, vec![self.l_prime, self.r_prime])?,
        ))
    }

    /// `|ψ↑, ψ'↓⟩` over the alphabet `{L, R}`.
    pub fn state(&self, statistics: Statistics) -> Result<TwoParticleState> {
        let (psi, psi_prime) = self.wavefunctions()?;
        opposite_spin_pair(statistics, &psi, &psi_prime)
    }
}

/// `|ψ↑, ψ'↓⟩`: two independently prepared particles with opposite
/// pseudospins.
pub fn opposite_spin_pair(statistics: Statistics, psi: &SpatialWavefunction, psi_prime: &SpatialWavefunction) -> Result<TwoParticleState> {
    TwoParticleState::pair(
        statistics,
        SingleParticleState::with_spin(psi, Pseudospin::Up),
        SingleParticleState::with_spin(psi_prime, Pseudospin::Down),
    )
}

fn ensure_normalized(state: &TwoParticleState) -> Result<()> {
    let n = algebra::norm(state)?;
    if (n * n - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(Error::NotNormalized {
            what: "two-particle state",
            norm_sqr: n * n,
        });
    }
    Ok(())
}

/// Unnormalized one-particle reduced matrix obtained by tracing over the
/// localized basis `{|region↓⟩, |region↑⟩}`.
pub fn localized_partial_trace(state: &TwoParticleState, region: &Region) -> Result<DensityMatrix> {
    let identity = [[Complex64::new(1.0, 0.0), zero()], [zero(), Complex64::new(1.0, 0.0)]];
    localized_partial_trace_in_basis(state, region, &identity)
}

/// Same as [`localized_partial_trace`] but over the rotated local basis
/// `{U|region↓⟩, U|region↑⟩}`; the result does not depend on `U`.
pub fn localized_partial_trace_in_basis(state: &TwoParticleState, region: &Region, spin_unitary: &[[Complex64; 2]; 2]) -> Result<DensityMatrix> {
    ensure_normalized(state)?;
    let alphabet = state.alphabet();
    let n = alphabet.mode_count();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for spin in Pseudospin::ALL {
        let bra = SingleParticleState::mode(alphabet.clone(), region, spin)?.rotate_spin(spin_unitary);
        let reduced = partial_overlap(&bra, state)?;
        let v = reduced.coeffs();
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    let basis = (0..n).map(|i| alphabet.mode_label(i)).collect();
    let trace = rho.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(basis, rho, trace)
}

/// Projects a one-particle matrix onto the pseudospin block of `region`
/// and normalizes. The weight of the result is the trace before
/// normalization.
pub fn condition_on_region(rho: &DensityMatrix, region: &Region) -> Result<DensityMatrix> {
    let find = |spin: Pseudospin| {
        let label = format!("{region}{}", spin.symbol());
        rho.basis()
            .iter()
            .position(|b| *b == label)
            .ok_or_else(|| Error::UnknownRegion(region.to_string()))
    };
    let idx = [find(Pseudospin::Down)?, find(Pseudospin::Up)?];
    let block = DMatrix::from_fn(2, 2, |i, j| rho.entry(idx[i], idx[j]));
    let weight: f64 = block.diagonal().iter().map(|z| z.re).sum();
    if weight <= ZERO_WEIGHT {
        return Err(Error::NoOperationalCorrelations { weight });
    }
    DensityMatrix::new(
        SPIN_BASIS.iter().map(|s| s.to_string()).collect(),
        block.map(|z| z / weight),
        weight,
    )
}

/// `h(x) = −x log₂ x − (1 − x) log₂(1 − x)`.
pub fn binary_entropy(x: f64) -> f64 {
    xlog2x(x) + xlog2x(1.0 - x)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    von_neumann_entropy_with_tolerance(rho, DEFAULT_TOLERANCE)
}

pub fn von_neumann_entropy_with_tolerance(rho: &DensityMatrix, tol: f64) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > tol {
        return Err(Error::NotNormalized {
            what: "density matrix",
            norm_sqr: tr,
        });
    }
    let vals = rho.eigenvalues();
    if let Some(&neg) = vals.iter().find(|&&v| v < -tol) {
        return Err(Error::domain(format!("density matrix has eigenvalue {neg:e}")));
    }
    let s: f64 = vals.iter().map(|&v| xlog2x(v.max(0.0))).sum();
    Ok(s.clamp(0.0, (rho.dim() as f64).log2()))
}

/// Closed-form operational entanglement from the four detection
/// probabilities.
pub fn operational_entanglement(p: &RegionProbabilities) -> Result<f64> {
    for (name, v) in [
        ("P_L", p.p_l),
        ("P'_L", p.p_l_prime),
        ("P_R", p.p_r),
        ("P'_R", p.p_r_prime),
    ] {
        if !(-DEFAULT_TOLERANCE..=1.0 + DEFAULT_TOLERANCE).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let weight = p.conditional_weight();
    if weight <= ZERO_WEIGHT {
        return Err(Error::NoOperationalCorrelations { weight });
    }
    Ok(binary_entropy(p.p_l * p.p_r_prime / weight))
}

/// Entropy of the conditioned pseudospin state, computed through the
/// matrix pipeline.
pub fn operational_entanglement_of_state(state: &TwoParticleState, left: &Region, right: &Region) -> Result<f64> {
    let rho = condition_on_region(&localized_partial_trace(state, left)?, right)?;
    von_neumann_entropy(&rho)
}

/// Which side to trace out of a two-region state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The normalized projection onto the one-particle-per-region subspace.
/// Amplitudes are stored in the two-qubit computational order
/// `|L↓,R↓⟩, |L↓,R↑⟩, |L↑,R↓⟩, |L↑,R↑⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedLRState {
    pub amplitudes: [Complex64; 4],
    pub probability: f64,
    /// `arg(l'r) − arg(lr')` wrapped to `(−π, π]`; `None` when either
    /// amplitude vanishes.
    pub relative_phase: Option<f64>,
}

impl ProjectedLRState {
    pub fn index(left: Pseudospin, right: Pseudospin) -> usize {
        2 * left.index() + right.index()
    }

    pub fn amplitude(&self, left: Pseudospin, right: Pseudospin) -> Complex64 {
        self.amplitudes[Self::index(left, right)]
    }

    pub fn concurrence(&self) -> Result<f64> {
        concurrence_pure(&self.amplitudes)
    }

    /// Pseudospin state of the particle left after tracing out `side`.
    pub fn reduced(&self, side: Side) -> Result<DensityMatrix> {
        let m = DMatrix::from_fn(2, 2, |i, j| {
            Pseudospin::ALL
                .iter()
                .map(|&k| {
                    let (si, sj, sk) = (Pseudospin::ALL[i], Pseudospin::ALL[j], k);
                    match side {
                        Side::Left => self.amplitude(sk, si) * self.amplitude(sk, sj).conj(),
                        Side::Right => self.amplitude(si, sk) * self.amplitude(sj, sk).conj(),
                    }
                })
                .sum::<Complex64>()
        });
        DensityMatrix::new(SPIN_BASIS.iter().map(|s| s.to_string()).collect(), m, 1.0)
    }
}

/// Projects onto `{|left σ, right τ⟩}` and renormalizes.
pub fn project_lr(state: &TwoParticleState, left: &Region, right: &Region) -> Result<ProjectedLRState> {
    ensure_normalized(state)?;
    if left == right {
        return Err(Error::domain("measurement regions must differ"));
    }
    let alphabet = state.alphabet();
    let mut amplitudes = [zero(); 4];
    for sl in Pseudospin::ALL {
        for sr in Pseudospin::ALL {
            let bl = SingleParticleState::mode(alphabet.clone(), left, sl)?;
            let br = SingleParticleState::mode(alphabet.clone(), right, sr)?;
            amplitudes[ProjectedLRState::index(sl, sr)] = overlap_two((&bl, &br), state)?;
        }
    }
    let probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if probability <= ZERO_WEIGHT {
        return Err(Error::ProjectionFailure { probability });
    }
    let scale = 1.0 / probability.sqrt();
    for a in &mut amplitudes {
        *a *= scale;
    }
    let eta = state.statistics().eta();
    let up_down = amplitudes[ProjectedLRState::index(Pseudospin::Up, Pseudospin::Down)];
    let down_up = amplitudes[ProjectedLRState::index(Pseudospin::Down, Pseudospin::Up)] * eta;
    let relative_phase = (up_down.norm() > 0.0 && down_up.norm() > 0.0).then(|| wrap_phase(down_up.arg() - up_down.arg()));
    Ok(ProjectedLRState {
        amplitudes,
        probability,
        relative_phase,
    })
}

fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Two-qubit pure-state concurrence `2|a₀₀a₁₁ − a₀₁a₁₀|`.
pub fn concurrence_pure(amplitudes: &[Complex64; 4]) -> Result<f64> {
    let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (n - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(Error::NotNormalized {
            what: "two-qubit amplitudes",
            norm_sqr: n,
        });
    }
    let [a00, a01, a10, a11] = *amplitudes;
    Ok((2.0 * (a00 * a11 - a01 * a10).norm()).min(1.0))
}

/// `E_f = h((1 + √(1 − C²)) / 2)`.
pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    if !(-DEFAULT_TOLERANCE..=1.0 + DEFAULT_TOLERANCE).contains(&concurrence) {
        return Err(Error::domain(format!("concurrence {concurrence} outside [0, 1]")));
    }
    let c = concurrence.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

/// Splits `|Ψ⟩ = c_LL |L↑,L↓⟩ + c_RR |R↑,R↓⟩ + √P_LR |Ψ_LR⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDecomposition {
    pub c_ll: Complex64,
    pub c_rr: Complex64,
    pub resource: ProjectedLRState,
}

impl ModeDecomposition {
    /// `|c_LL|² + |c_RR|² + P_LR`, which is one for the opposite-spin pair.
    pub fn completeness(&self) -> f64 {
        self.c_ll.norm_sqr() + self.c_rr.norm_sqr() + self.resource.probability
    }
}

pub fn decompose_modes(state: &TwoParticleState, left: &Region, right: &Region) -> Result<ModeDecomposition> {
    for t in state.terms() {
        for f in [&t.first, &t.second] {
            if let Some(r) = f.support(0.0).into_iter().find(|r| r != left && r != right) {
                return Err(Error::domain(format!("state has support on region `{r}` outside the two measurement regions")));
            }
        }
    }
    let alphabet = state.alphabet();
    let both_in = |region: &Region| -> Result<Complex64> {
        let up = SingleParticleState::mode(alphabet.clone(), region, Pseudospin::Up)?;
        let down = SingleParticleState::mode(alphabet.clone(), region, Pseudospin::Down)?;
        overlap_two((&up, &down), state)
    };
    Ok(ModeDecomposition {
        c_ll: both_in(left)?,
        c_rr: both_in(right)?,
        resource: project_lr(state, left, right)?,
    })
}

/// Spinor carried by a one-particle state on `region`, renormalized.
pub fn local_spinor(state: &SingleParticleState, region: &Region) -> Result<Spinor> {
    let s = state.spinor_at(region)?;
    let n = s.norm_sqr().sqrt();
    if n == 0.0 {
        return Err(Error::domain(format!("no amplitude on region `{region}`")));
    }
    Ok(s.scale(Complex64::new(1.0 / n, 0.0)))
}
