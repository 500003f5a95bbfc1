//! Conditional teleportation with a pair of independently prepared
//! identical particles as the resource.
//!
//! A distinguishable particle `d` in region L' carries the input spinor.
//! The identical pair is prepared in `|ψ₀↑, ψ₀↓⟩` with
//! `ψ₀ = (|L⟩ + |R⟩)/√2`. Lucy performs a Bell measurement on `d` and the
//! identical particle found in L; she rejects the run when she counts zero
//! or two particles in L. Otherwise Rob applies the Pauli correction
//! matched to her outcome and recovers the input exactly in R.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{partial_overlap, TwoParticleState};
use crate::basis::{Alphabet, Pseudospin, Region, SingleParticleState, SpatialWavefunction, Spinor, Statistics};
use crate::entanglement::opposite_spin_pair;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::DEFAULT_TOLERANCE;

/// Best average fidelity reachable by measure-and-prepare strategies.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Trials drawn from one generator stream.
pub const BATCH_SIZE: u64 = 4096;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The state `a|L'↑⟩_d + b|L'↓⟩_d` to be teleported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputSpinor {
    pub a: Complex64,
    pub b: Complex64,
}

impl InputSpinor {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        Self::with_tolerance(a, b, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(a: Complex64, b: Complex64, tol: f64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized { what: "input spinor", norm_sqr: n });
        }
        Ok(InputSpinor { a, b })
    }

    pub fn spinor(&self) -> Spinor {
        Spinor::new(self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus];

    /// `⟨d s, L σ|B⟩`, with
    /// `Ψ± = (|↑⟩_d|L↓⟩ ± |↓⟩_d|L↑⟩)/√2` and `Φ± = (|↑⟩_d|L↑⟩ ± |↓⟩_d|L↓⟩)/√2`.
    pub fn amplitude(self, d: Pseudospin, particle: Pseudospin) -> f64 {
        use Pseudospin::{Down, Up};
        let sign = match self {
            BellState::PsiPlus | BellState::PhiPlus => 1.0,
            BellState::PsiMinus | BellState::PhiMinus => -1.0,
        };
        let v = match (self, d, particle) {
            (BellState::PsiPlus | BellState::PsiMinus, Up, Down) => 1.0,
            (BellState::PsiPlus | BellState::PsiMinus, Down, Up) => sign,
            (BellState::PhiPlus | BellState::PhiMinus, Up, Up) => 1.0,
            (BellState::PhiPlus | BellState::PhiMinus, Down, Down) => sign,
            _ => 0.0,
        };
        v * FRAC_1_SQRT_2
    }

    fn sign(self) -> f64 {
        match self {
            BellState::PsiPlus | BellState::PhiPlus => 1.0,
            BellState::PsiMinus | BellState::PhiMinus => -1.0,
        }
    }

    fn is_psi(self) -> bool {
        matches!(self, BellState::PsiPlus | BellState::PsiMinus)
    }

    /// Whether the relative sign equals the exchange sign `η`.
    pub fn matches_exchange_sign(self, statistics: Statistics) -> bool {
        self.sign() == statistics.eta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    ZeroInL,
    TwoInL,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::ZeroInL,
        Outcome::TwoInL,
        Outcome::PsiPlus,
        Outcome::PsiMinus,
        Outcome::PhiPlus,
        Outcome::PhiMinus,
    ];

    pub fn bell(self) -> Option<BellState> {
        match self {
            Outcome::PsiPlus => Some(BellState::PsiPlus),
            Outcome::PsiMinus => Some(BellState::PsiMinus),
            Outcome::PhiPlus => Some(BellState::PhiPlus),
            Outcome::PhiMinus => Some(BellState::PhiMinus),
            Outcome::ZeroInL | Outcome::TwoInL => None,
        }
    }

    pub fn is_rejection(self) -> bool {
        self.bell().is_none()
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::PsiPlus => "PsiPlus",
            Outcome::PsiMinus => "PsiMinus",
            Outcome::PhiPlus => "PhiPlus",
            Outcome::PhiMinus => "PhiMinus",
            Outcome::ZeroInL => "ZeroInL",
            Outcome::TwoInL => "TwoInL",
        }
    }
}

impl From<BellState> for Outcome {
    fn from(b: BellState) -> Self {
        match b {
            BellState::PsiPlus => Outcome::PsiPlus,
            BellState::PsiMinus => Outcome::PsiMinus,
            BellState::PhiPlus => Outcome::PhiPlus,
            BellState::PhiMinus => Outcome::PhiMinus,
        }
    }
}

/// How many identical particles Lucy finds in L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sector {
    ZeroInL,
    OneInL,
    TwoInL,
}

/// Rob's local operation in R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Correction {
    Identity,
    SigmaX,
    /// `σ_y` with the branch phase `−i` absorbed, i.e. `iσ_y`.
    SigmaY,
    SigmaZ,
}

impl Correction {
    pub fn apply(self, s: Spinor) -> Spinor {
        match self {
            Correction::Identity => s,
            Correction::SigmaX => Spinor::new(s.down, s.up),
            Correction::SigmaY => Spinor::new(s.down, -s.up),
            Correction::SigmaZ => Spinor::new(s.up, -s.down),
        }
    }
}

/// One component of the expanded three-particle state:
/// `coefficient · |Bell⟩ × |residual⟩` with a normalized residual, or the
/// untouched `|L's⟩_d |R↑, R↓⟩` component when no particle reaches L.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub sector: Sector,
    pub bell: Option<BellState>,
    pub coefficient: Complex64,
    pub residual: Option<SingleParticleState>,
}

impl Branch {
    pub fn probability(&self) -> f64 {
        self.coefficient.norm_sqr()
    }

    pub fn outcome(&self) -> Outcome {
        match (self.sector, self.bell) {
            (Sector::ZeroInL, _) => Outcome::ZeroInL,
            (Sector::TwoInL, _) => Outcome::TwoInL,
            (Sector::OneInL, Some(b)) => b.into(),
            (Sector::OneInL, None) => unreachable!("one-in-L branches always carry a Bell label"),
        }
    }
}

/// `|ψ₀↑, ψ₀↓⟩` with `ψ₀ = (|L⟩ + |R⟩)/√2`.
pub fn resource_pair(statistics: Statistics) -> Result<TwoParticleState> {
    let psi0 = SpatialWavefunction::new(Alphabet::lr(), vec![cx(FRAC_1_SQRT_2), cx(FRAC_1_SQRT_2)])?;
    opposite_spin_pair(statistics, &psi0, &psi0)
}

/// Expands `|φ⟩_d |ψ₀↑, ψ₀↓⟩` into Lucy's outcomes: four Bell branches with
/// L-residuals (two particles in L), the zero-in-L branch, and four Bell
/// branches with R-residuals (one particle in L).
pub fn expand_protocol(input: &InputSpinor, statistics: Statistics) -> Result<Vec<Branch>> {
    let pair = resource_pair(statistics)?;
    expand_with_pair(input, &pair, &Region::new("L"), &Region::new("R"))
}

/// Same expansion for an arbitrary identical pair confined to `{left, right}`.
pub fn expand_with_pair(input: &InputSpinor, pair: &TwoParticleState, left: &Region, right: &Region) -> Result<Vec<Branch>> {
    let alphabet = pair.alphabet();
    let li = alphabet.index_of(left)?;
    let ri = alphabet.index_of(right)?;
    let eta = pair.statistics().eta();

    // Split into localized mode pairs and sort by how many factors sit in L.
    let mut sectors: [Vec<(Complex64, SingleParticleState, SingleParticleState)>; 3] = Default::default();
    for t in pair.terms() {
        for (i, &x) in t.first.coeffs().iter().enumerate() {
            for (j, &y) in t.second.coeffs().iter().enumerate() {
                let c = t.coeff * x * y;
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let (ri_, rj_) = (i / 2, j / 2);
                if ![li, ri].contains(&ri_) || ![li, ri].contains(&rj_) {
                    return Err(Error::domain(format!(
                        "resource pair has support outside {{{left}, {right}}}"
                    )));
                }
                let in_left = usize::from(ri_ == li) + usize::from(rj_ == li);
                sectors[in_left].push((c, unit(alphabet, i), unit(alphabet, j)));
            }
        }
    }
    let sector_state = |n: usize| -> Result<Option<TwoParticleState>> {
        if sectors[n].is_empty() {
            return Ok(None);
        }
        let st = TwoParticleState::from_terms(pair.statistics(), sectors[n].clone())?;
        Ok((!st.is_zero()).then_some(st))
    };

    let mut branches = Vec::with_capacity(9);
    let (a, b) = (input.a, input.b);
    let d = input.spinor();

    if let Some(two) = sector_state(2)? {
        for bell in BellState::ALL {
            let v = bell_residual(bell, d, &two, left)?.scale(cx(FRAC_1_SQRT_2));
            let s = bell.sign();
            let expected = match bell.is_psi() {
                true => Spinor::new(a * eta, b * s),
                false => Spinor::new(b * eta * s, a),
            };
            branches.push(branch(Sector::TwoInL, Some(bell), v, expected, left)?);
        }
    }

    if let Some(zero) = sector_state(0)? {
        let up = SingleParticleState::mode(alphabet.clone(), right, Pseudospin::Up)?;
        let down = SingleParticleState::mode(alphabet.clone(), right, Pseudospin::Down)?;
        let coefficient = crate::algebra::overlap_two((&up, &down), &zero)?;
        branches.push(Branch {
            sector: Sector::ZeroInL,
            bell: None,
            coefficient,
            residual: None,
        });
    }

    if let Some(one) = sector_state(1)? {
        for bell in BellState::ALL {
            let v = bell_residual(bell, d, &one, left)?;
            let same = if bell.matches_exchange_sign(pair.statistics()) { 1.0 } else { -1.0 };
            let expected = match bell.is_psi() {
                true => Spinor::new(a, b * same),
                false => Spinor::new(b * same, a),
            };
            branches.push(branch(Sector::OneInL, Some(bell), v, expected, right)?);
        }
    }
    Ok(branches)
}

fn unit(alphabet: &Alphabet, index: usize) -> SingleParticleState {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); alphabet.mode_count()];
    coeffs[index] = cx(1.0);
    SingleParticleState::from_coeffs(alphabet.clone(), coeffs).expect("dimension matches alphabet")
}

/// `⟨B|_{d,L} (|φ⟩_d |sector⟩)`: the Bell bra acts on `d` and on one
/// identical particle in L through the dimension-reducing product.
fn bell_residual(bell: BellState, d: Spinor, sector: &TwoParticleState, left: &Region) -> Result<SingleParticleState> {
    let mut out = SingleParticleState::zero(sector.alphabet().clone());
    for sd in Pseudospin::ALL {
        for sp in Pseudospin::ALL {
            let w = bell.amplitude(sd, sp);
            if w == 0.0 {
                continue;
            }
            let bra = SingleParticleState::mode(sector.alphabet().clone(), left, sp)?;
            out.add_scaled(d.component(sd) * w, &partial_overlap(&bra, sector)?)?;
        }
    }
    Ok(out)
}

/// Writes `v = coefficient · expected` and checks the residual is exactly
/// of the expected form.
fn branch(sector: Sector, bell: Option<BellState>, v: SingleParticleState, expected: Spinor, region: &Region) -> Result<Branch> {
    let target = SingleParticleState::localized_spinor(v.alphabet().clone(), region, expected)?;
    let coefficient = target.inner(&v)?;
    let mut diff = v.clone();
    diff.add_scaled(-coefficient, &target)?;
    if diff.norm_sqr().sqrt() > DEFAULT_TOLERANCE {
        return Err(Error::Consistency(format!(
            "{sector:?}/{bell:?} residual {v:?} is not proportional to {target:?}"
        )));
    }
    Ok(Branch {
        sector,
        bell,
        coefficient,
        residual: Some(target),
    })
}

/// Probability of each of Lucy's six outcomes, in [`Outcome::ALL`] order.
pub fn outcome_probabilities(branches: &[Branch]) -> [(Outcome, f64); 6] {
    Outcome::ALL.map(|o| {
        let p = branches.iter().filter(|b| b.outcome() == o).map(Branch::probability).sum();
        (o, p)
    })
}

/// Rob's correction for a Bell outcome: `Ψ^(η) → 𝟙`, `Φ^(η) → σ_x`,
/// `Φ^(−η) → σ_y`, `Ψ^(−η) → σ_z`.
pub fn correction_for(outcome: Outcome, statistics: Statistics) -> Result<Correction> {
    let bell = outcome
        .bell()
        .ok_or_else(|| Error::domain(format!("{} is a rejection outcome; no correction applies", outcome.name())))?;
    let same = bell.matches_exchange_sign(statistics);
    Ok(match (bell.is_psi(), same) {
        (true, true) => Correction::Identity,
        (true, false) => Correction::SigmaZ,
        (false, true) => Correction::SigmaX,
        (false, false) => Correction::SigmaY,
    })
}

pub fn apply_correction(outcome: Outcome, statistics: Statistics, residual: Spinor) -> Result<Spinor> {
    Ok(correction_for(outcome, statistics)?.apply(residual))
}

/// `|⟨target|actual⟩|²`.
pub fn fidelity(target: &InputSpinor, actual: &Spinor) -> Result<f64> {
    let n = actual.norm_sqr();
    if (n - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(Error::NotNormalized { what: "teleported spinor", norm_sqr: n });
    }
    Ok(target.spinor().inner(actual).norm_sqr().min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub outcome: Outcome,
    pub probability: f64,
    pub correction: Option<Correction>,
    /// Fidelity after correction; rejected outcomes are scored at the
    /// classical threshold.
    pub fidelity: f64,
    /// Corrected state in R, absent for rejected outcomes.
    pub output: Option<Spinor>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub seed: u64,
    pub counts: Vec<(Outcome, u64)>,
    pub frequencies: Vec<(Outcome, f64)>,
    pub success_rate: f64,
    /// Largest `|frequency − probability|` in binomial standard deviations.
    pub max_deviation_sigma: f64,
    /// Smallest fidelity seen on an accepted trial.
    pub min_accepted_fidelity: Option<f64>,
    pub mean_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportationReport {
    pub statistics: Statistics,
    pub input: InputSpinor,
    pub success_probability: f64,
    pub per_outcome: Vec<OutcomeReport>,
    pub conditional_fidelity: f64,
    pub total_fidelity: f64,
    pub classical_threshold: f64,
    pub beats_classical: bool,
    pub trials: u64,
    pub seed: u64,
    pub monte_carlo: Option<MonteCarloSummary>,
}

/// Exact outcome probabilities and fidelities.
pub fn analyze_protocol(input: &InputSpinor, statistics: Statistics) -> Result<TeleportationReport> {
    let branches = expand_protocol(input, statistics)?;
    let probs = outcome_probabilities(&branches);
    let total: f64 = probs.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > DEFAULT_TOLERANCE {
        return Err(Error::Consistency(format!("outcome probabilities sum to {total}")));
    }
    let mut per_outcome = Vec::with_capacity(6);
    for (outcome, probability) in probs {
        if outcome.is_rejection() {
            per_outcome.push(OutcomeReport {
                outcome,
                probability,
                correction: None,
                fidelity: CLASSICAL_FIDELITY,
                output: None,
            });
            continue;
        }
        let br = branches
            .iter()
            .find(|b| b.sector == Sector::OneInL && b.outcome() == outcome)
            .ok_or_else(|| Error::Consistency(format!("missing branch for {}", outcome.name())))?;
        let residual = br.residual.as_ref().expect("Bell branches carry a residual");
        let spinor = residual.spinor_at(&Region::new("R"))?;
        let correction = correction_for(outcome, statistics)?;
        let output = correction.apply(spinor);
        per_outcome.push(OutcomeReport {
            outcome,
            probability,
            correction: Some(correction),
            fidelity: fidelity(input, &output)?,
            output: Some(output),
        });
    }
    let success_probability: f64 = per_outcome.iter().filter(|o| !o.outcome.is_rejection()).map(|o| o.probability).sum();
    let conditional_fidelity = per_outcome
        .iter()
        .filter(|o| !o.outcome.is_rejection())
        .map(|o| o.fidelity)
        .fold(f64::INFINITY, f64::min);
    let total_fidelity = per_outcome.iter().map(|o| o.probability * o.fidelity).sum();
    Ok(TeleportationReport {
        statistics,
        input: *input,
        success_probability,
        per_outcome,
        conditional_fidelity,
        total_fidelity,
        classical_threshold: CLASSICAL_FIDELITY,
        beats_classical: conditional_fidelity > CLASSICAL_FIDELITY && total_fidelity > CLASSICAL_FIDELITY,
        trials: 0,
        seed: 0,
        monte_carlo: None,
    })
}

pub fn run_protocol(input: &InputSpinor, statistics: Statistics, trials: u64, seed: u64) -> Result<TeleportationReport> {
    run_protocol_with(input, statistics, trials, seed, Execution::default())
}

/// Analytic report plus `trials` sampled runs. Batch `i` of
/// [`BATCH_SIZE`] trials draws from `ChaCha8Rng::seed_from_u64(seed)` on
/// stream `i`, so the sampled counts depend only on `(seed, trials)`.
pub fn run_protocol_with(input: &InputSpinor, statistics: Statistics, trials: u64, seed: u64, exec: Execution) -> Result<TeleportationReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let mut report = analyze_protocol(input, statistics)?;
    let probs: Vec<f64> = report.per_outcome.iter().map(|o| o.probability).collect();
    let batches = trials.div_ceil(BATCH_SIZE);
    let per_batch = exec.map_range(batches as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let n = BATCH_SIZE.min(trials - i as u64 * BATCH_SIZE);
        let mut counts = [0u64; 6];
        for _ in 0..n {
            counts[sample(&probs, rng.random::<f64>())] += 1;
        }
        counts
    });
    let mut counts = [0u64; 6];
    for c in per_batch {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
    }

    let n = trials as f64;
    let mut max_dev = 0.0f64;
    let mut accepted = 0u64;
    let mut min_accepted: Option<f64> = None;
    let mut fid_sum = 0.0;
    for (o, &k) in report.per_outcome.iter().zip(&counts) {
        let p = o.probability;
        let sigma = (p * (1.0 - p) / n).sqrt();
        let dev = (k as f64 / n - p).abs();
        if sigma > 0.0 {
            max_dev = max_dev.max(dev / sigma);
        } else if dev > 0.0 {
            max_dev = f64::INFINITY;
        }
        fid_sum += k as f64 * o.fidelity;
        if !o.outcome.is_rejection() && k > 0 {
            accepted += k;
            min_accepted = Some(min_accepted.map_or(o.fidelity, |m: f64| m.min(o.fidelity)));
        }
    }
    report.trials = trials;
    report.seed = seed;
    report.monte_carlo = Some(MonteCarloSummary {
        trials,
        seed,
        counts: report.per_outcome.iter().map(|o| o.outcome).zip(counts).collect(),
        frequencies: report.per_outcome.iter().map(|o| o.outcome).zip(counts.map(|k| k as f64 / n)).collect(),
        success_rate: accepted as f64 / n,
        max_deviation_sigma: max_dev,
        min_accepted_fidelity: min_accepted,
        mean_fidelity: fid_sum / n,
    });
    Ok(report)
}

fn sample(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic() -> InputSpinor {
        InputSpinor::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap()
    }

    #[test]
    fn nine_components_with_expected_probabilities() {
        for s in Statistics::both() {
            let br = expand_protocol(&generic(), s).unwrap();
            assert_eq!(br.len(), 9);
            assert_eq!(br.iter().filter(|b| b.sector == Sector::TwoInL).count(), 4);
            assert_eq!(br.iter().filter(|b| b.sector == Sector::OneInL).count(), 4);
            for b in &br {
                let expect = match b.sector {
                    Sector::TwoInL => 1.0 / 16.0,
                    Sector::ZeroInL => 0.25,
                    Sector::OneInL => 0.125,
                };
                assert!((b.probability() - expect).abs() < 1e-15, "{b:?}");
            }
            let probs = outcome_probabilities(&br);
            let expect = [0.25, 0.25, 0.125, 0.125, 0.125, 0.125];
            for ((_, p), e) in probs.iter().zip(expect) {
                assert!((p - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn b_zero_collapses_to_up() {
        let input = InputSpinor::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let br = expand_protocol(&input, Statistics::Boson).unwrap();
        let psi_plus = br
            .iter()
            .find(|b| b.sector == Sector::OneInL && b.bell == Some(BellState::PsiPlus))
            .unwrap();
        let s = psi_plus.residual.as_ref().unwrap().spinor_at(&Region::new("R")).unwrap();
        assert_eq!(s, Spinor::up());
    }

    #[test]
    fn exchange_sign_swaps_correction_roles() {
        use Correction::*;
        let boson: Vec<_> = BellState::ALL.iter().map(|&b| correction_for(b.into(), Statistics::Boson).unwrap()).collect();
        let fermion: Vec<_> = BellState::ALL.iter().map(|&b| correction_for(b.into(), Statistics::Fermion).unwrap()).collect();
        assert_eq!(boson, vec![Identity, SigmaZ, SigmaX, SigmaY]);
        assert_eq!(fermion, vec![SigmaZ, Identity, SigmaY, SigmaX]);
    }

    #[test]
    fn correction_examples() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let target = Spinor::new(a, b);
        for s in Statistics::both() {
            let (psi_eta, psi_neg, phi_neg) = match s {
                Statistics::Boson => (Outcome::PsiPlus, Outcome::PsiMinus, Outcome::PhiMinus),
                Statistics::Fermion => (Outcome::PsiMinus, Outcome::PsiPlus, Outcome::PhiPlus),
            };
            assert_eq!(apply_correction(psi_eta, s, Spinor::new(a, b)).unwrap(), target);
            assert_eq!(apply_correction(psi_neg, s, Spinor::new(a, -b)).unwrap(), target);
            // (b, −a) equals the (−b, a) residual up to a global sign
            let out = apply_correction(phi_neg, s, Spinor::new(b, -a)).unwrap();
            assert!((fidelity(&InputSpinor::new(a, b).unwrap(), &out).unwrap() - 1.0).abs() < 1e-15);
            assert!(matches!(apply_correction(Outcome::TwoInL, s, target), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn fidelity_examples() {
        let h = FRAC_1_SQRT_2;
        let plus = InputSpinor::new(c(h, 0.0), c(h, 0.0)).unwrap();
        assert!((fidelity(&plus, &plus.spinor()).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&plus, &Spinor::new(c(h, 0.0), c(-h, 0.0))).unwrap() < 1e-30);
        let up = InputSpinor::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(fidelity(&up, &Spinor::down()).unwrap(), 0.0);
        assert!(fidelity(&up, &Spinor::new(c(2.0, 0.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn analytic_report() {
        for s in Statistics::both() {
            let r = analyze_protocol(&generic(), s).unwrap();
            assert!((r.success_probability - 0.5).abs() < 1e-15);
            assert!((r.conditional_fidelity - 1.0).abs() < 1e-12);
            assert!((r.total_fidelity - 5.0 / 6.0).abs() < 1e-15);
            assert!(r.beats_classical);
            assert!(r.monte_carlo.is_none());
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(run_protocol(&generic(), Statistics::Boson, 0, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic_across_execution_modes() {
        let a = run_protocol_with(&generic(), Statistics::Fermion, 20_000, 7, Execution::Sequential).unwrap();
        let b = run_protocol_with(&generic(), Statistics::Fermion, 20_000, 7, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c2 = run_protocol_with(&generic(), Statistics::Fermion, 20_000, 8, Execution::Sequential).unwrap();
        assert_ne!(a.monte_carlo, c2.monte_carlo);
    }

    #[test]
    fn support_outside_the_two_regions_is_rejected() {
        let a = Alphabet::new(["L", "R", "X"]).unwrap();
        let v = 1.0 / 3f64.sqrt();
        let psi = SpatialWavefunction::new(a, vec![c(v, 0.0), c(v, 0.0), c(v, 0.0)]).unwrap();
        let pair = opposite_spin_pair(Statistics::Boson, &psi, &psi).unwrap();
        let err = expand_with_pair(&generic(), &pair, &Region::new("L"), &Region::new("R")).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
