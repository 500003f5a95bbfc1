//! Randomized equivalence between the no-label computations and the tensor
//! oracle.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{overlap_two, partial_overlap, TwoParticleState};
use crate::basis::{Alphabet, Region, SpatialWavefunction, Statistics};
use crate::baseline::{decompose_outcomes, LabeledPairState};
use crate::entanglement::{
    condition_on_region, localized_partial_trace, operational_entanglement, operational_entanglement_of_state, project_lr,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::oracle::{self, embed};
use crate::random;
use crate::teleport::{expand_protocol, outcome_probabilities, Outcome, Sector};

pub const QUANTITIES: [&str; 12] = [
    "inner_product",
    "partial_overlap",
    "localized_trace",
    "reduced_matrix",
    "projection",
    "entropy",
    "closed_form_entropy",
    "concurrence",
    "teleport_branches",
    "teleport_probabilities",
    "exchange_symmetry",
    "baseline",
];

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub cases: u64,
    pub seed: u64,
    pub tolerance: f64,
    /// Restrict to fermions with repeated and swapped factors.
    pub adversarial_fermions: bool,
    /// Offset added to every no-label inner product before comparison.
    pub inject_fault: Option<f64>,
    pub execution: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            cases: 1000,
            seed: 0,
            tolerance: 1e-10,
            adversarial_fermions: false,
            inject_fault: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub quantity: &'static str,
    pub max_abs_deviation: f64,
    pub worst_case: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub cases: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub deviations: Vec<Deviation>,
    pub errors: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.deviations.iter().all(|d| d.max_abs_deviation <= self.tolerance)
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|d| d.max_abs_deviation).fold(0.0, f64::max)
    }

    pub fn deviation(&self, quantity: &str) -> Option<f64> {
        self.deviations.iter().find(|d| d.quantity == quantity).map(|d| d.max_abs_deviation)
    }
}

pub fn run_equivalence_suite(opts: &SuiteOptions) -> SuiteReport {
    let results = opts.execution.map_range(opts.cases as usize, |i| run_case(opts, i as u64));
    let mut deviations: Vec<Deviation> = QUANTITIES
        .iter()
        .map(|&q| Deviation {
            quantity: q,
            max_abs_deviation: 0.0,
            worst_case: None,
        })
        .collect();
    let mut errors = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(devs) => {
                for (d, v) in deviations.iter_mut().zip(devs) {
                    if v.is_nan() || v > d.max_abs_deviation {
                        d.max_abs_deviation = if v.is_nan() { f64::INFINITY } else { v };
                        d.worst_case = Some(i as u64);
                    }
                }
            }
            Err(e) => errors.push(format!("case {i}: {e}")),
        }
    }
    SuiteReport {
        cases: opts.cases,
        seed: opts.seed,
        tolerance: opts.tolerance,
        deviations,
        errors,
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn adversarial_state<R: Rng>(rng: &mut R, alphabet: &Alphabet) -> Result<TwoParticleState> {
    let phi = random::single_particle(rng, alphabet);
    let chi = random::single_particle(rng, alphabet);
    let xi = random::single_particle(rng, alphabet);
    let raw = vec![
        (random::complex(rng), phi.clone(), phi.scale(random::phase(rng))),
        (random::complex(rng), phi.clone(), chi.clone()),
        (random::complex(rng), chi.clone(), phi.clone()),
        (random::complex(rng), xi.clone(), chi.clone()),
        (random::complex(rng), chi, xi),
    ];
    crate::algebra::normalized(&TwoParticleState::from_terms(Statistics::Fermion, raw)?)
}

fn run_case(opts: &SuiteOptions, index: u64) -> Result<[f64; 12]> {
    let mut rng = random::case_rng(opts.seed, index);
    let statistics = if opts.adversarial_fermions || index % 2 == 1 {
        Statistics::Fermion
    } else {
        Statistics::Boson
    };
    let alphabet = Alphabet::new(["L", "R", "X"])?;
    let (l, r) = (Region::new("L"), Region::new("R"));
    let mut dev = [0.0f64; 12];

    let state = if opts.adversarial_fermions {
        adversarial_state(&mut rng, &alphabet)?
    } else {
        let terms = 1 + (index % 3) as usize;
        random::two_particle(&mut rng, &alphabet, statistics, terms)?
    };
    let emb = embed(&state);
    dev[10] = emb.swap_defect();

    // inner products of both dimensionalities
    let b1 = random::single_particle(&mut rng, &alphabet);
    let b2 = random::single_particle(&mut rng, &alphabet);
    let fault = Complex64::new(opts.inject_fault.unwrap_or(0.0), 0.0);
    let lhs = overlap_two((&b1, &b2), &state)? + fault;
    let rhs = oracle::oracle_overlap((b1.coeffs(), b2.coeffs()), &emb);
    dev[0] = (lhs - rhs).norm();
    let po = partial_overlap(&b1, &state)?;
    dev[1] = max_diff(po.coeffs(), &oracle::oracle_partial_overlap(b1.coeffs(), &emb));

    // reduced matrices and projections on a generic state and on the
    // opposite-spin pair built from random mode amplitudes
    let modes = random::mode_amplitudes(&mut rng);
    let pair = modes.state(statistics)?;
    let pair_emb = embed(&pair);
    let lr = Alphabet::lr();
    for (st, e, a) in [(&state, &emb, &alphabet), (&pair, &pair_emb, &lr)] {
        let (trace_region, cond_region) = if rng.random_bool(0.5) { (&l, &r) } else { (&r, &l) };
        let rho = localized_partial_trace(st, trace_region)?;
        dev[2] = dev[2].max(rho.max_abs_diff(&oracle::oracle_localized_trace(e, a, trace_region)?));
        match (
            condition_on_region(&rho, cond_region),
            oracle::oracle_reduced_matrix(e, a, trace_region, cond_region),
        ) {
            (Ok(x), Ok(y)) => {
                dev[3] = dev[3].max(x.max_abs_diff(&y)).max((x.weight() - y.weight()).abs());
                let s = crate::entanglement::von_neumann_entropy(&x)?;
                dev[5] = dev[5].max((s - oracle::oracle_entropy(&y)).abs());
            }
            (Err(Error::NoOperationalCorrelations { .. }), Err(Error::NoOperationalCorrelations { .. })) => {}
            (x, y) => {
                return Err(Error::Consistency(format!(
                    "conditioning disagrees: {:?} vs {:?}",
                    x.err(),
                    y.err()
                )))
            }
        }
        let p = project_lr(st, &l, &r)?;
        let (amps, prob) = oracle::oracle_project_lr(e, a, &l, &r)?;
        dev[4] = dev[4].max(max_diff(&p.amplitudes, &amps)).max((p.probability - prob).abs());
        dev[7] = dev[7].max((p.concurrence()? - oracle::oracle_concurrence(&amps)).abs());
    }
    let e_pair = operational_entanglement_of_state(&pair, &l, &r)?;
    let oracle_e = oracle::oracle_entropy(&oracle::oracle_reduced_matrix(&pair_emb, &lr, &l, &r)?);
    dev[5] = dev[5].max((e_pair - oracle_e).abs());
    dev[6] = (operational_entanglement(&modes.probabilities())? - oracle_e).abs();

    // teleportation branches
    let input = random::input_spinor(&mut rng);
    let branches = expand_protocol(&input, statistics)?;
    let oracle_branches = oracle::oracle_teleport_branches(input.a, input.b, statistics);
    for ob in &oracle_branches {
        let br = branches
            .iter()
            .find(|b| b.sector == ob.sector && b.bell == ob.bell)
            .ok_or_else(|| Error::Consistency(format!("no branch for {:?}/{:?}", ob.sector, ob.bell)))?;
        let d = match (&br.residual, ob.sector) {
            (Some(res), _) => max_diff(res.scale(br.coefficient).coeffs(), &ob.amplitude),
            (None, Sector::ZeroInL) => (br.probability() - ob.probability).abs(),
            (None, _) => f64::INFINITY,
        };
        dev[8] = dev[8].max(d);
    }
    for (outcome, p) in outcome_probabilities(&branches) {
        let q: f64 = oracle_branches
            .iter()
            .filter(|b| match outcome {
                Outcome::ZeroInL => b.sector == Sector::ZeroInL,
                Outcome::TwoInL => b.sector == Sector::TwoInL,
                _ => b.sector == Sector::OneInL && b.bell.map(Outcome::from) == Some(outcome),
            })
            .map(|b| b.probability)
            .sum();
        dev[9] = dev[9].max((p - q).abs());
    }

    // distinguishable baseline
    let ab = random::input_spinor(&mut rng);
    let bm = random::mode_amplitudes(&mut rng);
    let (psi, psi_p) = (
        SpatialWavefunction::new(lr.clone(), vec![bm.l, bm.r])?,
        SpatialWavefunction::new(lr.clone(), vec![bm.l_prime, bm.r_prime])?,
    );
    let labeled = LabeledPairState::new(ab.a, ab.b, psi.clone(), psi_p.clone())?;
    for br in decompose_outcomes(&labeled, &l, &r)? {
        let expect_p = psi.probability(&br.mode_a)? * psi_p.probability(&br.mode_b)?;
        dev[11] = dev[11].max((br.probability - expect_p).abs());
        if let (Some(amps), Some(c)) = (br.amplitudes, br.concurrence) {
            dev[11] = dev[11].max((c - oracle::oracle_concurrence(&amps)).abs());
        }
    }
    Ok(dev)
}
