//! No-label two-particle states and their inner products.
//!
//! A two-particle state is a formal linear combination of unordered pairs
//! `|φ, χ⟩` with the exchange rule `|φ, χ⟩ = η |χ, φ⟩`. Inner products are
//!
//! ```text
//! ⟨φ'₁, φ'₂ | φ₁, φ₂⟩ = ⟨φ'₁|φ₁⟩⟨φ'₂|φ₂⟩ + η ⟨φ'₁|φ₂⟩⟨φ'₂|φ₁⟩
//! ⟨φ' | φ₁, φ₂⟩      = ⟨φ'|φ₁⟩ |φ₂⟩ + η ⟨φ'|φ₂⟩ |φ₁⟩
//! ```
//!
//! No particle labels ever appear: states are characterized by the set of
//! one-particle states alone.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::basis::{Alphabet, SingleParticleState, Statistics};
use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

/// Coefficients below this magnitude are dropped after canonicalization.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub first: SingleParticleState,
    pub second: SingleParticleState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleState {
    statistics: Statistics,
    alphabet: Alphabet,
    terms: Vec<Term>,
}

impl TwoParticleState {
    /// The elementary state `|φ, χ⟩`.
    pub fn pair(statistics: Statistics, first: SingleParticleState, second: SingleParticleState) -> Result<Self> {
        Self::from_terms(statistics, [(Complex64::new(1.0, 0.0), first, second)])
    }

    pub fn from_terms<I>(statistics: Statistics, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, SingleParticleState, SingleParticleState)>,
    {
        let mut alphabet: Option<Alphabet> = None;
        let mut raw = Vec::new();
        for (coeff, first, second) in terms {
            first.alphabet().ensure_same(second.alphabet())?;
            match &alphabet {
                Some(a) => a.ensure_same(first.alphabet())?,
                None => alphabet = Some(first.alphabet().clone()),
            }
            if !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(Error::domain("non-finite two-particle coefficient"));
            }
            raw.push(Term { coeff, first, second });
        }
        let alphabet = alphabet.ok_or_else(|| Error::domain("two-particle state needs at least one term"))?;
        Ok(TwoParticleState {
            statistics,
            alphabet,
            terms: canonicalize(statistics, raw),
        })
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Canonical terms: within each pair `first ≤ second` in the fixed
    /// coefficient order, equal pairs merged, negligible terms pruned.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// True when every term cancelled (e.g. a fermionic `|φ, φ⟩`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| (t.coeff * c, t.first.clone(), t.second.clone()));
        self.rebuild(terms)
    }

    pub fn add(&self, other: &TwoParticleState) -> Result<Self> {
        self.check_compatible(other)?;
        let terms = self
            .terms
            .iter()
            .chain(&other.terms)
            .map(|t| (t.coeff, t.first.clone(), t.second.clone()));
        Ok(self.rebuild(terms))
    }

    /// Applies a one-particle operator `f` to both factors of every term.
    pub fn map_factors<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&SingleParticleState) -> SingleParticleState,
    {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| (t.coeff, f(&t.first), f(&t.second)))
            .collect();
        self.rebuild(terms)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoParticleState) -> Result<Complex64> {
        self.check_compatible(other)?;
        let eta = self.statistics.eta();
        let mut acc = Complex64::new(0.0, 0.0);
        for bra in &self.terms {
            for ket in &other.terms {
                acc += bra.coeff.conj() * ket.coeff * pair_amplitude(eta, (&bra.first, &bra.second), ket)?;
            }
        }
        Ok(acc)
    }

    /// `‖self − other‖ ≤ tol`.
    pub fn approx_eq(&self, other: &TwoParticleState, tol: f64) -> Result<bool> {
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)))?;
        let d2 = diff.inner(&diff)?.re;
        Ok(d2 <= tol * tol)
    }

    fn rebuild<I>(&self, terms: I) -> Self
    where
        I: IntoIterator<Item = (Complex64, SingleParticleState, SingleParticleState)>,
    {
        let raw = terms
            .into_iter()
            .map(|(coeff, first, second)| Term { coeff, first, second })
            .collect();
        TwoParticleState {
            statistics: self.statistics,
            alphabet: self.alphabet.clone(),
            terms: canonicalize(self.statistics, raw),
        }
    }

    fn check_compatible(&self, other: &TwoParticleState) -> Result<()> {
        if self.statistics != other.statistics {
            return Err(Error::StatisticsMismatch);
        }
        self.alphabet.ensure_same(&other.alphabet)
    }
}

fn canonicalize(statistics: Statistics, raw: Vec<Term>) -> Vec<Term> {
    let eta = statistics.eta();
    let mut out: Vec<Term> = Vec::with_capacity(raw.len());
    for mut t in raw {
        if t.first.canonical_cmp(&t.second) == Ordering::Greater {
            std::mem::swap(&mut t.first, &mut t.second);
            t.coeff *= eta;
        }
        if statistics == Statistics::Fermion && parallel(&t.first, &t.second) {
            continue;
        }
        match out.iter_mut().find(|o| o.first == t.first && o.second == t.second) {
            Some(o) => o.coeff += t.coeff,
            None => out.push(t),
        }
    }
    out.retain(|t| {
        let weight = t.coeff.norm() * (t.first.norm_sqr() * t.second.norm_sqr()).sqrt();
        weight > PRUNE_THRESHOLD
    });
    out
}

/// `φ ∝ χ` up to a global phase (Cauchy–Schwarz saturated).
fn parallel(a: &SingleParticleState, b: &SingleParticleState) -> bool {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return true;
    }
    let ov = a.inner(b).map(|z| z.norm_sqr()).unwrap_or(0.0);
    na * nb - ov <= PRUNE_THRESHOLD * PRUNE_THRESHOLD * na * nb
}

fn pair_amplitude(eta: f64, bra: (&SingleParticleState, &SingleParticleState), ket: &Term) -> Result<Complex64> {
    let direct = bra.0.inner(&ket.first)? * bra.1.inner(&ket.second)?;
    let exchange = bra.0.inner(&ket.second)? * bra.1.inner(&ket.first)?;
    Ok(direct + exchange * eta)
}

/// Same-dimensionality inner product `⟨φ'₁, φ'₂ | ket⟩`.
pub fn overlap_two(bra: (&SingleParticleState, &SingleParticleState), ket: &TwoParticleState) -> Result<Complex64> {
    bra.0.alphabet().ensure_same(bra.1.alphabet())?;
    ket.alphabet().ensure_same(bra.0.alphabet())?;
    let eta = ket.statistics().eta();
    ket.terms()
        .iter()
        .map(|t| pair_amplitude(eta, bra, t).map(|a| a * t.coeff))
        .sum()
}

/// Dimension-reducing inner product `⟨φ'|ket⟩`, an unnormalized
/// one-particle state.
pub fn partial_overlap(bra: &SingleParticleState, ket: &TwoParticleState) -> Result<SingleParticleState> {
    ket.alphabet().ensure_same(bra.alphabet())?;
    let eta = ket.statistics().eta();
    let mut out = SingleParticleState::zero(ket.alphabet().clone());
    for t in ket.terms() {
        out.add_scaled(t.coeff * bra.inner(&t.first)?, &t.second)?;
        out.add_scaled(t.coeff * bra.inner(&t.second)? * eta, &t.first)?;
    }
    Ok(out)
}

/// `√⟨Ψ|Ψ⟩`.
pub fn norm(state: &TwoParticleState) -> Result<f64> {
    let self_overlap = state.inner(state)?;
    if self_overlap.im.abs() > DEFAULT_TOLERANCE * self_overlap.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "self-overlap has imaginary part {:e}",
            self_overlap.im
        )));
    }
    if self_overlap.re < -DEFAULT_TOLERANCE {
        return Err(Error::Consistency(format!(
            "negative self-overlap {:e}",
            self_overlap.re
        )));
    }
    Ok(self_overlap.re.max(0.0).sqrt())
}

/// Returns `state / ‖state‖`.
pub fn normalized(state: &TwoParticleState) -> Result<TwoParticleState> {
    let n = norm(state)?;
    if n <= PRUNE_THRESHOLD {
        return Err(Error::domain("cannot normalize a null two-particle state"));
    }
    Ok(state.scale(Complex64::new(1.0 / n, 0.0)))
}
