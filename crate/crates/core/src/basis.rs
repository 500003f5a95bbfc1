//! One-particle building blocks: exchange statistics, pseudospin, spatial
//! regions and the one-particle states built over a finite region alphabet.
//!
//! A one-particle state is a dense vector over `region × pseudospin`. The
//! mode index of `(region i, spin s)` is `2 i + s`, with `↓ = 0` and `↑ = 1`,
//! so that on a single region the ordering coincides with the two-qubit
//! computational basis `|0⟩ ≡ |↓⟩`, `|1⟩ ≡ |↑⟩`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Exchange sign: `+1` for bosons, `-1` for fermions.
    pub fn eta(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn both() -> [Statistics; 2] {
        [Statistics::Boson, Statistics::Fermion]
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => f.write_str("boson"),
            Statistics::Fermion => f.write_str("fermion"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pseudospin {
    Down,
    Up,
}

impl Pseudospin {
    pub const ALL: [Pseudospin; 2] = [Pseudospin::Down, Pseudospin::Up];

    pub fn index(self) -> usize {
        match self {
            Pseudospin::Down => 0,
            Pseudospin::Up => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pseudospin::Down => "↓",
            Pseudospin::Up => "↑",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(String);

impl Region {
    pub fn new(name: impl Into<String>) -> Self {
        Region(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Region {
    fn from(s: &str) -> Self {
        Region::new(s)
    }
}

/// Ordered, finite set of spatial regions shared by every state of a
/// computation. Cloning is cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet(Arc<[Region]>);

impl Alphabet {
    pub fn new<I, R>(regions: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Region>,
    {
        let regions: Vec<Region> = regions.into_iter().map(Into::into).collect();
        if regions.is_empty() {
            return Err(Error::domain("region alphabet is empty"));
        }
        for (i, r) in regions.iter().enumerate() {
            if regions[..i].contains(r) {
                return Err(Error::domain(format!("region `{r}` declared twice")));
            }
        }
        Ok(Alphabet(regions.into()))
    }

    /// The two-site alphabet `{L, R}`.
    pub fn lr() -> Self {
        Alphabet::new(["L", "R"]).expect("static alphabet")
    }

    pub fn regions(&self) -> &[Region] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension of the one-particle space, `2 × #regions`.
    pub fn mode_count(&self) -> usize {
        2 * self.0.len()
    }

    pub fn index_of(&self, region: &Region) -> Result<usize> {
        self.0
            .iter()
            .position(|r| r == region)
            .ok_or_else(|| Error::UnknownRegion(region.to_string()))
    }

    pub fn mode_index(&self, region: &Region, spin: Pseudospin) -> Result<usize> {
        Ok(2 * self.index_of(region)? + spin.index())
    }

    pub fn mode_label(&self, index: usize) -> String {
        let spin = Pseudospin::ALL[index % 2];
        format!("{}{}", self.0[index / 2], spin.symbol())
    }

    pub(crate) fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.names(),
                right: other.names(),
            })
        }
    }

    fn names(&self) -> Vec<String> {
        self.0.iter().map(|r| r.to_string()).collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(Region::as_str)).finish()
    }
}

/// Pseudospin-only state `up |↑⟩ + down |↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub fn new(up: Complex64, down: Complex64) -> Self {
        Spinor { up, down }
    }

    pub fn up() -> Self {
        Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn down() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn component(&self, spin: Pseudospin) -> Complex64 {
        match spin {
            Pseudospin::Up => self.up,
            Pseudospin::Down => self.down,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn scale(&self, c: Complex64) -> Spinor {
        Spinor::new(self.up * c, self.down * c)
    }
}

/// Spatial wavefunction restricted to the discrete amplitudes on each
/// declared region.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialWavefunction {
    alphabet: Alphabet,
    amplitudes: Vec<Complex64>,
}

impl SpatialWavefunction {
    pub fn new(alphabet: Alphabet, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(alphabet, amplitudes, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(alphabet: Alphabet, amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        if amplitudes.len() != alphabet.len() {
            return Err(Error::domain(format!(
                "wavefunction has {} amplitudes for {} regions",
                amplitudes.len(),
                alphabet.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > tol {
            return Err(Error::NotNormalized {
                what: "spatial wavefunction",
                norm_sqr,
            });
        }
        Ok(SpatialWavefunction { alphabet, amplitudes })
    }

    /// Builds a wavefunction from `(region, amplitude)` pairs; regions not
    /// listed get amplitude zero.
    pub fn from_pairs<'a, I>(alphabet: Alphabet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Complex64)>,
    {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); alphabet.len()];
        for (name, amp) in pairs {
            amplitudes[alphabet.index_of(&Region::new(name))?] = amp;
        }
        Self::new(alphabet, amplitudes)
    }

    pub fn localized(alphabet: Alphabet, region: &Region) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); alphabet.len()];
        amplitudes[alphabet.index_of(region)?] = Complex64::new(1.0, 0.0);
        Self::new(alphabet, amplitudes)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨region|ψ⟩`.
    pub fn amplitude(&self, region: &Region) -> Result<Complex64> {
        Ok(self.amplitudes[self.alphabet.index_of(region)?])
    }

    /// Probability `|⟨region|ψ⟩|²` of finding the particle in `region`.
    pub fn probability(&self, region: &Region) -> Result<f64> {
        Ok(self.amplitude(region)?.norm_sqr())
    }
}

/// One-particle state over `region × pseudospin`.
#[derive(Clone, PartialEq)]
pub struct SingleParticleState {
    alphabet: Alphabet,
    coeffs: Vec<Complex64>,
}

impl SingleParticleState {
    pub fn zero(alphabet: Alphabet) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); alphabet.mode_count()];
        SingleParticleState { alphabet, coeffs }
    }

    pub fn from_coeffs(alphabet: Alphabet, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != alphabet.mode_count() {
            return Err(Error::domain(format!(
                "one-particle state has {} coefficients, expected {}",
                coeffs.len(),
                alphabet.mode_count()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::domain("one-particle state has non-finite coefficients"));
        }
        Ok(SingleParticleState { alphabet, coeffs })
    }

    /// The localized basis state `|region spin⟩`.
    pub fn mode(alphabet: Alphabet, region: &Region, spin: Pseudospin) -> Result<Self> {
        let idx = alphabet.mode_index(region, spin)?;
        let mut state = SingleParticleState::zero(alphabet);
        state.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// `|ψ⟩ ⊗ |s⟩`.
    pub fn product(psi: &SpatialWavefunction, spinor: Spinor) -> Self {
        let alphabet = psi.alphabet().clone();
        let coeffs = psi
            .amplitudes()
            .iter()
            .flat_map(|&amp| [amp * spinor.down, amp * spinor.up])
            .collect();
        SingleParticleState { alphabet, coeffs }
    }

    /// `|ψ σ⟩`.
    pub fn with_spin(psi: &SpatialWavefunction, spin: Pseudospin) -> Self {
        let spinor = match spin {
            Pseudospin::Up => Spinor::up(),
            Pseudospin::Down => Spinor::down(),
        };
        Self::product(psi, spinor)
    }

    /// `|region⟩ ⊗ |s⟩`.
    pub fn localized_spinor(alphabet: Alphabet, region: &Region, spinor: Spinor) -> Result<Self> {
        let psi = SpatialWavefunction::localized(alphabet, region)?;
        Ok(Self::product(&psi, spinor))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, region: &Region, spin: Pseudospin) -> Result<Complex64> {
        Ok(self.coeffs[self.alphabet.mode_index(region, spin)?])
    }

    /// Pseudospin content on a single region, `(⟨region↑|self⟩, ⟨region↓|self⟩)`.
    pub fn spinor_at(&self, region: &Region) -> Result<Spinor> {
        let i = self.alphabet.index_of(region)?;
        Ok(Spinor::new(self.coeffs[2 * i + 1], self.coeffs[2 * i]))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &SingleParticleState) -> Result<Complex64> {
        self.alphabet.ensure_same(&other.alphabet)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SingleParticleState {
            alphabet: self.alphabet.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &SingleParticleState) -> Result<()> {
        self.alphabet.ensure_same(&other.alphabet)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    /// Applies a pseudospin unitary `[[u00, u01], [u10, u11]]` (rows and
    /// columns ordered `↓, ↑`) on every region.
    pub fn rotate_spin(&self, u: &[[Complex64; 2]; 2]) -> Self {
        let mut coeffs = self.coeffs.clone();
        for pair in coeffs.chunks_mut(2) {
            let (d, up) = (pair[0], pair[1]);
            pair[0] = u[0][0] * d + u[0][1] * up;
            pair[1] = u[1][0] * d + u[1][1] * up;
        }
        SingleParticleState {
            alphabet: self.alphabet.clone(),
            coeffs,
        }
    }

    /// Regions carrying non-negligible amplitude.
    pub fn support(&self, tol: f64) -> Vec<Region> {
        self.alphabet
            .regions()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.coeffs[2 * i].norm_sqr() + self.coeffs[2 * i + 1].norm_sqr() > tol)
            .map(|(_, r)| r.clone())
            .collect()
    }

    /// Fixed total order on coefficient vectors used to canonicalize
    /// unordered pairs.
    pub(crate) fn canonical_cmp(&self, other: &SingleParticleState) -> Ordering {
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let ord = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for SingleParticleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() > 0.0 {
                m.entry(&self.alphabet.mode_label(i), c);
            }
        }
        m.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eta_squares_to_one() {
        for s in Statistics::both() {
            assert_eq!(s.eta() * s.eta(), 1.0);
        }
        assert_eq!(Statistics::Boson.eta(), 1.0);
        assert_eq!(Statistics::Fermion.eta(), -1.0);
    }

    #[test]
    fn pseudospins_are_orthonormal() {
        let a = Alphabet::lr();
        let l = Region::new("L");
        let up = SingleParticleState::mode(a.clone(), &l, Pseudospin::Up).unwrap();
        let down = SingleParticleState::mode(a, &l, Pseudospin::Down).unwrap();
        assert_eq!(up.inner(&down).unwrap(), c(0.0, 0.0));
        assert_eq!(up.inner(&up).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn alphabet_rejects_duplicates_and_unknown_regions() {
        assert!(Alphabet::new(["L", "L"]).is_err());
        assert!(Alphabet::new(Vec::<&str>::new()).is_err());
        let a = Alphabet::lr();
        assert_eq!(
            a.index_of(&Region::new("Q")),
            Err(Error::UnknownRegion("Q".into()))
        );
    }

    #[test]
    fn wavefunction_normalization_is_checked() {
        let a = Alphabet::lr();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(SpatialWavefunction::new(a.clone(), vec![c(h, 0.0), c(0.0, h)]).is_ok());
        let err = SpatialWavefunction::new(a.clone(), vec![c(1.0, 0.0), c(0.1, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert!(SpatialWavefunction::with_tolerance(a, vec![c(1.0, 0.0), c(1e-5, 0.0)], 1e-9).is_ok());
    }

    #[test]
    fn product_state_factors() {
        let a = Alphabet::lr();
        let psi = SpatialWavefunction::new(a, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let s = Spinor::new(c(0.0, 1.0), c(0.0, 0.0));
        let phi = SingleParticleState::product(&psi, s);
        assert!((phi.norm_sqr() - 1.0).abs() < 1e-15);
        let at_r = phi.spinor_at(&Region::new("R")).unwrap();
        assert_eq!(at_r.up, c(0.0, 0.8) * c(0.0, 1.0));
        assert_eq!(at_r.down, c(0.0, 0.0));
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let a = Alphabet::lr();
        let b = Alphabet::new(["L", "R", "L'"]).unwrap();
        let x = SingleParticleState::mode(a, &Region::new("L"), Pseudospin::Up).unwrap();
        let y = SingleParticleState::mode(b, &Region::new("L"), Pseudospin::Up).unwrap();
        assert!(matches!(x.inner(&y), Err(Error::AlphabetMismatch { .. })));
    }
}
