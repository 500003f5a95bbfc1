//! Command-line front end: configuration loading, sweeps and report
//! rendering. The binary in `src/bin/slocc.rs` is a thin wrapper.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{concurrence_spread, decompose_outcomes, LabeledPairState};
use crate::basis::{Alphabet, Region, SpatialWavefunction, Statistics};
use crate::check::{run_equivalence_suite, SuiteOptions, SuiteReport};
use crate::entanglement::{
    entanglement_of_formation, opposite_spin_pair, operational_entanglement, operational_entanglement_of_state, project_lr,
    ModeAmplitudes,
};
use crate::error::Error;
use crate::exec::Execution;
use crate::teleport::{analyze_protocol, run_protocol, InputSpinor, TeleportationReport};

/// Normalization slack for hand-written inputs.
pub const INPUT_TOLERANCE: f64 = 1e-9;

/// Maximum tolerated `|E_LR − E_f|` in emitted rows.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical consistency failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "slocc", version, about = "Operational entanglement and conditional teleportation with identical particles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the spatial overlap and tabulate P_LR, E_LR, C and E_f.
    Entanglement(CommonArgs),
    /// Analyze (and optionally sample) the conditional teleportation protocol.
    Teleport(CommonArgs),
    /// Localized measurements on an entangled pair of distinguishable particles.
    CompareDistinguishable(CommonArgs),
    /// Randomized equivalence against the symmetrized-tensor oracle.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Perturb every no-label inner product by this amount (exercises the
    /// failure path).
    #[arg(long, hide = true)]
    pub inject_fault: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

type C2 = [f64; 2];

fn to_complex(c: C2) -> Complex64 {
    Complex64::new(c[0], c[1])
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub statistics: Option<Statistics>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    #[serde(default)]
    pub regions: RegionsConfig,
    pub wavefunctions: Option<WavefunctionsConfig>,
    pub input: Option<SpinorConfig>,
    pub sweep: Option<SweepConfig>,
    pub baseline: Option<SpinorConfig>,
    #[serde(default)]
    pub oracle_check: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    #[serde(default = "default_left")]
    pub left: String,
    #[serde(default = "default_right")]
    pub right: String,
    /// Where the distinguishable particle sits; a label only.
    #[serde(default = "default_source")]
    pub source: String,
}

fn default_left() -> String {
    "L".into()
}
fn default_right() -> String {
    "R".into()
}
fn default_source() -> String {
    "L'".into()
}

impl Default for RegionsConfig {
    fn default() -> Self {
        RegionsConfig {
            left: default_left(),
            right: default_right(),
            source: default_source(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavefunctionsConfig {
    pub psi: BTreeMap<String, C2>,
    pub psi_prime: BTreeMap<String, C2>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinorConfig {
    pub a: C2,
    pub b: C2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `t ∈ [0, 1]`: `θ = tπ/4`, `θ' = π/2 − tπ/4`, from separated to
    /// complete overlap.
    Overlap,
    /// Mirrored amplitudes with `P_L = P'_R = p`.
    PLeft,
    /// `l = cos θ`, `r = sin θ`; ψ' from the configuration.
    Theta,
    /// `l' = cos θ'`, `r' = sin θ'`; ψ from the configuration.
    ThetaPrime,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_cases")]
    pub cases: u64,
    #[serde(default)]
    pub adversarial_fermions: bool,
    pub inject_fault: Option<f64>,
}

fn default_cases() -> u64 {
    1000
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cases: default_cases(),
            adversarial_fermions: false,
            inject_fault: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn apply(&mut self, args: &CommonArgs) {
        if args.seed.is_some() {
            self.seed = args.seed;
        }
        if args.trials.is_some() {
            self.trials = args.trials;
        }
        if args.output.is_some() {
            self.output.path = args.output.clone();
        }
        if args.format.is_some() {
            self.output.format = args.format;
        }
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics.unwrap_or(Statistics::Boson)
    }

    pub fn left(&self) -> Region {
        Region::new(self.regions.left.clone())
    }

    pub fn right(&self) -> Region {
        Region::new(self.regions.right.clone())
    }

    /// ψ and ψ' over the alphabet `[left, right, others…]`, renormalized
    /// after a check at [`INPUT_TOLERANCE`]. Defaults to `ψ = ψ' = (|L⟩ + |R⟩)/√2`.
    pub fn wavefunctions(&self) -> Result<(SpatialWavefunction, SpatialWavefunction), CliError> {
        let (left, right) = (&self.regions.left, &self.regions.right);
        if left == right {
            return Err(CliError::Config("left and right regions must differ".into()));
        }
        let Some(w) = &self.wavefunctions else {
            let a = Alphabet::new([left.as_str(), right.as_str()])?;
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            let psi0 = SpatialWavefunction::new(a, vec![h, h])?;
            return Ok((psi0.clone(), psi0));
        };
        let mut names = vec![left.clone(), right.clone()];
        for k in w.psi.keys().chain(w.psi_prime.keys()) {
            if !names.contains(k) {
                names.push(k.clone());
            }
        }
        for (label, map) in [("psi", &w.psi), ("psi_prime", &w.psi_prime)] {
            for region in [left, right] {
                if !map.contains_key(region) {
                    return Err(CliError::Config(format!("wavefunction {label} has no amplitude for region `{region}`")));
                }
            }
        }
        let alphabet = Alphabet::new(names.iter().map(String::as_str))?;
        let build = |label: &str, map: &BTreeMap<String, C2>| -> Result<SpatialWavefunction, CliError> {
            let amps: Vec<Complex64> = alphabet
                .regions()
                .iter()
                .map(|r| map.get(r.as_str()).copied().map(to_complex).unwrap_or_default())
                .collect();
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if (n - 1.0).abs() > INPUT_TOLERANCE {
                return Err(CliError::Config(format!("wavefunction {label} has squared norm {n}, expected 1")));
            }
            let s = 1.0 / n.sqrt();
            Ok(SpatialWavefunction::new(alphabet.clone(), amps.iter().map(|a| a * s).collect())?)
        };
        Ok((build("psi", &w.psi)?, build("psi_prime", &w.psi_prime)?))
    }

    fn spinor(cfg: Option<SpinorConfig>, what: &str, default: (C2, C2)) -> Result<InputSpinor, CliError> {
        let (a, b) = cfg.map_or(default, |c| (c.a, c.b));
        let (a, b) = (to_complex(a), to_complex(b));
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > INPUT_TOLERANCE {
            return Err(CliError::Config(format!("{what} has squared norm {n}, expected 1")));
        }
        let s = 1.0 / n.sqrt();
        Ok(InputSpinor::new(a * s, b * s)?)
    }

    pub fn input(&self) -> Result<InputSpinor, CliError> {
        Self::spinor(self.input, "input spinor", ([1.0, 0.0], [0.0, 0.0]))
    }

    pub fn baseline(&self) -> Result<InputSpinor, CliError> {
        Self::spinor(self.baseline, "baseline coefficients", ([FRAC_1_SQRT_2, 0.0], [FRAC_1_SQRT_2, 0.0]))
    }

    /// Mode amplitudes for every sweep point (or the single configured
    /// point), paired with the sweep value.
    pub fn sweep_points(&self) -> Result<Vec<(Option<f64>, ModeAmplitudes)>, CliError> {
        let (psi, psi_p) = self.wavefunctions()?;
        let fixed = ModeAmplitudes::from_wavefunctions(&psi, &psi_p, &self.left(), &self.right())?;
        let Some(sweep) = self.sweep else {
            return Ok(vec![(None, fixed)]);
        };
        if sweep.steps == 0 {
            return Err(CliError::Config("sweep.steps must be at least 1".into()));
        }
        sweep
            .values()
            .into_iter()
            .map(|x| {
                let m = match sweep.parameter {
                    SweepParameter::Overlap => {
                        if !(0.0..=1.0).contains(&x) {
                            return Err(CliError::Config(format!("overlap parameter {x} outside [0, 1]")));
                        }
                        ModeAmplitudes::from_angles(x * FRAC_PI_4, FRAC_PI_2 - x * FRAC_PI_4)
                    }
                    SweepParameter::PLeft => ModeAmplitudes::mirrored(x)?,
                    SweepParameter::Theta => {
                        let t = ModeAmplitudes::from_angles(x, 0.0);
                        ModeAmplitudes { l: t.l, r: t.r, ..fixed }
                    }
                    SweepParameter::ThetaPrime => {
                        let t = ModeAmplitudes::from_angles(0.0, x);
                        ModeAmplitudes {
                            l_prime: t.l_prime,
                            r_prime: t.r_prime,
                            ..fixed
                        }
                    }
                };
                Ok((Some(x), m))
            })
            .collect()
    }

    fn mode_wavefunctions(&self, m: &ModeAmplitudes) -> Result<(SpatialWavefunction, SpatialWavefunction), CliError> {
        let a = Alphabet::new([self.regions.left.as_str(), self.regions.right.as_str()])?;
        let wf = |x: Complex64, y: Complex64| -> Result<SpatialWavefunction, CliError> {
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if (n * n - 1.0).abs() > INPUT_TOLERANCE {
                return Err(CliError::Config(format!(
                    "wavefunction weight on the two measurement regions is {}, expected 1",
                    n * n
                )));
            }
            Ok(SpatialWavefunction::new(a.clone(), vec![x / n, y / n])?)
        };
        Ok((wf(m.l, m.r)?, wf(m.l_prime, m.r_prime)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementRow {
    pub sweep_param: Option<f64>,
    #[serde(rename = "P_L")]
    pub p_l: f64,
    #[serde(rename = "P_L_prime")]
    pub p_l_prime: f64,
    #[serde(rename = "P_R")]
    pub p_r: f64,
    #[serde(rename = "P_R_prime")]
    pub p_r_prime: f64,
    #[serde(rename = "P_LR")]
    pub p_lr: f64,
    #[serde(rename = "E_LR")]
    pub e_lr: Option<f64>,
    #[serde(rename = "C")]
    pub concurrence: Option<f64>,
    #[serde(rename = "E_f")]
    pub e_f: Option<f64>,
    /// `"undefined"` when no operational correlations are observable.
    pub flag: String,
}

pub fn entanglement_rows(cfg: &RunConfig) -> Result<Vec<EntanglementRow>, CliError> {
    let points = cfg.sweep_points()?;
    let statistics = cfg.statistics();
    let (left, right) = (cfg.left(), cfg.right());
    let full_config = cfg.sweep.is_none();
    let rows = Execution::default().map_range(points.len(), |i| {
        let (x, m) = &points[i];
        let (psi, psi_p) = if full_config { cfg.wavefunctions()? } else { cfg.mode_wavefunctions(m)? };
        entanglement_row(*x, &psi, &psi_p, statistics, &left, &right)
    });
    rows.into_iter().collect()
}

fn entanglement_row(
    sweep_param: Option<f64>,
    psi: &SpatialWavefunction,
    psi_prime: &SpatialWavefunction,
    statistics: Statistics,
    left: &Region,
    right: &Region,
) -> Result<EntanglementRow, CliError> {
    let m = ModeAmplitudes::from_wavefunctions(psi, psi_prime, left, right)?;
    let p = m.probabilities();
    let state = opposite_spin_pair(statistics, psi, psi_prime)?;
    let mut row = EntanglementRow {
        sweep_param,
        p_l: p.p_l,
        p_l_prime: p.p_l_prime,
        p_r: p.p_r,
        p_r_prime: p.p_r_prime,
        p_lr: p.conditional_weight(),
        e_lr: None,
        concurrence: None,
        e_f: None,
        flag: String::new(),
    };
    match operational_entanglement_of_state(&state, left, right) {
        Ok(e) => {
            let projected = project_lr(&state, left, right)?;
            let c = projected.concurrence()?;
            let ef = entanglement_of_formation(c)?;
            let closed = operational_entanglement(&p)?;
            if (e - ef).abs() > IDENTITY_TOLERANCE || (e - closed).abs() > IDENTITY_TOLERANCE {
                return Err(CliError::Numerical(format!(
                    "E_LR = {e}, closed form {closed}, E_f = {ef} disagree at sweep value {sweep_param:?}"
                )));
            }
            row.p_lr = projected.probability;
            row.e_lr = Some(e);
            row.concurrence = Some(c);
            row.e_f = Some(ef);
        }
        Err(Error::NoOperationalCorrelations { .. }) => row.flag = "undefined".into(),
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRow {
    pub sweep_param: Option<f64>,
    pub mode_a: String,
    pub mode_b: String,
    pub probability: f64,
    pub concurrence: Option<f64>,
    pub expected_concurrence: f64,
    /// Spread of the branch concurrences at this point (zero for labeled
    /// particles).
    pub concurrence_spread: f64,
    /// Concurrence of the projected identical-particle state with the same
    /// mode amplitudes.
    pub identical_concurrence: Option<f64>,
}

pub fn baseline_rows(cfg: &RunConfig) -> Result<Vec<BaselineRow>, CliError> {
    let coeffs = cfg.baseline()?;
    let (left, right) = (cfg.left(), cfg.right());
    let points = cfg.sweep_points()?;
    let full_config = cfg.sweep.is_none();
    let per_point = Execution::default().map_range(points.len(), |i| -> Result<Vec<BaselineRow>, CliError> {
        let (x, m) = &points[i];
        let (psi, psi_p) = if full_config { cfg.wavefunctions()? } else { cfg.mode_wavefunctions(m)? };
        let labeled = LabeledPairState::new(coeffs.a, coeffs.b, psi.clone(), psi_p.clone())?;
        let branches = decompose_outcomes(&labeled, &left, &right)?;
        let spread = concurrence_spread(&branches);
        let identical = opposite_spin_pair(cfg.statistics(), &psi, &psi_p)?;
        let identical_concurrence = match project_lr(&identical, &left, &right) {
            Ok(p) => Some(p.concurrence()?),
            Err(Error::ProjectionFailure { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(branches
            .into_iter()
            .map(|b| BaselineRow {
                sweep_param: *x,
                mode_a: b.mode_a.to_string(),
                mode_b: b.mode_b.to_string(),
                probability: b.probability,
                concurrence: b.concurrence,
                expected_concurrence: labeled.concurrence(),
                concurrence_spread: spread,
                identical_concurrence,
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn teleport_report(cfg: &RunConfig) -> Result<TeleportationReport, CliError> {
    let input = cfg.input()?;
    let statistics = cfg.statistics();
    let trials = cfg.trials.unwrap_or(0);
    let report = if trials > 0 {
        run_protocol(&input, statistics, trials, cfg.seed.unwrap_or(0))?
    } else {
        analyze_protocol(&input, statistics)?
    };
    if !report.beats_classical {
        return Err(CliError::Numerical(format!(
            "teleportation does not beat the classical threshold (conditional {}, total {})",
            report.conditional_fidelity, report.total_fidelity
        )));
    }
    Ok(report)
}

pub fn oracle_report(cfg: &RunConfig, inject_fault: Option<f64>) -> SuiteReport {
    run_equivalence_suite(&SuiteOptions {
        cases: cfg.oracle_check.cases,
        seed: cfg.seed.unwrap_or(0),
        tolerance: IDENTITY_TOLERANCE,
        adversarial_fermions: cfg.oracle_check.adversarial_fermions,
        inject_fault: inject_fault.or(cfg.oracle_check.inject_fault),
        execution: Execution::default(),
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_string<F>(header: &[&str], write_rows: F) -> Result<String, CliError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let wrap = |e: csv::Error| CliError::Numerical(format!("csv encoding: {e}"));
    w.write_record(header).map_err(wrap)?;
    write_rows(&mut w).map_err(wrap)?;
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numerical(e.to_string()))
}

pub fn render_entanglement(rows: &[EntanglementRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv_string(
            &["sweep_param", "P_L", "P_L_prime", "P_R", "P_R_prime", "P_LR", "E_LR", "C", "E_f", "flag"],
            |w| {
                for r in rows {
                    w.write_record([
                        opt(r.sweep_param),
                        r.p_l.to_string(),
                        r.p_l_prime.to_string(),
                        r.p_r.to_string(),
                        r.p_r_prime.to_string(),
                        r.p_lr.to_string(),
                        opt(r.e_lr),
                        opt(r.concurrence),
                        opt(r.e_f),
                        r.flag.clone(),
                    ])?;
                }
                Ok(())
            },
        ),
    }
}

pub fn render_baseline(rows: &[BaselineRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv_string(
            &[
                "sweep_param",
                "mode_a",
                "mode_b",
                "probability",
                "concurrence",
                "expected_concurrence",
                "concurrence_spread",
                "identical_concurrence",
            ],
            |w| {
                for r in rows {
                    w.write_record([
                        opt(r.sweep_param),
                        r.mode_a.clone(),
                        r.mode_b.clone(),
                        r.probability.to_string(),
                        opt(r.concurrence),
                        r.expected_concurrence.to_string(),
                        r.concurrence_spread.to_string(),
                        opt(r.identical_concurrence),
                    ])?;
                }
                Ok(())
            },
        ),
    }
}

pub fn render_teleport(report: &TeleportationReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => csv_string(&["outcome", "probability", "correction", "fidelity", "count"], |w| {
            for (i, o) in report.per_outcome.iter().enumerate() {
                let count = report.monte_carlo.as_ref().map(|m| m.counts[i].1.to_string()).unwrap_or_default();
                w.write_record([
                    o.outcome.name().to_string(),
                    o.probability.to_string(),
                    o.correction.map(|c| format!("{c:?}")).unwrap_or_default(),
                    o.fidelity.to_string(),
                    count,
                ])?;
            }
            Ok(())
        }),
    }
}

pub fn render_oracle(report: &SuiteReport, format: Option<Format>) -> Result<String, CliError> {
    match format {
        Some(Format::Json) => json(report),
        Some(Format::Csv) => csv_string(&["quantity", "max_abs_deviation", "worst_case"], |w| {
            for d in &report.deviations {
                w.write_record([
                    d.quantity.to_string(),
                    d.max_abs_deviation.to_string(),
                    d.worst_case.map(|c| c.to_string()).unwrap_or_default(),
                ])?;
            }
            Ok(())
        }),
        None => {
            let mut s = String::new();
            let _ = writeln!(s, "oracle equivalence: {} cases, seed {}, tolerance {:e}", report.cases, report.seed, report.tolerance);
            for d in &report.deviations {
                let mark = if d.max_abs_deviation <= report.tolerance { "ok  " } else { "FAIL" };
                let worst = d.worst_case.map(|c| format!(" (case {c})")).unwrap_or_default();
                let _ = writeln!(s, "{mark} {:<24} {:.3e}{worst}", d.quantity, d.max_abs_deviation);
            }
            for e in &report.errors {
                let _ = writeln!(s, "FAIL {e}");
            }
            let _ = writeln!(s, "{}", if report.passed() { "PASS" } else { "FAIL" });
            Ok(s)
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(args);
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Entanglement(args) => {
            let cfg = load(&args)?;
            let rows = entanglement_rows(&cfg)?;
            emit(&cfg, &render_entanglement(&rows, cfg.output.format.unwrap_or(Format::Csv))?)
        }
        Command::Teleport(args) => {
            let cfg = load(&args)?;
            let report = teleport_report(&cfg)?;
            emit(&cfg, &render_teleport(&report, cfg.output.format.unwrap_or(Format::Json))?)
        }
        Command::CompareDistinguishable(args) => {
            let cfg = load(&args)?;
            let rows = baseline_rows(&cfg)?;
            emit(&cfg, &render_baseline(&rows, cfg.output.format.unwrap_or(Format::Csv))?)
        }
        Command::OracleCheck(args) => {
            let cfg = load(&args.common)?;
            let report = oracle_report(&cfg, args.inject_fault);
            emit(&cfg, &render_oracle(&report, cfg.output.format)?)?;
            if report.passed() {
                Ok(())
            } else {
                let worst: Vec<String> = report
                    .deviations
                    .iter()
                    .filter(|d| d.max_abs_deviation > report.tolerance)
                    .map(|d| format!("{} = {:e} (case {:?})", d.quantity, d.max_abs_deviation, d.worst_case))
                    .chain(report.errors.iter().cloned())
                    .collect();
                Err(CliError::Numerical(format!("oracle mismatch: {}", worst.join("; "))))
            }
        }
    }
}
