//! End-to-end runs: emission, splitting, post-selection, noise, and the
//! experiments built on the resulting state.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{
    correlation, estimate_correlation, estimate_fidelity_white_noise, outcome_distribution,
    sample_counts_stream, Basis, CorrelationEstimate, CountsTable, FidelityEstimate,
    MeasurementSetting, OutcomeDistribution,
};
use crate::density::{add_white_noise, fidelity, DensityOperator};
use crate::error::{Error, Result};
use crate::fock::Spatial;
use crate::optics::{beamsplitter, three_way_split, JonesMatrix, ModeMap};
use crate::pdc::{pdc_state, PdcSpec};
use crate::postselect::{
    conditional_reference, postselect_one_per_mode, project_qubit, project_qubit_mixed,
};
use crate::qubit::{letter_ket, psi6_minus, LetterBasis, QubitState};
use crate::rng::{substream, HAAR_STREAM};
use crate::witness::{noise_tolerance, reduce_witness, witness_max_overlap, WitnessOperator};

/// Amplitude triples further than this from unit norm are rejected; closer
/// ones are rescaled.
const SPLIT_NORM_SLACK: f64 = 1e-6;
pub const INVARIANCE_TOL: f64 = 1e-10;
pub const OVERLAP_BOUND: f64 = 2.0 / 3.0;

/// Collective settings of a simulated run, in report order.
pub const RUN_SETTINGS: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

/// How one arm is divided into three output modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArmSplit {
    /// Two balanced beamsplitters in series: amplitudes (1/√2, 1/2, 1/2).
    Cascade,
    /// Equal amplitudes 1/√3.
    Symmetric,
    /// Explicit real amplitudes.
    Amplitudes([f64; 3]),
}

impl ArmSplit {
    fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cascade" => return Ok(ArmSplit::Cascade),
            "sym" | "symmetric" => return Ok(ArmSplit::Symmetric),
            _ => {}
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(Error::Split(format!(
                "expected three amplitudes, got {s:?}"
            )));
        };
        let mut amps = [0.0; 3];
        for (slot, text) in amps.iter_mut().zip([a, b, c]) {
            *slot = text
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Split(format!("bad amplitude {text:?}")))?;
        }
        let norm: f64 = amps.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > SPLIT_NORM_SLACK {
            return Err(Error::Split(format!(
                "amplitudes {s:?} have squared norm {norm}, expected 1"
            )));
        }
        let scale = norm.sqrt();
        Ok(ArmSplit::Amplitudes(amps.map(|x| x / scale)))
    }

    fn mode_map(&self, input: Spatial, outs: [Spatial; 3], aux: u8) -> Result<ModeMap> {
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            ArmSplit::Cascade => {
                let port = Spatial::Aux(aux);
                let first = beamsplitter(input, outs[0], port, r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2))?;
                let second =
                    beamsplitter(port, outs[1], outs[2], r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2))?;
                second.compose(&first)
            }
            ArmSplit::Symmetric => {
                let s = 1.0 / 3f64.sqrt();
                Ok(three_way_split(input, outs, [r(s); 3])?.map)
            }
            ArmSplit::Amplitudes(a) => Ok(three_way_split(input, outs, a.map(r))?.map),
        }
    }
}

impl fmt::Display for ArmSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArmSplit::Cascade => f.write_str("cascade"),
            ArmSplit::Symmetric => f.write_str("sym"),
            ArmSplit::Amplitudes([a, b, c]) => write!(f, "{a},{b},{c}"),
        }
    }
}

/// Splits for both arms. Text form: `cascade`, `sym`, `a1,a2,a3` (both
/// arms) or `a1,a2,a3/b1,b2,b3`; `cascade/sym` style mixes are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SplitConfig {
    pub a: ArmSplit,
    pub b: ArmSplit,
}

impl SplitConfig {
    pub fn both(split: ArmSplit) -> Self {
        SplitConfig { a: split, b: split }
    }

    /// Optical network taking arms a0, b0 to modes a..c and d..f.
    pub fn mode_map(&self) -> Result<ModeMap> {
        let arm_a = self
            .a
            .mode_map(Spatial::A0, [Spatial::A, Spatial::B, Spatial::C], 0)?;
        let arm_b = self
            .b
            .mode_map(Spatial::B0, [Spatial::D, Spatial::E, Spatial::F], 1)?;
        arm_b.compose(&arm_a)
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig::both(ArmSplit::Cascade)
    }
}

impl FromStr for SplitConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(SplitConfig::both(ArmSplit::parse(s)?)),
            Some((a, b)) => Ok(SplitConfig {
                a: ArmSplit::parse(a)?,
                b: ArmSplit::parse(b)?,
            }),
        }
    }
}

impl TryFrom<String> for SplitConfig {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SplitConfig> for String {
    fn from(s: SplitConfig) -> String {
        s.to_string()
    }
}

impl fmt::Display for SplitConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == self.b {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Emission phase in radians.
    pub phi: f64,
    pub split: SplitConfig,
    /// White-noise fraction mixed into the post-selected state.
    #[serde(alias = "noise_p")]
    pub noise: f64,
    /// Sixfold events per measurement setting.
    pub shots: u64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            phi: PI,
            split: SplitConfig::default(),
            noise: 0.0,
            shots: 113,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.phi.is_finite() {
            return Err(Error::NonFinitePhase(self.phi));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Probability(self.noise));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    /// Post-selected six-qubit state on modes a..f.
    pub state: QubitState,
    pub success_probability: f64,
    /// `|⟨Ψ₆⁻|ψ⟩|²`
    pub singlet_fidelity: f64,
}

/// Third-order emission, both splits, one-photon-per-mode post-selection.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let emitted = pdc_state(&PdcSpec::new(3, cfg.phi))?;
    let split = cfg.split.mode_map()?.apply(&emitted);
    let (state, success_probability) = postselect_one_per_mode(&split, &Spatial::OUTPUTS)?;
    let singlet_fidelity = state.overlap(&psi6_minus())?.norm_sqr();
    Ok(PipelineRun {
        state,
        success_probability,
        singlet_fidelity,
    })
}

/// Pipeline state with the configured white noise.
pub fn prepared_state(cfg: &PipelineConfig) -> Result<DensityOperator> {
    let run = run_pipeline(cfg)?;
    add_white_noise(&run.state, cfg.noise)
}

/// Sampling stream used for a setting: Z 0, X 1, Y 2, anything else 3.
pub fn setting_stream(setting: &MeasurementSetting) -> u64 {
    match setting.uniform_kind() {
        Some(Basis::Z) => 0,
        Some(Basis::X) => 1,
        Some(Basis::Y) => 2,
        _ => 3,
    }
}

#[derive(Clone, Debug)]
pub struct HistogramReport {
    pub theory: OutcomeDistribution,
    pub theory_correlation: f64,
    pub counts: Option<CountsTable>,
    pub estimate: Option<CorrelationEstimate>,
}

/// Theory distribution of the configured state, plus `shots` sampled events
/// when `shots > 0`.
pub fn histogram(cfg: &PipelineConfig, setting: &MeasurementSetting) -> Result<HistogramReport> {
    let rho = prepared_state(cfg)?;
    let theory = outcome_distribution(&rho, setting)?;
    let theory_correlation = correlation(&theory);
    let (counts, estimate) = if cfg.shots > 0 {
        let table = sample_counts_stream(&theory, cfg.shots, cfg.seed, setting_stream(setting));
        let est = estimate_correlation(&table)?;
        (Some(table), Some(est))
    } else {
        (None, None)
    };
    Ok(HistogramReport {
        theory,
        theory_correlation,
        counts,
        estimate,
    })
}

#[derive(Clone, Debug)]
pub struct SimulatedRun {
    /// One table per setting in [`RUN_SETTINGS`] order.
    pub tables: Vec<CountsTable>,
    pub correlations: Vec<CorrelationEstimate>,
    pub fidelity: FidelityEstimate,
}

/// Samples `shots` events for each of x⊗6, y⊗6, z⊗6 and applies the
/// correlation and white-noise fidelity estimators.
pub fn simulate_run(cfg: &PipelineConfig) -> Result<SimulatedRun> {
    let rho = prepared_state(cfg)?;
    let mut tables = Vec::with_capacity(3);
    let mut correlations = Vec::with_capacity(3);
    for basis in RUN_SETTINGS {
        let setting = MeasurementSetting::uniform(basis, 6);
        let d = outcome_distribution(&rho, &setting)?;
        let table = sample_counts_stream(&d, cfg.shots, cfg.seed, setting_stream(&setting));
        correlations.push(estimate_correlation(&table)?);
        tables.push(table);
    }
    let fidelity = estimate_fidelity_white_noise([
        (correlations[0].value, correlations[0].stderr),
        (correlations[1].value, correlations[1].stderr),
        (correlations[2].value, correlations[2].stderr),
    ])?;
    Ok(SimulatedRun {
        tables,
        correlations,
        fidelity,
    })
}

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub mode: Spatial,
    pub bra: char,
    pub probability: f64,
    /// Remaining five-qubit state; `None` when noise makes it mixed.
    pub state: Option<QubitState>,
    pub density: DensityOperator,
    /// Fidelity to the closed-form conditional state, where one is known.
    pub reference_fidelity: Option<f64>,
    /// Distribution in the report basis (H/V or D/A on every qubit).
    pub distribution: OutcomeDistribution,
}

/// Measures qubit `mode` of the configured state with outcome `bra`.
pub fn project(
    cfg: &PipelineConfig,
    mode: Spatial,
    bra: char,
    basis: LetterBasis,
) -> Result<ProjectionReport> {
    let bra_ket = letter_ket(bra)
        .ok_or_else(|| Error::Setting(format!("unknown polarization letter {bra:?}")))?;
    let run = run_pipeline(cfg)?;
    let position = run.state.position_of(mode).ok_or(Error::Position {
        position: usize::MAX,
        n: run.state.n_qubits(),
    })?;
    let (state, density, probability) = if cfg.noise == 0.0 {
        let (s, p) = project_qubit(&run.state, position, &bra_ket)?;
        let rho = DensityOperator::pure(&s);
        (Some(s), rho, p)
    } else {
        let rho = add_white_noise(&run.state, cfg.noise)?;
        let (r, p) = project_qubit_mixed(&rho, position, &bra_ket)?;
        (None, r, p)
    };
    let reference_fidelity = match conditional_reference(mode, bra) {
        Some((reference, _)) => Some(fidelity(&density, &reference)?),
        None => None,
    };
    let report_basis = match basis {
        LetterBasis::Hv => Basis::Z,
        LetterBasis::Da => Basis::X,
    };
    let distribution = outcome_distribution(
        &density,
        &MeasurementSetting::uniform(report_basis, density.n_qubits()),
    )?;
    Ok(ProjectionReport {
        mode,
        bra: bra.to_ascii_uppercase(),
        probability,
        state,
        density,
        reference_fidelity,
        distribution,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessFigures {
    /// Expectation on the ideal singlet.
    pub target_expectation: f64,
    pub noise_tolerance: f64,
    /// `tr(W)/64`
    pub normalized_trace: f64,
    /// Expectation on the configured (possibly noisy) state.
    pub state_expectation: f64,
}

#[derive(Clone, Debug)]
pub struct WitnessAnalysis {
    pub max_overlap: WitnessOperator,
    pub reduced: WitnessOperator,
    pub max_overlap_figures: WitnessFigures,
    pub reduced_figures: WitnessFigures,
}

/// Builds both witnesses for the singlet and evaluates them on the
/// configured state.
pub fn witness_analysis(cfg: &PipelineConfig) -> Result<WitnessAnalysis> {
    let target = psi6_minus();
    let rho = prepared_state(cfg)?;
    let max_overlap = witness_max_overlap(&target, OVERLAP_BOUND)?;
    let reduced = reduce_witness(&max_overlap)?;
    let figures = |w: &WitnessOperator| -> Result<WitnessFigures> {
        Ok(WitnessFigures {
            target_expectation: w.expectation(&target)?,
            noise_tolerance: noise_tolerance(w, &target)?,
            normalized_trace: w.normalized_trace(),
            state_expectation: w.expectation_mixed(&rho)?,
        })
    };
    Ok(WitnessAnalysis {
        max_overlap_figures: figures(&max_overlap)?,
        reduced_figures: figures(&reduced)?,
        max_overlap,
        reduced,
    })
}

/// Haar-random SU(2) element from three uniform variates:
/// `q = (√(1−u₁)·sin 2πu₂, √(1−u₁)·cos 2πu₂, √u₁·sin 2πu₃, √u₁·cos 2πu₃)`,
/// `a = q₀ + i·q₁`, `b = q₂ + i·q₃`, `U = [[a, −b*], [b, a*]]`.
pub fn haar_su2<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = 2.0 * PI;
    let (r1, r2) = ((1.0 - u1).sqrt(), u1.sqrt());
    let a = Complex64::new(r1 * (tau * u2).sin(), r1 * (tau * u2).cos());
    let b = Complex64::new(r2 * (tau * u3).sin(), r2 * (tau * u3).cos());
    Matrix2::new(a, -b.conj(), b, a.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub seed: u64,
    /// `max |1 − |⟨ψ|U⊗6|ψ⟩||` over trials, for the pure pipeline state.
    pub max_overlap_deviation: f64,
    /// Largest per-bin change of the configured state's distribution when
    /// every analyzer is rotated by `U`.
    pub max_bin_deviation: f64,
    /// `max |U⊗6 ρ U†⊗6 − ρ|` entrywise; present when noise is configured.
    pub max_density_deviation: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Collective-rotation invariance over `trials` Haar-random unitaries
/// (stream [`HAAR_STREAM`] of the configured seed).
pub fn invariance(cfg: &PipelineConfig, trials: usize) -> Result<InvarianceReport> {
    if trials == 0 {
        return Err(Error::Setting("invariance needs at least one trial".into()));
    }
    let run = run_pipeline(cfg)?;
    let psi = run.state;
    let rho = add_white_noise(&psi, cfg.noise)?;
    let z = outcome_distribution(&rho, &MeasurementSetting::uniform(Basis::Z, 6))?;
    let mut rng = substream(cfg.seed, HAAR_STREAM);
    let (mut overlap_dev, mut bin_dev, mut density_dev) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let u = haar_su2(&mut rng);
        let us = [u; 6];
        let rotated = psi.local_unitary(&us)?;
        overlap_dev = overlap_dev.max((1.0 - psi.overlap(&rotated)?.norm()).abs());

        let setting = MeasurementSetting::uniform(Basis::Custom(JonesMatrix::new(u)?), 6);
        let d = outcome_distribution(&rho, &setting)?;
        let dev = d
            .probs()
            .iter()
            .zip(z.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        bin_dev = bin_dev.max(dev);

        if cfg.noise > 0.0 {
            let r = rho.local_unitary(&us)?;
            let dev = (r.matrix() - rho.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            density_dev = density_dev.max(dev);
        }
    }
    let max_density_deviation = (cfg.noise > 0.0).then_some(density_dev);
    let passed = overlap_dev < INVARIANCE_TOL
        && bin_dev < INVARIANCE_TOL
        && max_density_deviation.is_none_or(|d| d < INVARIANCE_TOL);
    Ok(InvarianceReport {
        trials,
        seed: cfg.seed,
        max_overlap_deviation: overlap_dev,
        max_bin_deviation: bin_dev,
        max_density_deviation,
        tolerance: INVARIANCE_TOL,
        passed,
    })
}
