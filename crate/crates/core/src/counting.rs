//! Measurement settings, outcome distributions, multinomial sampling and the
//! correlation / fidelity estimators.
//!
//! Outcome bit 0 is the first eigenstate of each analyzer (H, D or L) and
//! bit 1 the orthogonal one (V, A or R). The first qubit is the most
//! significant bit, as in [`QubitState`].

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::optics::{waveplate, JonesMatrix, WaveplateKind};
use crate::qubit::{apply_single, bit_label, letter_ket, QubitState};
use crate::rng::substream;

const NEG_CLAMP: f64 = -1e-12;
const SUM_TOL: f64 = 1e-10;

/// Per-qubit analyzer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis {
    /// H/V
    Z,
    /// D/A
    X,
    /// L/R
    Y,
    /// Unitary applied before an H/V polarizing splitter; outcomes labelled H/V.
    Custom(JonesMatrix),
}

impl Basis {
    pub fn letters(&self) -> [char; 2] {
        match self {
            Basis::Z | Basis::Custom(_) => ['H', 'V'],
            Basis::X => ['D', 'A'],
            Basis::Y => ['L', 'R'],
        }
    }

    /// Rows are the conjugated eigenvectors, so `analyzer · ψ` gives outcome amplitudes.
    pub fn analyzer(&self) -> Matrix2<Complex64> {
        match self {
            Basis::Custom(u) => u.matrix(),
            named => {
                let [l0, l1] = named.letters();
                let e0 = letter_ket(l0).expect("basis letter");
                let e1 = letter_ket(l1).expect("basis letter");
                Matrix2::new(e0[0].conj(), e0[1].conj(), e1[0].conj(), e1[1].conj())
            }
        }
    }

    /// Analyzer with light passing a half-wave plate at `hwp`, then a
    /// quarter-wave plate at `qwp` (radians), then the H/V splitter.
    pub fn waveplates(hwp: f64, qwp: f64) -> Basis {
        let h = waveplate(WaveplateKind::Half, hwp);
        let q = waveplate(WaveplateKind::Quarter, qwp);
        Basis::Custom(q.then_after(&h))
    }

    fn tag(&self) -> char {
        match self {
            Basis::Z => 'z',
            Basis::X => 'x',
            Basis::Y => 'y',
            Basis::Custom(_) => 'u',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    bases: Vec<Basis>,
}

impl MeasurementSetting {
    pub fn new(bases: Vec<Basis>) -> Self {
        MeasurementSetting { bases }
    }

    pub fn uniform(basis: Basis, n: usize) -> Self {
        MeasurementSetting::new(vec![basis; n])
    }

    /// `zzzzzz`-style letter strings (one of z, x, y per qubit), or
    /// `angles:<hwp>,<qwp>` for identical wave-plate analyzers on all qubits.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("angles:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Setting(format!(
                    "expected angles:<hwp>,<qwp>, got {s:?}"
                )));
            }
            let parse = |p: &str| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Setting(format!("bad angle {p:?}")))
            };
            return Ok(MeasurementSetting::uniform(
                Basis::waveplates(parse(parts[0])?, parse(parts[1])?),
                n,
            ));
        }
        if s.chars().count() != n {
            return Err(Error::Setting(format!("{s:?} does not have {n} letters")));
        }
        let bases = s
            .chars()
            .map(|ch| match ch.to_ascii_lowercase() {
                'z' => Ok(Basis::Z),
                'x' => Ok(Basis::X),
                'y' => Ok(Basis::Y),
                _ => Err(Error::Setting(format!("unknown basis letter {ch:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurementSetting::new(bases))
    }

    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// The Pauli letter type if every qubit uses the same named basis.
    pub fn uniform_kind(&self) -> Option<Basis> {
        let first = *self.bases.first()?;
        if matches!(first, Basis::Custom(_)) || self.bases.iter().any(|b| *b != first) {
            return None;
        }
        Some(first)
    }

    pub fn label(&self, outcome: usize) -> String {
        let n = self.n_qubits();
        (0..n)
            .map(|q| {
                let bit = (outcome >> (n - 1 - q)) & 1;
                self.bases[q].letters()[bit]
            })
            .collect()
    }

    pub fn analyzers(&self) -> Vec<Matrix2<Complex64>> {
        self.bases.iter().map(Basis::analyzer).collect()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.tag())?;
        }
        Ok(())
    }
}

/// States whose computational-basis statistics can be read after local analyzers.
pub trait Measurable {
    fn n_qubits(&self) -> usize;
    /// Outcome probabilities after applying `analyzers` qubit by qubit.
    fn rotated_probabilities(&self, analyzers: &[Matrix2<Complex64>]) -> Result<Vec<f64>>;
}

impl Measurable for QubitState {
    fn n_qubits(&self) -> usize {
        QubitState::n_qubits(self)
    }

    fn rotated_probabilities(&self, analyzers: &[Matrix2<Complex64>]) -> Result<Vec<f64>> {
        let n = QubitState::n_qubits(self);
        let mut amps = self.amplitudes().to_vec();
        for (q, u) in analyzers.iter().enumerate() {
            apply_single(&mut amps, n, q, u);
        }
        Ok(amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

impl Measurable for DensityOperator {
    fn n_qubits(&self) -> usize {
        DensityOperator::n_qubits(self)
    }

    fn rotated_probabilities(&self, analyzers: &[Matrix2<Complex64>]) -> Result<Vec<f64>> {
        Ok(self.local_unitary(analyzers)?.diagonal())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    setting: MeasurementSetting,
}

impl OutcomeDistribution {
    /// Clamps dust above −1e-12 to zero and renormalizes; the sum must be 1 within 1e-10.
    pub fn new(mut probs: Vec<f64>, setting: MeasurementSetting) -> Result<Self> {
        let expected = 1usize << setting.n_qubits();
        if probs.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: probs.len(),
            });
        }
        for p in probs.iter_mut() {
            if *p < NEG_CLAMP {
                return Err(Error::Probability(*p));
            }
            *p = p.max(0.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized(sum));
        }
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(OutcomeDistribution { probs, setting })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn setting(&self) -> &MeasurementSetting {
        &self.setting
    }

    pub fn label(&self, outcome: usize) -> String {
        self.setting.label(outcome)
    }
}

pub fn outcome_distribution<S: Measurable>(
    state: &S,
    m: &MeasurementSetting,
) -> Result<OutcomeDistribution> {
    if state.n_qubits() != m.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: m.n_qubits(),
        });
    }
    let probs = state.rotated_probabilities(&m.analyzers())?;
    OutcomeDistribution::new(probs, m.clone())
}

fn parity(outcome: usize) -> f64 {
    if outcome.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `E = Σ_o (−1)^{weight(o)} P(o)`
pub fn correlation(d: &OutcomeDistribution) -> f64 {
    d.probs.iter().enumerate().map(|(o, p)| parity(o) * p).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountsTable {
    counts: Vec<u64>,
    setting: MeasurementSetting,
    seed: Option<u64>,
}

impl CountsTable {
    pub fn new(counts: Vec<u64>, setting: MeasurementSetting) -> Result<Self> {
        let expected = 1usize << setting.n_qubits();
        if counts.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: counts.len(),
            });
        }
        Ok(CountsTable {
            counts,
            setting,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn setting(&self) -> &MeasurementSetting {
        &self.setting
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn frequencies(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::ZeroCounts);
        }
        Ok(self
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect())
    }
}

/// Inverse-CDF categorical sampler.
pub(crate) struct Categorical {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Categorical {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Categorical {
            cumulative,
            last_positive,
        }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }

    pub(crate) fn histogram<R: Rng>(&self, n_events: u64, rng: &mut R) -> Vec<u64> {
        let mut counts = vec![0u64; self.cumulative.len()];
        for _ in 0..n_events {
            counts[self.draw(rng)] += 1;
        }
        counts
    }
}

/// Multinomial draw of `n_events` outcomes from `d`, reproducible from `seed`
/// (stream 0; see [`crate::rng`]).
pub fn sample_counts(d: &OutcomeDistribution, n_events: u64, seed: u64) -> CountsTable {
    sample_counts_stream(d, n_events, seed, 0)
}

pub fn sample_counts_stream(
    d: &OutcomeDistribution,
    n_events: u64,
    seed: u64,
    stream: u64,
) -> CountsTable {
    let mut rng = substream(seed, stream);
    let counts = Categorical::new(&d.probs).histogram(n_events, &mut rng);
    CountsTable {
        counts,
        setting: d.setting.clone(),
        seed: Some(seed),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub stderr: f64,
    pub total: u64,
    /// Zero standard error (|E| = 1 or a single event): the error bar carries no information.
    pub degenerate: bool,
}

/// Empirical parity correlation with `stderr = √((1 − E²)/N)`.
pub fn estimate_correlation(c: &CountsTable) -> Result<CorrelationEstimate> {
    let total = c.total();
    if total == 0 {
        return Err(Error::ZeroCounts);
    }
    let value: f64 = c
        .counts
        .iter()
        .enumerate()
        .map(|(o, &k)| parity(o) * k as f64)
        .sum::<f64>()
        / total as f64;
    let stderr = correlation_stderr(value, total);
    Ok(CorrelationEstimate {
        value,
        stderr,
        total,
        degenerate: stderr == 0.0 || total < 2,
    })
}

/// `√((1 − E²)/N)`
pub fn correlation_stderr(e: f64, total: u64) -> f64 {
    ((1.0 - e * e).max(0.0) / total as f64).sqrt()
}

/// Binomial standard error of each bin frequency.
pub fn bin_stderrs(c: &CountsTable) -> Vec<f64> {
    let total = c.total();
    if total == 0 {
        return vec![0.0; c.counts.len()];
    }
    c.counts
        .iter()
        .map(|&k| {
            let f = k as f64 / total as f64;
            (f * (1.0 - f) / total as f64).sqrt()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub fidelity: f64,
    pub stderr: f64,
}

/// Fidelity with the six-qubit singlet assuming white noise, from the three
/// collective correlations `(E, σ)` for x, y, z.
///
/// `v = −(Ex + Ey + Ez)/3`, `F = v + (1 − v)/64`. The error bars are
/// combined linearly (worst case), each weighted by `(1 − 1/64)/3`.
pub fn estimate_fidelity_white_noise(estimates: [(f64, f64); 3]) -> Result<FidelityEstimate> {
    for (e, _) in estimates {
        if e.is_nan() || e.abs() > 1.0 + SUM_TOL {
            return Err(Error::Correlation(e));
        }
    }
    let dim = 64.0;
    let v = -estimates.iter().map(|(e, _)| e).sum::<f64>() / 3.0;
    let weight = (1.0 - 1.0 / dim) / 3.0;
    Ok(FidelityEstimate {
        fidelity: v + (1.0 - v) / dim,
        stderr: weight * estimates.iter().map(|(_, s)| s.abs()).sum::<f64>(),
    })
}

pub fn label_all(setting: &MeasurementSetting) -> Vec<String> {
    (0..1usize << setting.n_qubits())
        .map(|o| setting.label(o))
        .collect()
}

/// H/V label helper for a bare index.
pub fn hv_label(outcome: usize, n: usize) -> String {
    bit_label(outcome, n, ['H', 'V'])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::add_white_noise;
    use crate::qubit::psi6_minus;

    fn zset() -> MeasurementSetting {
        MeasurementSetting::uniform(Basis::Z, 6)
    }

    #[test]
    fn singlet_z_histogram() {
        let d = outcome_distribution(&psi6_minus(), &zset()).unwrap();
        let p = d.probs();
        assert!((p[0b000111] - 0.25).abs() < 1e-12);
        assert!((p[0b111000] - 0.25).abs() < 1e-12);
        let mut n36 = 0;
        for (o, &v) in p.iter().enumerate() {
            if o == 0b000111 || o == 0b111000 {
                continue;
            }
            if o.count_ones() == 3 {
                assert!((v - 1.0 / 36.0).abs() < 1e-12);
                n36 += 1;
            } else {
                assert!(v.abs() < 1e-12);
            }
        }
        assert_eq!(n36, 18);
        assert!((correlation(&d) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_histogram_matches_z() {
        let psi = psi6_minus();
        let z = outcome_distribution(&psi, &zset()).unwrap();
        let x = outcome_distribution(&psi, &MeasurementSetting::uniform(Basis::X, 6)).unwrap();
        for (a, b) in z.probs().iter().zip(x.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(x.label(0b000111), "DDDAAA");
    }

    #[test]
    fn white_noise_correlation() {
        let rho = add_white_noise(&psi6_minus(), 0.121).unwrap();
        let d = outcome_distribution(&rho, &zset()).unwrap();
        assert!((correlation(&d) + 0.879).abs() < 1e-12);
    }

    #[test]
    fn uniform_distribution_has_zero_correlation() {
        let d = OutcomeDistribution::new(vec![1.0 / 64.0; 64], zset()).unwrap();
        assert!(correlation(&d).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        let mut p = vec![1.0 / 64.0; 64];
        p[0] -= 1e-13;
        p[1] += 1e-13;
        assert!(OutcomeDistribution::new(p.clone(), zset()).is_ok());
        p[0] = -0.1;
        assert!(OutcomeDistribution::new(p, zset()).is_err());
        assert!(OutcomeDistribution::new(vec![0.5; 4], zset()).is_err());
        assert!(
            outcome_distribution(&psi6_minus(), &MeasurementSetting::uniform(Basis::Z, 5)).is_err()
        );
    }

    #[test]
    fn sampling_basics() {
        let d = outcome_distribution(&psi6_minus(), &zset()).unwrap();
        let empty = sample_counts(&d, 0, 1);
        assert_eq!(empty.total(), 0);
        let a = sample_counts(&d, 500, 42);
        let b = sample_counts(&d, 500, 42);
        assert_eq!(a, b);
        assert_eq!(a.total(), 500);
        assert_ne!(a, sample_counts(&d, 500, 43));
        // only odd-parity support is ever drawn
        assert!(a
            .counts()
            .iter()
            .enumerate()
            .all(|(o, &k)| k == 0 || o.count_ones() == 3));
    }

    #[test]
    fn large_sample_frequency() {
        let d = outcome_distribution(&psi6_minus(), &zset()).unwrap();
        let t = sample_counts(&d, 1_000_000, 7);
        let f = t.counts()[0b000111] as f64 / 1e6;
        assert!((f - 0.25).abs() < 0.002, "{f}");
    }

    #[test]
    fn correlation_estimates() {
        let exact = CountsTable::new(
            outcome_distribution(&psi6_minus(), &zset())
                .unwrap()
                .probs()
                .iter()
                .map(|p| (p * 36.0).round() as u64)
                .collect(),
            zset(),
        )
        .unwrap();
        let est = estimate_correlation(&exact).unwrap();
        assert!((est.value + 1.0).abs() < 1e-15);
        assert_eq!(est.stderr, 0.0);

        let mut one = vec![0u64; 64];
        one[0b000111] = 1;
        let single = estimate_correlation(&CountsTable::new(one, zset()).unwrap()).unwrap();
        assert_eq!(single.value.abs(), 1.0);
        assert!(single.degenerate);

        let zero = CountsTable::new(vec![0; 64], zset()).unwrap();
        assert_eq!(estimate_correlation(&zero), Err(Error::ZeroCounts));
    }

    #[test]
    fn fidelity_estimator() {
        let f = estimate_fidelity_white_noise([(-0.879, 0.045), (-0.876, 0.050), (-0.868, 0.043)])
            .unwrap();
        assert!((f.fidelity - 0.876).abs() < 5e-4);
        assert!((f.stderr - 0.045).abs() < 5e-4);
        let one = estimate_fidelity_white_noise([(-1.0, 0.0); 3]).unwrap();
        assert!((one.fidelity - 1.0).abs() < 1e-15);
        let mixed = estimate_fidelity_white_noise([(0.0, 0.0); 3]).unwrap();
        assert!((mixed.fidelity - 1.0 / 64.0).abs() < 1e-15);
        assert!(estimate_fidelity_white_noise([(-1.2, 0.0), (0.0, 0.0), (0.0, 0.0)]).is_err());
    }

    #[test]
    fn setting_parsing() {
        assert_eq!(MeasurementSetting::parse("zzzzzz", 6).unwrap(), zset());
        assert_eq!(
            MeasurementSetting::parse("xxxxxx", 6)
                .unwrap()
                .uniform_kind(),
            Some(Basis::X)
        );
        assert_eq!(
            MeasurementSetting::parse("zxzxzx", 6)
                .unwrap()
                .uniform_kind(),
            None
        );
        assert!(MeasurementSetting::parse("zzzz", 6).is_err());
        assert!(MeasurementSetting::parse("zzzzzq", 6).is_err());
        assert!(MeasurementSetting::parse("angles:0.3", 6).is_err());
        let custom = MeasurementSetting::parse("angles:0.3926990816987241,0", 6).unwrap();
        assert_eq!(custom.to_string(), "uuuuuu");
    }

    #[test]
    fn waveplate_analyzer_reproduces_diagonal_basis() {
        // HWP at π/8 (QWP at 0) sends D to H, so the H/V statistics equal D/A statistics
        let psi = QubitState::product("DAD").unwrap();
        let s = MeasurementSetting::uniform(Basis::waveplates(std::f64::consts::PI / 8.0, 0.0), 3);
        let d = outcome_distribution(&psi, &s).unwrap();
        assert!((d.probs()[0b010] - 1.0).abs() < 1e-12);
    }
}
