//! Entanglement witnesses for the six-qubit singlet.
//!
//! [`witness_max_overlap`] builds `λ𝟙 − |ψ⟩⟨ψ|`. [`reduce_witness`] keeps the
//! Pauli terms measurable with the three collective settings x⊗6, y⊗6, z⊗6
//! and chooses the identity offset so the result dominates a positive
//! multiple of the original witness. Every state it detects is then
//! detected by the original as well.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{Basis, CountsTable, OutcomeDistribution};
use crate::density::DensityOperator;
use crate::eigen::{max_eigenvalue, min_eigenvalue};
use crate::error::{Error, Result};
use crate::pauli::{pauli_decompose, Pauli, PauliSum, PauliWord};
use crate::qubit::QubitState;
use crate::rng::{substream, BOOTSTRAP_STREAM_BASE};

/// Reference coefficient list shipped with the crate.
pub const REFERENCE_TERMS: &str = include_str!("../data/reduced_witness_reference.txt");

const SEARCH_ITERATIONS: usize = 100;
const MIN_SCALE: f64 = 1e-9;
const SETTING_TYPES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    MaxOverlap,
    Reduced,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::MaxOverlap => "max_overlap",
            WitnessKind::Reduced => "reduced",
        })
    }
}

#[derive(Clone, Debug)]
pub struct WitnessOperator {
    kind: WitnessKind,
    form: PauliSum,
    dense: DMatrix<Complex64>,
    scale: f64,
}

impl WitnessOperator {
    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn form(&self) -> &PauliSum {
        &self.form
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.dense
    }

    pub fn n_qubits(&self) -> usize {
        self.form.n_qubits()
    }

    /// For a reduced witness, the `α` with `W_red ⪰ α·W_max`; 1 otherwise.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `tr(W)/2ⁿ`
    pub fn normalized_trace(&self) -> f64 {
        self.form.identity_coeff()
    }

    pub fn expectation(&self, state: &QubitState) -> Result<f64> {
        if state.dim() != self.dense.nrows() {
            return Err(Error::Dimension {
                expected: self.dense.nrows(),
                got: state.dim(),
            });
        }
        let col = state.to_column();
        Ok((col.adjoint() * &self.dense * &col)[(0, 0)].re)
    }

    pub fn expectation_mixed(&self, rho: &DensityOperator) -> Result<f64> {
        rho.expectation(&self.dense)
    }

    /// Letter types appearing in non-identity words, in x, y, z order.
    /// `None` if some word mixes letter types.
    pub fn settings_required(&self) -> Option<Vec<Pauli>> {
        let mut seen = [false; 3];
        for (w, _) in self.form.iter() {
            match w.letter_type() {
                None => return None,
                Some(Pauli::I) => {}
                Some(p) => seen[SETTING_TYPES.iter().position(|&t| t == p).expect("xyz")] = true,
            }
        }
        Some(
            SETTING_TYPES
                .iter()
                .zip(seen)
                .filter(|(_, s)| *s)
                .map(|(p, _)| *p)
                .collect(),
        )
    }
}

/// `λ𝟙 − |ψ⟩⟨ψ|` with `λ = overlap_bound`.
pub fn witness_max_overlap(target: &QubitState, overlap_bound: f64) -> Result<WitnessOperator> {
    if !(overlap_bound > 0.0 && overlap_bound < 1.0) {
        return Err(Error::OverlapBound(overlap_bound));
    }
    let dim = target.dim();
    let dense =
        DMatrix::identity(dim, dim) * Complex64::new(overlap_bound, 0.0) - target.projector();
    let form = pauli_decompose(&dense)?;
    Ok(WitnessOperator {
        kind: WitnessKind::MaxOverlap,
        form,
        dense,
        scale: 1.0,
    })
}

/// Non-identity, single-letter-type terms of `w`.
fn measurable_part(w: &WitnessOperator) -> PauliSum {
    w.form
        .filtered(|word, _| !word.is_identity() && !word.is_mixed())
}

fn offset_for_scale(w: &WitnessOperator, n_dense: &DMatrix<Complex64>, alpha: f64) -> Result<f64> {
    max_eigenvalue(&(&w.dense * Complex64::new(alpha, 0.0) - n_dense))
}

fn assemble_reduced(n: PauliSum, offset: f64, alpha: f64) -> WitnessOperator {
    let mut form = n;
    form.add(PauliWord::identity(form.n_qubits()), offset);
    let dense = form.to_matrix();
    WitnessOperator {
        kind: WitnessKind::Reduced,
        form,
        dense,
        scale: alpha,
    }
}

/// Reduced three-setting witness `c𝟙 + N`.
///
/// `N` holds the non-identity terms of `w` that use a single Pauli letter
/// type. The offset is `c(α) = λ_max(α·w − N)`, which makes
/// `c𝟙 + N − α·w` positive semidefinite. `c` is convex in `α`; the
/// returned witness uses the `α > 0` minimising it, i.e. the smallest trace.
pub fn reduce_witness(w: &WitnessOperator) -> Result<WitnessOperator> {
    let n = measurable_part(w);
    let n_dense = n.to_matrix();
    let c = |alpha: f64| offset_for_scale(w, &n_dense, alpha);

    let top = max_eigenvalue(&w.dense)?;
    if top <= 0.0 {
        return Err(Error::DegenerateReduction(top));
    }
    // c(α) ≥ α·λ_max(w) − λ_max(N), and the minimiser satisfies c(α*) ≤ c(0)
    let hi = ((c(0.0)? + max_eigenvalue(&n_dense)?) / top).max(MIN_SCALE);

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, hi);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = c(x1)?;
    let mut f2 = c(x2)?;
    for _ in 0..SEARCH_ITERATIONS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = c(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = c(x2)?;
        }
    }
    let alpha = 0.5 * (lo + hi);
    if alpha < MIN_SCALE {
        return Err(Error::DegenerateReduction(alpha));
    }
    let offset = c(alpha)?;
    log::debug!("reduced witness: scale {alpha:.12}, offset {offset:.12}");
    Ok(assemble_reduced(n, offset, alpha))
}

/// Reduced witness with a fixed scale: `c = λ_max(α·w − N)`.
pub fn reduce_witness_at_scale(w: &WitnessOperator, alpha: f64) -> Result<WitnessOperator> {
    if alpha.is_nan() || alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::DegenerateReduction(alpha));
    }
    let n = measurable_part(w);
    let offset = offset_for_scale(w, &n.to_matrix(), alpha)?;
    Ok(assemble_reduced(n, offset, alpha))
}

/// Smallest eigenvalue of `a − s·b`.
pub fn dominance_margin(a: &WitnessOperator, b: &WitnessOperator, s: f64) -> Result<f64> {
    if a.dense.nrows() != b.dense.nrows() {
        return Err(Error::Dimension {
            expected: a.dense.nrows(),
            got: b.dense.nrows(),
        });
    }
    min_eigenvalue(&(&a.dense - &b.dense * Complex64::new(s, 0.0)))
}

/// White-noise fraction `p` at which `(1−p)⟨ψ|W|ψ⟩ + p·tr(W)/2ⁿ = 0`.
pub fn noise_tolerance(w: &WitnessOperator, target: &QubitState) -> Result<f64> {
    let e = w.expectation(target)?;
    if e >= 0.0 {
        return Err(Error::NotAWitness(e));
    }
    let t = w.normalized_trace();
    Ok(-e / (t - e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EntanglementDetected,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
    /// Verdict multiplier `k`: detected iff `expectation + k·stderr < 0`.
    pub significance: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 2000,
            seed: 0,
            significance: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub expectation: f64,
    pub stderr: f64,
    pub n_settings: usize,
    pub verdict: Verdict,
    pub significance: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Per-setting linear functional: `Σ_o g[o]·f[o]` gives that setting's
/// contribution to the witness expectation.
struct SettingWeights {
    letter: Pauli,
    g: Vec<f64>,
}

fn setting_weights(w: &WitnessOperator) -> Result<Vec<SettingWeights>> {
    let types = w.settings_required().ok_or_else(|| {
        Error::Setting(format!(
            "{} witness has mixed-letter terms and cannot be evaluated from collective settings",
            w.kind
        ))
    })?;
    let dim = 1usize << w.n_qubits();
    Ok(types
        .into_iter()
        .map(|letter| {
            let mut g = vec![0.0; dim];
            for (word, coeff) in w.form.iter() {
                if word.is_identity() || word.letter_type() != Some(letter) {
                    continue;
                }
                let mask = word.support_mask();
                for (o, gi) in g.iter_mut().enumerate() {
                    let sign = if (o & mask).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    *gi += coeff * sign;
                }
            }
            SettingWeights { letter, g }
        })
        .collect())
}

fn basis_letter(b: &Basis) -> Option<Pauli> {
    match b {
        Basis::X => Some(Pauli::X),
        Basis::Y => Some(Pauli::Y),
        Basis::Z => Some(Pauli::Z),
        Basis::Custom(_) => None,
    }
}

fn dot(g: &[f64], f: &[f64]) -> f64 {
    g.iter().zip(f).map(|(a, b)| a * b).sum()
}

/// Finds the table measured with `letter` on every qubit.
fn table_for(tables: &[CountsTable], letter: Pauli, n: usize) -> Result<&CountsTable> {
    let t = tables
        .iter()
        .find(|t| t.setting().uniform_kind().as_ref().and_then(basis_letter) == Some(letter))
        .ok_or(Error::MissingSetting(letter.letter().to_ascii_lowercase()))?;
    if t.setting().n_qubits() != n {
        return Err(Error::Dimension {
            expected: n,
            got: t.setting().n_qubits(),
        });
    }
    Ok(t)
}

/// Multinomial resample of `n` events via conditional binomials.
fn multinomial<R: Rng>(n: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let Some(last) = probs.iter().rposition(|&p| p > 0.0) else {
        return out;
    };
    let mut remaining = n;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate().take(last) {
        if remaining == 0 {
            break;
        }
        if p > 0.0 {
            let q = (p / mass).clamp(0.0, 1.0);
            let k = Binomial::new(remaining, q)
                .expect("q in [0, 1]")
                .sample(rng);
            out[i] = k;
            remaining -= k;
        }
        mass -= p;
    }
    out[last] += remaining;
    out
}

/// Witness expectation from collective-setting counts, with a seeded
/// nonparametric bootstrap error bar (each setting resampled independently).
pub fn witness_expectation_from_counts(
    w: &WitnessOperator,
    tables: &[CountsTable],
    config: &BootstrapConfig,
) -> Result<WitnessReport> {
    if config.resamples < 2 {
        return Err(Error::Setting(format!(
            "bootstrap needs at least 2 resamples, got {}",
            config.resamples
        )));
    }
    let weights = setting_weights(w)?;
    let mut observed = Vec::with_capacity(weights.len());
    for sw in &weights {
        let t = table_for(tables, sw.letter, w.n_qubits())?;
        observed.push((t.total(), t.frequencies()?));
    }
    let constant = w.normalized_trace();
    let expectation = constant
        + weights
            .iter()
            .zip(&observed)
            .map(|(sw, (_, f))| dot(&sw.g, f))
            .sum::<f64>();

    let samples: Vec<f64> = (0..config.resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(config.seed, BOOTSTRAP_STREAM_BASE + b as u64);
            constant
                + weights
                    .iter()
                    .zip(&observed)
                    .map(|(sw, (total, f))| {
                        let k = multinomial(*total, f, &mut rng);
                        let inv = 1.0 / *total as f64;
                        sw.g.iter()
                            .zip(&k)
                            .map(|(g, &c)| g * c as f64 * inv)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
    let stderr = var.sqrt();

    let verdict = if expectation + config.significance * stderr < 0.0 {
        Verdict::EntanglementDetected
    } else {
        Verdict::Inconclusive
    };
    Ok(WitnessReport {
        expectation,
        stderr,
        n_settings: weights.len(),
        verdict,
        significance: config.significance,
        resamples: config.resamples,
        seed: config.seed,
    })
}

/// Noise-free counterpart of [`witness_expectation_from_counts`] on exact
/// outcome distributions.
pub fn witness_expectation_from_distributions(
    w: &WitnessOperator,
    dists: &[OutcomeDistribution],
) -> Result<f64> {
    let weights = setting_weights(w)?;
    let mut total = w.normalized_trace();
    for sw in &weights {
        let d = dists
            .iter()
            .find(|d| d.setting().uniform_kind().as_ref().and_then(basis_letter) == Some(sw.letter))
            .ok_or(Error::MissingSetting(
                sw.letter.letter().to_ascii_lowercase(),
            ))?;
        if d.probs().len() != sw.g.len() {
            return Err(Error::Dimension {
                expected: sw.g.len(),
                got: d.probs().len(),
            });
        }
        total += dot(&sw.g, d.probs());
    }
    Ok(total)
}

/// One `word numerator denominator` line of a reference term file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenTerm {
    pub word: PauliWord,
    pub numerator: i64,
    pub denominator: u64,
}

impl GoldenTerm {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Parses a reference term file. `#` starts a comment; blank lines are skipped.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenTerm>> {
    let mut out: Vec<GoldenTerm> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Golden { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [word, num, den] = fields[..] else {
            return Err(err(format!("expected 3 fields, got {}", fields.len())));
        };
        let word: PauliWord = word.parse().map_err(|e: Error| err(e.to_string()))?;
        let numerator: i64 = num
            .parse()
            .map_err(|_| err(format!("bad numerator {num:?}")))?;
        let denominator: u64 = den
            .parse()
            .map_err(|_| err(format!("bad denominator {den:?}")))?;
        if denominator == 0 {
            return Err(err("zero denominator".into()));
        }
        if let Some(first) = out.first() {
            if first.word.len() != word.len() {
                return Err(err(format!(
                    "word length {} differs from {}",
                    word.len(),
                    first.word.len()
                )));
            }
        }
        if out.iter().any(|t| t.word == word) {
            return Err(err(format!("duplicate word {word}")));
        }
        out.push(GoldenTerm {
            word,
            numerator,
            denominator,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermMismatch {
    pub word: String,
    pub computed: f64,
    pub reference: f64,
    /// Reference value as written, e.g. `-5/576`; `0` when absent.
    pub reference_exact: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldenDiff {
    pub compared: usize,
    pub matching: usize,
    pub mismatches: Vec<TermMismatch>,
}

impl GoldenDiff {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Mismatches where the reference is exactly the negated computed value.
    pub fn sign_flips(&self, tol: f64) -> usize {
        self.mismatches
            .iter()
            .filter(|m| m.computed.abs() > tol && (m.computed + m.reference).abs() <= tol)
            .count()
    }
}

/// Term-by-term comparison over the union of words.
pub fn diff_against_golden(w: &WitnessOperator, golden: &[GoldenTerm], tol: f64) -> GoldenDiff {
    let mut words: Vec<PauliWord> = w.form.iter().map(|(word, _)| word.clone()).collect();
    for t in golden {
        if !words.contains(&t.word) {
            words.push(t.word.clone());
        }
    }
    words.sort();
    let mut mismatches = Vec::new();
    for word in &words {
        let computed = w.form.coeff(word);
        let reference = golden.iter().find(|t| &t.word == word);
        let (value, exact) = match reference {
            Some(t) => (t.value(), format!("{}/{}", t.numerator, t.denominator)),
            None => (0.0, "0".to_string()),
        };
        if (computed - value).abs() > tol {
            mismatches.push(TermMismatch {
                word: word.to_string(),
                computed,
                reference: value,
                reference_exact: exact,
            });
        }
    }
    GoldenDiff {
        compared: words.len(),
        matching: words.len() - mismatches.len(),
        mismatches,
    }
}
