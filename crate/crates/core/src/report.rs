//! CSV and JSON views of the run reports, and the counts-file reader.
//!
//! Histogram CSV columns: `outcome_label,probability,count,stderr`. `count`
//! and `stderr` are empty when nothing was sampled. The same file is
//! accepted back by [`read_counts_csv`]; only `outcome_label` and `count`
//! are required there.

use std::io;

use serde_json::{json, Value};

use crate::counting::{bin_stderrs, Basis, CountsTable, MeasurementSetting, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::pipeline::{
    HistogramReport, InvarianceReport, PipelineConfig, PipelineRun, ProjectionReport, SimulatedRun,
    WitnessAnalysis,
};
use crate::qubit::{bit_label, QubitState};
use crate::witness::{GoldenDiff, WitnessReport};

const AMPLITUDE_CUTOFF: f64 = 1e-12;

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Csv(e.to_string())
}

pub fn write_histogram_csv<W: io::Write>(
    out: W,
    theory: &OutcomeDistribution,
    counts: Option<&CountsTable>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outcome_label", "probability", "count", "stderr"])
        .map_err(csv_err)?;
    let stderrs = counts.map(bin_stderrs);
    for (o, p) in theory.probs().iter().enumerate() {
        let (count, stderr) = match (counts, &stderrs) {
            (Some(c), Some(s)) => (c.counts()[o].to_string(), format!("{:.6}", s[o])),
            _ => (String::new(), String::new()),
        };
        w.write_record([theory.label(o), format!("{p:.12}"), count, stderr])
            .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

fn letter_basis(ch: char) -> Option<(Basis, usize)> {
    match ch.to_ascii_uppercase() {
        'H' => Some((Basis::Z, 0)),
        'V' => Some((Basis::Z, 1)),
        'D' => Some((Basis::X, 0)),
        'A' => Some((Basis::X, 1)),
        'L' => Some((Basis::Y, 0)),
        'R' => Some((Basis::Y, 1)),
        _ => None,
    }
}

/// Reads a counts file. The setting is inferred from the label letters
/// (H/V z, D/A x, L/R y per position); absent outcomes count as zero.
pub fn read_counts_csv<R: io::Read>(input: R) -> Result<CountsTable> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Csv(format!("missing column {name:?}")))
    };
    let (label_col, count_col) = (col("outcome_label")?, col("count")?);

    let mut bases: Option<Vec<Basis>> = None;
    let mut entries: Vec<(usize, u64)> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 2;
        let label = rec.get(label_col).unwrap_or("").trim();
        let n = label.chars().count();
        if n == 0 || n > crate::qubit::MAX_QUBITS {
            return Err(Error::Csv(format!(
                "row {row}: bad outcome label {label:?}"
            )));
        }
        let mut row_bases = Vec::with_capacity(n);
        let mut outcome = 0usize;
        for ch in label.chars() {
            let (b, bit) = letter_basis(ch)
                .ok_or_else(|| Error::Csv(format!("row {row}: bad letter {ch:?}")))?;
            row_bases.push(b);
            outcome = (outcome << 1) | bit;
        }
        match &bases {
            None => bases = Some(row_bases),
            Some(b) if *b != row_bases => {
                return Err(Error::Csv(format!(
                    "row {row}: label {label:?} uses a different setting"
                )));
            }
            _ => {}
        }
        let text = rec.get(count_col).unwrap_or("").trim();
        let count: u64 = text
            .parse()
            .map_err(|_| Error::Csv(format!("row {row}: bad count {text:?}")))?;
        if entries.iter().any(|(o, _)| *o == outcome) {
            return Err(Error::Csv(format!(
                "row {row}: duplicate outcome {label:?}"
            )));
        }
        entries.push((outcome, count));
    }
    let bases = bases.ok_or_else(|| Error::Csv("no rows".into()))?;
    let mut counts = vec![0u64; 1 << bases.len()];
    for (o, c) in entries {
        counts[o] = c;
    }
    CountsTable::new(counts, MeasurementSetting::new(bases))
}

/// Nonzero amplitudes as `label,re,im` rows.
pub fn write_amplitudes_csv<W: io::Write>(out: W, state: &QubitState) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outcome_label", "re", "im"])
        .map_err(csv_err)?;
    for (label, a) in nonzero_amplitudes(state) {
        w.write_record([label, format!("{:.12}", a.re), format!("{:.12}", a.im)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Pauli terms as `word,coefficient` rows.
pub fn write_terms_csv<W: io::Write>(out: W, form: &PauliSum) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "coefficient"]).map_err(csv_err)?;
    for (word, c) in form.iter() {
        w.write_record([word.to_string(), format!("{c:.12}")])
            .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// One header row and one value row.
pub fn write_invariance_csv<W: io::Write>(out: W, r: &InvarianceReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trials",
        "seed",
        "max_overlap_deviation",
        "max_bin_deviation",
        "max_density_deviation",
        "passed",
    ])
    .map_err(csv_err)?;
    w.write_record([
        r.trials.to_string(),
        r.seed.to_string(),
        format!("{:e}", r.max_overlap_deviation),
        format!("{:e}", r.max_bin_deviation),
        r.max_density_deviation
            .map(|d| format!("{d:e}"))
            .unwrap_or_default(),
        r.passed.to_string(),
    ])
    .map_err(csv_err)?;
    w.flush().map_err(csv_err)
}

fn nonzero_amplitudes(state: &QubitState) -> Vec<(String, num_complex::Complex64)> {
    let n = state.n_qubits();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > AMPLITUDE_CUTOFF)
        .map(|(i, a)| (bit_label(i, n, ['H', 'V']), *a))
        .collect()
}

pub fn amplitudes_json(state: &QubitState) -> Value {
    Value::Array(
        nonzero_amplitudes(state)
            .into_iter()
            .map(|(label, a)| json!({ "label": label, "re": a.re, "im": a.im }))
            .collect(),
    )
}

fn modes_json(state_modes: &[crate::fock::Spatial]) -> Value {
    Value::Array(state_modes.iter().map(|m| json!(m.to_string())).collect())
}

pub fn config_json(cfg: &PipelineConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

pub fn pipeline_json(cfg: &PipelineConfig, run: &PipelineRun) -> Value {
    json!({
        "config": config_json(cfg),
        "modes": modes_json(run.state.modes()),
        "success_probability": run.success_probability,
        "singlet_fidelity": run.singlet_fidelity,
        "amplitudes": amplitudes_json(&run.state),
    })
}

fn distribution_json(d: &OutcomeDistribution, counts: Option<&CountsTable>) -> Value {
    let stderrs = counts.map(bin_stderrs);
    Value::Array(
        d.probs()
            .iter()
            .enumerate()
            .map(|(o, p)| {
                let mut row = json!({ "outcome_label": d.label(o), "probability": p });
                if let (Some(c), Some(s)) = (counts, &stderrs) {
                    row["count"] = json!(c.counts()[o]);
                    row["stderr"] = json!(s[o]);
                }
                row
            })
            .collect(),
    )
}

pub fn histogram_json(cfg: &PipelineConfig, r: &HistogramReport) -> Value {
    json!({
        "config": config_json(cfg),
        "setting": r.theory.setting().to_string(),
        "theory_correlation": r.theory_correlation,
        "estimate": r.estimate,
        "bins": distribution_json(&r.theory, r.counts.as_ref()),
    })
}

pub fn projection_json(cfg: &PipelineConfig, r: &ProjectionReport) -> Value {
    json!({
        "config": config_json(cfg),
        "mode": r.mode.to_string(),
        "bra": r.bra.to_string(),
        "probability": r.probability,
        "reference_fidelity": r.reference_fidelity,
        "amplitudes": r.state.as_ref().map(amplitudes_json),
        "bins": distribution_json(&r.distribution, None),
    })
}

pub fn simulated_run_json(run: &SimulatedRun) -> Value {
    let settings: Vec<Value> = run
        .tables
        .iter()
        .zip(&run.correlations)
        .map(|(t, e)| json!({ "setting": t.setting().to_string(), "total": t.total(), "correlation": e }))
        .collect();
    json!({ "settings": settings, "fidelity": run.fidelity })
}

pub fn witness_json(
    cfg: &PipelineConfig,
    a: &WitnessAnalysis,
    counts: Option<&WitnessReport>,
    golden: Option<&GoldenDiff>,
) -> Value {
    json!({
        "config": config_json(cfg),
        "max_overlap": a.max_overlap_figures,
        "reduced": a.reduced_figures,
        "reduced_scale": a.reduced.scale(),
        "reduced_terms": a.reduced.form().len(),
        "counts_estimate": counts,
        "reference_diff": golden,
    })
}

pub fn invariance_json(r: &InvarianceReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}
